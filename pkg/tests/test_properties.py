"""Structural invariants of the engines, mostly hypothesis-driven.

The large counted suites required for sign-off live in
test_acceptance.py; these are the fast, shrinkable versions.
"""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dynindex import (
    AxiomTest,
    Bilateral,
    ComparisonSpec,
    Dataset,
    EngineSpec,
    FullHistory,
    LehrUnitValue,
    ScenarioParams,
    evaluate,
    generate_scenario,
    geks_index,
    gk_index,
    guv_index,
    mgk_index,
    rqp_index,
    tornqvist_index,
    wgm_index,
)
from helpers import random_market, relabeled, scaled, swapped

BILATERAL = ComparisonSpec(0, 1, Bilateral())


def _two_period_datasets():
    item_pool = [f"i{k}" for k in range(5)]
    value = st.floats(min_value=0.1, max_value=40.0, allow_nan=False)
    observation = st.tuples(value, value)
    items = st.dictionaries(st.sampled_from(item_pool), observation, min_size=1)
    return st.tuples(items, items).map(lambda p: Dataset.build({0: p[0], 1: p[1]}))


@given(_two_period_datasets())
@settings(max_examples=150, deadline=None)
def test_time_reversal_unit_value_engine(ds):
    forward = mgk_index(ds, BILATERAL).value
    backward = mgk_index(swapped(ds), BILATERAL).value
    assert forward * backward == pytest.approx(1.0, abs=1e-10)


@given(_two_period_datasets())
@settings(max_examples=150, deadline=None)
def test_time_reversal_geometric_engine(ds):
    forward = wgm_index(ds, BILATERAL).value
    backward = wgm_index(swapped(ds), BILATERAL).value
    assert forward * backward == pytest.approx(1.0, abs=1e-10)


@given(_two_period_datasets())
@settings(max_examples=100, deadline=None)
def test_value_ratio_decomposition(ds):
    result = mgk_index(ds, BILATERAL)
    ratio, quantity = result.decomposition
    assert result.value * quantity == pytest.approx(ratio, rel=1e-12)
    assert ratio == pytest.approx(ds.value_ratio(0, 1), rel=1e-15)


@given(_two_period_datasets(), st.floats(min_value=0.01, max_value=100.0, allow_nan=False))
@settings(max_examples=100, deadline=None)
def test_scale_equivariance_in_prices(ds, lam):
    base = mgk_index(ds, BILATERAL).value
    rescaled = mgk_index(scaled(ds, price_factor=lam), BILATERAL).value
    assert rescaled == pytest.approx(base, rel=1e-10)


@given(_two_period_datasets(), st.floats(min_value=0.01, max_value=100.0, allow_nan=False))
@settings(max_examples=100, deadline=None)
def test_scale_equivariance_in_quantities(ds, lam):
    base = mgk_index(ds, BILATERAL).value
    rescaled = mgk_index(scaled(ds, quantity_factor=lam), BILATERAL).value
    assert rescaled == pytest.approx(base, rel=1e-10)


@given(_two_period_datasets(), st.floats(min_value=0.0, max_value=1.0, allow_nan=False))
@settings(max_examples=100, deadline=None)
def test_rqp_interpolates(ds, alpha):
    result = rqp_index(ds, BILATERAL, alpha)
    low = min(result.components["rq"], result.components["guv"])
    high = max(result.components["rq"], result.components["guv"])
    assert low * (1 - 1e-12) <= result.value <= high * (1 + 1e-12)


class TestBoundSandwich:
    def test_upper_bound_with_unit_value_prices(self):
        # declining persistent prices put the unit-value reference price
        # between the two observations, which caps the index at one
        for seed in range(50):
            scenario = generate_scenario(
                AxiomTest.T3_UPPER_BOUND, seed, ScenarioParams(n_periods=2)
            )
            value = guv_index(scenario.dataset, scenario.spec, LehrUnitValue()).value
            assert math.log(value) <= 1e-9

    def test_lower_bound_with_unit_value_prices(self):
        for seed in range(50):
            scenario = generate_scenario(
                AxiomTest.T4_LOWER_BOUND, seed, ScenarioParams(n_periods=2)
            )
            value = guv_index(scenario.dataset, scenario.spec, LehrUnitValue()).value
            assert math.log(value) >= -1e-9


class TestFixedBasket:
    def test_value_family_returns_value_ratio(self):
        for seed in range(50):
            scenario = generate_scenario(
                AxiomTest.T2_FIXED_BASKET, seed, ScenarioParams(n_periods=2)
            )
            ds = scenario.dataset
            ratio = ds.value_ratio(0, 1)
            assert mgk_index(ds, scenario.spec).value == pytest.approx(ratio, rel=1e-12)
            assert gk_index(ds, scenario.spec).value == pytest.approx(ratio, rel=1e-9)


class TestRelabeling:
    @pytest.mark.parametrize(
        "engine",
        [
            EngineSpec("mgk"),
            EngineSpec("gk"),
            EngineSpec("wgm"),
            EngineSpec("tpd"),
            EngineSpec("geks"),
            EngineSpec("rq"),
            EngineSpec("rqp"),
        ],
    )
    def test_engines_ignore_item_names(self, engine):
        for seed in (0, 1, 2):
            ds = random_market(seed, periods=3, items=6, churn=0.3)
            spec = ComparisonSpec(0, 2, FullHistory())
            assert evaluate(relabeled(ds), spec, engine).value == evaluate(ds, spec, engine).value


class TestGeksDeterminism:
    def test_repeated_evaluation_identical(self):
        ds = random_market(5, periods=4, items=8, churn=0.25)
        spec = ComparisonSpec(0, 3, FullHistory())
        first = geks_index(ds, spec)
        second = geks_index(ds, spec)
        assert first.value == second.value
        assert dict(first.series) == dict(second.series)


class TestTornqvistSymmetry:
    def test_reference_prices_cancel(self):
        # any constant reference price map gives the same weighted mean
        from dynindex import CustomPrices, TornqvistWeights

        ds = random_market(8, periods=2, items=6, churn=0.0)
        torn = tornqvist_index(ds, BILATERAL).value
        custom = wgm_index(
            ds,
            BILATERAL,
            TornqvistWeights(),
            CustomPrices({i: 17.0 for i in ds.universe(0)}),
        ).value
        assert custom == pytest.approx(torn, rel=1e-12)
