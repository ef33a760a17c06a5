"""Index engines for dynamic item universes.

Implements the value-ratio-deflating family (GK, MGK, generalised unit
value), the weighted-geometric-mean family (Tornqvist, time-product-
dummy), GEKS chaining over a bilateral engine, the reference-quantity
index with imputation, its geometric mixture with a unit-value index,
and the classical fixed-universe indices.

All engines are pure functions of (dataset, comparison spec, options)
and safe to evaluate concurrently over shared datasets. Sums use
``math.fsum`` and products go through log space, so results do not
depend on item iteration order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .core import (
    Bilateral,
    ComparisonSpec,
    Dataset,
    InvalidComparisonError,
    ItemId,
    NumericalError,
)
from .references import (
    ArithmeticMeanQuantity,
    CustomPrices,
    DeflatedUnitValue,
    FixedPointConfig,
    FixedPointReport,
    LehrUnitValue,
    ReferencePriceScheme,
    ReferenceQuantityScheme,
    SchemeError,
    TPDGeometric,
    reference_prices,
    solve_fixed_point,
)


@dataclass(frozen=True)
class IndexResult:
    """One computed index value plus whatever context the engine produced.

    decomposition, when present, is (value ratio, quantity-index divisor)
    with value * divisor = value ratio. series carries per-period values
    for multilateral engines, keyed by period and normalized to 1 at the
    base. components carries sub-index values for composite engines.
    """

    value: float
    diagnostics: FixedPointReport | None = None
    decomposition: tuple[float, float] | None = None
    series: Mapping[int, float] | None = None
    components: Mapping[str, float] | None = None

    def __post_init__(self) -> None:
        if self.value <= 0 or not math.isfinite(self.value):
            raise NumericalError(f"index value {self.value!r} is not positive and finite")


def _quantity_index(
    dataset: Dataset, base: int, current: int, prices: Mapping[ItemId, float]
) -> float:
    numerator = math.fsum(
        prices[i] * obs.quantity for i, obs in dataset.period_data(current).items.items()
    )
    denominator = math.fsum(
        prices[i] * obs.quantity for i, obs in dataset.period_data(base).items.items()
    )
    if denominator <= 0 or numerator <= 0:
        raise NumericalError("reference-price quantity index is not positive")
    return numerator / denominator


# ---------------------------------------------------------------------------
# Value-ratio-deflating family: GUV, MGK, GK


def guv_index(
    dataset: Dataset,
    spec: ComparisonSpec,
    reference_price: ReferencePriceScheme | None = None,
    config: FixedPointConfig | None = None,
) -> IndexResult:
    """Generalised unit value index: value ratio over a reference-price quantity index.

    Index-free schemes evaluate directly; schemes that deflate by the
    index itself are solved jointly through the fixed-point solver.
    """
    scheme = reference_price if reference_price is not None else LehrUnitValue()
    if scheme.needs_index:
        return _solve_deflating(dataset, spec, scheme, config)
    periods = spec.reference_periods(dataset)
    items = dataset.universe(spec.base) | dataset.universe(spec.current)
    prices = reference_prices(dataset, scheme, items, periods, spec.base, spec.current)
    value_ratio = dataset.value_ratio(spec.base, spec.current)
    quantity = _quantity_index(dataset, spec.base, spec.current, prices)
    return IndexResult(value_ratio / quantity, decomposition=(value_ratio, quantity))


def mgk_index(dataset: Dataset, spec: ComparisonSpec) -> IndexResult:
    """Modified GK index: unit-value reference prices, no fixed point."""
    return guv_index(dataset, spec, LehrUnitValue())


def gk_index(
    dataset: Dataset, spec: ComparisonSpec, config: FixedPointConfig | None = None
) -> IndexResult:
    """GK index: jointly solved index-deflated unit-value reference prices."""
    return guv_index(dataset, spec, DeflatedUnitValue(), config)


@dataclass(frozen=True)
class _DeflatingEquations:
    """Coupled maps for the value-ratio family with an index-dependent scheme."""

    dataset: Dataset
    spec: ComparisonSpec
    scheme: ReferencePriceScheme
    periods: tuple[int, ...]
    items: frozenset[ItemId]

    def prices_from_index(self, index_series: Mapping[int, float]) -> dict[ItemId, float]:
        return reference_prices(
            self.dataset, self.scheme, self.items, self.periods,
            self.spec.base, self.spec.current, index_series,
        )

    def index_from_prices(self, prices: Mapping[ItemId, float]) -> dict[int, float]:
        base = self.spec.base
        return {
            r: self.dataset.value_ratio(base, r) / _quantity_index(self.dataset, base, r, prices)
            if r != base
            else 1.0
            for r in self.periods
        }


def _solve_deflating(
    dataset: Dataset,
    spec: ComparisonSpec,
    scheme: ReferencePriceScheme,
    config: FixedPointConfig | None,
) -> IndexResult:
    periods = spec.reference_periods(dataset)
    items = frozenset().union(*(dataset.universe(r) for r in periods))
    equations = _DeflatingEquations(dataset, spec, scheme, periods, items)
    series, _prices, report = solve_fixed_point(dataset, spec, equations, config)
    value = series[spec.current]
    value_ratio = dataset.value_ratio(spec.base, spec.current)
    return IndexResult(
        value,
        diagnostics=report,
        decomposition=(value_ratio, value_ratio / value),
        series=dict(series),
    )


# ---------------------------------------------------------------------------
# Weighted geometric mean family: WGM, Tornqvist, TPD


def _expenditure_shares(dataset: Dataset, period: int) -> dict[ItemId, float]:
    total = dataset.period_data(period).total_expenditure()
    return {i: obs.expenditure / total for i, obs in dataset.period_data(period).items.items()}


class ExpenditureShare:
    """Per-period expenditure shares; defined in any universe."""

    def weights_pair(self, dataset, base, current):
        return _expenditure_shares(dataset, base), _expenditure_shares(dataset, current)


class TornqvistWeights:
    """Symmetric mean of the two periods' expenditure shares; fixed universe only."""

    def weights_pair(self, dataset, base, current):
        u0 = dataset.universe(base)
        ut = dataset.universe(current)
        if u0 != ut:
            raise SchemeError("symmetric weights require a fixed item universe")
        w0 = _expenditure_shares(dataset, base)
        wt = _expenditure_shares(dataset, current)
        shared = {i: 0.5 * (w0[i] + wt[i]) for i in u0}
        return shared, shared


@dataclass(frozen=True)
class CustomWeights:
    """Externally supplied per-period weights; each period must sum to one."""

    base_weights: Mapping[ItemId, float]
    current_weights: Mapping[ItemId, float]

    def weights_pair(self, dataset, base, current):
        for period, weights in ((base, self.base_weights), (current, self.current_weights)):
            universe = dataset.universe(period)
            if set(weights) != set(universe):
                raise SchemeError(f"custom weights do not cover the period {period} universe")
            total = math.fsum(weights.values())
            if abs(total - 1.0) > 1e-9:
                raise SchemeError(f"custom weights for period {period} sum to {total!r}")
        return dict(self.base_weights), dict(self.current_weights)


def _wgm_value(
    dataset: Dataset,
    base: int,
    current: int,
    prices: Mapping[ItemId, float],
    base_weights: Mapping[ItemId, float],
    current_weights: Mapping[ItemId, float],
) -> float:
    log_terms = [
        w * (math.log(dataset.observation(current, i).price) - math.log(prices[i]))
        for i, w in current_weights.items()
    ]
    log_terms.extend(
        -w * (math.log(dataset.observation(base, i).price) - math.log(prices[i]))
        for i, w in base_weights.items()
    )
    return math.exp(math.fsum(log_terms))


def wgm_index(
    dataset: Dataset,
    spec: ComparisonSpec,
    weights: object | None = None,
    reference_price: ReferencePriceScheme | None = None,
    config: FixedPointConfig | None = None,
) -> IndexResult:
    """Ratio of weighted geometric means of price-to-reference-price relatives."""
    weight_scheme = weights if weights is not None else ExpenditureShare()
    scheme = reference_price if reference_price is not None else LehrUnitValue()
    if scheme.needs_index:
        return _solve_wgm(dataset, spec, weight_scheme, scheme, config)
    periods = spec.reference_periods(dataset)
    items = dataset.universe(spec.base) | dataset.universe(spec.current)
    prices = reference_prices(dataset, scheme, items, periods, spec.base, spec.current)
    w0, wt = weight_scheme.weights_pair(dataset, spec.base, spec.current)
    return IndexResult(_wgm_value(dataset, spec.base, spec.current, prices, w0, wt))


def tornqvist_index(dataset: Dataset, spec: ComparisonSpec) -> IndexResult:
    """Tornqvist index: symmetric expenditure-share weights on a fixed universe.

    Reference prices cancel between numerator and denominator, so the
    result is the weighted geometric mean of the price relatives.
    """
    return wgm_index(dataset, spec, TornqvistWeights(), LehrUnitValue())


@dataclass(frozen=True)
class _WgmEquations:
    dataset: Dataset
    spec: ComparisonSpec
    scheme: ReferencePriceScheme
    weight_scheme: object
    periods: tuple[int, ...]
    items: frozenset[ItemId]

    def prices_from_index(self, index_series: Mapping[int, float]) -> dict[ItemId, float]:
        return reference_prices(
            self.dataset, self.scheme, self.items, self.periods,
            self.spec.base, self.spec.current, index_series,
        )

    def index_from_prices(self, prices: Mapping[ItemId, float]) -> dict[int, float]:
        base = self.spec.base
        values = {}
        for r in self.periods:
            if r == base:
                values[r] = 1.0
                continue
            w0, wr = self.weight_scheme.weights_pair(self.dataset, base, r)
            values[r] = _wgm_value(self.dataset, base, r, prices, w0, wr)
        return values


def _solve_wgm(
    dataset: Dataset,
    spec: ComparisonSpec,
    weight_scheme: object,
    scheme: ReferencePriceScheme,
    config: FixedPointConfig | None,
) -> IndexResult:
    periods = spec.reference_periods(dataset)
    items = frozenset().union(*(dataset.universe(r) for r in periods))
    equations = _WgmEquations(dataset, spec, scheme, weight_scheme, periods, items)
    series, _prices, report = solve_fixed_point(dataset, spec, equations, config)
    return IndexResult(series[spec.current], diagnostics=report, series=dict(series))


def tpd_index(
    dataset: Dataset, spec: ComparisonSpec, config: FixedPointConfig | None = None
) -> IndexResult:
    """Time-product-dummy index: share-weighted geometric reference prices,
    deflated by the index series and solved jointly with it."""
    return wgm_index(dataset, spec, ExpenditureShare(), TPDGeometric(), config)


# ---------------------------------------------------------------------------
# GEKS


def geks_index(
    dataset: Dataset, spec: ComparisonSpec, inner: "EngineSpec | None" = None
) -> IndexResult:
    """GEKS index: geometric mean of chained bilateral comparisons.

    Each series entry uses the reference window ending at its own period
    (the disseminated convention), so entries are the values that would
    have been published at their own time; the headline value is the one
    for the current period. Bilateral legs are computed once per
    unordered pair and inverted for the reverse direction, which keeps
    the chaining exactly time-reversal consistent.
    """
    inner_spec = inner if inner is not None else EngineSpec("mgk")
    _require_time_reversible(inner_spec)
    cache: dict[tuple[int, int], float] = {}

    def bilateral(s: int, r: int) -> float:
        if s == r:
            return 1.0
        if (s, r) in cache:
            return cache[(s, r)]
        if s < r:
            value = evaluate(dataset, ComparisonSpec(s, r, Bilateral()), inner_spec).value
        else:
            value = 1.0 / bilateral(r, s)
        cache[(s, r)] = value
        return value

    def disseminated(r: int) -> float:
        window = spec.policy.reference_periods(dataset, spec.base, r)
        logs = [
            math.log(bilateral(spec.base, s)) + math.log(bilateral(s, r)) for s in window
        ]
        return math.exp(math.fsum(logs) / len(window))

    series = {spec.base: 1.0}
    for r in spec.reference_periods(dataset):
        if r > spec.base:
            series[r] = disseminated(r)
    return IndexResult(series[spec.current], series=series)


# ---------------------------------------------------------------------------
# Reference-quantity family: RQ, RQP


@dataclass(frozen=True)
class ImputationPolicy:
    """Imputed prices for items missing from one of the compared periods.

    Birth items get an imputed base price of birth_markup times their
    current price; death items get an imputed current price of
    death_markup times their base price. Markups below one are rejected:
    they would invert the intended direction of the imputation. Custom
    per-item prices override the markups.
    """

    birth_markup: float = 1.05
    death_markup: float = 1.05
    custom_birth_prices: Mapping[ItemId, float] | None = None
    custom_death_prices: Mapping[ItemId, float] | None = None

    def __post_init__(self) -> None:
        if self.birth_markup < 1 or self.death_markup < 1:
            raise ValueError("imputation markups must be at least 1")

    def base_price_for_birth(self, item: ItemId, current_price: float) -> float:
        if self.custom_birth_prices is not None and item in self.custom_birth_prices:
            return self.custom_birth_prices[item]
        return self.birth_markup * current_price

    def current_price_for_death(self, item: ItemId, base_price: float) -> float:
        if self.custom_death_prices is not None and item in self.custom_death_prices:
            return self.custom_death_prices[item]
        return self.death_markup * base_price


def rq_index(
    dataset: Dataset,
    spec: ComparisonSpec,
    quantities: ReferenceQuantityScheme | None = None,
    imputation: ImputationPolicy | None = None,
    prices_for_quantities: Mapping[ItemId, float] | None = None,
) -> IndexResult:
    """Reference-quantity index over the union universe with imputed prices.

    prices_for_quantities feeds quantity schemes that divide expenditure
    by a reference price; other schemes ignore it.
    """
    scheme = quantities if quantities is not None else ArithmeticMeanQuantity()
    policy = imputation if imputation is not None else ImputationPolicy()
    base, current = spec.base, spec.current
    persistent, births, deaths = dataset.universe_algebra(base, current)
    periods = spec.reference_periods(dataset)
    numerator_terms = []
    denominator_terms = []
    for item in persistent | births | deaths:
        quantity = scheme.quantity_for(
            dataset, item, periods, base, current, prices_for_quantities
        )
        if quantity <= 0 or not math.isfinite(quantity):
            raise SchemeError(f"reference quantity for {item!r} is {quantity!r}")
        if item in births:
            current_price = dataset.observation(current, item).price
            base_price = policy.base_price_for_birth(item, current_price)
        elif item in deaths:
            base_price = dataset.observation(base, item).price
            current_price = policy.current_price_for_death(item, base_price)
        else:
            base_price = dataset.observation(base, item).price
            current_price = dataset.observation(current, item).price
        if base_price <= 0 or current_price <= 0:
            raise SchemeError(f"imputed price for {item!r} is not positive")
        numerator_terms.append(quantity * current_price)
        denominator_terms.append(quantity * base_price)
    return IndexResult(math.fsum(numerator_terms) / math.fsum(denominator_terms))


def rqp_index(
    dataset: Dataset,
    spec: ComparisonSpec,
    alpha: float = 0.5,
    quantities: ReferenceQuantityScheme | None = None,
    imputation: ImputationPolicy | None = None,
    reference_price: ReferencePriceScheme | None = None,
    config: FixedPointConfig | None = None,
) -> IndexResult:
    """Geometric mixture of the reference-quantity and unit-value indices.

    alpha = 1 evaluates identically to the unit-value index, alpha = 0 to
    the reference-quantity index. The unit-value side's reference prices
    are also offered to the quantity scheme, so expenditure-over-price
    quantities stay consistent between the two sides.
    """
    if not 0 <= alpha <= 1:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha!r}")
    scheme = reference_price if reference_price is not None else LehrUnitValue()
    guv = guv_index(dataset, spec, scheme, config)
    shared_prices = None
    if not scheme.needs_index:
        periods = spec.reference_periods(dataset)
        items = dataset.universe(spec.base) | dataset.universe(spec.current)
        shared_prices = reference_prices(
            dataset, scheme, items, periods, spec.base, spec.current
        )
    rq = rq_index(dataset, spec, quantities, imputation, shared_prices)
    value = rq.value ** (1.0 - alpha) * guv.value**alpha
    return IndexResult(
        value,
        diagnostics=guv.diagnostics,
        components={"rq": rq.value, "guv": guv.value, "alpha": alpha},
    )


# ---------------------------------------------------------------------------
# Classical fixed-universe indices


def classical_indices(dataset: Dataset, base: int, current: int) -> tuple[float, float, float]:
    """(Laspeyres, Paasche, Fisher) over the persistent universe."""
    persistent = dataset.universe(base) & dataset.universe(current)
    if not persistent:
        raise InvalidComparisonError("classical indices need a non-empty persistent universe")
    q0p0 = math.fsum(dataset.observation(base, i).expenditure for i in persistent)
    qtpt = math.fsum(dataset.observation(current, i).expenditure for i in persistent)
    q0pt = math.fsum(
        dataset.observation(base, i).quantity * dataset.observation(current, i).price
        for i in persistent
    )
    qtp0 = math.fsum(
        dataset.observation(current, i).quantity * dataset.observation(base, i).price
        for i in persistent
    )
    laspeyres = q0pt / q0p0
    paasche = qtpt / qtp0
    return laspeyres, paasche, math.sqrt(laspeyres * paasche)


def adjusted_laspeyres(
    dataset: Dataset, base: int, current: int, config: FixedPointConfig | None = None
) -> float:
    """Laspeyres with its current prices deflated by the index being solved for.

    The self-referential equation P = L / P is iterated in log space with
    half damping until stable; the solution is the square root of the
    plain Laspeyres index.
    """
    cfg = config or FixedPointConfig(damping=0.5)
    laspeyres, _, _ = classical_indices(dataset, base, current)
    log_l = math.log(laspeyres)
    log_p = 0.0
    for _ in range(cfg.max_iterations):
        new_log_p = (1.0 - cfg.damping) * log_p + cfg.damping * (log_l - log_p)
        moved = abs(new_log_p - log_p)
        log_p = new_log_p
        if moved <= cfg.tolerance:
            break
    return math.exp(log_p)


# ---------------------------------------------------------------------------
# Engine selection and uniform dispatch


_FAMILIES = ("gk", "mgk", "guv", "wgm", "tornqvist", "tpd", "geks", "rq", "rqp")

_REVERSIBLE_INNER_FAMILIES = ("mgk", "guv", "wgm", "tornqvist")


@dataclass(frozen=True)
class EngineSpec:
    """Declarative engine choice, used by the harness, the CLI and GEKS."""

    family: str
    reference_price: ReferencePriceScheme | None = None
    reference_quantity: ReferenceQuantityScheme | None = None
    weights: object | None = None
    alpha: float = 0.5
    imputation: ImputationPolicy | None = None
    inner: "EngineSpec | None" = None
    fixed_point: FixedPointConfig | None = None

    def __post_init__(self) -> None:
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown engine family {self.family!r}")
        if not 0 <= self.alpha <= 1:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha!r}")
        if self.family == "geks":
            _require_time_reversible(self.inner if self.inner is not None else EngineSpec("mgk"))

    def label(self) -> str:
        if self.family == "geks":
            inner = self.inner.label() if self.inner is not None else "mgk"
            return f"geks({inner})"
        if self.family == "rqp":
            return f"rqp(alpha={self.alpha})"
        return self.family


def _require_time_reversible(inner: EngineSpec) -> None:
    if inner.family not in _REVERSIBLE_INNER_FAMILIES:
        raise ValueError(f"engine family {inner.family!r} is not a time-reversible bilateral")
    scheme = inner.reference_price
    if scheme is not None and scheme.needs_index:
        raise ValueError("index-coupled reference prices break time reversal for chaining")
    if scheme is not None and not isinstance(scheme, (LehrUnitValue, CustomPrices)):
        raise ValueError(
            f"reference price scheme {scheme!r} is not symmetric in the compared periods"
        )


def evaluate(dataset: Dataset, spec: ComparisonSpec, engine: EngineSpec) -> IndexResult:
    """Run the engine described by ``engine`` on one comparison."""
    family = engine.family
    if family == "gk":
        return gk_index(dataset, spec, engine.fixed_point)
    if family == "mgk":
        return mgk_index(dataset, spec)
    if family == "guv":
        return guv_index(dataset, spec, engine.reference_price, engine.fixed_point)
    if family == "wgm":
        return wgm_index(
            dataset, spec, engine.weights, engine.reference_price, engine.fixed_point
        )
    if family == "tornqvist":
        return tornqvist_index(dataset, spec)
    if family == "tpd":
        return tpd_index(dataset, spec, engine.fixed_point)
    if family == "geks":
        return geks_index(dataset, spec, engine.inner)
    if family == "rq":
        return rq_index(dataset, spec, engine.reference_quantity, engine.imputation)
    if family == "rqp":
        return rqp_index(
            dataset,
            spec,
            engine.alpha,
            engine.reference_quantity,
            engine.imputation,
            engine.reference_price,
            engine.fixed_point,
        )
    raise ValueError(f"unknown engine family {family!r}")  # pragma: no cover
