"""Shared dataset builders for the test suite."""

from __future__ import annotations

import random

from dynindex import Dataset, PeriodData, SynthConfig, synth

SMALL_FIXED = {
    0: {"A": (1.0, 1.0), "B": (1.0, 1.0)},
    1: {"A": (2.0, 1.0), "B": (1.0, 1.0)},
}
SMALL_DYN = {
    0: {"A": (1.0, 1.0), "B": (2.0, 1.0)},
    1: {"A": (1.2, 1.0), "C": (3.0, 1.0)},
}


def small_fixed() -> Dataset:
    return Dataset.build(SMALL_FIXED)


def small_dyn() -> Dataset:
    return Dataset.build(SMALL_DYN)


def random_market(
    seed: int,
    periods: int = 2,
    items: int = 8,
    churn: float = 0.25,
    drift_sd: float = 0.3,
    quantity_sd: float = 0.8,
    elasticity: float = 1.0,
) -> Dataset:
    return synth(
        SynthConfig(
            periods=periods,
            initial_items=items,
            churn_rate=churn,
            drift_sd=drift_sd,
            quantity_sd=quantity_sd,
            demand_elasticity=elasticity,
            seed=seed,
        )
    ).dataset


def fixed_market(seed: int, periods: int = 2, items: int = 8) -> Dataset:
    return random_market(seed, periods=periods, items=items, churn=0.0)


def desk_scale_market(seed: int) -> Dataset:
    """Random dataset up to 50 items and 12 periods."""
    rng = random.Random(seed)
    return random_market(
        seed,
        periods=rng.randint(2, 12),
        items=rng.randint(3, 50),
        churn=rng.uniform(0.0, 0.4),
        elasticity=rng.uniform(0.0, 2.0),
    )


def swapped(dataset: Dataset, a: int = 0, b: int = 1) -> Dataset:
    """Exchange the data of two periods (time reversal for a bilateral pair)."""
    pa = dict(dataset.period_data(a).items)
    pb = dict(dataset.period_data(b).items)
    replaced = []
    for pd in dataset.periods:
        if pd.period == a:
            replaced.append(PeriodData(a, pb))
        elif pd.period == b:
            replaced.append(PeriodData(b, pa))
        else:
            replaced.append(pd)
    return Dataset(tuple(replaced))


def relabeled(dataset: Dataset, prefix: str = "relabeled::") -> Dataset:
    return Dataset(
        tuple(
            PeriodData(pd.period, {f"{prefix}{item}": obs for item, obs in pd.items.items()})
            for pd in dataset.periods
        )
    )


def scaled(dataset: Dataset, price_factor: float = 1.0, quantity_factor: float = 1.0) -> Dataset:
    return Dataset.build(
        {
            pd.period: {
                item: (obs.price * price_factor, obs.quantity * quantity_factor)
                for item, obs in pd.items.items()
            }
            for pd in dataset.periods
        }
    )
