"""Core data model: periods, items, observations, and universe algebra.

A dataset is a sequence of per-period maps from item id to an observed
(unit-value price, transaction quantity) pair. Item universes differ
across periods: items are born and die, and every downstream computation
is defined relative to a comparison between a base and a current period
plus a reference-period policy.

Datasets are immutable after construction and safe to share across
concurrent readers; all operations here are pure functions of their
inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Union

ItemId = Union[str, int]


class PriceIndexError(Exception):
    """Base class for every error raised by this package."""


class UnknownPeriodError(PriceIndexError, KeyError):
    """A period index is not present in the dataset."""


class InvalidComparisonError(PriceIndexError, ValueError):
    """A comparison does not fit the dataset (bad periods or window)."""


class NumericalError(PriceIndexError, ArithmeticError):
    """A computed value left the positive finite range."""


@dataclass(frozen=True)
class Observation:
    """Unit-value price and transaction quantity of one item in one period."""

    price: float
    quantity: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.price) and math.isfinite(self.quantity)):
            raise ValueError(f"non-finite observation {self.price!r}, {self.quantity!r}")

    @property
    def expenditure(self) -> float:
        return self.price * self.quantity

    @classmethod
    def from_expenditure(cls, expenditure: float, quantity: float) -> "Observation":
        """Build from (expenditure, quantity); the price is the unit value."""
        if quantity == 0:
            raise ValueError("cannot derive a unit value from zero quantity")
        return cls(expenditure / quantity, quantity)


@dataclass(frozen=True)
class PeriodData:
    """All observed data of one period: an integer index and an item map."""

    period: int
    items: Mapping[ItemId, Observation]

    def __post_init__(self) -> None:
        object.__setattr__(self, "items", MappingProxyType(dict(self.items)))
        object.__setattr__(
            self,
            "_total_expenditure",
            math.fsum(obs.expenditure for obs in self.items.values()),
        )

    def total_expenditure(self) -> float:
        return self._total_expenditure


@dataclass(frozen=True)
class Dataset:
    """An ordered, gap-checkable sequence of period data.

    Construction only rejects duplicate period indices; substantive
    problems (gaps, empty periods, non-positive values) are reported by
    :meth:`validate` so that ingestion can surface them all at once.
    """

    periods: tuple[PeriodData, ...]
    _by_period: Mapping[int, PeriodData] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        ordered = tuple(sorted(self.periods, key=lambda pd: pd.period))
        index = {pd.period: pd for pd in ordered}
        if len(index) != len(ordered):
            raise ValueError("duplicate period indices")
        object.__setattr__(self, "periods", ordered)
        object.__setattr__(self, "_by_period", MappingProxyType(index))

    @classmethod
    def build(cls, data: Mapping[int, Mapping[ItemId, tuple[float, float]]]) -> "Dataset":
        """Construct from ``{period: {item: (price, quantity)}}``."""
        return cls(
            tuple(
                PeriodData(t, {i: Observation(p, q) for i, (p, q) in items.items()})
                for t, items in data.items()
            )
        )

    def period_indices(self) -> tuple[int, ...]:
        return tuple(pd.period for pd in self.periods)

    @property
    def first_period(self) -> int:
        return self.periods[0].period

    @property
    def last_period(self) -> int:
        return self.periods[-1].period

    def period_data(self, t: int) -> PeriodData:
        try:
            return self._by_period[t]
        except KeyError:
            raise UnknownPeriodError(t) from None

    def universe(self, t: int) -> frozenset[ItemId]:
        """Item universe of period ``t``: the key set of its data."""
        return frozenset(self.period_data(t).items)

    def observation(self, t: int, item: ItemId) -> Observation:
        try:
            return self.period_data(t).items[item]
        except KeyError:
            raise KeyError(f"item {item!r} not present in period {t}") from None

    def has(self, t: int, item: ItemId) -> bool:
        return item in self.period_data(t).items

    def universe_algebra(
        self, base: int, current: int
    ) -> tuple[frozenset[ItemId], frozenset[ItemId], frozenset[ItemId]]:
        """Split the two universes into (persistent, births, deaths).

        The three sets are pairwise disjoint; persistent + births is the
        current universe and persistent + deaths is the base universe.
        """
        u0 = self.universe(base)
        ut = self.universe(current)
        return u0 & ut, ut - u0, u0 - ut

    def value_ratio(self, base: int, current: int) -> float:
        """Ratio of total expenditures between the two periods."""
        denominator = self.period_data(base).total_expenditure()
        numerator = self.period_data(current).total_expenditure()
        if denominator <= 0 or not math.isfinite(numerator / denominator):
            raise NumericalError(f"degenerate value ratio {numerator}/{denominator}")
        return numerator / denominator

    def normalized(self) -> "Dataset":
        """Drop zero-quantity observations; presence means transactions occurred."""
        return Dataset(
            tuple(
                PeriodData(pd.period, {i: o for i, o in pd.items.items() if o.quantity != 0})
                for pd in self.periods
            )
        )

    def validate(self) -> list["Violation"]:
        """Report structural problems; an empty list means the dataset is ok."""
        violations: list[Violation] = []
        for pd in self.periods:
            if not pd.items:
                violations.append(Violation("empty-period", pd.period, None, "period has no items"))
            for item, obs in pd.items.items():
                if obs.price <= 0:
                    violations.append(
                        Violation("non-positive-price", pd.period, item, f"price {obs.price!r}")
                    )
                if obs.quantity <= 0:
                    violations.append(
                        Violation("non-positive-quantity", pd.period, item, f"quantity {obs.quantity!r}")
                    )
        indices = self.period_indices()
        for a, b in zip(indices, indices[1:]):
            if b != a + 1:
                violations.append(
                    Violation("period-gap", b, None, f"period {b} follows {a}")
                )
        return violations


@dataclass(frozen=True)
class Violation:
    """One validation finding, addressable by code for mechanical checks."""

    code: str
    period: int | None
    item: ItemId | None
    message: str


class Bilateral:
    """Reference set {base, current}: the direct two-period comparison."""

    def reference_periods(self, dataset: Dataset, base: int, current: int) -> tuple[int, ...]:
        return (base, current)

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return "Bilateral()"

    def __eq__(self, other: object) -> bool:
        return type(other) is Bilateral

    def __hash__(self) -> int:
        return hash(Bilateral)


class FullHistory:
    """Reference set {base, base+1, ..., current}."""

    def reference_periods(self, dataset: Dataset, base: int, current: int) -> tuple[int, ...]:
        return tuple(range(base, current + 1))

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return "FullHistory()"

    def __eq__(self, other: object) -> bool:
        return type(other) is FullHistory

    def __hash__(self) -> int:
        return hash(FullHistory)


@dataclass(frozen=True)
class RollingWindow:
    """The last ``window`` periods ending at the current period.

    The base period must fall inside the window, otherwise the engines
    would compare against a period with no reference data.
    """

    window: int

    def __post_init__(self) -> None:
        if self.window < 2:
            raise InvalidComparisonError(f"rolling window must be >= 2, got {self.window}")

    def reference_periods(self, dataset: Dataset, base: int, current: int) -> tuple[int, ...]:
        start = max(dataset.first_period, current - self.window + 1)
        if base < start:
            raise InvalidComparisonError(
                f"base period {base} precedes rolling window start {start}"
            )
        return tuple(range(start, current + 1))


ReferencePolicy = Union[Bilateral, FullHistory, RollingWindow]


@dataclass(frozen=True)
class ComparisonSpec:
    """Which two periods to compare and which reference periods may be used."""

    base: int
    current: int
    policy: ReferencePolicy = field(default_factory=Bilateral)

    def __post_init__(self) -> None:
        if self.base >= self.current:
            raise InvalidComparisonError(
                f"base {self.base} must precede current {self.current}"
            )

    def reference_periods(self, dataset: Dataset) -> tuple[int, ...]:
        """Resolve the policy against the dataset, checking both endpoints exist."""
        dataset.period_data(self.base)
        dataset.period_data(self.current)
        return self.policy.reference_periods(dataset, self.base, self.current)
