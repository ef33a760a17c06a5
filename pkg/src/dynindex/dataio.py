"""Scanner-data CSV ingestion, emission, and machine-readable reports.

The CSV schema is deliberately tiny and bit-exact: a header of either
``period,item,price,quantity`` or ``period,item,expenditure,quantity``
(any column order), comma separation with no quoting, UTF-8, decimal
point. Item ids containing commas or newlines are rejected rather than
quoted. Floats are written with ``repr`` so that a written file parses
back to exactly the same dataset.
"""

from __future__ import annotations

import json
import math
import warnings
from pathlib import Path
from typing import IO, Mapping, Union

from ._version import __version__
from .core import Dataset, Observation, PeriodData, PriceIndexError

Source = Union[str, Path, IO[str]]

_VALUE_COLUMNS = ("price", "expenditure")


class CsvError(PriceIndexError):
    """Malformed CSV input or an unrepresentable dataset on output."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class IngestWarning(UserWarning):
    """Non-fatal ingestion note, e.g. dropped zero-quantity rows."""


def _read_lines(source: Source) -> list[str]:
    if isinstance(source, (str, Path)):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source.read()
    return text.splitlines()


def ingest_csv(source: Source) -> Dataset:
    """Parse and validate a scanner-data CSV file into a dataset.

    Zero-quantity rows are dropped with a warning carrying the count.
    Any substantive violation (duplicate keys, malformed numbers,
    non-positive values, period gaps) raises CsvError with the offending
    line number where one exists.
    """
    lines = _read_lines(source)
    if not lines:
        raise CsvError("empty input")
    header = lines[0].split(",")
    value_column = _resolve_header(header)
    columns = {name: header.index(name) for name in header}
    rows: dict[int, dict[str, Observation]] = {}
    seen: dict[tuple[int, str], int] = {}
    dropped = 0
    for line_no, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        fields = line.split(",")
        if len(fields) != len(header):
            raise CsvError(f"expected {len(header)} fields, got {len(fields)}", line_no)
        item = fields[columns["item"]]
        if not item:
            raise CsvError("empty item id", line_no)
        try:
            period = int(fields[columns["period"]])
        except ValueError:
            raise CsvError(f"bad period {fields[columns['period']]!r}", line_no) from None
        value = _parse_float(fields[columns[value_column]], value_column, line_no)
        quantity = _parse_float(fields[columns["quantity"]], "quantity", line_no)
        key = (period, item)
        if key in seen:
            raise CsvError(
                f"duplicate (period, item) ({period}, {item}); first at line {seen[key]}",
                line_no,
            )
        seen[key] = line_no
        if quantity == 0:
            dropped += 1
            continue
        if value_column == "expenditure":
            observation = Observation.from_expenditure(value, quantity)
        else:
            observation = Observation(value, quantity)
        rows.setdefault(period, {})[item] = observation
    if dropped:
        warnings.warn(f"dropped {dropped} zero-quantity row(s)", IngestWarning, stacklevel=2)
    if not rows:
        raise CsvError("no usable rows")
    dataset = Dataset(tuple(PeriodData(t, items) for t, items in rows.items()))
    violations = dataset.validate()
    if violations:
        details = "; ".join(
            f"{v.code} (period {v.period}" + (f", item {v.item})" if v.item is not None else ")")
            for v in violations
        )
        raise CsvError(f"validation failed: {details}")
    return dataset


def _resolve_header(header: list[str]) -> str:
    names = set(header)
    if len(names) != len(header):
        raise CsvError(f"repeated column names in header {header}", 1)
    present = [c for c in _VALUE_COLUMNS if c in names]
    if len(present) == 2:
        raise CsvError("both price and expenditure columns present", 1)
    if len(present) != 1:
        raise CsvError(f"header must name price or expenditure, got {header}", 1)
    expected = {"period", "item", "quantity", present[0]}
    if names != expected:
        raise CsvError(f"unexpected header {header}; want columns {sorted(expected)}", 1)
    return present[0]


def _parse_float(raw: str, column: str, line_no: int) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise CsvError(f"bad {column} {raw!r}", line_no) from None
    if not math.isfinite(value):
        raise CsvError(f"non-finite {column} {raw!r}", line_no)
    return value


def format_csv(dataset: Dataset, value_column: str = "price") -> str:
    """Render a dataset to the CSV schema; exact round-trip via repr floats."""
    if value_column not in _VALUE_COLUMNS:
        raise CsvError(f"unknown value column {value_column!r}")
    lines = [f"period,item,{value_column},quantity"]
    for pd in dataset.periods:
        for item in sorted(pd.items, key=str):
            text = str(item)
            if "," in text or "\n" in text or "\r" in text:
                raise CsvError(f"item id {text!r} cannot be written unquoted")
            obs = pd.items[item]
            value = obs.expenditure if value_column == "expenditure" else obs.price
            lines.append(f"{pd.period},{text},{value!r},{obs.quantity!r}")
    return "\n".join(lines) + "\n"


def emit_csv(dataset: Dataset, target: Source, value_column: str = "price") -> None:
    text = format_csv(dataset, value_column)
    if isinstance(target, (str, Path)):
        Path(target).write_text(text, encoding="utf-8")
    else:
        target.write(text)


# ---------------------------------------------------------------------------
# Machine-readable reports


def render_report(payload: Mapping[str, object], timestamp: str | None = None) -> str:
    """One structured JSON document; identical inputs give identical bytes.

    The timestamp is the only non-reproducible field and is left out
    unless supplied by the caller.
    """
    document = {"tool": {"name": "dynindex", "version": __version__}}
    document.update(payload)
    if timestamp is not None:
        document["generated_at"] = timestamp
    return json.dumps(document, sort_keys=True, indent=2, default=_jsonable) + "\n"


def write_report(
    target: Source, payload: Mapping[str, object], timestamp: str | None = None
) -> None:
    text = render_report(payload, timestamp)
    if isinstance(target, (str, Path)):
        Path(target).write_text(text, encoding="utf-8")
    else:
        target.write(text)


def _jsonable(value: object) -> object:
    if hasattr(value, "value") and hasattr(value, "name"):  # enums
        return getattr(value, "value")
    if isinstance(value, Mapping):
        return dict(value)
    if isinstance(value, (set, frozenset, tuple)):
        return sorted(value, key=str) if isinstance(value, (set, frozenset)) else list(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")
