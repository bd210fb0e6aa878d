"""Hourly input series for one representative year.

A :class:`TimeSeriesSet` maps series ids to read-only float arrays of a common
horizon (8760 hours for a real scenario; tests build shorter toy horizons).
Every series carries a unit tag.  Hour 0 is 00:00 on January 1 and the clock
has no daylight-saving shifts.
"""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .errors import HorizonMismatch, MissingColumn, NegativeLoad, UnitMismatch, UnparseableValue

HOURS_PER_YEAR = 8760

UNITS = frozenset({"kWh/h", "EUR/kWh", "°C", "kWh/m²", "MW", "-"})
_UNIT_ALIASES = {"degC": "°C", "C": "°C", "kWh/m2": "kWh/m²", "kW": "kWh/h", "1": "-"}
NONNEGATIVE_UNITS = frozenset({"kWh/h", "kWh/m²", "MW"})

# Units assumed when a manifest entry gives only a column name.
CORE_UNITS = {
    "spot_price": "EUR/kWh",
    "regional_load": "MW",
    "insolation": "kWh/m²",
    "outdoor_temperature": "°C",
    "ground_temperature": "°C",
}

_REAL = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


def normalize_unit(unit: str) -> str:
    unit = _UNIT_ALIASES.get(unit.strip(), unit.strip())
    if unit not in UNITS:
        raise UnitMismatch(f"unknown unit {unit!r}; expected one of {sorted(UNITS)}")
    return unit


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError("series must be one-dimensional")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TimeSeriesSet:
    series: Mapping[str, np.ndarray]
    units: Mapping[str, str]
    horizon: int = HOURS_PER_YEAR
    _checked: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        if self._checked:
            return
        series, units = {}, {}
        for sid, values in self.series.items():
            if sid not in self.units:
                raise UnitMismatch(f"series {sid!r} has no unit tag")
            unit = normalize_unit(self.units[sid])
            arr = _frozen(values)
            if len(arr) != self.horizon:
                raise HorizonMismatch(len(arr), self.horizon, subject=sid)
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"series {sid!r} contains non-finite values")
            if unit in NONNEGATIVE_UNITS and np.any(arr < 0):
                row = int(np.argmax(arr < 0))
                raise NegativeLoad(sid, row, float(arr[row]))
            series[sid], units[sid] = arr, unit
        object.__setattr__(self, "series", MappingProxyType(series))
        object.__setattr__(self, "units", MappingProxyType(units))
        object.__setattr__(self, "_checked", True)

    @classmethod
    def from_columns(cls, columns: Mapping[str, tuple], horizon: int = HOURS_PER_YEAR) -> "TimeSeriesSet":
        """Build from ``{id: (values, unit)}``."""
        return cls({k: v[0] for k, v in columns.items()}, {k: v[1] for k, v in columns.items()}, horizon)

    def __getitem__(self, sid: str) -> np.ndarray:
        return self.series[sid]

    def __contains__(self, sid: object) -> bool:
        return sid in self.series

    def __iter__(self):
        return iter(self.series)

    def __len__(self) -> int:
        return len(self.series)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(self.series)

    def unit(self, sid: str) -> str:
        return self.units[sid]

    def with_series(self, sid: str, values, unit: str) -> "TimeSeriesSet":
        """Return a copy with one series added; re-adding an id under another unit is rejected."""
        unit = normalize_unit(unit)
        if sid in self.units and self.units[sid] != unit:
            raise UnitMismatch(f"series {sid!r} already tagged {self.units[sid]!r}, got {unit!r}")
        series = dict(self.series)
        units = dict(self.units)
        series[sid], units[sid] = values, unit
        return TimeSeriesSet(series, units, self.horizon)

    def manifest(self) -> dict[str, dict[str, str]]:
        return {sid: {"column": sid, "unit": self.units[sid]} for sid in self.series}


def _manifest_entry(sid: str, entry) -> tuple[str, str]:
    if isinstance(entry, str):
        if sid not in CORE_UNITS:
            raise UnitMismatch(f"manifest entry for {sid!r} needs an explicit unit")
        return entry, CORE_UNITS[sid]
    column = entry.get("column", sid)
    unit = entry.get("unit", CORE_UNITS.get(sid))
    if unit is None:
        raise UnitMismatch(f"manifest entry for {sid!r} needs an explicit unit")
    return column, normalize_unit(unit)


def _parse_real(raw: str, row: int, col: str) -> float:
    text = raw.strip()
    if not _REAL.match(text):
        raise UnparseableValue(row, col, raw)
    value = float(text)
    if not math.isfinite(value):
        raise UnparseableValue(row, col, raw)
    return value


def load_series_csv(path, manifest: Mapping[str, object], horizon: int = HOURS_PER_YEAR) -> TimeSeriesSet:
    """Read the series named in ``manifest`` from a comma-separated file.

    ``manifest`` maps series id to ``{"column": name, "unit": tag}`` (a bare
    column name is accepted for the core ids with a fixed unit).  Row indices
    reported in errors are 0-based hour indices.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise HorizonMismatch(0, horizon, subject=str(path)) from None
        rows = [r for r in reader if r and any(c.strip() for c in r)]

    if len(rows) != horizon:
        raise HorizonMismatch(len(rows), horizon, subject=str(path))

    resolved = {sid: _manifest_entry(sid, entry) for sid, entry in manifest.items()}
    col_index = {}
    for sid, (column, _) in resolved.items():
        if column not in header:
            raise MissingColumn(sid, column)
        col_index[sid] = header.index(column)

    for i, row in enumerate(rows):
        if len(row) != len(header):
            # e.g. an unquoted decimal comma splitting one value in two
            raise UnparseableValue(i, "*", ",".join(row))

    series, units = {}, {}
    for sid, (column, unit) in resolved.items():
        j = col_index[sid]
        values = np.empty(horizon)
        for i, row in enumerate(rows):
            if j >= len(row):
                raise UnparseableValue(i, column, "")
            values[i] = _parse_real(row[j], i, column)
        if unit in NONNEGATIVE_UNITS and np.any(values < 0):
            i = int(np.argmax(values < 0))
            raise NegativeLoad(sid, i, float(values[i]))
        series[sid], units[sid] = values, unit
    return TimeSeriesSet(series, units, horizon)


def write_series_csv(ts: TimeSeriesSet, path) -> Path:
    """Write every series as one column; ``repr`` keeps floats round-trip exact."""
    path = Path(path)
    ids = list(ts.ids)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ids)
        columns = [ts[sid] for sid in ids]
        for t in range(ts.horizon):
            writer.writerow([repr(float(col[t])) for col in columns])
    return path


def hour_of_day(t: int, horizon: int = HOURS_PER_YEAR) -> int:
    if not 0 <= t < horizon:
        raise IndexError(f"hour index {t} outside 0..{horizon - 1}")
    return t % 24
