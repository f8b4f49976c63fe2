"""Calendar-month arithmetic and gap-free monthly series.

A MonthlySeries is a start month plus one value per consecutive month; all
time-series transforms in this package consume and produce this shape, and
the on-disk form is a two-column CSV with header ``month,value`` and months
written as ``YYYY-MM``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

import numpy as np

_MONTH_RE = re.compile(r"^(\d{4})-(\d{2})$")


@dataclass(frozen=True, order=True)
class Month:
    year: int
    month: int

    def __post_init__(self):
        if not 1 <= self.month <= 12:
            raise ValueError(f"month out of range: {self.month}")

    @classmethod
    def parse(cls, text: str) -> "Month":
        m = _MONTH_RE.match(text.strip())
        if m is None:
            raise ValueError(f"not a YYYY-MM month: {text!r}")
        return cls(int(m.group(1)), int(m.group(2)))

    @classmethod
    def of(cls, d: date) -> "Month":
        return cls(d.year, d.month)

    @property
    def index(self) -> int:
        return self.year * 12 + self.month - 1

    @classmethod
    def from_index(cls, idx: int) -> "Month":
        return cls(idx // 12, idx % 12 + 1)

    def __add__(self, k: int) -> "Month":
        return Month.from_index(self.index + k)

    def diff(self, other: "Month") -> int:
        """Number of months from `other` to self (self - other)."""
        return self.index - other.index

    def __str__(self) -> str:
        return f"{self.year:04d}-{self.month:02d}"


@dataclass(frozen=True)
class MonthlySeries:
    """Contiguous month-indexed series; values[j] belongs to start + j."""

    start: Month
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("series values must be a non-empty 1-D array")
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def end(self) -> Month:
        return self.start + (len(self.values) - 1)

    def months(self) -> list[Month]:
        return [self.start + j for j in range(len(self.values))]

    def with_values(self, values: np.ndarray, start: Month | None = None) -> "MonthlySeries":
        return MonthlySeries(self.start if start is None else start, np.asarray(values, float))

    def slice_months(self, start: Month, end: Month) -> "MonthlySeries":
        lo = start.diff(self.start)
        hi = end.diff(self.start) + 1
        if lo < 0 or hi > len(self.values) or lo >= hi:
            raise ValueError(f"[{start}, {end}] not contained in [{self.start}, {self.end}]")
        return MonthlySeries(start, self.values[lo:hi])


def aligned(*series: MonthlySeries) -> bool:
    """True when all series cover exactly the same months."""
    first = series[0]
    return all(s.start == first.start and len(s) == len(first) for s in series[1:])


def align(*series: MonthlySeries) -> list[MonthlySeries]:
    """Trim all series to their common month range.

    Raises ValueError when the ranges do not overlap.
    """
    start = max(s.start for s in series)
    end = min(s.end for s in series)
    if end.diff(start) < 0:
        raise ValueError("series have no overlapping months")
    return [s.slice_months(start, end) for s in series]


def read_series_csv(path: str | Path) -> MonthlySeries:
    """Read a ``month,value`` CSV; months must be contiguous and ascending."""
    path = Path(path)
    months: list[Month] = []
    values: list[float] = []
    with path.open("r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header.split(",")[:2] != ["month", "value"]:
            raise ValueError(f"{path}: expected header 'month,value', got {header!r}")
        for line_no, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            if len(cells) != 2:
                raise ValueError(f"{path}:{line_no}: expected 2 columns")
            months.append(Month.parse(cells[0]))
            values.append(float(cells[1]))
    if not months:
        raise ValueError(f"{path}: no data rows")
    for j in range(1, len(months)):
        if months[j].diff(months[j - 1]) != 1:
            raise ValueError(f"{path}: months not contiguous at {months[j]}")
    return MonthlySeries(months[0], np.array(values))


def write_series_csv(series: MonthlySeries, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("month,value\n")
        for m, v in zip(series.months(), series.values):
            fh.write(f"{m},{float(v)!r}\n")
