"""Loading and validating GDP series.

Times are decimal years throughout.  Quarterly observations are stamped at
the start of the quarter (``1947Q3`` -> 1947.5), annual ones at the integer
year.
"""
import csv
import os
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import AlreadyLog, MalformedRow, NonPositiveValue, NonUniformSpacing, SeriesError

LEVEL = "level"
LOG_LEVEL = "log_level"
KINDS = (LEVEL, LOG_LEVEL)

DATE_CONVENTIONS = ("year_decimal", "year_quarter", "year_only")

MIN_LENGTH = 8
SPACING_RTOL = 1e-9

FIXTURES = {
    "quarterly": ("quarterly.csv", "year_quarter",
                  "US real GDP per capita, quarterly 1947-2015, chained 2009 dollars"),
    "annual": ("annual.csv", "year_only",
               "US real GDP per capita, annual 1800-2010, 2012 dollars"),
}

_QUARTER = re.compile(r"^(\d{4})\s*[Qq]([1-4])$")
_YEAR = re.compile(r"^-?\d+$")


@dataclass(frozen=True)
class TimeSeries:
    times: np.ndarray
    values: np.ndarray
    kind: str = LEVEL
    label: str = ""
    step: float = field(init=False)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float).copy()
        values = np.asarray(self.values, dtype=float).copy()
        times.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

        if self.kind not in KINDS:
            raise SeriesError(f"unknown kind {self.kind!r}")
        if times.ndim != 1 or times.shape != values.shape:
            raise SeriesError("times and values must be 1-d arrays of equal length")
        if len(times) < MIN_LENGTH:
            raise SeriesError(f"need at least {MIN_LENGTH} samples, got {len(times)}")
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(values))):
            raise SeriesError("non-finite time or value")
        dt = np.diff(times)
        if np.any(dt <= 0):
            i = int(np.argmax(dt <= 0))
            raise NonUniformSpacing(f"times not strictly increasing at {times[i + 1]!r}")
        dev = np.max(np.abs(dt - dt[0])) / dt[0]
        if dev > SPACING_RTOL:
            i = int(np.argmax(np.abs(dt - dt[0])))
            raise NonUniformSpacing(
                f"spacing {dt[i]!r} between {times[i]!r} and {times[i + 1]!r} "
                f"differs from {dt[0]!r}")
        if self.kind == LEVEL and np.any(values <= 0):
            i = int(np.argmax(values <= 0))
            raise NonPositiveValue(f"value {values[i]!r} at time {times[i]!r} is not positive")
        object.__setattr__(self, "step", float(dt[0]))

    def __len__(self):
        return len(self.times)

    @property
    def span(self):
        return float(self.times[-1] - self.times[0])

    def window(self, start=None, stop=None):
        """Restrict to ``start <= t <= stop`` (either bound may be None)."""
        keep = np.ones(len(self), dtype=bool)
        if start is not None:
            keep &= self.times >= start
        if stop is not None:
            keep &= self.times <= stop
        label = f"{self.label} [{start}:{stop}]" if self.label else f"[{start}:{stop}]"
        return TimeSeries(self.times[keep], self.values[keep], self.kind, label)


def parse_date(text, convention):
    """Decimal year for one date string, or raise ValueError."""
    text = text.strip()
    if convention == "year_quarter":
        m = _QUARTER.match(text)
        if not m:
            raise ValueError("expected YYYYQn")
        return int(m.group(1)) + (int(m.group(2)) - 1) * 0.25
    if convention == "year_only":
        if not _YEAR.match(text):
            raise ValueError("expected YYYY")
        return float(int(text))
    if convention == "year_decimal":
        value = float(text)
        if not np.isfinite(value):
            raise ValueError("non-finite year")
        return value
    raise ValueError(f"unknown date convention {convention!r}")


def format_date(t, convention):
    if convention == "year_quarter":
        year = int(np.floor(t))
        q = int(round((t - year) * 4)) + 1
        return f"{year}Q{q}"
    if convention == "year_only":
        return str(int(round(t)))
    return repr(float(t))


def _is_number(text):
    try:
        float(text)
    except ValueError:
        return False
    return True


def load_series(path, date_convention="year_decimal", label=None):
    """Read a two-column ``date,value`` CSV into a level TimeSeries."""
    if date_convention not in DATE_CONVENTIONS:
        raise ValueError(f"unknown date convention {date_convention!r}")
    path = Path(path)
    times, values = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        first = True
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            text = ",".join(row)
            if len(row) != 2:
                raise MalformedRow(lineno, text, f"expected 2 columns, got {len(row)}")
            date, value = (c.strip() for c in row)
            if first:
                first = False
                if not _is_number(value):
                    continue  # header
            try:
                t = parse_date(date, date_convention)
            except ValueError as exc:
                raise MalformedRow(lineno, text, f"bad date ({exc})") from None
            try:
                v = float(value)
            except ValueError:
                raise MalformedRow(lineno, text, "bad value") from None
            if not np.isfinite(v):
                raise MalformedRow(lineno, text, "non-finite value")
            times.append(t)
            values.append(v)
    return TimeSeries(np.array(times), np.array(values), LEVEL,
                      path.stem if label is None else label)


def write_series(series, path, date_convention="year_decimal"):
    """Write the canonical CSV form that ``load_series`` reads back exactly."""
    lines = ["date,value"]
    for t, v in zip(series.times, series.values):
        lines.append(f"{format_date(t, date_convention)},{float(v)!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def log_transform(series):
    if series.kind != LEVEL:
        raise AlreadyLog(f"series {series.label!r} is already {series.kind}")
    return TimeSeries(series.times, np.log(series.values), LOG_LEVEL, series.label)


def fixture_dir():
    override = os.environ.get("GROWTHSCOPE_FIXTURES")
    if override:
        return Path(override)
    return Path(__file__).resolve().parent / "data"


def fixture_path(name):
    return fixture_dir() / FIXTURES[name][0]


def load_fixture(name):
    filename, convention, label = FIXTURES[name]
    return load_series(fixture_dir() / filename, convention, label=label)
