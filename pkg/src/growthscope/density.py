"""Growth-rate densities at fixed scale, their modes and regime summaries."""
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
from scipy.signal import find_peaks, peak_prominences
from scipy.stats import skew

from .errors import DegenerateSamples, EmptySamples, NonPositiveBandwidth, TooFewSamples

DEFAULT_BANDWIDTH = 0.002
DEFAULT_PROMINENCE_FLOOR = 0.05
GRID_PER_BANDWIDTH = 20
GRID_REACH = 5.0

FULL_FIELD = "full_field"
SKELETON = "skeleton"


@dataclass(frozen=True)
class GrowthDensity:
    scale: float
    source: str
    grid: np.ndarray
    pdf: np.ndarray
    bandwidth: float
    n_samples: int

    def integral(self):
        return float(np.trapezoid(self.pdf, self.grid))

    def write_csv(self, path):
        lines = ["rho_per_year,pdf"]
        lines += [f"{float(x)!r},{float(p)!r}" for x, p in zip(self.grid, self.pdf)]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class Mode:
    location: float
    height: float
    prominence: float


@dataclass(frozen=True)
class RegimeEntry:
    scale: float
    source: str
    rho_low: float
    rho_high: float | None
    prominence_low: float
    prominence_high: float | None
    n_samples: int

    @property
    def bimodal(self):
        return self.rho_high is not None


@dataclass(frozen=True)
class RegimeSummary:
    entries: tuple
    rho_lt: float

    def to_json(self):
        doc = {"rho_lt": self.rho_lt, "entries": [asdict(e) for e in self.entries]}
        return json.dumps(doc, indent=1, sort_keys=True)

    def write(self, path):
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")


@dataclass(frozen=True)
class QuantileStats:
    quantile: float
    quantile_value: float
    conditional_mean_above: float


def kde(samples, bandwidth=DEFAULT_BANDWIDTH, scale=float("nan"), source=FULL_FIELD):
    """Gaussian KDE on a uniform grid with step bandwidth/20.

    The grid spans the samples plus five bandwidths on either side and is
    anchored at a multiple of the step, so identical samples always land on
    identical grid nodes.
    """
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise EmptySamples("no samples to estimate a density from")
    if not bandwidth > 0:
        raise NonPositiveBandwidth(f"bandwidth must be positive, got {bandwidth!r}")
    step = bandwidth / GRID_PER_BANDWIDTH
    lo = math.floor((x.min() - GRID_REACH * bandwidth) / step)
    hi = math.ceil((x.max() + GRID_REACH * bandwidth) / step)
    grid = np.arange(lo, hi + 1) * step
    z = (grid[:, None] - x[None, :]) / bandwidth
    pdf = np.exp(-0.5 * z * z).sum(axis=1) / (x.size * bandwidth * math.sqrt(2 * math.pi))
    return GrowthDensity(float(scale), source, grid, pdf, float(bandwidth), int(x.size))


def find_modes(density, prominence_floor=0.0):
    """Local maxima of the pdf with topographic prominence, sorted by location.

    Modes whose prominence falls below ``prominence_floor * max(pdf)`` are
    dropped.  A flat-topped maximum is reported once, at its middle node.
    """
    if not 0 <= prominence_floor < 1:
        raise ValueError("prominence floor must lie in [0, 1)")
    pdf = density.pdf
    peaks, _ = find_peaks(pdf)
    if len(peaks) == 0:
        return []
    prom = peak_prominences(pdf, peaks)[0]
    cut = prominence_floor * pdf.max()
    return [Mode(float(density.grid[i]), float(pdf[i]), float(p))
            for i, p in zip(peaks, prom) if p >= cut]


def regime_peaks(density, prominence_floor=DEFAULT_PROMINENCE_FLOOR):
    """The two most prominent modes, as (low, high); high is None if unimodal.

    Returns ``(low_mode, high_mode)`` Mode objects.
    """
    modes = find_modes(density, prominence_floor)
    if not modes:
        return None, None
    ranked = sorted(modes, key=lambda m: (-m.prominence, -m.height, m.location))[:2]
    ranked.sort(key=lambda m: m.location)
    if len(ranked) == 1:
        return ranked[0], None
    return ranked[0], ranked[1]


def dominant_mode(density):
    modes = find_modes(density, 0.0)
    return max(modes, key=lambda m: (m.prominence, m.height))


def regime_entry(density, prominence_floor=DEFAULT_PROMINENCE_FLOOR):
    low, high = regime_peaks(density, prominence_floor)
    return RegimeEntry(
        scale=density.scale, source=density.source,
        rho_low=low.location, rho_high=None if high is None else high.location,
        prominence_low=low.prominence,
        prominence_high=None if high is None else high.prominence,
        n_samples=density.n_samples)


def conditional_stats(samples, quantile=0.5):
    """Empirical quantile (linear between order statistics) and the mean above it."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < 2:
        raise TooFewSamples("need at least two samples")
    if not 0 < quantile < 1:
        raise ValueError("quantile must lie in (0, 1)")
    if np.all(x == x[0]):
        raise DegenerateSamples("all samples are equal")
    q = float(np.quantile(x, quantile))
    above = x[x > q]
    return QuantileStats(float(quantile), q, float(above.mean()))


def skewness(samples):
    return float(skew(np.asarray(samples, dtype=float)))
