"""Slope-calibrated Gaussian-derivative wavelet transform.

The analysing kernel is the first derivative of a Gaussian, normalised so that
a signal ``p * t`` transforms to exactly ``p`` at every scale.  Applied to a
log-series the coefficients are local annualised growth rates.
"""
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.signal import fftconvolve

from .errors import GridIncompatible, NonPositiveScale, ScaleNotInGrid, SeriesError
from .ingest import LOG_LEVEL

# kernel support is |tau| <= TRUNCATION * s
TRUNCATION = 6.0

# 3, 6, 9, 15, 18, 30 months; 1, 2, 3, 4, 8 years
NAMED_SCALES = (0.25, 0.5, 0.75, 1.25, 1.5, 2.5, 1.0, 2.0, 3.0, 4.0, 8.0)

_SQRT_2PI = math.sqrt(2.0 * math.pi)
_TOL = 1e-9


def mother_psi1(t, s):
    """Slope-normalised first-derivative Gaussian, in 1/years**2."""
    if np.any(np.asarray(s) <= 0):
        raise NonPositiveScale(f"scale must be positive, got {s!r}")
    t = np.asarray(t, dtype=float)
    return t / (_SQRT_2PI * s ** 3) * np.exp(-0.5 * (t / s) ** 2)


@dataclass(frozen=True)
class ScaleGrid:
    scales: np.ndarray

    def __post_init__(self):
        scales = np.array(self.scales, dtype=float)
        if scales.ndim != 1 or len(scales) == 0:
            raise GridIncompatible("scale grid must be a non-empty 1-d sequence")
        if np.any(scales <= 0):
            raise NonPositiveScale("all scales must be positive")
        if np.any(np.diff(scales) <= 0):
            raise GridIncompatible("scales must be strictly increasing")
        scales.setflags(write=False)
        object.__setattr__(self, "scales", scales)

    def __len__(self):
        return len(self.scales)

    def __iter__(self):
        return iter(self.scales)

    def index(self, scale):
        i = int(np.argmin(np.abs(self.scales - scale)))
        if abs(self.scales[i] - scale) > _TOL * max(1.0, abs(scale)):
            raise ScaleNotInGrid(f"scale {scale!r} is not on the grid")
        return i

    def __contains__(self, scale):
        try:
            self.index(scale)
        except ScaleNotInGrid:
            return False
        return True

    def check_compatible(self, step, span):
        lo, hi = min_scale(step), max_scale(span)
        if self.scales[0] < lo * (1 - _TOL):
            raise GridIncompatible(
                f"scale {self.scales[0]!r} is below the sampling step {step!r}")
        if self.scales[-1] > hi * (1 + _TOL):
            raise GridIncompatible(
                f"scale {self.scales[-1]!r} exceeds span/4 = {hi!r}")

    @classmethod
    def default(cls, step, span, per_octave=16, lo=None, hi=None, extra=NAMED_SCALES):
        """Log-spaced grid from ``lo`` to ``hi`` with ``extra`` scales placed exactly.

        ``lo`` defaults to the sampling step and ``hi`` to a quarter of the span.
        Each extra scale inside the range replaces the nearest log-grid node when
        that node is within half a grid step of it, otherwise it is inserted.
        """
        lo = min_scale(step) if lo is None else float(lo)
        hi = max_scale(span) if hi is None else float(hi)
        if per_octave <= 0:
            raise GridIncompatible("scales per octave must be positive")
        if not 0 < lo <= hi:
            raise GridIncompatible(f"empty scale range [{lo!r}, {hi!r}]")
        n = int(math.floor(per_octave * math.log2(hi / lo) + 1e-9))
        nodes = list(lo * 2.0 ** (np.arange(n + 1) / per_octave))
        half_step = 2.0 ** (0.5 / per_octave)
        placed = set()
        for s in sorted(set(float(e) for e in extra)):
            if not lo * (1 - _TOL) <= s <= hi * (1 + _TOL):
                continue
            ratios = [max(s / x, x / s) for x in nodes]
            j = int(np.argmin(ratios))
            if ratios[j] < half_step and nodes[j] not in placed:
                nodes[j] = s
            else:
                nodes.append(s)
            placed.add(s)
        return cls(np.array(sorted(set(nodes))))


def min_scale(step):
    return float(step)


def max_scale(span):
    return float(span) / 4.0


def parse_grid_spec(spec):
    """``"MIN:MAX:PER_OCTAVE"`` with any field blank -> (lo, hi, per_octave)."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValueError(f"scale spec must be MIN:MAX:PER_OCTAVE, got {spec!r}")
    lo = float(parts[0]) if parts[0].strip() else None
    hi = float(parts[1]) if parts[1].strip() else None
    per = int(parts[2]) if parts[2].strip() else 16
    return lo, hi, per


@dataclass(frozen=True)
class WaveletField:
    grid: ScaleGrid
    times: np.ndarray
    coeffs: np.ndarray
    coi: np.ndarray

    def row(self, scale):
        return self.coeffs[self.grid.index(scale)]

    def valid(self, scale):
        return self.coi[self.grid.index(scale)]

    def samples(self, scale, coi_policy="exclude"):
        i = self.grid.index(scale)
        if coi_policy == "include":
            return self.coeffs[i].copy()
        if coi_policy == "exclude":
            return self.coeffs[i][self.coi[i]]
        raise ValueError(f"unknown coi policy {coi_policy!r}")

    @property
    def step(self):
        return float(self.times[1] - self.times[0])


def _check(series, grid):
    if series.kind != LOG_LEVEL:
        raise SeriesError("the slope transform expects a log-level series")
    grid.check_compatible(series.step, series.span)


def cone_of_influence(times, grid):
    """True where the full kernel support lies inside the sampled span."""
    t0, t1 = times[0], times[-1]
    tol = _TOL * (times[1] - times[0])
    reach = TRUNCATION * np.asarray(grid.scales)[:, None]
    return (times[None, :] - reach >= t0 - tol) & (times[None, :] + reach <= t1 + tol)


def _half_width(s, step, n):
    return min(int(math.floor(TRUNCATION * s / step + _TOL)), n - 1)


def _kernel_reaches_node(h, s, step):
    """True when the truncation point 6s falls on a sample (then it is a trapezoid end)."""
    return abs(h * step - TRUNCATION * s) <= _TOL * step


def cwt_slope(series, grid):
    """Growth-rate field of a log-series on ``grid`` via FFT convolution.

    Trapezoid rule on [t - 6s, t + 6s] clipped to the sampled span: nodes at
    either end of that interval carry half weight.  Each coefficient is
    evaluated as sum(psi * w * (X - X(t))), identical to the plain quadrature
    inside the cone of influence (where the weights cancel by symmetry) and
    exactly level-invariant near the edges.
    """
    _check(series, grid)
    step = series.step
    x = series.values - series.values[0]
    n = len(x)
    w = np.full(n, step)
    w[0] = w[-1] = 0.5 * step
    coeffs = np.empty((len(grid), n))
    for i, s in enumerate(grid.scales):
        h = _half_width(s, step, n)
        offsets = np.arange(-h, h + 1) * step
        psi = mother_psi1(offsets, s)
        kern = psi.copy()
        ends = _kernel_reaches_node(h, s, step)
        if ends:
            kern[0] *= 0.5
            kern[-1] *= 0.5
        kern = kern[::-1]
        row = fftconvolve(w * x, kern, mode="same") - x * fftconvolve(w, kern, mode="same")
        if ends and h < n:
            # a node that ends both the span and the kernel is halved once, not twice
            edge = 0.25 * step
            row[h] += edge * psi[0] * (x[0] - x[h])
            row[n - 1 - h] += edge * psi[-1] * (x[-1] - x[n - 1 - h])
        coeffs[i] = row
    coeffs.setflags(write=False)
    coi = cone_of_influence(series.times, grid)
    coi.setflags(write=False)
    return WaveletField(grid, series.times, coeffs, coi)


def direct_cwt_reference(series, grid):
    """Naive O(N**2) evaluation of the same quadrature, for cross-checking.

    Uses the untransformed definition, so it only matches ``cwt_slope`` where
    the cone of influence is valid.
    """
    _check(series, grid)
    times = [float(t) for t in series.times]
    values = [float(v) for v in series.values]
    step = series.step
    n = len(times)
    out = np.empty((len(grid), n))
    for i, s in enumerate(grid.scales):
        s = float(s)
        norm = 1.0 / (_SQRT_2PI * s ** 3)
        reach = TRUNCATION * s * (1 + _TOL)
        for j in range(n):
            acc = 0.0
            for k in range(n):
                tau = times[k] - times[j]
                if abs(tau) > reach:
                    continue
                at_end = k in (0, n - 1) or abs(abs(tau) - TRUNCATION * s) <= _TOL * step
                weight = 0.5 * step if at_end else step
                acc += tau * norm * math.exp(-0.5 * (tau / s) ** 2) * values[k] * weight
            out[i, j] = acc
    return WaveletField(grid, series.times, out, cone_of_influence(series.times, grid))


def write_scalogram(field, path):
    lines = ["scale_years,time_years,rho_per_year,coi"]
    for i, s in enumerate(field.grid.scales):
        for j, t in enumerate(field.times):
            lines.append(f"{float(s)!r},{float(t)!r},{float(field.coeffs[i, j])!r},"
                         f"{int(field.coi[i, j])}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_scalogram(path):
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    scales = np.unique(data[:, 0])
    times = np.unique(data[:, 1])
    shape = (len(scales), len(times))
    coeffs = data[:, 2].reshape(shape)
    coi = data[:, 3].reshape(shape).astype(bool)
    return WaveletField(ScaleGrid(scales), times, coeffs, coi)
