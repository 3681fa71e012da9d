"""Synthetic GDP recompounded from skeleton growth rates at one scale."""
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import GrowthBelowMinusOne, NonIncreasingTimes, SpanMismatch

DEFAULT_EXCLUSION = (1940.0, 1955.0)


@dataclass(frozen=True)
class SyntheticSeries:
    times: np.ndarray
    values: np.ndarray
    s_star: float
    gdp0: float
    t0: float

    def write_csv(self, path):
        lines = ["time_years,value"]
        lines += [f"{float(t)!r},{float(v)!r}" for t, v in zip(self.times, self.values)]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class ReconstructionError:
    times: np.ndarray
    abs_log_ratio: np.ndarray
    median_abs_log_ratio: float
    max_abs_log_ratio: float
    median_abs_log_ratio_all: float
    max_abs_log_ratio_all: float
    exclude: tuple | None


def synthetic_gdp(intercepts, gdp0, t0, s_star):
    """GDP_0 * prod_{i<=k} (1 + g_i) ** (t_i - t_{i-1}) at each intercept time t_k.

    ``intercepts`` is a time-ordered sequence of (t_i, g_i[, ...]) pairs; the
    first factor compounds g_1 over [t0, t1].  The result starts with (t0, gdp0).
    """
    times = [float(t0)]
    values = [float(gdp0)]
    log_level = np.log(gdp0)
    prev = float(t0)
    for item in intercepts:
        t, g = float(item[0]), float(item[1])
        if t <= prev:
            raise NonIncreasingTimes(f"intercept time {t!r} does not follow {prev!r}")
        if g <= -1:
            raise GrowthBelowMinusOne(f"growth {g!r} at {t!r} is <= -1")
        log_level += (t - prev) * np.log1p(g)
        times.append(t)
        values.append(float(np.exp(log_level)))
        prev = t
    return SyntheticSeries(np.array(times), np.array(values), float(s_star),
                           float(gdp0), float(t0))


def reconstruction_error(synth, actual, exclude=DEFAULT_EXCLUSION):
    """|ln(synthetic / actual)| at the synthetic times.

    ``actual`` (a level series) is interpolated linearly in log-level.  The
    headline statistics skip points with ``exclude[0] <= t <= exclude[1]``;
    the ``*_all`` variants use every point.
    """
    t = synth.times
    eps = 1e-9 * actual.step
    if t[0] < actual.times[0] - eps or t[-1] > actual.times[-1] + eps:
        raise SpanMismatch("synthetic times leave the span of the actual series")
    log_actual = np.interp(t, actual.times, np.log(actual.values))
    err = np.abs(np.log(synth.values) - log_actual)
    keep = np.ones(len(t), dtype=bool)
    if exclude is not None:
        keep = ~((t >= exclude[0]) & (t <= exclude[1]))
    kept = err[keep] if keep.any() else err
    return ReconstructionError(
        times=t, abs_log_ratio=err,
        median_abs_log_ratio=float(np.median(kept)),
        max_abs_log_ratio=float(np.max(kept)),
        median_abs_log_ratio_all=float(np.median(err)),
        max_abs_log_ratio_all=float(np.max(err)),
        exclude=None if exclude is None else (float(exclude[0]), float(exclude[1])))
