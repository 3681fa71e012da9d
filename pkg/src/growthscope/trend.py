"""Long-term exponential trend of a log-series."""
from dataclasses import dataclass

import numpy as np

from .errors import SeriesError, TooFewSamples
from .ingest import LOG_LEVEL


@dataclass(frozen=True)
class TrendFit:
    rho_lt: float
    intercept: float
    r_squared: float

    def predict(self, times):
        return self.intercept + self.rho_lt * np.asarray(times, dtype=float)


def ols_loggrowth(series):
    """OLS line through (time, log-level); the slope is the long-term rate per year.

    Time is centred before fitting; the reported intercept is at t = 0.
    """
    if series.kind != LOG_LEVEL:
        raise SeriesError("trend fit expects a log-level series")
    t = np.asarray(series.times, dtype=float)
    y = np.asarray(series.values, dtype=float)
    if t.size < 3:
        raise TooFewSamples("need at least three samples")
    tc = t - t.mean()
    yc = y - y.mean()
    slope = float(np.dot(tc, yc) / np.dot(tc, tc))
    intercept = float(y.mean() - slope * t.mean())
    ss_tot = float(np.dot(yc, yc))
    resid = yc - slope * tc
    r2 = 1.0 if ss_tot == 0 else 1.0 - float(np.dot(resid, resid)) / ss_tot
    return TrendFit(slope, intercept, min(1.0, max(0.0, r2)))
