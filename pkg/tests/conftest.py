import numpy as np
import pytest

from growthscope.ingest import LOG_LEVEL, TimeSeries, load_fixture, log_transform
from growthscope.skeleton import build_skeleton
from growthscope.wavelet import ScaleGrid, cwt_slope


def make_log_series(times, values):
    return TimeSeries(np.asarray(times, float), np.asarray(values, float), LOG_LEVEL)


class Analysed:
    def __init__(self, name):
        self.series = load_fixture(name)
        self.logs = log_transform(self.series)
        self.grid = ScaleGrid.default(self.series.step, self.series.span)
        self.field = cwt_slope(self.logs, self.grid)
        self.skeleton = build_skeleton(self.field)


@pytest.fixture(scope="session")
def quarterly():
    return Analysed("quarterly")


@pytest.fixture(scope="session")
def annual():
    return Analysed("annual")


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
