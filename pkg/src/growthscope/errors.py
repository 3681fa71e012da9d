"""Exception hierarchy.

The CLI maps each family to an exit status: ``ConfigError`` -> 1,
``DataError`` -> 2, anything else derived from ``GrowthscopeError`` -> 3.
"""


class GrowthscopeError(Exception):
    pass


class ConfigError(GrowthscopeError):
    pass


class DataError(GrowthscopeError):
    pass


class SeriesError(DataError):
    """A TimeSeries invariant does not hold."""


class MalformedRow(DataError):
    def __init__(self, line, text, reason):
        self.line = line
        self.text = text
        super().__init__(f"line {line}: {reason}: {text!r}")


class NonUniformSpacing(SeriesError):
    pass


class NonPositiveValue(SeriesError):
    pass


class AlreadyLog(SeriesError):
    pass


class NumericError(GrowthscopeError):
    pass


class NonPositiveScale(NumericError):
    pass


class GridIncompatible(NumericError):
    pass


class ScaleNotInGrid(NumericError):
    pass


class EmptySamples(NumericError):
    pass


class NonPositiveBandwidth(NumericError):
    pass


class DegenerateSamples(NumericError):
    pass


class TooFewSamples(NumericError):
    pass


class NonIncreasingTimes(NumericError):
    pass


class GrowthBelowMinusOne(NumericError):
    pass


class SpanMismatch(NumericError):
    pass


class InvariantViolation(NumericError):
    def __init__(self, invariant, detail=""):
        self.invariant = invariant
        msg = f"invariant violated: {invariant}"
        super().__init__(f"{msg} ({detail})" if detail else msg)


class WriteFailure(ConfigError):
    """The output location is not writable."""
