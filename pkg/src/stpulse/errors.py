"""Exception hierarchy.

Every error raised by the package derives from :class:`AnalysisError` so the
CLI can report ``<ErrorName>: message`` and exit nonzero.
"""


class AnalysisError(Exception):
    """Base class for all stpulse errors."""


# waveform primitives
class NonFiniteSample(AnalysisError, ValueError):
    pass


class NonPositiveStep(AnalysisError, ValueError):
    pass


class TooShort(AnalysisError, ValueError):
    pass


class ZeroGain(AnalysisError, ValueError):
    pass


class WindowOutOfRange(AnalysisError, ValueError):
    pass


class NoTransient(AnalysisError):
    pass


class MultipleAmbiguous(AnalysisError):
    pass


class Misaligned(AnalysisError, ValueError):
    pass


# Sawyer-Tower
class NonPositiveCapacitance(AnalysisError, ValueError):
    pass


class NotClosed(AnalysisError):
    pass


class DegenerateLoop(AnalysisError):
    pass


class NonMonotoneBranch(AnalysisError, ValueError):
    pass


class TooFewPoints(AnalysisError, ValueError):
    pass


# loss model
class NegativeComponent(AnalysisError):
    def __init__(self, component, value):
        self.component = component
        self.value = value
        super().__init__(f"{component} = {value:.6g} J is negative; "
                         "inputs are inconsistent (check windows and deskew)")


class MissingChannel(AnalysisError, KeyError):
    def __init__(self, label):
        self.label = label
        super().__init__(label)

    def __str__(self):
        return f"capture has no channel {self.label!r}"


# simulator
class StepTooCoarse(AnalysisError, ValueError):
    pass


class ModelNotInvertible(AnalysisError, ValueError):
    pass


class NonMonotoneCharge(AnalysisError):
    pass


# file formats
class _Located(AnalysisError):
    """Error tied to a file position (1-based line numbers)."""

    def __init__(self, message, path=None, line=None):
        self.path = None if path is None else str(path)
        self.line = line
        where = ""
        if self.path is not None:
            where = self.path
            if line is not None:
                where += f":{line}"
            where += ": "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(where + message)


class MalformedRow(_Located):
    pass


class NonUniformTimebase(_Located):
    pass


class MissingColumn(_Located):
    pass


class UnknownKey(_Located):
    pass


class MissingRequired(_Located):
    pass


class UnparseableValue(_Located):
    pass


class IoFailure(_Located):
    pass
