"""Exception hierarchy shared across the package."""


class DriftScanError(Exception):
    """Base class for every error raised by driftscan."""


class LogParseError(DriftScanError, ValueError):
    """Raised when an event log cannot be parsed.

    ``location`` names the offending line (CSV) or element (XES) when known.
    """

    def __init__(self, message, location=None):
        self.location = location
        if location is not None:
            message = f"{message} (at {location})"
        super().__init__(message)


class WindowBoundsError(DriftScanError, IndexError):
    pass


class NetStructureError(DriftScanError, ValueError):
    """The arcs/places/transitions given do not form a valid workflow-shaped net."""


class TransitionNotEnabled(DriftScanError, RuntimeError):
    pass


class ReplayBudgetExceeded(DriftScanError, RuntimeError):
    """Replay explored more distinct markings than allowed.

    Distinct from a negative replay result: the answer is unknown.
    """


class DegenerateModelError(DriftScanError, ValueError):
    pass


class TreeSyntaxError(DriftScanError, ValueError):
    pass


class PatternError(DriftScanError, ValueError):
    """Invalid change pattern or a selector that does not fit the pattern."""


class ConfigurationError(DriftScanError, ValueError):
    pass


class InputTooSmallError(DriftScanError, ValueError):
    pass
