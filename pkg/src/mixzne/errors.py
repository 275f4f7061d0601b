"""Exception hierarchy shared across the package."""


class MixZNEError(Exception):
    """Base class for every error raised by mixzne."""


class InvalidInputError(MixZNEError, ValueError):
    pass


class DegenerateScheduleError(InvalidInputError):
    """Two noise levels coincide (or nearly so), so the extrapolation is undefined."""


class InvalidIntervalError(InvalidInputError):
    pass


class ScheduleOverlapError(InvalidInputError):
    """The logical anchor does not sit strictly below the physical points."""


class NoCorrectionError(InvalidInputError):
    """gamma >= 1: error correction gives no suppression."""


class InvalidProbabilityError(InvalidInputError):
    pass


class InvalidFoldError(InvalidInputError):
    pass


class CapacityError(MixZNEError):
    """Requested system is too large for dense simulation."""


class IncompleteDatasetError(MixZNEError):
    pass


class DatasetParseError(MixZNEError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ConfigError(MixZNEError):
    pass
