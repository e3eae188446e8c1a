"""Exception types raised by the library."""


class NextPrimeError(Exception):
    """Base class for all library errors."""


class RangeExceedsLimitError(NextPrimeError, ValueError):
    """A query needs primes beyond the sieved limit."""


class IndexOutOfRangeError(NextPrimeError, IndexError):
    """A prime or gap index lies outside the sieved range."""


class ExactCapExceededError(NextPrimeError, ValueError):
    """Exact big-integer products were requested above the configured cap."""


class InsufficientPointsError(NextPrimeError, ValueError):
    """A regression was asked to fit fewer than three points."""


class CheckpointError(NextPrimeError):
    """Base class for checkpoint I/O problems."""


class VersionMismatchError(CheckpointError):
    pass


class CorruptedCheckpointError(CheckpointError):
    pass
