"""Distance to the next prime, its sums and products, and prime-gap statistics."""

from .errors import (
    CheckpointError,
    CorruptedCheckpointError,
    ExactCapExceededError,
    IndexOutOfRangeError,
    InsufficientPointsError,
    NextPrimeError,
    RangeExceedsLimitError,
    VersionMismatchError,
)
from .gapstats import GapAggregate, Mode, accumulate_to, gap_at, geometric_mean_ratio
from .identities import (
    IdentityReport,
    prod_a_brute,
    prod_a_closed,
    sum_a_brute,
    sum_a_closed,
    verify_identities,
)
from .sequence import SequenceRecord, a_of, a_values, solution_count, stream_a
from .sieve import PrimeEngine, SieveConfig

__version__ = "0.1.0"
