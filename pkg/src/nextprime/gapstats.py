"""
Prime gaps and their running prefix aggregates.

``d_k = p_{k+1} - p_k`` with 1-based prime indices, so ``d_1 = 1``.  A
:class:`GapAggregate` holds exact integer sums (sum of gaps, sum of squared
gaps, number of gaps equal to 2) and Neumaier-compensated real sums of
``log d``, ``log d!`` and the harmonic number ``H(d)``.  Real sums are
always extended one gap at a time in increasing index order, which makes
an aggregate a pure function of ``k``: resuming from a checkpoint gives
bit-for-bit the same floats as an uninterrupted pass.

Checkpoint files are a single UTF-8 JSON object::

    {
      "version": 1,
      "engine_limit": <int>,
      "created_at": "<ISO-8601 UTC>",
      "aggregate": {
        "k": <int>, "last_prime": <int>, "sum_d": <int>, "sum_d2": <int>,
        "twin_gaps": <int>,
        "sum_log_d": ["<hex s>", "<hex c>"],
        "sum_log_d_factorial": ["<hex s>", "<hex c>"],
        "sum_harmonic": ["<hex s>", "<hex c>"]
      },
      "extra": <object or null>,
      "crc32": "<8 hex digits>"
    }

Reals are ``float.hex`` strings (running sum and compensation term).  The
CRC-32 covers the canonical encoding (sorted keys, no whitespace) of every
field except ``crc32`` itself.  ``extra`` carries caller state such as the
rows already emitted by an asymptotics table.
"""

from __future__ import annotations

import json
import math
import os
import zlib
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from typing import NamedTuple

import numpy as np

from .errors import (
    CheckpointError,
    CorruptedCheckpointError,
    IndexOutOfRangeError,
    RangeExceedsLimitError,
    VersionMismatchError,
)
from .sieve import PrimeEngine

__all__ = [
    "NeumaierSum",
    "GapAggregate",
    "Mode",
    "Checkpoint",
    "CHECKPOINT_VERSION",
    "log_factorial",
    "harmonic",
    "gap_at",
    "gaps_upto_index",
    "extend",
    "advance",
    "accumulate_to",
    "loglog_sum",
    "geometric_mean_ratio",
    "save_checkpoint",
    "read_checkpoint",
    "load_checkpoint",
    "validate_against",
]

CHECKPOINT_VERSION = 1

# Above this size log d! comes from lgamma instead of a direct sum of logs.
DIRECT_LOG_FACTORIAL_MAX = 256

_log_table = [0.0, 0.0]
_logfact_table = [0.0, 0.0]
_harm_table = [0.0, 1.0]


def _grow_tables(m: int) -> None:
    n = len(_log_table)
    if m < n:
        return
    logs = [math.log(j) for j in range(n, m + 1)]
    for j in range(n, m + 1):
        if j <= DIRECT_LOG_FACTORIAL_MAX:
            lf = math.fsum(math.log(i) for i in range(2, j + 1))
        else:
            lf = math.lgamma(j + 1)
        _logfact_table.append(lf)
        _harm_table.append(math.fsum(1.0 / i for i in range(1, j + 1)))
    _log_table.extend(logs)


def log_factorial(d: int) -> float:
    """``log(d!)``: direct sum of logs up to 256, ``lgamma`` beyond."""
    if d < 0:
        raise ValueError("log_factorial of a negative number")
    _grow_tables(d)
    return _logfact_table[d]


def harmonic(d: int) -> float:
    """Harmonic number ``H(d) = 1 + 1/2 + ... + 1/d`` (``H(0) = 0``)."""
    if d < 0:
        raise ValueError("harmonic of a negative number")
    _grow_tables(d)
    return _harm_table[d]


class NeumaierSum(NamedTuple):
    """Running sum ``s`` with Neumaier compensation ``c``."""

    s: float = 0.0
    c: float = 0.0

    @property
    def value(self) -> float:
        return self.s + self.c

    def __float__(self):
        return self.value


class Mode(str, Enum):
    """How ``accumulate_to`` interprets its target."""

    GAP_INDEX_BOUND = "gap_index_bound"  # gaps d_i with i <= target
    PRIME_VALUE_BOUND = "prime_value_bound"  # gaps d_i with p_i <= target


@dataclass(frozen=True)
class GapAggregate:
    """Prefix aggregates over the first ``k`` prime gaps.

    ``last_prime`` is ``p_{k+1}``; every real field is a :class:`NeumaierSum`,
    use ``float(agg.sum_log_d)`` for its value.
    """

    k: int = 0
    last_prime: int = 2
    sum_d: int = 0
    sum_d2: int = 0
    twin_gaps: int = 0
    sum_log_d: NeumaierSum = NeumaierSum()
    sum_log_d_factorial: NeumaierSum = NeumaierSum()
    sum_harmonic: NeumaierSum = NeumaierSum()

    def check_invariants(self) -> None:
        assert self.sum_d == self.last_prime - 2
        assert self.sum_d2 >= self.sum_d
        assert self.sum_d2 > self.sum_d or self.k <= 1
        assert 0 <= self.twin_gaps <= self.k
        assert float(self.sum_log_d_factorial) >= float(self.sum_log_d) >= 0.0


def _neumaier_extend(acc: NeumaierSum, table: list, gaps: list) -> NeumaierSum:
    s, c = acc
    for d in gaps:
        v = table[d]
        t = s + v
        if s >= v:
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
    return NeumaierSum(s, c)


def extend(agg: GapAggregate, gaps: np.ndarray) -> GapAggregate:
    """Return ``agg`` extended by the next consecutive gaps ``d_{k+1}, ...``."""
    if len(gaps) == 0:
        return agg
    g = np.asarray(gaps, dtype=np.int64)
    gl = g.tolist()
    _grow_tables(max(gl))
    return GapAggregate(
        k=agg.k + len(gl),
        last_prime=agg.last_prime + int(g.sum()),
        sum_d=agg.sum_d + int(g.sum()),
        sum_d2=agg.sum_d2 + int(np.dot(g, g)),
        twin_gaps=agg.twin_gaps + int(np.count_nonzero(g == 2)),
        sum_log_d=_neumaier_extend(agg.sum_log_d, _log_table, gl),
        sum_log_d_factorial=_neumaier_extend(agg.sum_log_d_factorial, _logfact_table, gl),
        sum_harmonic=_neumaier_extend(agg.sum_harmonic, _harm_table, gl),
    )


def gap_at(engine: PrimeEngine, k: int) -> int:
    """The k-th prime gap ``p_{k+1} - p_k``."""
    if k < 1:
        raise IndexOutOfRangeError(f"gap index must be >= 1, got {k}")
    return engine.nth_prime(k + 1) - engine.nth_prime(k)


def gaps_upto_index(engine: PrimeEngine, k: int) -> np.ndarray:
    """Array ``[d_1, ..., d_k]``."""
    if k < 0:
        raise IndexOutOfRangeError(f"gap count must be >= 0, got {k}")
    if k == 0:
        return np.zeros(0, dtype=np.int64)
    return np.diff(engine.primes_in(2, engine.nth_prime(k + 1)))


def advance(engine: PrimeEngine, agg: GapAggregate, k_target: int) -> GapAggregate:
    """Stream gaps from ``agg.k + 1`` through ``k_target`` into ``agg``."""
    if k_target < agg.k:
        raise ValueError(f"cannot rewind aggregate from k={agg.k} to {k_target}")
    if k_target == agg.k:
        return agg
    if k_target + 1 > engine.total_primes:
        raise RangeExceedsLimitError(
            f"gap d_{k_target} needs p_{k_target + 1}, beyond limit {engine.limit}"
        )
    end = engine.nth_prime(k_target + 1)
    prev = agg.last_prime
    for chunk in engine.iter_primes(prev + 1, end):
        gaps = np.diff(chunk, prepend=prev)
        agg = extend(agg, gaps)
        prev = int(chunk[-1])
    return agg


def accumulate_to(
    engine: PrimeEngine,
    target: int,
    mode: Mode | str = Mode.GAP_INDEX_BOUND,
    start: GapAggregate | None = None,
) -> GapAggregate:
    """Aggregate over gaps with index ``i <= target`` or prime ``p_i <= target``.

    In prime-value mode the gap starting at the largest prime ``<= target``
    is included, so the next prime above ``target`` must be sieved.
    """
    mode = Mode(mode)
    if mode is Mode.PRIME_VALUE_BOUND:
        engine._check(target)
        k = engine.prime_count(target)
        if k + 1 > engine.total_primes:
            raise RangeExceedsLimitError(
                f"gap after the last prime <= {target} needs primes beyond "
                f"limit {engine.limit}"
            )
    else:
        k = int(target)
        if k + 1 > engine.total_primes:
            raise RangeExceedsLimitError(
                f"gap d_{k} needs p_{k + 1}, beyond limit {engine.limit}"
            )
    return advance(engine, start or GapAggregate(), k)


def loglog_sum(n: int) -> float:
    """Correctly rounded ``sum_{i=2}^{n} log log i``."""
    if n < 2:
        return 0.0
    return math.fsum(np.log(np.log(np.arange(2, n + 1, dtype=np.float64))))


def geometric_mean_ratio(
    engine: PrimeEngine, n: int, agg: GapAggregate | None = None
) -> float:
    """``((d_2 ... d_n) / (log 2 ... log n)) ** (1/n)`` computed in log space.

    The exponent is ``1/n`` even though each product has ``n - 1`` factors.
    An aggregate already advanced to ``k = n`` may be passed in to skip the
    gap pass.
    """
    if n < 2:
        raise IndexOutOfRangeError(f"n must be >= 2, got {n}")
    if agg is None or agg.k != n:
        agg = accumulate_to(engine, n, Mode.GAP_INDEX_BOUND)
    return math.exp((float(agg.sum_log_d) - loglog_sum(n)) / n)


@dataclass(frozen=True)
class Checkpoint:
    version: int
    engine_limit: int
    aggregate: GapAggregate
    created_at: str
    extra: dict | None = None


def _agg_to_json(agg: GapAggregate) -> dict:
    out = {
        "k": agg.k,
        "last_prime": agg.last_prime,
        "sum_d": agg.sum_d,
        "sum_d2": agg.sum_d2,
        "twin_gaps": agg.twin_gaps,
    }
    for name in ("sum_log_d", "sum_log_d_factorial", "sum_harmonic"):
        pair = getattr(agg, name)
        out[name] = [float.hex(pair.s), float.hex(pair.c)]
    return out


def _agg_from_json(obj: dict) -> GapAggregate:
    reals = {
        name: NeumaierSum(float.fromhex(obj[name][0]), float.fromhex(obj[name][1]))
        for name in ("sum_log_d", "sum_log_d_factorial", "sum_harmonic")
    }
    return GapAggregate(
        k=int(obj["k"]),
        last_prime=int(obj["last_prime"]),
        sum_d=int(obj["sum_d"]),
        sum_d2=int(obj["sum_d2"]),
        twin_gaps=int(obj["twin_gaps"]),
        **reals,
    )


def _crc(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return f"{zlib.crc32(blob) & 0xFFFFFFFF:08x}"


def save_checkpoint(
    agg: GapAggregate, path, engine_limit: int, extra: dict | None = None
) -> Checkpoint:
    """Atomically write ``agg`` (plus optional ``extra`` state) to ``path``."""
    cp = Checkpoint(
        version=CHECKPOINT_VERSION,
        engine_limit=int(engine_limit),
        aggregate=agg,
        created_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        extra=extra,
    )
    payload = {
        "version": cp.version,
        "engine_limit": cp.engine_limit,
        "created_at": cp.created_at,
        "aggregate": _agg_to_json(agg),
        "extra": extra,
    }
    payload["crc32"] = _crc(payload)
    tmp = f"{os.fspath(path)}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)
    return cp


def read_checkpoint(path) -> Checkpoint:
    """Load and validate a checkpoint file."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    try:
        payload = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise CorruptedCheckpointError(f"checkpoint {path} is not valid JSON") from exc
    if not isinstance(payload, dict):
        raise CorruptedCheckpointError(f"checkpoint {path} is not a JSON object")
    if payload.get("version") != CHECKPOINT_VERSION:
        raise VersionMismatchError(
            f"checkpoint version {payload.get('version')!r}, "
            f"expected {CHECKPOINT_VERSION}"
        )
    stored = payload.pop("crc32", None)
    if stored != _crc(payload):
        raise CorruptedCheckpointError(f"checksum mismatch in {path}")
    try:
        agg = _agg_from_json(payload["aggregate"])
        return Checkpoint(
            version=payload["version"],
            engine_limit=int(payload["engine_limit"]),
            aggregate=agg,
            created_at=str(payload["created_at"]),
            extra=payload.get("extra"),
        )
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise CorruptedCheckpointError(f"malformed checkpoint {path}: {exc}") from exc


def load_checkpoint(path) -> GapAggregate:
    """Return the aggregate stored at ``path``."""
    return read_checkpoint(path).aggregate


def validate_against(agg: GapAggregate, engine: PrimeEngine) -> None:
    """Raise ``CheckpointError`` unless ``agg`` is consistent with ``engine``."""
    if agg.k + 1 > engine.total_primes:
        raise CheckpointError(
            f"checkpoint reached k={agg.k}, beyond what limit {engine.limit} sieves"
        )
    if engine.nth_prime(agg.k + 1) != agg.last_prime or agg.sum_d != agg.last_prime - 2:
        raise CheckpointError("checkpoint aggregate does not match the prime sequence")

