"""
The distance-to-next-prime sequence ``a_n`` (OEIS A013632).

``a_n`` is the least ``t >= 1`` with ``n + t`` prime, i.e.
``a_n = p_{pi(n)+1} - n``.  On each block ``[p_k, p_{k+1} - 1]`` the values
count down ``d_k, d_k - 1, ..., 1``, and bulk evaluation is built from those
runs rather than from per-``n`` next-prime lookups.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterator, NamedTuple

import numpy as np

from .errors import RangeExceedsLimitError
from .sieve import PrimeEngine

__all__ = [
    "SequenceRecord",
    "a_of",
    "a_values",
    "stream_a",
    "solution_count",
    "smallest_prime_factor_table",
    "gcd_characterization_check",
]


class SequenceRecord(NamedTuple):
    n: int
    a_n: int


def a_of(engine: PrimeEngine, n: int) -> int:
    """``a_n = next_prime(n) - n`` for ``n >= 1``."""
    if n < 1:
        raise ValueError(f"a_n is defined for n >= 1, got {n}")
    return engine.next_prime(n) - n


def _block_primes(engine: PrimeEngine, lo: int, hi: int) -> np.ndarray:
    # Primes p_k <= lo < ... through the first prime > hi.
    if hi + 1 > engine.limit:
        raise RangeExceedsLimitError(
            f"a_{hi} needs the next prime after {hi}, beyond limit {engine.limit}"
        )
    start = 2 if lo < 2 else lo
    while start > 2 and not engine.is_prime(start):
        start -= 1
    end = engine.next_prime(hi)
    return engine.primes_in(start, end)


def a_values(engine: PrimeEngine, lo: int, hi: int) -> np.ndarray:
    """``[a_lo, ..., a_hi]`` as an int64 array, built from countdown runs."""
    if lo < 1 or hi < lo:
        raise ValueError(f"need 1 <= lo <= hi, got lo={lo}, hi={hi}")
    primes = _block_primes(engine, lo, hi)
    if lo < 2:
        # n = 1 sits before the first block and counts down to p_1 = 2
        primes = np.concatenate(([1], primes))
    first = int(primes[0])
    gaps = np.diff(primes)
    # next prime of every n in [first, primes[-1]) then subtract n
    nxt = np.repeat(primes[1:], gaps)
    vals = nxt - np.arange(first, int(primes[-1]), dtype=np.int64)
    return vals[lo - first : hi - first + 1]


def stream_a(
    engine: PrimeEngine, lo: int, hi: int, chunk: int = 1 << 20
) -> Iterator[SequenceRecord]:
    """Yield ``SequenceRecord(n, a_n)`` for ``lo <= n <= hi`` in order."""
    start = lo
    while start <= hi:
        stop = min(hi, start + chunk - 1)
        vals = a_values(engine, start, stop)
        for n, a in zip(range(start, stop + 1), vals.tolist()):
            yield SequenceRecord(n, a)
        start = stop + 1


def solution_count(engine: PrimeEngine, a: int, x: int) -> int:
    """Number of ``n <= x`` with ``a_n = a``.

    Counts blocks whose gap is at least ``a`` instead of visiting every n:
    a full block ``[p_k, p_{k+1} - 1]`` contains the value ``a`` exactly once
    when ``d_k >= a``, the last (partial) block ``[p_m, x]`` holds the values
    ``d_m`` down to ``d_m - (x - p_m)``, and ``n = 1`` adds one to ``a = 1``.
    """
    if a < 1:
        raise ValueError(f"a must be >= 1, got {a}")
    if x < 1:
        return 0
    count = 1 if a == 1 else 0
    if x < 2:
        return count
    nxt = engine.next_prime(x)  # raises when x's block is not fully sieved
    primes = engine.primes_in(2, nxt)
    gaps = np.diff(primes)
    count += int(np.count_nonzero(gaps[:-1] >= a))
    d_m = int(gaps[-1])
    lowest = d_m - (x - int(primes[-2]))
    if lowest <= a <= d_m:
        count += 1
    return count


@lru_cache(maxsize=4)
def smallest_prime_factor_table(bound: int) -> np.ndarray:
    """``spf[m]`` for ``0 <= m <= bound`` from its own sieve pass (no engine involved)."""
    spf = np.zeros(bound + 1, dtype=np.int64)
    for p in range(2, bound + 1):
        if spf[p] == 0:
            spf[p] = p
            block = spf[p * p :: p] if p * p <= bound else spf[:0]
            block[block == 0] = p
    return spf


def gcd_characterization_check(engine: PrimeEngine, n: int, bound: int = 10_000) -> bool:
    """Cross-check ``a_n`` against the coprime-to-``n!`` description.

    The least ``t >= 1`` with ``gcd(n!, n + t) = 1`` is the least ``t`` whose
    ``n + t`` has no prime factor ``<= n``; that is tested through a
    smallest-prime-factor table, without ever forming ``n!``.
    """
    if not 2 <= n <= bound:
        raise ValueError(f"n must lie in [2, {bound}], got {n}")
    # Bertrand: the answer is below 2n, so the table never runs out.
    spf = smallest_prime_factor_table(2 * bound + 2)
    t = 1
    while spf[n + t] <= n:
        t += 1
    return t == a_of(engine, n)

