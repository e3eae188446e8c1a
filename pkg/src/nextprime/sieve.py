"""
Segmented, bit-packed sieve of Eratosthenes over the odd numbers.

The engine is built once up to a fixed ``limit`` and then answers
prime-counting, n-th prime, next-prime and twin-prime queries.  Bit ``i``
of the packed array stands for the odd number ``2*i + 1``; the prime 2 is
handled separately.  Alongside the bits the engine keeps one cumulative
prime count per segment, so ``prime_count`` costs one index lookup plus a
popcount over a short stretch of bytes (a finer 512-byte count index sits
under the per-segment one).

Queries never extrapolate past ``limit``: anything that would need a
prime above it raises :class:`~nextprime.errors.RangeExceedsLimitError`.
The one exception is :meth:`PrimeEngine.is_prime`, which falls back to a
deterministic Miller-Rabin test for arguments above the limit (valid for
every n < 3.3e24, which covers all 64-bit inputs).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import IndexOutOfRangeError, RangeExceedsLimitError

__all__ = ["SieveConfig", "PrimeEngine", "small_primes", "miller_rabin"]

# Granularity (bytes) of the fine cumulative-count index used by lookups.
_BLOCK = 512

# Witness set that is deterministic for n < 3,317,044,064,679,887,385,961,981.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_BOUND = 3_317_044_064_679_887_385_961_981


@dataclass(frozen=True)
class SieveConfig:
    """Construction parameters for :class:`PrimeEngine`.

    Parameters
    ----------
    limit : int
        Largest integer that is sieved (inclusive).
    segment_size : int
        Bytes of packed bits per segment.  One byte covers 16 integers.
    parallel_segments : int
        Worker threads used while sieving; 0 picks ``os.cpu_count()``.
    """

    limit: int
    segment_size: int = 1 << 17
    parallel_segments: int = 0

    def __post_init__(self):
        if self.limit < 2:
            raise ValueError(f"limit must be >= 2, got {self.limit}")
        if self.segment_size < 1024 or self.segment_size % 2:
            raise ValueError(
                f"segment_size must be even and >= 1024, got {self.segment_size}"
            )
        if self.parallel_segments < 0:
            raise ValueError("parallel_segments must be >= 0")


def small_primes(n: int) -> np.ndarray:
    """Plain (unsegmented) sieve returning all primes <= n as int64."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    return np.flatnonzero(flags).astype(np.int64)


def miller_rabin(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    if n >= _MR_BOUND:
        raise ValueError("deterministic primality test only covers n < 3.3e24")
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _sieve_segment(i0: int, i1: int, base: np.ndarray) -> tuple[np.ndarray, int]:
    # Odd indices [i0, i1) -> packed little-endian bits and prime count.
    lo_v = 2 * i0 + 1
    hi_v = 2 * (i1 - 1) + 1
    flags = np.ones(i1 - i0, dtype=bool)
    for p in base:
        p = int(p)
        sq = p * p
        if sq > hi_v:
            break
        if sq >= lo_v:
            m = sq
        else:
            m = -(-lo_v // p) * p
            if m % 2 == 0:
                m += p
        flags[(m - 1) // 2 - i0 :: p] = False
    if i0 == 0:
        flags[0] = False  # the number 1
    return np.packbits(flags, bitorder="little"), int(np.count_nonzero(flags))


class PrimeEngine:
    """Sieved primes up to ``config.limit`` with counting and lookup queries.

    All query methods are read-only once construction has finished, so one
    engine may be shared between threads.

    Examples
    --------
    >>> eng = PrimeEngine(SieveConfig(limit=100))
    >>> eng.prime_count(100), eng.nth_prime(25), eng.next_prime(89)
    (25, 97, 97)
    """

    def __init__(self, config: SieveConfig | int):
        if not isinstance(config, SieveConfig):
            config = SieveConfig(limit=int(config))
        self.config = config
        limit = config.limit
        self._n_idx = (limit + 1) // 2
        self._seg_bits = 8 * config.segment_size
        n_seg = -(-self._n_idx // self._seg_bits)
        base = small_primes(math.isqrt(limit))[1:]  # odd base primes

        bounds = [
            (j * self._seg_bits, min((j + 1) * self._seg_bits, self._n_idx))
            for j in range(n_seg)
        ]
        workers = config.parallel_segments or os.cpu_count() or 1
        if workers > 1 and n_seg > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                parts = list(pool.map(lambda b: _sieve_segment(*b, base), bounds))
        else:
            parts = [_sieve_segment(i0, i1, base) for i0, i1 in bounds]

        self._bits = np.concatenate([p[0] for p in parts])
        counts = np.array([p[1] for p in parts], dtype=np.int64)
        # prime_count_index[j] = number of odd primes in segments before j
        self.prime_count_index = np.concatenate(([0], np.cumsum(counts)))
        self._block_index = self._build_block_index()
        self.total_primes = 1 + int(self.prime_count_index[-1])
        self.largest_prime_found = self.nth_prime(self.total_primes)

    def __repr__(self):
        return (
            f"PrimeEngine(limit={self.limit}, primes={self.total_primes}, "
            f"largest={self.largest_prime_found})"
        )

    @property
    def limit(self) -> int:
        return self.config.limit

    def _check(self, x: int, what: str = "argument") -> None:
        if x > self.config.limit:
            raise RangeExceedsLimitError(
                f"{what} {x} exceeds sieve limit {self.config.limit}"
            )

    def _bit(self, i: int) -> bool:
        return bool((self._bits[i >> 3] >> (i & 7)) & 1)

    def _build_block_index(self) -> np.ndarray:
        # Cumulative odd-prime counts at every _BLOCK-byte boundary; a finer
        # companion to the per-segment index so lookups scan <= _BLOCK bytes.
        n_blocks = -(-len(self._bits) // _BLOCK)
        counts = np.empty(n_blocks, dtype=np.int64)
        step = 4096
        for j0 in range(0, n_blocks, step):
            j1 = min(j0 + step, n_blocks)
            chunk = self._bits[j0 * _BLOCK : j1 * _BLOCK]
            pad = (j1 - j0) * _BLOCK - len(chunk)
            if pad:
                chunk = np.concatenate((chunk, np.zeros(pad, dtype=np.uint8)))
            counts[j0:j1] = np.bitwise_count(chunk).reshape(-1, _BLOCK).sum(axis=1)
        return np.concatenate(([0], np.cumsum(counts)))

    def _count_odd_through(self, idx: int) -> int:
        # Number of odd primes with bit index <= idx.
        byte = idx >> 3
        j = byte // _BLOCK
        total = int(self._block_index[j])
        total += int(np.bitwise_count(self._bits[j * _BLOCK : byte]).sum())
        total += (int(self._bits[byte]) & ((1 << ((idx & 7) + 1)) - 1)).bit_count()
        return total

    def is_prime(self, n: int) -> bool:
        """Primality of ``n``; sieve lookup up to the limit, Miller-Rabin above."""
        n = int(n)
        if n > self.config.limit:
            return miller_rabin(n)
        if n < 2:
            return False
        if n % 2 == 0:
            return n == 2
        return self._bit((n - 1) // 2)

    def prime_count(self, x: int) -> int:
        """Number of primes <= x."""
        x = int(x)
        self._check(x)
        if x < 2:
            return 0
        if x < 3:
            return 1
        return 1 + self._count_odd_through((x - 1) // 2)

    def nth_prime(self, k: int) -> int:
        """The k-th prime, 1-based (``nth_prime(1) == 2``)."""
        k = int(k)
        if k < 1:
            raise IndexOutOfRangeError(f"prime index must be >= 1, got {k}")
        if k > self.total_primes:
            raise IndexOutOfRangeError(
                f"p_{k} lies beyond the sieve limit {self.config.limit} "
                f"(only {self.total_primes} primes sieved)"
            )
        if k == 1:
            return 2
        r = k - 1
        j = int(np.searchsorted(self._block_index, r, side="left")) - 1
        chunk = self._bits[j * _BLOCK : (j + 1) * _BLOCK]
        hits = np.flatnonzero(np.unpackbits(chunk, bitorder="little"))
        i = 8 * j * _BLOCK + int(hits[r - int(self._block_index[j]) - 1])
        return 2 * i + 1

    def next_prime(self, n: int) -> int:
        """Smallest prime strictly greater than ``n``."""
        n = int(n)
        if n < 2:
            return 2
        v = n + 1 if n % 2 == 0 else n + 2
        self._check(v, "next prime candidate")
        idx = (v - 1) // 2
        b = idx >> 3
        width = 64
        nbytes = len(self._bits)
        while b < nbytes:
            chunk = np.unpackbits(self._bits[b : b + width], bitorder="little")
            hits = np.flatnonzero(chunk[max(idx - 8 * b, 0) :])
            if hits.size:
                return 2 * (max(idx, 8 * b) + int(hits[0])) + 1
            b += width
            width *= 2
        raise RangeExceedsLimitError(
            f"next prime after {n} exceeds sieve limit {self.config.limit}"
        )

    def primes_in(self, lo: int, hi: int) -> np.ndarray:
        """All primes p with lo <= p <= hi, increasing, as an int64 array."""
        lo, hi = int(lo), int(hi)
        self._check(hi)
        lo = max(lo, 2)
        if hi < lo:
            return np.zeros(0, dtype=np.int64)
        i0 = max(lo, 3) // 2
        i1 = (hi - 1) // 2
        out = np.zeros(0, dtype=np.int64)
        if i1 >= i0:
            b0, b1 = i0 >> 3, (i1 >> 3) + 1
            flags = np.unpackbits(self._bits[b0:b1], bitorder="little")
            flags = flags[i0 - 8 * b0 : i1 - 8 * b0 + 1]
            out = 2 * (np.flatnonzero(flags).astype(np.int64) + i0) + 1
        if lo <= 2:
            out = np.concatenate((np.array([2], dtype=np.int64), out))
        return out

    def iter_primes(self, lo: int, hi: int, chunk: int | None = None) -> Iterator[np.ndarray]:
        """Yield the primes of ``[lo, hi]`` as consecutive increasing arrays.

        ``chunk`` is the span of integers per yielded array (default: one
        segment).
        """
        lo, hi = int(lo), int(hi)
        self._check(hi)
        span = chunk or 2 * self._seg_bits
        start = lo
        while start <= hi:
            stop = min(hi, start + span - 1)
            arr = self.primes_in(start, stop)
            if arr.size:
                yield arr
            start = stop + 1

    def twin_prime_count(self, x: int) -> int:
        """Number of primes p <= x with p + 2 also prime."""
        x = int(x)
        self._check(x + 2, "twin partner bound")
        if x < 3:
            return 0
        last = (x - 1) // 2  # bit index of the largest odd <= x
        total = 0
        step = 1 << 20
        nbytes = len(self._bits)
        for b0 in range(0, (last >> 3) + 1, step):
            b1 = min(b0 + step, (last >> 3) + 1)
            cur = self._bits[b0:b1]
            nxt = self._bits[b0 + 1 : b1 + 1]
            if b1 + 1 > nbytes:
                nxt = np.concatenate((nxt, np.zeros(1, dtype=np.uint8)))
            pair = cur & ((cur >> 1) | (nxt << 7))
            if b1 == (last >> 3) + 1:
                pair = pair.copy()
                pair[-1] &= (1 << ((last & 7) + 1)) - 1
            total += int(np.bitwise_count(pair).sum())
        return total
