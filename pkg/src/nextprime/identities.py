"""
Closed forms for the partial sums and products of ``a_n``, with brute-force
oracles to check them against.

With ``m = pi(n)``, ``p = p_m``, ``q = p_{m+1}`` and ``D2 = sum_{k<m} d_k^2``,
for every ``n >= 3``::

    S_n     = (p^2 + 2 (n + 1 - p) q + D2 - n^2 - n) / 2
    P_{n-1} = prod_{k<m} d_k!  *  (q - p)! / (q - p - (n - p))!

When ``n`` is prime the second factor of ``P_{n-1}`` is an empty product and
the sum formula collapses to ``(2q - p + D2) / 2``.  Scalar functions use
Python integers, so ``S_n`` and exact products cannot overflow.  The
``*_upto`` array helpers use int64 and refuse inputs above 2**30, where
``n^2`` would start to crowd the int64 range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal

import numpy as np

from .errors import ExactCapExceededError, NextPrimeError
from .gapstats import Mode, accumulate_to, gaps_upto_index, log_factorial
from .sequence import a_values
from .sieve import PrimeEngine

__all__ = [
    "IdentityReport",
    "DEFAULT_EXACT_CAP",
    "sum_a_brute",
    "sum_a_closed",
    "prod_a_closed",
    "prod_a_brute",
    "verify_identities",
    "sum_a_closed_upto",
    "sum_a_brute_upto",
    "log_prod_closed_upto",
    "log_prod_brute_upto",
]

DEFAULT_EXACT_CAP = 100_000
LOG_RTOL = 1e-9
_ARRAY_MAX = 1 << 30

ProdMode = Literal["log", "exact"]


def _block(engine: PrimeEngine, n: int) -> tuple[int, int, int]:
    # (m, p_m, p_{m+1}) for the block containing n >= 2
    m = engine.prime_count(n)
    q = engine.next_prime(n)
    return m, engine.nth_prime(m), q


def sum_a_brute(engine: PrimeEngine, n: int, chunk: int = 1 << 22) -> int:
    """``S_n`` by adding up the streamed values ``a_1 .. a_n``."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    total = 0
    for lo in range(1, n + 1, chunk):
        total += int(a_values(engine, lo, min(n, lo + chunk - 1)).sum())
    return total


def sum_a_closed(engine: PrimeEngine, n: int) -> int:
    """``S_n`` from the gap-square closed form (special-cased for n < 3)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n < 3:
        return n  # a_1 = a_2 = 1
    m, p, q = _block(engine, n)
    g = gaps_upto_index(engine, m - 1)
    d2 = int(np.dot(g, g))
    bracket = p * p + 2 * (n + 1 - p) * q + d2 - n * n - n
    if bracket % 2:
        raise ArithmeticError(f"odd bracket {bracket} in S_{n} closed form")
    return bracket // 2


def _check_prod_args(n: int, mode: str, exact_cap: int) -> None:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if mode not in ("log", "exact"):
        raise ValueError(f"mode must be 'log' or 'exact', got {mode!r}")
    if mode == "exact" and n > exact_cap:
        raise ExactCapExceededError(f"exact product for n={n} exceeds cap {exact_cap}")


def prod_a_closed(
    engine: PrimeEngine,
    n: int,
    mode: ProdMode = "log",
    exact_cap: int = DEFAULT_EXACT_CAP,
) -> float | int:
    """``P_{n-1} = a_1 ... a_{n-1}`` from factorials of prime gaps.

    ``mode="log"`` returns the natural log, ``mode="exact"`` the integer.
    """
    _check_prod_args(n, mode, exact_cap)
    if n < 3:
        return 0.0 if mode == "log" else 1
    m, p, q = _block(engine, n)
    d, t = q - p, n - p
    if mode == "exact":
        counts = np.bincount(gaps_upto_index(engine, m - 1))
        out = 1
        for gap, c in enumerate(counts.tolist()):
            if c:
                out *= math.factorial(gap) ** c
        return out * (math.factorial(d) // math.factorial(d - t))
    agg = accumulate_to(engine, m - 1, Mode.GAP_INDEX_BOUND)
    tail = math.fsum(math.log(d - j) for j in range(t))
    return float(agg.sum_log_d_factorial) + tail


def prod_a_brute(
    engine: PrimeEngine,
    n: int,
    mode: ProdMode = "log",
    exact_cap: int = DEFAULT_EXACT_CAP,
) -> float | int:
    """``P_{n-1}`` directly from the streamed values ``a_1 .. a_{n-1}``."""
    _check_prod_args(n, mode, exact_cap)
    if n < 2:
        return 0.0 if mode == "log" else 1
    vals = a_values(engine, 1, n - 1)
    if mode == "log":
        return math.fsum(np.log(vals.astype(np.float64)))
    out = 1
    for v, c in enumerate(np.bincount(vals).tolist()):
        if c:
            out *= v**c
    return out


@dataclass
class IdentityReport:
    """Closed form next to brute force for one ``n``."""

    n: int
    s_closed: int | None = None
    s_brute: int | None = None
    log_p_closed: float | None = None
    log_p_brute: float | None = None
    p_exact_closed: int | None = None
    p_exact_brute: int | None = None
    branch_used: str = "composite_branch"
    error: str | None = None

    @property
    def sum_ok(self) -> bool:
        return self.s_closed is not None and self.s_closed == self.s_brute

    @property
    def log_ok(self) -> bool:
        if self.log_p_closed is None or self.log_p_brute is None:
            return False
        diff = abs(self.log_p_closed - self.log_p_brute)
        return diff <= LOG_RTOL * max(1.0, abs(self.log_p_brute))

    @property
    def exact_ok(self) -> bool:
        return self.p_exact_closed == self.p_exact_brute

    @property
    def mismatch(self) -> bool:
        """True when both sides were computed and disagree."""
        return self.error is None and not (self.sum_ok and self.log_ok and self.exact_ok)

    @property
    def passed(self) -> bool:
        return self.error is None and not self.mismatch


def verify_identities(
    engine: PrimeEngine,
    n_list: Iterable[int],
    exact_products: bool = False,
    exact_cap: int = DEFAULT_EXACT_CAP,
) -> list[IdentityReport]:
    """One :class:`IdentityReport` per ``n``; errors are recorded, not raised.

    Exact products are only attempted for ``n <= exact_cap``.
    """
    reports = []
    for n in n_list:
        n = int(n)
        rep = IdentityReport(n=n)
        try:
            if n < 3:
                rep.branch_used = "special_case"
            elif engine.is_prime(n):
                rep.branch_used = "prime_branch"
            rep.s_closed = sum_a_closed(engine, n)
            rep.s_brute = sum_a_brute(engine, n)
            rep.log_p_closed = prod_a_closed(engine, n, "log")
            rep.log_p_brute = prod_a_brute(engine, n, "log")
            if exact_products and n <= exact_cap:
                rep.p_exact_closed = prod_a_closed(engine, n, "exact", exact_cap)
                rep.p_exact_brute = prod_a_brute(engine, n, "exact", exact_cap)
        except (NextPrimeError, ArithmeticError, ValueError) as exc:
            rep.error = f"{type(exc).__name__}: {exc}"
        reports.append(rep)
    return reports


# Whole-range array versions: index i holds the value for n = i (index 0 unused).


def _arrays_upto(engine: PrimeEngine, n_max: int):
    if not 1 <= n_max <= _ARRAY_MAX:
        raise ValueError(f"n_max must lie in [1, 2**30], got {n_max}")
    primes = engine.primes_in(2, engine.next_prime(n_max))
    n = np.arange(n_max + 1, dtype=np.int64)
    m = np.searchsorted(primes, n, side="right")  # pi(n)
    return primes, n, m


def sum_a_closed_upto(engine: PrimeEngine, n_max: int) -> np.ndarray:
    """``S_n`` for all ``0 <= n <= n_max`` from the closed form."""
    primes, n, m = _arrays_upto(engine, n_max)
    gaps = np.diff(primes)
    d2 = np.concatenate(([0], np.cumsum(gaps * gaps)))
    out = n.copy()  # S_0 = 0, S_1 = 1, S_2 = 2
    sel = n >= 3
    nn, mm = n[sel], m[sel]
    p, q = primes[mm - 1], primes[mm]
    bracket = p * p + 2 * (nn + 1 - p) * q + d2[mm - 1] - nn * nn - nn
    if np.any(bracket & 1):
        bad = int(nn[np.flatnonzero(bracket & 1)[0]])
        raise ArithmeticError(f"odd bracket in S_{bad} closed form")
    out[sel] = bracket // 2
    return out


def sum_a_brute_upto(engine: PrimeEngine, n_max: int) -> np.ndarray:
    """``S_n`` for all ``0 <= n <= n_max`` by cumulative summation."""
    if not 1 <= n_max <= _ARRAY_MAX:
        raise ValueError(f"n_max must lie in [1, 2**30], got {n_max}")
    return np.concatenate(([0], np.cumsum(a_values(engine, 1, n_max))))


def _logfact_lookup(max_d: int) -> np.ndarray:
    return np.array([log_factorial(j) for j in range(max_d + 1)], dtype=np.float64)


def log_prod_closed_upto(engine: PrimeEngine, n_max: int) -> np.ndarray:
    """``log P_{n-1}`` for all ``0 <= n <= n_max`` from gap factorials.

    Prefix sums run in extended precision (``np.longdouble``).
    """
    primes, n, m = _arrays_upto(engine, n_max)
    gaps = np.diff(primes)
    lf = _logfact_lookup(int(gaps.max()))
    pref = np.concatenate(([0.0], np.cumsum(lf[gaps].astype(np.longdouble))))
    out = np.zeros(n_max + 1, dtype=np.float64)
    sel = n >= 3
    nn, mm = n[sel], m[sel]
    p, q = primes[mm - 1], primes[mm]
    d, t = q - p, nn - p
    tail = lf[d] - lf[d - t]
    out[sel] = (pref[mm - 1] + tail).astype(np.float64)
    return out


def log_prod_brute_upto(engine: PrimeEngine, n_max: int) -> np.ndarray:
    """``log P_{n-1}`` for all ``0 <= n <= n_max`` by summing ``log a_i``."""
    if not 1 <= n_max <= _ARRAY_MAX:
        raise ValueError(f"n_max must lie in [1, 2**30], got {n_max}")
    logs = np.log(a_values(engine, 1, n_max).astype(np.float64)).astype(np.longdouble)
    # P_{n-1} needs a_1 .. a_{n-1}: shift by one
    out = np.concatenate(([0.0, 0.0], np.cumsum(logs)[:-1]))
    return out.astype(np.float64)
