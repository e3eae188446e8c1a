"""
Ratio and residual tables for the growth of sums over ``a_n`` and ``d_n``.

Every sum over ``n <= x`` is assembled block by block: the full blocks
``[p_k, p_{k+1} - 1]`` for ``k < pi(x)`` contribute closed sub-sums taken
from a :class:`~nextprime.gapstats.GapAggregate` (``d(d+1)/2`` for ``a_n``,
``H(d)`` for ``1/a_n``, ``log d!`` for ``log a_n``) and only the partial
block ``[p_{pi(x)}, x]`` is summed term by term.  The cost is O(pi(x)).

A table is one sequential pass over the gaps that snapshots a row at each
grid point.  The pass may save a checkpoint after every row and pick up
from one later; rows are the same bits either way.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import CheckpointError, InsufficientPointsError
from .gapstats import (
    GapAggregate,
    advance,
    geometric_mean_ratio,
    read_checkpoint,
    save_checkpoint,
    validate_against,
)
from .sieve import PrimeEngine

__all__ = [
    "RatioRow",
    "ExponentFit",
    "TABLES",
    "GAP_SQUARE_EXPONENT",
    "default_grid",
    "sum_a_upto",
    "harmonic_upto",
    "log_a_upto",
    "log_gap_sum",
    "gap_square_sum",
    "run_table",
    "table_sum_a",
    "table_harmonic",
    "table_log_a",
    "table_lemma6",
    "table_gap_squares",
    "table_panaitopol",
    "gap_square_exponent",
    "fit_power_law",
    "log_sum_floor",
]

GAP_SQUARE_EXPONENT = 23 / 18


@dataclass(frozen=True)
class RatioRow:
    x: int
    raw: float
    normalizer: float
    ratio: float
    residual: float | None
    label: str


@dataclass(frozen=True)
class ExponentFit:
    """Least-squares line through ``(log x, log y)``."""

    slope: float
    intercept: float
    r_squared: float
    points_used: int
    rows: tuple[RatioRow, ...] = field(default=(), compare=False)


def default_grid(lo: int = 10**3, hi: int = 10**8, factor: int = 10) -> list[int]:
    out, x = [], lo
    while x <= hi:
        out.append(x)
        x *= factor
    return out


def _partial_block(engine: PrimeEngine, x: int) -> tuple[int, int, int]:
    # (m, d_m, t): x lies in block m, whose first t values d_m, ..., d_m - t + 1
    m = engine.prime_count(x)
    p = engine.nth_prime(m)
    return m, engine.next_prime(x) - p, x - p + 1


def _agg_for_values(engine, x, agg):
    m = engine.prime_count(x)
    return advance(engine, agg or GapAggregate(), m - 1)


# Raw sums.  Each accepts an aggregate already advanced to k = pi(x) - 1
# (or to the gap index for the gap sums); without one it makes its own pass.


def sum_a_upto(engine: PrimeEngine, x: int, agg: GapAggregate | None = None) -> int:
    """``sum_{n <= x} a_n`` (exact integer)."""
    if x < 2:
        return max(x, 0)
    m, d, t = _partial_block(engine, x)
    if agg is None or agg.k != m - 1:
        agg = _agg_for_values(engine, x, agg)
    full = (agg.sum_d2 + agg.sum_d) // 2
    return 1 + full + t * d - t * (t - 1) // 2


def harmonic_upto(engine: PrimeEngine, x: int, agg: GapAggregate | None = None) -> float:
    """``sum_{n <= x} 1 / a_n``."""
    if x < 2:
        return float(max(x, 0))
    m, d, t = _partial_block(engine, x)
    if agg is None or agg.k != m - 1:
        agg = _agg_for_values(engine, x, agg)
    tail = math.fsum(1.0 / (d - j) for j in range(t))
    return math.fsum((1.0, agg.sum_harmonic.s, agg.sum_harmonic.c, tail))


def log_a_upto(engine: PrimeEngine, x: int, agg: GapAggregate | None = None) -> float:
    """``sum_{n <= x} log a_n``."""
    if x < 2:
        return 0.0
    m, d, t = _partial_block(engine, x)
    if agg is None or agg.k != m - 1:
        agg = _agg_for_values(engine, x, agg)
    tail = math.fsum(math.log(d - j) for j in range(t))
    acc = agg.sum_log_d_factorial
    return math.fsum((acc.s, acc.c, tail))


def log_gap_sum(engine: PrimeEngine, x: int, agg: GapAggregate | None = None) -> float:
    """``sum_{2 <= n <= x} log d_n`` (the ``n = 1`` term is ``log 1 = 0``)."""
    if agg is None or agg.k != x:
        agg = advance(engine, agg or GapAggregate(), x)
    return float(agg.sum_log_d)


def gap_square_sum(engine: PrimeEngine, x: int, agg: GapAggregate | None = None) -> int:
    """``sum_{p_n <= x} d_n^2``, including the gap that straddles ``x``."""
    k = engine.prime_count(x)
    if agg is None or agg.k != k:
        agg = advance(engine, agg or GapAggregate(), k)
    return agg.sum_d2


def log_sum_floor(engine: PrimeEngine, x: int) -> float:
    """The explicit lower bound ``0.09 p_k - 3`` with ``p_k <= x < p_{k+1}``."""
    return 0.09 * engine.nth_prime(engine.prime_count(x)) - 3


# Row builders: (gap index needed at x, row from the advanced aggregate).


def _k_values(engine, x):
    return engine.prime_count(x) - 1


def _k_prime_bound(engine, x):
    return engine.prime_count(x)


def _k_index(engine, x):
    return x


def _row_sum(engine, x, agg):
    raw = float(sum_a_upto(engine, x, agg))
    norm = x * math.log(x)
    return RatioRow(x, raw, norm, raw / norm, raw / x**GAP_SQUARE_EXPONENT, "sum_a")


def _row_harmonic(engine, x, agg):
    raw = harmonic_upto(engine, x, agg)
    lx = math.log(x)
    main = x * math.log(lx) / lx
    return RatioRow(x, raw, main, raw / main, (raw - main) / (x / lx), "harmonic")


def _row_logsum(engine, x, agg):
    raw = log_a_upto(engine, x, agg)
    return RatioRow(x, raw, float(x), raw / x, raw / (x * math.log(x)), "log_a")


def _row_lemma6(engine, x, agg):
    raw = log_gap_sum(engine, x, agg)
    main = x * math.log(math.log(x))
    return RatioRow(x, raw, float(x), raw / x, (raw - main) / x, "log_gaps")


def _row_gaps2(engine, x, agg):
    raw = float(gap_square_sum(engine, x, agg))
    norm = x * math.log(x) ** 3
    return RatioRow(x, raw, norm, raw / norm, None, "gap_squares")


def _row_geometric_mean(engine, x, agg):
    ratio = geometric_mean_ratio(engine, x, agg)
    return RatioRow(x, ratio, 1.0, ratio, None, "geometric_mean_ratio")


# which -> (gap index function, row function, smallest allowed x)
TABLES: dict[str, tuple[Callable, Callable, int]] = {
    "sum": (_k_values, _row_sum, 2),
    "harmonic": (_k_values, _row_harmonic, 3),
    "logsum": (_k_values, _row_logsum, 2),
    "lemma6": (_k_index, _row_lemma6, 2),
    "gaps2": (_k_prime_bound, _row_gaps2, 2),
    "panaitopol": (_k_index, _row_geometric_mean, 2),
}


def _hexrow(row: RatioRow) -> dict:
    out = asdict(row)
    for key in ("raw", "normalizer", "ratio", "residual"):
        if out[key] is not None:
            out[key] = float.hex(out[key])
    return out


def _unhexrow(obj: dict) -> RatioRow:
    vals = dict(obj)
    for key in ("raw", "normalizer", "ratio", "residual"):
        if vals[key] is not None:
            vals[key] = float.fromhex(vals[key])
    vals["x"] = int(vals["x"])
    return RatioRow(**vals)


def _check_grid(grid: Sequence[int], lowest: int) -> list[int]:
    grid = [int(x) for x in grid]
    if not grid:
        raise ValueError("grid is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly increasing")
    if grid[0] < lowest:
        raise ValueError(f"grid values must be >= {lowest}")
    return grid


def run_table(
    engine: PrimeEngine,
    which: str,
    grid: Sequence[int],
    checkpoint=None,
    resume: bool = False,
    stop_after: int | None = None,
) -> list[RatioRow]:
    """Compute one table in a single gap pass.

    With ``checkpoint`` set, the aggregate and the finished rows are saved
    after every row.  ``resume=True`` first restores them from that file.
    ``stop_after`` ends the pass after that many new rows (a deliberate
    interruption for staged long runs); the rows so far are returned.
    """
    if which not in TABLES:
        raise ValueError(f"unknown table {which!r}; choose from {sorted(TABLES)}")
    k_of, row_of, lowest = TABLES[which]
    grid = _check_grid(grid, lowest)

    agg = GapAggregate()
    rows: list[RatioRow] = []
    if resume:
        cp = read_checkpoint(checkpoint)
        extra = cp.extra or {}
        if extra.get("which") != which or extra.get("grid") != grid:
            raise CheckpointError(
                f"checkpoint {checkpoint} belongs to table {extra.get('which')!r} "
                f"over grid {extra.get('grid')}, not {which!r} over {grid}"
            )
        validate_against(cp.aggregate, engine)
        agg = cp.aggregate
        rows = [_unhexrow(r) for r in extra.get("rows", [])]

    new = 0
    for x in grid[len(rows) :]:
        if stop_after is not None and new >= stop_after:
            break
        agg = advance(engine, agg, k_of(engine, x))
        rows.append(row_of(engine, x, agg))
        new += 1
        if checkpoint is not None:
            extra = {"which": which, "grid": grid, "rows": [_hexrow(r) for r in rows]}
            save_checkpoint(agg, checkpoint, engine.limit, extra=extra)
    return rows


def table_sum_a(engine: PrimeEngine, grid: Sequence[int]) -> list[RatioRow]:
    """Rows of ``sum a_n`` against ``x log x``; ``residual`` is ``raw / x**(23/18)``."""
    return run_table(engine, "sum", grid)


def table_harmonic(engine: PrimeEngine, grid: Sequence[int]) -> list[RatioRow]:
    """Rows of ``sum 1/a_n``; ``residual = (raw - x loglog x / log x) / (x / log x)``."""
    return run_table(engine, "harmonic", grid)


def table_log_a(engine: PrimeEngine, grid: Sequence[int]) -> list[RatioRow]:
    """Rows of ``sum log a_n``; ``ratio = raw / x``, ``residual = raw / (x log x)``."""
    return run_table(engine, "logsum", grid)


def table_lemma6(engine: PrimeEngine, grid: Sequence[int]) -> list[RatioRow]:
    """Rows of ``sum_{2<=n<=x} log d_n``; ``residual = (raw - x loglog x) / x``.

    Here ``x`` is a gap index, so the engine must reach ``p_{x+1}``.
    """
    return run_table(engine, "lemma6", grid)


def table_gap_squares(engine: PrimeEngine, grid: Sequence[int]) -> list[RatioRow]:
    """Rows of ``sum_{p_n<=x} d_n^2`` against ``x (log x)^3``."""
    return run_table(engine, "gaps2", grid)


def table_panaitopol(engine: PrimeEngine, grid: Sequence[int]) -> list[RatioRow]:
    """Geometric-mean gap ratio at each gap index ``n`` of the grid."""
    return run_table(engine, "panaitopol", grid)


def fit_power_law(xs: Sequence[float], ys: Sequence[float]) -> ExponentFit:
    """Fit ``log y = slope * log x + intercept`` by least squares."""
    if len(xs) < 3:
        raise InsufficientPointsError(f"need at least 3 points, got {len(xs)}")
    lx = np.log(np.asarray(xs, dtype=np.float64))
    ly = np.log(np.asarray(ys, dtype=np.float64))
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return ExponentFit(float(slope), float(intercept), min(max(r2, 0.0), 1.0), len(xs))


def gap_square_exponent(
    engine: PrimeEngine, grid: Sequence[int], rows: list[RatioRow] | None = None
) -> ExponentFit:
    """Power-law exponent of ``sum_{p_n<=x} d_n^2`` over the grid.

    The returned fit carries the per-point rows (whose ``ratio`` is the
    ``x (log x)^3`` comparison) in ``fit.rows``.
    """
    if len(grid) < 3:
        raise InsufficientPointsError(f"need at least 3 grid points, got {len(grid)}")
    if rows is None:
        rows = table_gap_squares(engine, grid)
    fit = fit_power_law([r.x for r in rows], [r.raw for r in rows])
    return ExponentFit(fit.slope, fit.intercept, fit.r_squared, fit.points_used, tuple(rows))

