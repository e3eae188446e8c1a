"""
Regression bounds for the asymptotics tables.

The growth statements these tables illustrate hold only up to unspecified
constants, so the constants below were measured once (``demos/calibrate.py``,
sieve limit 100_001_000, default grids) and then fixed with headroom.  The
observed extreme is recorded next to each constant.  ``check_rows`` flags
any row that leaves the calibrated band; the CLI turns that into exit code 3.
"""

from __future__ import annotations

import math

from .asymptotics import GAP_SQUARE_EXPONENT, ExponentFit, RatioRow, log_sum_floor
from .sieve import PrimeEngine

# sum a_n / (x log x) >= SUM_A_LOWER for x >= 1e3; observed min 0.6594 at 1e3
SUM_A_LOWER = 0.1
# sum a_n / x**(23/18) <= SUM_A_UPPER for x >= 1e3; observed max 0.6686 at 1e3
SUM_A_UPPER = 10.0
SUM_A_FROM = 10**3

# |harmonic residual| on x in [1e4, 1e8]; observed max 0.6364 at 1e4
HARMONIC_RESIDUAL_MAX = 1.0
HARMONIC_FROM = 10**4

# |log-gap residual| on x in [1e3, 1e6]; observed max 0.2238 at 1e6
LOG_GAP_RESIDUAL_MAX = 0.5
LOG_GAP_FROM = 10**3

# sum log a_n / x >= LOG_A_LOWER; observed min 1.2460 at 1e3
LOG_A_LOWER = 1.0
# sum log a_n / (x log x) <= LOG_A_UPPER; observed max 0.1804 at 1e3
LOG_A_UPPER = 0.25
LOG_A_FROM = 10**3

# slope of log sum d^2 vs log x; observed 1.1041 (r^2 0.99993) on 1e4..1e7
GAP_SQUARE_SLOPE = (1.0, GAP_SQUARE_EXPONENT)
GAP_SQUARE_MIN_R2 = 0.99

# geometric-mean gap ratio for n >= 1e4; observed 0.8649 .. 0.9729 on 1e4..1e6
GEOMETRIC_MEAN_BAND = (0.5, 2.0)
GEOMETRIC_MEAN_FROM = 10**4


def check_rows(
    which: str,
    rows: list[RatioRow],
    engine: PrimeEngine | None = None,
    fit: ExponentFit | None = None,
) -> list[str]:
    """Return a message for every row (or fit) outside its calibrated band."""
    bad = []
    for r in rows:
        x = r.x
        if which == "sum" and x >= SUM_A_FROM:
            if r.ratio < SUM_A_LOWER:
                bad.append(f"x={x}: sum/(x log x) = {r.ratio:.6g} < {SUM_A_LOWER}")
            if r.residual > SUM_A_UPPER:
                bad.append(f"x={x}: sum/x^(23/18) = {r.residual:.6g} > {SUM_A_UPPER}")
        elif which == "harmonic" and x >= HARMONIC_FROM:
            if abs(r.residual) > HARMONIC_RESIDUAL_MAX:
                bad.append(f"x={x}: |residual| = {abs(r.residual):.6g}")
        elif which == "lemma6" and x >= LOG_GAP_FROM:
            if abs(r.residual) > LOG_GAP_RESIDUAL_MAX:
                bad.append(f"x={x}: |residual| = {abs(r.residual):.6g}")
        elif which == "logsum":
            if x >= LOG_A_FROM:
                if r.ratio < LOG_A_LOWER:
                    bad.append(f"x={x}: sum/x = {r.ratio:.6g} < {LOG_A_LOWER}")
                if r.ratio > LOG_A_UPPER * math.log(x):
                    bad.append(f"x={x}: sum/x = {r.ratio:.6g} > {LOG_A_UPPER} log x")
            if engine is not None and x >= 3 and not r.raw > log_sum_floor(engine, x):
                bad.append(f"x={x}: sum = {r.raw:.6g} below 0.09 p_k - 3")
        elif which == "panaitopol" and x >= GEOMETRIC_MEAN_FROM:
            lo, hi = GEOMETRIC_MEAN_BAND
            if not lo <= r.ratio <= hi:
                bad.append(f"n={x}: ratio {r.ratio:.6g} outside [{lo}, {hi}]")
    if which == "gaps2" and fit is not None:
        lo, hi = GAP_SQUARE_SLOPE
        if not lo < fit.slope < hi:
            bad.append(f"slope {fit.slope:.6g} outside ({lo}, {hi:.6g})")
        if fit.r_squared < GAP_SQUARE_MIN_R2:
            bad.append(f"r^2 {fit.r_squared:.6g} < {GAP_SQUARE_MIN_R2}")
    return bad
