"""
Calibrating the regression bounds
=================================

The bands in ``nextprime.bounds`` were set from the extremes printed here,
with generous headroom.  Rerun after any change to the tables: every
observed value should sit well inside its band.
"""

import math

from nextprime import PrimeEngine, SieveConfig, bounds
from nextprime.asymptotics import default_grid, gap_square_exponent, run_table

engine = PrimeEngine(SieveConfig(limit=100_001_000))
grid = default_grid()

rows = run_table(engine, "sum", grid)
print("sum      min ratio        ", min(r.ratio for r in rows), ">=", bounds.SUM_A_LOWER)
print("sum      max x^(23/18) fit", max(r.residual for r in rows), "<=", bounds.SUM_A_UPPER)

rows = run_table(engine, "harmonic", grid[1:])
print("harmonic max |residual|   ", max(abs(r.residual) for r in rows), "<=", bounds.HARMONIC_RESIDUAL_MAX)

rows = run_table(engine, "lemma6", [10**3, 10**4, 10**5, 10**6])
print("log-gap  max |residual|   ", max(abs(r.residual) for r in rows), "<=", bounds.LOG_GAP_RESIDUAL_MAX)

rows = run_table(engine, "logsum", grid)
print("logsum   min raw/x        ", min(r.ratio for r in rows), ">=", bounds.LOG_A_LOWER)
print("logsum   max raw/(x log x)", max(r.ratio / math.log(r.x) for r in rows), "<=", bounds.LOG_A_UPPER)
print("logsum   floor violations ", bounds.check_rows("logsum", rows, engine))

fit = gap_square_exponent(engine, [10**4, 10**5, 10**6, 10**7])
print("gaps2    slope, r^2       ", fit.slope, fit.r_squared)

rows = run_table(engine, "panaitopol", [10**4, 10**5, 10**6])
print("geometric mean range      ", min(r.ratio for r in rows), max(r.ratio for r in rows), "in", bounds.GEOMETRIC_MEAN_BAND)
