"""
Growth of the partial sums
==========================

Ratio tables for the sums of a_n, 1/a_n and log a_n, for the log-gap sum and
for the sum of squared gaps, plus a log-log slope fit.
"""

import sys

from nextprime import PrimeEngine, SieveConfig
from nextprime.asymptotics import default_grid, gap_square_exponent, run_table

# pass a smaller top as the first argument for a quicker run, e.g. 1e6
top = int(float(sys.argv[1])) if len(sys.argv) > 1 else 10**8
engine = PrimeEngine(SieveConfig(limit=top + 1000))
grid = default_grid(hi=top)


def show(which, rows):
    print(f"\n{which}")
    for r in rows:
        res = "" if r.residual is None else f"{r.residual: .6f}"
        print(f"  {r.x:>11,d}  {r.raw:.6e}  ratio {r.ratio:.6f}  {res}")


for which in ("sum", "harmonic", "logsum", "gaps2"):
    g = grid if which != "harmonic" else [x for x in grid if x >= 10**4]
    show(which, run_table(engine, which, g))

# the gap-index tables need p_{x+1}, so stop a decade lower
idx_grid = [x for x in grid if x < engine.total_primes]
show("lemma6", run_table(engine, "lemma6", idx_grid))
show("geometric mean", run_table(engine, "panaitopol", idx_grid))

fit = gap_square_exponent(engine, [x for x in grid if x >= 10**4] or grid)
print(f"\nsum of squared gaps ~ x^{fit.slope:.4f}  (r^2 = {fit.r_squared:.5f})")
