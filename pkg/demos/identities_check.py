"""
Closed forms for partial sums and products
==========================================

S_n = a_1 + ... + a_n and P_{n-1} = a_1 ... a_{n-1} only depend on the prime
gaps below n and on the block n falls in.  Here both closed forms are put
next to plain summation.
"""

import math

import numpy as np

from nextprime import PrimeEngine
from nextprime.identities import (
    log_prod_brute_upto,
    log_prod_closed_upto,
    prod_a_closed,
    sum_a_brute_upto,
    sum_a_closed_upto,
    verify_identities,
)

engine = PrimeEngine(2_000_000)

# a handful of n, with exact products
for rep in verify_identities(engine, [3, 4, 9, 97, 100, 1000], exact_products=True):
    print(f"n={rep.n:5d}  {rep.branch_used:17s}  S={rep.s_closed:8d}  ok={rep.passed}")

# every n up to 1e6 at once
n_max = 10**6
closed = sum_a_closed_upto(engine, n_max)
brute = sum_a_brute_upto(engine, n_max)
print("sums agree on 3..1e6:", np.array_equal(closed[3:], brute[3:]))

# products are huge, so compare logarithms
lc = log_prod_closed_upto(engine, n_max)[3:]
lb = log_prod_brute_upto(engine, n_max)[3:]
print("max relative log error:", np.max(np.abs(lc - lb) / np.maximum(1, lb)))

# exact big-integer product for a mid-sized n
big = prod_a_closed(engine, 2000, "exact")
print("P_1999 has", len(str(big)), "digits; log matches:",
      math.isclose(math.log(big), log_prod_closed_upto(engine, 2000)[2000], rel_tol=1e-12))
