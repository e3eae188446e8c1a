"""
Distance to the next prime
==========================

A short walk through a_n = nextprime(n) - n and the countdown blocks it
forms between consecutive primes.
"""

import numpy as np

from nextprime import PrimeEngine
from nextprime.sequence import a_values, gcd_characterization_check, solution_count

# a modest sieve is plenty for a tour
engine = PrimeEngine(1_000_000)
print("primes up to 1e6:", engine.total_primes)

# the first few values
a = a_values(engine, 1, 30)
print("a_1..a_30:", a.tolist())

# between p_k and p_{k+1} - 1 the values count down d_k, ..., 1
p, q = 89, engine.next_prime(89)
print(f"block [{p}, {q - 1}]:", a_values(engine, p, q - 1).tolist())

# how often each value occurs below 1e5
x = 100_000
counts = {k: solution_count(engine, k, x) for k in range(1, 13)}
for k, c in counts.items():
    print(f"a_n = {k:2d}: {c:6d} times")

# every gap after the first is even, so from a = 3 on the counts pair up
print("paired:", all(counts[k] == counts[k + 1] for k in range(3, 12, 2)))

vals = a_values(engine, 1, x)
print("share of a_n = 1:", np.mean(vals == 1))

# a gcd description of a_n, checked against the sieve
print("gcd description holds for n <= 2000:",
      all(gcd_characterization_check(engine, n) for n in range(2, 2001)))
