"""Slow, obviously-correct reference implementations used only by tests."""

import math


def is_prime_td(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def primes_td(n):
    return [p for p in range(2, n + 1) if is_prime_td(p)]


def a_td(n):
    t = 1
    while not is_prime_td(n + t):
        t += 1
    return t


def a_gcd_factorial(n):
    """Least t >= 1 with gcd(n!, n + t) = 1, using n! literally."""
    f = math.factorial(n)
    t = 1
    while math.gcd(f, n + t) != 1:
        t += 1
    return t
