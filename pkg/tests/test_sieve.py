import bisect

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nextprime.errors import IndexOutOfRangeError, RangeExceedsLimitError
from nextprime.sieve import PrimeEngine, SieveConfig, miller_rabin, small_primes

from oracles import is_prime_td, primes_td

BOUND = 100_000
ORACLE = primes_td(BOUND + 200)
ORACLE_SET = set(ORACLE)


@pytest.fixture(scope="module")
def eng():
    return PrimeEngine(SieveConfig(limit=BOUND + 200, segment_size=1024))


def test_primes_in_examples(eng):
    assert eng.primes_in(2, 11).tolist() == [2, 3, 5, 7, 11]
    assert eng.primes_in(8, 10).tolist() == []
    assert eng.primes_in(2, 2).tolist() == [2]


@pytest.mark.parametrize("n,expected", [(0, False), (1, False), (7, True), (9, False), (2, True)])
def test_is_prime_examples(eng, n, expected):
    assert eng.is_prime(n) is expected


@pytest.mark.parametrize("x,expected", [(1, 0), (10, 4), (100, 25)])
def test_prime_count_examples(eng, x, expected):
    assert eng.prime_count(x) == expected


@pytest.mark.parametrize("k,expected", [(1, 2), (4, 7), (25, 97)])
def test_nth_prime_examples(eng, k, expected):
    assert eng.nth_prime(k) == expected


@pytest.mark.parametrize("n,expected", [(1, 2), (7, 11), (89, 97)])
def test_next_prime_examples(eng, n, expected):
    assert eng.next_prime(n) == expected


@pytest.mark.parametrize("x,expected", [(2, 0), (10, 2), (100, 8)])
def test_twin_prime_count_examples(eng, x, expected):
    assert eng.twin_prime_count(x) == expected


def test_matches_trial_division_everywhere(eng):
    assert eng.primes_in(2, BOUND).tolist() == [p for p in ORACLE if p <= BOUND]
    flags = [eng.is_prime(n) for n in range(BOUND + 1)]
    assert flags == [n in ORACLE_SET for n in range(BOUND + 1)]
    for x in range(BOUND + 1):
        assert eng.prime_count(x) == bisect.bisect_right(ORACLE, x)


def test_nth_and_next_prime_against_oracle(eng):
    for k, p in enumerate(ORACLE[:-1], start=1):
        assert eng.nth_prime(k) == p
        assert eng.prime_count(p) == k
    for n in range(1, BOUND + 1):
        assert eng.next_prime(n) == ORACLE[bisect.bisect_right(ORACLE, n)]


def test_twin_count_against_oracle(eng):
    running, twins = 0, []
    for x in range(BOUND + 1):
        if x in ORACLE_SET and x + 2 in ORACLE_SET:
            running += 1
        twins.append(running)
    for x in range(0, BOUND + 1, 7):
        assert eng.twin_prime_count(x) == twins[x]
    assert eng.twin_prime_count(BOUND) == twins[BOUND]


@pytest.mark.parametrize("size", [1024, 4096, 1 << 16])
def test_segment_size_does_not_change_answers(eng, size):
    other = PrimeEngine(SieveConfig(limit=BOUND + 200, segment_size=size, parallel_segments=2))
    assert np.array_equal(other._bits, eng._bits)
    rng = np.random.default_rng(1)
    for x in rng.integers(0, BOUND, 300).tolist():
        assert other.prime_count(x) == eng.prime_count(x)
        assert other.next_prime(x) == eng.next_prime(x)
        assert other.twin_prime_count(x) == eng.twin_prime_count(x)
    assert other.total_primes == eng.total_primes


def test_segment_index_is_consistent(eng):
    seg_ints = 16 * eng.config.segment_size
    for j, c in enumerate(eng.prime_count_index.tolist()):
        if j == 0:
            assert c == 0
            continue
        top = j * seg_ints - 1  # largest integer in segments < j
        if top <= eng.limit:
            assert 1 + c == eng.prime_count(top)


@settings(max_examples=300, deadline=None)
@given(st.integers(min_value=1, max_value=BOUND))
def test_next_prime_properties(eng, n):
    q = eng.next_prime(n)
    assert q > n and is_prime_td(q)
    assert not any(is_prime_td(m) for m in range(n + 1, q))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, BOUND), st.integers(0, BOUND))
def test_counts_monotone(eng, a, b):
    a, b = min(a, b), max(a, b)
    assert eng.prime_count(a) <= eng.prime_count(b)
    assert eng.twin_prime_count(a) <= eng.twin_prime_count(b)
    assert eng.twin_prime_count(b) <= eng.prime_count(b)


def test_limit_is_enforced(eng):
    lim = eng.limit
    with pytest.raises(RangeExceedsLimitError):
        eng.prime_count(lim + 1)
    with pytest.raises(RangeExceedsLimitError):
        eng.primes_in(2, lim + 1)
    with pytest.raises(RangeExceedsLimitError):
        eng.next_prime(eng.largest_prime_found)
    with pytest.raises(RangeExceedsLimitError):
        eng.twin_prime_count(lim - 1)
    with pytest.raises(IndexOutOfRangeError):
        eng.nth_prime(eng.total_primes + 1)
    with pytest.raises(IndexOutOfRangeError):
        eng.nth_prime(0)


def test_is_prime_above_limit_uses_deterministic_test(eng):
    for n in range(eng.limit + 1, eng.limit + 3000):
        assert eng.is_prime(n) == is_prime_td(n)
    assert eng.is_prime(2**61 - 1)
    assert not eng.is_prime(2**61 + 1)
    assert eng.is_prime(18446744073709551557)  # largest prime below 2**64
    assert not miller_rabin(3215031751)  # strong pseudoprime to bases 2,3,5,7


def test_config_validation():
    with pytest.raises(ValueError):
        SieveConfig(limit=1)
    with pytest.raises(ValueError):
        SieveConfig(limit=100, segment_size=1000)
    with pytest.raises(ValueError):
        SieveConfig(limit=100, segment_size=1025)


def test_tiny_limits():
    for lim in range(2, 40):
        e = PrimeEngine(lim)
        assert e.primes_in(2, lim).tolist() == primes_td(lim)
        assert e.largest_prime_found == primes_td(lim)[-1]


def test_iter_primes_concatenates(eng):
    parts = list(eng.iter_primes(50, 90_000, chunk=1000))
    assert np.concatenate(parts).tolist() == [p for p in ORACLE if 50 <= p <= 90_000]


def test_small_primes():
    assert small_primes(30).tolist() == primes_td(30)
    assert small_primes(1).size == 0
