import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import miller_rabin, trial_is_prime, trial_primes
from vgclab.errors import InvalidArgument, NotFound, OutOfRange, ResourceError
from vgclab.sieve import iter_prime_blocks, sieve, small_primes


def test_first_primes():
    t = sieve(10)
    assert t.primes.tolist() == [2, 3, 5, 7]
    assert t.count == 4


def test_count_100():
    assert sieve(100).count == 25


def test_count_million(table_1e6):
    # frozen from a Miller-Rabin count over 1..10^6
    assert table_1e6.count == 78498


@pytest.mark.parametrize("x, p", [(1, 2), (3, 5), (25, 97)])
def test_nth_prime(x, p):
    assert sieve(100).nth_prime(x) == p


@pytest.mark.parametrize("x", [0, 26])
def test_nth_prime_out_of_range(x):
    with pytest.raises(OutOfRange):
        sieve(100).nth_prime(x)


def test_prime_index():
    t = sieve(100)
    assert t.prime_index(2) == 1
    assert t.prime_index(97) == 25
    with pytest.raises(NotFound):
        t.prime_index(4)
    with pytest.raises(OutOfRange):
        t.prime_index(101)


def test_is_prime(table_1e6):
    assert table_1e6.is_prime(2)
    assert not table_1e6.is_prime(1)
    assert not table_1e6.is_prime(0)
    assert table_1e6.is_prime(999983) and miller_rabin(999983)
    with pytest.raises(OutOfRange):
        table_1e6.is_prime(10**6 + 1)


def test_bad_limits():
    with pytest.raises(InvalidArgument):
        sieve(1)
    with pytest.raises(InvalidArgument):
        sieve(2**64)
    with pytest.raises(ResourceError):
        sieve(10**6, materialize_threshold=10**5)


def test_exhaustive_against_trial_division():
    oracle = trial_primes(10**4)
    for n in list(range(2, 200)) + [997, 1000, 4096, 9973, 10**4]:
        t = sieve(n)
        expected = [p for p in oracle if p <= n]
        assert t.primes.tolist() == expected
        assert t.count == len(expected)


def test_is_prime_matches_table(table_small):
    flags = [table_small.is_prime(m) for m in range(20_001)]
    assert [m for m, f in enumerate(flags) if f] == table_small.primes.tolist()
    assert all(flags[m] == trial_is_prime(m) for m in range(0, 3000))


def test_bijection(table_small):
    for x in range(1, table_small.count + 1):
        assert table_small.prime_index(table_small.nth_prime(x)) == x


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 30_000), st.integers(2, 30_000))
def test_prefix_monotone(n1, n2):
    n1, n2 = sorted((n1, n2))
    small, big = sieve(n1).primes, sieve(n2).primes
    assert np.array_equal(big[: small.size], small)


@pytest.mark.parametrize("segment", [8, 64, 1000, 1 << 16])
def test_segment_size_irrelevant(segment):
    ref = small_primes(50_000)
    got = np.concatenate(list(iter_prime_blocks(50_000, segment)))
    assert np.array_equal(got, ref)
    t = sieve(50_000, segment_odds=segment - segment % 8 or 8)
    assert np.array_equal(t.primes, ref)


def test_odd_mask_roundtrip(table_small):
    mask = table_small.odd_mask()
    odd = 2 * np.flatnonzero(mask) + 1
    assert np.array_equal(odd, table_small.primes[1:])
