import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from popzeta.errors import DomainError
from popzeta.primes import (EMPTY, FULL, explicit_list, make_list, nth_prime, prime_table,
                            shift_list, sieve_primes)


def _trial_primes(n):
    return [p for p in range(2, n + 1) if all(p % d for d in range(2, math.isqrt(p) + 1))]


def test_sieve_small_matches_trial_division():
    assert sieve_primes(1000).primes.tolist() == _trial_primes(1000)


@pytest.mark.parametrize("limit, count", [(2, 1), (10, 4), (100, 25), (10**6, 78498), (10**7, 664579)])
def test_prime_counts(limit, count):
    assert len(sieve_primes(limit)) == count


def test_sieve_rejects_empty_range():
    with pytest.raises(DomainError):
        sieve_primes(1)


def test_extend_only_appends():
    small = sieve_primes(5000)
    big = small.extend(50_000)
    assert big.primes[: len(small)].tolist() == small.primes.tolist()
    assert big.primes.tolist() == sieve_primes(50_000).primes.tolist()


def test_segment_boundaries():
    # the segment size is 2^22; a prime table across that edge must be gap free
    t = sieve_primes((1 << 22) + 1000)
    ref = _trial_primes(1000)
    assert t.primes[:168].tolist() == ref
    edge = t.primes[(t.primes > (1 << 22) - 200) & (t.primes < (1 << 22) + 200)]
    assert all(all(p % d for d in range(2, math.isqrt(int(p)) + 1)) for p in edge)


def test_nth_prime_indexing_is_one_based():
    assert [nth_prime(n) for n in (1, 2, 3, 4, 5)] == [2, 3, 5, 7, 11]
    assert nth_prime(100_000) == 1299709


@pytest.mark.parametrize("r0, r, head", [
    (1, 1, [2, 3, 5, 7, 11, 13]),
    (1, 2, [2, 5, 11, 17, 23, 31]),
    (2, 2, [3, 7, 13, 19, 29, 37]),
    (1, 3, [2, 7, 17, 29, 41, 53]),
    (3, 3, [5, 13, 23, 37, 47, 61]),
])
def test_arithmetical_lists(r0, r, head):
    M = make_list(r0, r)
    assert M.primes_upto(head[-1]).tolist() == head
    assert [M.nth(n) for n in range(1, len(head) + 1)] == head


@pytest.mark.parametrize("r0, r", [(3, 2), (0, 2), (1, 0)])
def test_make_list_rejects_bad_parameters(r0, r):
    with pytest.raises(DomainError):
        make_list(r0, r)


def test_explicit_list_validation():
    assert explicit_list([7, 3, 3]).explicit == (3, 7)
    with pytest.raises(DomainError):
        explicit_list([4, 7])
    assert EMPTY.is_empty and EMPTY.primes_upto(100).tolist() == []


def test_shift_list():
    M = make_list(1, 2)
    assert shift_list(M, 1) == make_list(2, 2)
    with pytest.raises(DomainError):
        shift_list(M, 2)


@given(st.integers(1, 5), st.integers(0, 4), st.integers(10, 3000))
@settings(max_examples=40, deadline=None)
def test_shifts_partition_primes(r, j, bound):
    j = j % r
    parts = [make_list(1 + i, r).primes_upto(bound) for i in range(r)]
    merged = np.sort(np.concatenate(parts))
    assert merged.tolist() == FULL.primes_upto(bound).tolist()
    # and membership agrees with the index rule
    M = make_list(1 + j, r)
    for p in FULL.primes_upto(min(bound, 200)):
        assert M.contains(int(p)) == (int(p) in set(parts[j].tolist()))


def test_complement():
    M = make_list(1, 2)
    assert M.complement().primes_upto(40).tolist() == [3, 7, 13, 19, 29, 37]
    assert explicit_list([3, 7]).complement_primes_upto(20).tolist() == [2, 5, 11, 13, 17, 19]


def test_pi_outside_table():
    t = prime_table(100)
    with pytest.raises(DomainError):
        t.pi(t.limit + 1)
