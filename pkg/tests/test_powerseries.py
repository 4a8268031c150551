from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from popzeta.errors import DomainError
from popzeta.powerseries import (SERIES_IDENTITIES, CoefficientSeries, bivariate_product_check,
                                 g_pop_series, l_pop_series, lambert_coefficient, log_series,
                                 verify_series_identity)
from popzeta.primes import FULL, explicit_list, make_list


def test_g_pop_m2_degree_11(M2):
    g = g_pop_series(M2, 11)
    assert [k for k in range(12) if g[k]] == [1, 2, 4, 5, 8, 10, 11]


def test_l_pop_m3_degree_8(M3):
    l = l_pop_series(M3, 8)
    assert l.coeffs == (0, 1, Fraction(1, 2), 0, Fraction(1, 4), 0, 0, Fraction(1, 7), Fraction(1, 8))


@pytest.mark.parametrize("identity_id", SERIES_IDENTITIES)
@pytest.mark.parametrize("M", [make_list(1, 2), make_list(1, 3), make_list(2, 2), explicit_list([3, 7]), FULL])
def test_series_identities(identity_id, M):
    assert verify_series_identity(identity_id, M, 40).passed


def test_series_identity_rejects_small_cap(M2):
    with pytest.raises(DomainError):
        verify_series_identity("mobius_g", M2, 1)


def test_lambert_coefficient_counts_pop_divisors(M2):
    assert lambert_coefficient(M2, 12) == 3  # 1, 2, 4
    assert lambert_coefficient(M2, 20) == 6


@pytest.mark.parametrize("M, a, b", [(make_list(1, 2), Fraction(1, 3), Fraction(1, 4)),
                                     (FULL, Fraction(1, 2), Fraction(1, 2)),
                                     (explicit_list([3, 7]), Fraction(-1, 2), Fraction(1, 5))])
def test_bivariate_product(M, a, b):
    r = bivariate_product_check(M, a, b, 24)
    assert r.passed, r


def test_bivariate_rejects_radius():
    with pytest.raises(DomainError):
        bivariate_product_check(FULL, 1, Fraction(1, 2), 8)


def test_csv_rows(M2):
    assert g_pop_series(M2, 5).csv() == "1,1,1\n2,1,1\n4,1,1\n5,1,1\n"


coeffs = st.lists(st.fractions(min_value=-50, max_value=50, max_denominator=20), min_size=1, max_size=12)


@given(coeffs, coeffs, coeffs)
@settings(max_examples=60, deadline=None)
def test_ring_laws(a, b, c):
    A, B, C = (CoefficientSeries(v, 10) for v in (a, b, c))
    assert A * B == B * A
    assert (A * B) * C == A * (B * C)
    assert A * (B + C) == A * B + A * C
    assert (A - A) == CoefficientSeries.zero(10)


@given(coeffs, st.integers(1, 4))
@settings(max_examples=40, deadline=None)
def test_compose_power_is_ring_map(a, n):
    A = CoefficientSeries(a, 12)
    assert (A * A).compose_power(n) == A.compose_power(n) * A.compose_power(n)


def test_log_series_derivative_is_geometric():
    d = log_series(10).derivative()
    assert d.coeffs == tuple(Fraction(1) for _ in range(10))
