import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from popzeta.errors import BranchError, DomainError
from popzeta.primes import EMPTY, FULL, explicit_list, make_list
from popzeta.zeta_eval import (GRID_HEADER, EvalConfig, abel_integral_check, ak_stabilization,
                               eta, eta_derivative, g_k, g_pop_exp, g_pop_exp_inclusion_exclusion,
                               gamma_integral_check, grid_csv, regularized_product_check, log_mobius_check,
                               perron_estimate, zeta_k_factorization_check, shift_identity_check, pi_log_identity_check, w_regularized,
                               w_shift, zeta_k, zeta_k_path, zeta_partial)
from popzeta.population import enumerate_pop

PRIME_ZETA_2 = 0.4522474200410654985
SMALL = EvalConfig(P=10**5, N=10**5)


def test_eta_full_at_2():
    r = eta(FULL, 2)
    assert abs(r.value - PRIME_ZETA_2) <= r.err
    assert r.err < 1e-7
    c = eta(FULL, 2, corrected=True)
    assert abs(c.value - PRIME_ZETA_2) <= c.err < r.err


def test_eta_partition(M2, M2_shift):
    a, b, c = eta(M2, 2), eta(M2_shift, 2), eta(FULL, 2)
    assert abs(a.value + b.value - c.value) < 1e-15


def test_eta_single_prime():
    assert eta(explicit_list([2]), 2).value == 0.25
    assert eta(explicit_list([2]), 2).err == 0


@pytest.mark.parametrize("s", [1, 0.5 + 3j, 1 + 10j])
def test_eta_domain(s):
    with pytest.raises(DomainError):
        eta(FULL, s)


def test_zeta_full_at_2():
    r = zeta_partial(FULL, 2)
    assert abs(r.value - math.pi ** 2 / 6) <= r.err


@pytest.mark.parametrize("s", [1.5, 2, 3, 2 + 5j, 1.5 - 20j])
@pytest.mark.parametrize("M", [FULL, make_list(1, 2), make_list(1, 3), make_list(2, 3)])
def test_methods_agree(M, s):
    a, b = zeta_partial(M, s, method="euler"), zeta_partial(M, s, method="series")
    assert abs(a.value - b.value) <= a.err + b.err


def test_methods_agree_tightly_for_m2(M2):
    cfg = EvalConfig(P=10**6, N=10**7)
    a, b = zeta_partial(M2, 2, cfg, "euler"), zeta_partial(M2, 2, cfg, "series")
    assert abs(a.value - b.value) <= 1e-8


def test_empty_list_is_one():
    assert zeta_partial(EMPTY, 2 + 3j).value == 1
    assert w_regularized(EMPTY, 0.7).value == 1


def test_zeta_domain():
    with pytest.raises(DomainError):
        zeta_partial(FULL, 1 + 2j)
    with pytest.raises(DomainError):
        zeta_partial(FULL, 2, method="magic")


def test_w_regularized_identity(M2):
    w, e = w_regularized(FULL, 2), eta(FULL, 2, corrected=True)
    assert abs(w.value * cmath.exp(e.value) - math.pi ** 2 / 6) <= 1e-8
    assert regularized_product_check(FULL, 2).passed
    assert regularized_product_check(M2, 2 + 5j).passed


def test_w_regularized_stable_below_one(M2):
    a = w_regularized(M2, 0.75, SMALL)
    b = w_regularized(M2, 0.75, SMALL.doubled())
    assert abs(a.value) > 0.1
    assert abs(a.value - b.value) <= a.err
    assert b.err <= a.err
    with pytest.raises(DomainError):
        w_regularized(M2, 0.5)


def test_w_shift_trivial_for_full():
    assert w_shift(FULL, 2).value == 0


def test_w_shift_partition_identity(M2, M3):
    assert shift_identity_check(M2, 2).passed
    assert shift_identity_check(make_list(2, 3), 3 + 1j).passed


def test_w_shift_stable_at_point_six(M2):
    a = w_shift(M2, 0.6, SMALL)
    b = w_shift(M2, 0.6, SMALL.doubled())
    assert abs(a.value - b.value) <= a.err
    with pytest.raises(DomainError):
        w_shift(M2, 0)


def test_g1_is_one():
    assert g_k(2 + 1j, 1).value == 1


@pytest.mark.parametrize("k", [2, 3])
def test_zeta_factorization(k):
    r = zeta_k_factorization_check(2, k)
    assert r.passed and r.residual <= 1e-6


def test_zeta_k_path_matches_euler_product():
    pts = [2, 2 + 0.5j, 2 + 1j, 1.8 + 1j]
    for r, s in zip(zeta_k_path(2, pts), pts):
        e = zeta_k(s, 2)
        assert abs(r.value - e.value) <= r.err + e.err


def test_zeta2_at_2_real_above_one():
    v = zeta_k_path(2, [2])[0].value
    assert v.imag == 0 and v.real > 1


def test_closed_loop_returns():
    loop = [2.0] + [2.5 + 0.5 * cmath.exp(1j * a) for a in np.linspace(np.pi, 3 * np.pi, 60)]
    res = zeta_k_path(3, loop)
    assert abs(res[1].value - res[-1].value) <= 10 * res[-1].err + 1e-13


def test_path_guards():
    with pytest.raises(DomainError):
        zeta_k_path(2, [2 + 1j])
    with pytest.raises(BranchError):
        zeta_k_path(2, [2.0, 1.0 + 0.01j])


def test_ak_stabilization():
    ss = list(np.linspace(1.5, 1.1, 9)) + list(1 + np.geomspace(0.1, 0.01, 25))[1:]
    vals = [v for s, v in ak_stabilization(2, ss) if s <= 1.1]
    assert (max(vals) - min(vals)) / max(vals) < 0.05


@pytest.mark.parametrize("M, s", [(FULL, 2), (explicit_list([2]), 2), (make_list(1, 2), 3)])
def test_log_mobius(M, s):
    r = log_mobius_check(M, s)
    assert r.passed and r.residual <= 1e-10


def test_eta_derivative_single_prime():
    assert eta_derivative(explicit_list([2]), 2).value == -math.log(2) / 4


@pytest.mark.parametrize("h", [1e-4, 1e-5])
def test_eta_derivative_finite_difference(h):
    d = eta_derivative(FULL, 2).value
    fd = (eta(FULL, 2 + h).value - eta(FULL, 2 - h).value) / (2 * h)
    assert abs(fd - d) <= max(1e-6, 10 * h * h)


def test_pi_log_identity():
    r = pi_log_identity_check(2, 10**6)
    assert r.passed and r.residual <= 1e-4


def test_gamma_integral(M2):
    r = gamma_integral_check(FULL, 2)
    assert abs(r.rhs - math.pi ** 2 / 6) <= r.tol
    for s in (2, 3):
        r = gamma_integral_check(M2, s)
        assert r.passed and r.residual <= 1e-4


def test_inclusion_exclusion_laplace(M2):
    t = enumerate_pop(M2, 10**5)
    for x in (0.01, 0.5, 3.0):
        ie = g_pop_exp_inclusion_exclusion(M2, x)
        assert abs(ie.value.real - g_pop_exp(t, x)) <= ie.err + 1e-12 * g_pop_exp(t, x)


@pytest.mark.parametrize("M, s, X, tol", [(FULL, 2, 10**4, None), (make_list(1, 2), 2, 10**5, 1e-3)])
def test_abel(M, s, X, tol):
    r = abel_integral_check(M, s, X)
    assert r.passed
    if tol:
        assert r.residual <= tol


def test_perron(M2):
    r = perron_estimate(M2, 20.5, 1.5, 400)
    assert abs(r.value.real - 10) <= 0.5
    assert abs(r.value.real - 10) <= r.err
    with pytest.raises(DomainError):
        perron_estimate(M2, 20.0, 1.5, 400)


def test_grid_csv(M2):
    out = grid_csv("eta", M2, [2, 2 + 1j], SMALL).splitlines()
    assert out[0] == GRID_HEADER and len(out) == 3
    assert out == grid_csv("eta", M2, [2, 2 + 1j], SMALL).splitlines()


def test_config_validation():
    with pytest.raises(DomainError):
        EvalConfig(P=1)
    with pytest.raises(DomainError):
        EvalConfig(k_w=0)


@given(st.floats(1.3, 4), st.floats(-30, 30))
@settings(max_examples=25, deadline=None)
def test_regularized_product_random_points(sig, t):
    s = complex(sig, t)
    assert regularized_product_check(make_list(1, 3), s, SMALL).passed


@given(st.floats(1.2, 4), st.floats(-20, 20))
@settings(max_examples=25, deadline=None)
def test_euler_product_conjugate_symmetry(sig, t):
    a = zeta_partial(make_list(1, 2), complex(sig, t), SMALL).value
    b = zeta_partial(make_list(1, 2), complex(sig, -t), SMALL).value
    assert abs(a - b.conjugate()) < 1e-12 * abs(a)
