"""One test per acceptance criterion.  Each prints a single PASS/FAIL line
(collected again in the terminal summary) with the measured quantities."""
import math
import time

import numpy as np
import pytest

from popzeta.arithfun import SUM_IDENTITIES, verify_sum_identity_upto
from popzeta.asymptotics import (default_grid, estimate_A, laplace_sides, mertens_fit,
                                 mesch_check)
from popzeta.population import cached_population, enumerate_pop, inclusion_exclusion_counts
from popzeta.powerseries import SERIES_IDENTITIES, verify_series_identity
from popzeta.primes import FULL, explicit_list, make_list
from popzeta.zeta_eval import (DEFAULT, EvalConfig, ak_stabilization, analytic_battery, eta,
                               eta_derivative, perron_estimate)

POP25_32 = [1, 2, 4, 5, 8, 10, 11, 16, 17, 20, 22, 23, 25, 31, 32]
POP37_49 = [1, 3, 7, 9, 13, 19, 21, 27, 29, 37, 39, 43, 49]


def _record(log, n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} | {detail}"
    print(line)
    log.append(line)
    assert ok, line


def _best_time(fn, repeat=5):
    fn()  # warm the shared prime table
    best = math.inf
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return out, best


def test_criterion_1_population_ground_truth(acceptance_log):
    a, ta = _best_time(lambda: enumerate_pop(make_list(1, 2), 32).members.tolist())
    b, tb = _best_time(lambda: enumerate_pop(make_list(2, 2), 49).members.tolist())
    ok = a == POP25_32 and b == POP37_49 and ta < 1e-3 and tb < 1e-3
    _record(acceptance_log, 1, ok,
            f"pop_2,5<=32 exact={a == POP25_32} ({ta * 1e3:.3f} ms), "
            f"pop_3,7<=49 exact={b == POP37_49} ({tb * 1e3:.3f} ms), budget 1 ms each")


def test_criterion_2_exact_identity_suite(acceptance_log):
    t0 = time.perf_counter()
    lists = [make_list(1, 2), make_list(1, 3), explicit_list([3, 7])]
    failures, checked = [], 0
    for M in lists:
        table = enumerate_pop(M, 2000)
        for iid in SUM_IDENTITIES:
            reps = verify_sum_identity_upto(iid, table, 2000)
            checked += len(reps)
            failures += [(M.label, r.identity_id, r.x) for r in reps if not r.passed]
    series_bad = [(M.label, i) for M in lists for i in SERIES_IDENTITIES
                  if not verify_series_identity(i, M, 64).passed]
    dt = time.perf_counter() - t0
    ok = not failures and not series_bad and checked == 3 * 14 * 2000 and dt < 30
    _record(acceptance_log, 2, ok,
            f"{checked} summation checks, {len(failures)} failed; "
            f"{3 * len(SERIES_IDENTITIES)} series identities to D=64, {len(series_bad)} failed; "
            f"{dt:.1f} s (budget 30 s)")


def test_criterion_3_inclusion_exclusion(acceptance_log):
    t0 = time.perf_counter()
    M = make_list(1, 2)
    ie = inclusion_exclusion_counts(M, 10**4)
    table = enumerate_pop(M, 10**4)
    direct = np.searchsorted(table.members, np.arange(1, 10**4 + 1), side="right")
    dt = time.perf_counter() - t0
    bad = int(np.count_nonzero(ie != direct))
    _record(acceptance_log, 3, bad == 0 and dt < 10,
            f"n <= 10^4 on pop_2,5: {bad} mismatches; {dt:.2f} s (budget 10 s)")


@pytest.fixture(scope="module")
def battery():
    t0 = time.perf_counter()
    reps = analytic_battery(cfg=DEFAULT)
    return reps, time.perf_counter() - t0


def test_criterion_4_analytic_battery(acceptance_log, battery):
    reps, dt = battery
    failed = [f"{r.identity_id}@{r.M},s={r.x}" for r in reps if not r.passed]
    worst_tol = max(r.tol for r in reps)
    ok = not failed and worst_tol <= 1e-4 and dt < 120
    _record(acceptance_log, 4, ok,
            f"{len(reps)} identity checks at s in {{2, 3, 2+5i}}, failed={failed or 'none'}; "
            f"max combined err {worst_tol:.2e} (limit 1e-4); {dt:.1f} s (budget 120 s)")


def test_criterion_5_mertens_constant(acceptance_log):
    t0 = time.perf_counter()
    g = mertens_fit(FULL, [1e6]).constant
    dt = time.perf_counter() - t0
    gamma = 0.5772156649
    _record(acceptance_log, 5, abs(g - gamma) <= 0.02 and dt < 10,
            f"gamma estimate {g:.6f} vs {gamma} (|diff| {abs(g - gamma):.2e}, tol 0.02); {dt:.2f} s")


def test_criterion_6_density_constant(acceptance_log):
    t0 = time.perf_counter()
    M = make_list(1, 2)
    table = cached_population(M, 10**7)
    fit = estimate_A(M, default_grid(1e3, 1e7), table)
    dt = time.perf_counter() - t0
    in_window = 0.636 <= fit.constant <= 0.836
    band_has = fit.band[0] <= 0.736 <= fit.band[1]
    ok = in_window and band_has and dt < 60
    _record(acceptance_log, 6, ok,
            f"A estimate at 10^7 = {fit.constant:.4f} (in [0.636, 0.836]: {in_window}); "
            f"band over upper half [{fit.band[0]:.4f}, {fit.band[1]:.4f}] contains 0.736: {band_has}; "
            f"{dt:.1f} s (budget 60 s)")


def test_criterion_7_laplace_identity(acceptance_log):
    t0 = time.perf_counter()
    table = cached_population(make_list(1, 2), 10**7)
    res = {}
    for x in (1e-2, 1e-3):
        d, i = laplace_sides(table, x)
        res[x] = abs(d - i) / abs(d)
    dt = time.perf_counter() - t0
    ok = max(res.values()) <= 1e-10 and dt < 10
    _record(acceptance_log, 7, ok,
            "relative residuals " + ", ".join(f"x={x:g}: {r:.1e}" for x, r in res.items())
            + f" (tol 1e-10); {dt:.2f} s")


def test_criterion_8_asymptotic_properties(acceptance_log):
    t0 = time.perf_counter()
    M = make_list(1, 2)
    table = cached_population(M, 10**7)
    grid = default_grid(1e3, 1e7)
    A = estimate_A(M, grid, table)
    ratio = mesch_check(M, grid, A, table).estimates
    top = ratio[grid >= 1e5 * (1 - 1e-9)]
    trend = bool(np.all(np.diff(np.abs(top - 1)) <= 0))
    mesch_ok = 0.75 <= ratio[-1] <= 1.25 and trend

    ss = list(np.linspace(1.5, 1.1, 9)) + list(1 + np.geomspace(0.1, 0.01, 25))[1:]
    vals = [v for s, v in ak_stabilization(2, ss) if s <= 1.1 + 1e-12]
    spread = (max(vals) - min(vals)) / max(vals)

    pe = perron_estimate(M, 20.5, 1.5, 400)
    perron_diff = abs(pe.value.real - 10)
    dt = time.perf_counter() - t0
    ok = mesch_ok and spread < 0.05 and perron_diff <= 0.5 and dt < 120
    _record(acceptance_log, 8, ok,
            f"mesch ratio at 10^7 {ratio[-1]:.4f} (in [0.75,1.25]), monotone toward 1 over top two "
            f"decades: {trend}; A_2 spread on [1.01,1.1] {spread * 100:.2f}% (< 5%); "
            f"Perron N(20.5) = {pe.value.real:.4f} vs 10 (|diff| {perron_diff:.4f} <= 0.5); {dt:.1f} s")


def test_criterion_9_numerical_hygiene(acceptance_log, battery):
    h = 1e-5
    d = eta_derivative(FULL, 2).value
    fd = (eta(FULL, 2 + h).value - eta(FULL, 2 - h).value) / (2 * h)
    fd_err = abs(fd - d)
    base, _ = battery
    doubled = analytic_battery(cfg=EvalConfig(P=2 * DEFAULT.P))
    grew = [f"{a.identity_id}@{a.M},s={a.x}" for a, b in zip(base, doubled) if b.tol > a.tol]
    ok = fd_err <= 1e-6 and not grew
    _record(acceptance_log, 9, ok,
            f"eta' vs central difference (h=1e-5) {fd_err:.2e} (tol 1e-6); "
            f"errors that grew when doubling P: {grew or 'none'}")
