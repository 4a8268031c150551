"""Complex evaluation of prime-restricted zeta-type functions.

Every value comes back as an :class:`EvalResult` carrying a truncation-error
estimate.  The estimates are heuristic (prime-density and population-density
models), not certified enclosures:

* prime sums over ``p > P``: ``sum p^-sigma ~ P^(1-sigma) / ((sigma-1) ln P) + P^-sigma``;
  Euler products add the density-model tail ``d E1((s-1) ln P)`` (d the share of
  primes in M) and report the much smaller residual uncertainty instead
* paired alternating series: first omitted pair, ``|s|/sigma * alpha_next^-sigma``
* Dirichlet series over a population: local-density model for ``N_pop``
  anchored at the table bound (corrected value, residual error reported)

Branches of logarithms are fixed by anchoring at real ``s > 1`` where every
Euler product is real and positive.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy import integrate, special

from .arithfun import IdentityReport
from .errors import BranchError, ConsistencyError, DomainError, QuadratureError
from .population import PopulationTable, cached_population
from .primes import FULL, ArithmeticalList, make_list, nth_prime, prime_table

SAFETY = 1.3


@dataclass(frozen=True)
class EvalConfig:
    P: int = 10**6
    N: int = 10**6
    quad_tol: float = 1e-10
    k_w: int = 2

    def __post_init__(self):
        if self.P < 2:
            raise DomainError(f"prime cutoff P must be >= 2, got {self.P}")
        if self.N < 1:
            raise DomainError(f"series cutoff N must be >= 1, got {self.N}")
        if self.k_w < 1:
            raise DomainError(f"Weierstrass order must be >= 1, got {self.k_w}")
        if not self.quad_tol > 0:
            raise DomainError("quadrature tolerance must be positive")

    def doubled(self) -> "EvalConfig":
        return EvalConfig(2 * self.P, 2 * self.N, self.quad_tol, self.k_w)


DEFAULT = EvalConfig()


@dataclass(frozen=True)
class EvalResult:
    value: complex
    err: float
    config: EvalConfig = field(repr=False)
    method: str = ""

    def __post_init__(self):
        if not math.isfinite(self.err) or self.err < 0:
            raise ConsistencyError(f"error estimate must be finite and >= 0, got {self.err}")

    def csv_row(self, s: complex) -> str:
        s, v = complex(s), complex(self.value)
        return f"{s.real!r},{s.imag!r},{v.real!r},{v.imag!r},{self.err!r}"


GRID_HEADER = "re_s,im_s,re_val,im_val,err"


def _sigma_guard(s, lo: float, what: str) -> complex:
    s = complex(s)
    if not s.real > lo:
        raise DomainError(f"{what} needs Re(s) > {lo}, got s={s}")
    return s


def _list_primes(M: ArithmeticalList, P: int) -> np.ndarray:
    """Primes of M entering the truncated sums: all of them for finite lists."""
    if M.kind == "explicit":
        return np.array(M.explicit, dtype=np.int64)
    return M.primes_upto(P)


def _clog1p(z: np.ndarray) -> np.ndarray:
    """ln(1 + z) for complex z, accurate for small |z| (numpy forms 1 + z first)."""
    x, y = z.real, z.imag
    return 0.5 * np.log1p(2 * x + x * x + y * y) + 1j * np.arctan2(y, 1 + x)


def _powers(ps: np.ndarray, s: complex) -> np.ndarray:
    """p^-s for an array of primes."""
    return np.exp(-s * np.log(ps.astype(np.float64)))


def prime_tail(M: ArithmeticalList, sigma: float, P: int) -> float:
    """Heuristic size of sum_{p in M, p > P} p^-sigma (sigma > 1)."""
    if M.kind == "explicit":
        return 0.0
    lnP = math.log(P)
    return P ** (1.0 - sigma) / ((sigma - 1.0) * lnP) + P ** (-sigma)


def _log_tail_extra(M: ArithmeticalList, sigma: float, P: int, order: int = 2) -> float:
    """sum over p > P of |z|^m / m for m >= order, z = p^-s (bounded crudely)."""
    if M.kind == "explicit":
        return 0.0
    e = order * sigma
    lnP = math.log(P)
    return P ** (1.0 - e) / ((e - 1.0) * lnP * order) / (1.0 - P ** (-sigma)) + P ** (-e)


def prime_density(M: ArithmeticalList) -> float:
    """Share of all primes that lie in M (0 for finite lists)."""
    if M.kind == "arithmetical":
        return 1.0 / M.r
    if M.kind == "complement":
        return 1.0 - 1.0 / M.r
    return 0.0


def tail_model(M: ArithmeticalList, s: complex, P: int, m: int = 1) -> complex:
    """Density-model value of sum_{p in M, p > P} p^(-ms) = d E1((ms - 1) ln P)."""
    d = prime_density(M)
    if d == 0:
        return 0j
    return d * complex(special.exp1((m * s - 1) * math.log(P)))


def _corrected_err(M: ArithmeticalList, sigma: float, P: int) -> float:
    """Residual uncertainty of a tail-corrected prime sum.

    The density model misses the irregularity of pi(t) (relative size a few
    times 1e-3 near 10^6, so 1e-2 is used) and the position of the list
    inside the first omitted block of r primes (one term, P^-sigma).
    """
    if M.kind == "explicit":
        return 0.0
    return 0.01 * prime_tail(M, sigma, P) + P ** (-sigma)


def eta(M: ArithmeticalList, s, cfg: EvalConfig = DEFAULT, corrected: bool = False) -> EvalResult:
    """Prime zeta function restricted to M, truncated at P.

    With ``corrected=True`` the density-model tail is added and the error
    shrinks accordingly.
    """
    s = _sigma_guard(s, 1.0, "eta")
    ps = _list_primes(M, cfg.P)
    val = complex(np.sum(_powers(ps, s))) if len(ps) else 0j
    if corrected:
        return EvalResult(val + tail_model(M, s, cfg.P), _corrected_err(M, s.real, cfg.P), cfg,
                          "prime-sum+tail")
    return EvalResult(val, prime_tail(M, s.real, cfg.P), cfg, "prime-sum")


def log_euler_product(M: ArithmeticalList, s, cfg: EvalConfig = DEFAULT,
                      corrected: bool = True) -> EvalResult:
    """ln Z_M(s) = -sum ln(1 - p^-s), principal logs per factor (Re(s) > 1).

    By default the primes beyond P are accounted for by the density model
    (first two orders of the logarithm); ``corrected=False`` gives the plain
    truncated product.
    """
    s = _sigma_guard(s, 1.0, "log_euler_product")
    ps = _list_primes(M, cfg.P)
    val = complex(-np.sum(_clog1p(-_powers(ps, s)))) if len(ps) else 0j
    extra = _log_tail_extra(M, s.real, cfg.P)
    if corrected:
        val += tail_model(M, s, cfg.P) + tail_model(M, s, cfg.P, 2) / 2
        return EvalResult(val, _corrected_err(M, s.real, cfg.P) + extra, cfg, "log-euler+tail")
    return EvalResult(val, prime_tail(M, s.real, cfg.P) + extra, cfg, "log-euler")


def _density_exponent(M: ArithmeticalList) -> float | None:
    """beta with N_pop(t) ~ A t (ln t)^beta, or None when no such model applies."""
    if M.kind == "arithmetical":
        return 1.0 / M.r - 1.0
    if M.kind == "complement":
        return -1.0 / M.r
    return None


def zeta_partial(M: ArithmeticalList, s, cfg: EvalConfig = DEFAULT,
                 method: str = "euler") -> EvalResult:
    """Z_M(s) by its Euler product (primes <= P) or Dirichlet series (members <= N)."""
    s = _sigma_guard(s, 1.0, "zeta_partial")
    if M.is_empty:
        return EvalResult(1 + 0j, 0.0, cfg, method)
    if method == "euler":
        lg = log_euler_product(M, s, cfg)
        val = cmath.exp(lg.value)
        return EvalResult(val, abs(val) * math.expm1(lg.err), cfg, "euler")
    if method != "series":
        raise DomainError(f"unknown method {method!r}; use 'euler' or 'series'")

    table = cached_population(M, cfg.N)
    ms = table.members.astype(np.float64)
    z = np.exp(-s * np.log(ms[::-1]))
    partial = complex(math.fsum(z.real), math.fsum(z.imag))
    N = float(cfg.N)
    count = len(table)
    sig = s.real
    beta = _density_exponent(M)
    if M.is_full:
        # N_pop(t) = floor(t): the model t is off by at most one everywhere
        tail = N ** (1 - s) / (s - 1)
        err = (abs(s) / sig + 1) * N ** (-sig)
    elif beta is None:
        tail = 0j
        err = SAFETY * 2 * abs(s) / (sig - 1) * count * N ** (-sig)
    else:
        # N_pop(t) ~ N_pop(N) (t/N) (ln t / ln N)^beta, expanded to first order in ln(t/N)
        lnN = math.log(N)
        tail = (count / N) * N ** (1 - s) * (1 / (s - 1) + s * beta / ((s - 1) ** 2 * lnN))
        err = SAFETY * (0.1 * abs(tail) + (abs(s) / sig + 1) * N ** (-sig))
    return EvalResult(partial + tail, float(err), cfg, "series")


def w_regularized(M: ArithmeticalList, s, cfg: EvalConfig = DEFAULT) -> EvalResult:
    """W_M(s) = prod 1/((1 - p^-s) e^(p^-s)), convergent for Re(s) > 1/2."""
    s = _sigma_guard(s, 0.5, "w_regularized")
    ps = _list_primes(M, cfg.P)
    if len(ps) == 0:
        return EvalResult(1 + 0j, 0.0, cfg, "weierstrass")
    z = _powers(ps, s)
    logw = complex(np.sum(-_clog1p(-z) - z))
    val = cmath.exp(logw)
    err_log = _log_tail_extra(M, s.real, cfg.P, order=2)
    return EvalResult(val, abs(val) * math.expm1(err_log), cfg, "weierstrass")


def _report(identity_id, M, s, lhs, rhs, tol) -> IdentityReport:
    res = abs(complex(lhs) - complex(rhs))
    # double-precision rounding floor, so exact-in-principle checks are not flaky
    tol = tol + 64 * np.finfo(float).eps * max(abs(complex(lhs)), abs(complex(rhs)), 1.0)
    label = M.label if isinstance(M, ArithmeticalList) else str(M)
    return IdentityReport(identity_id, label, complex(s), None, complex(lhs), complex(rhs),
                          res, bool(res <= tol), float(tol))


def regularized_product_check(M: ArithmeticalList, s, cfg: EvalConfig = DEFAULT) -> IdentityReport:
    """Z_M (Dirichlet series) against W_M * exp(eta_M) (products over primes)."""
    s = _sigma_guard(s, 1.0, "regularized_product_check")
    z = zeta_partial(M, s, cfg, "series")
    w = w_regularized(M, s, cfg)
    e = eta(M, s, cfg, corrected=True)
    rhs = w.value * cmath.exp(e.value)
    tol = z.err + abs(rhs) * (math.expm1(e.err) + w.err / max(abs(w.value), 1e-300))
    return _report("z_equals_w_exp_eta", M, s, z.value, rhs, tol)


# -- index-shifted lists and paired alternating series ------------------------------

def _paired(k: int, j: int, s: complex, P: int):
    """alpha_n = p_(1+(n-1)k) and beta_n = p_(1+j+(n-1)k) for all beta_n <= P.

    Returns ``(alpha, beta, alpha_next)`` as float arrays plus the first
    alpha not paired.
    """
    table = prime_table(P)
    ps = table.primes[: table.pi(P)]
    beta = ps[j::k]
    alpha = ps[0::k][: len(beta)]
    n = len(beta)
    alpha_next = nth_prime(1 + n * k)
    if n:
        nxt = np.append(alpha[1:], alpha_next)
        if not (np.all(alpha <= beta) and np.all(beta <= nxt)):
            raise ConsistencyError("interleaving alpha_n <= beta_n <= alpha_(n+1) violated")
    return alpha.astype(np.float64), beta.astype(np.float64), float(alpha_next)


def shift_sum(k: int, j: int, s, cfg: EvalConfig = DEFAULT) -> EvalResult:
    """w_j(s) = sum_n (p_(1+nk)^-s - p_(1+j+nk)^-s), convergent for Re(s) > 0."""
    s = _sigma_guard(s, 0.0, "shift_sum")
    if j == 0:
        return EvalResult(0j, 0.0, cfg, "paired")
    a, b, a_next = _paired(k, j, s, cfg.P)
    d = np.exp(-s * np.log(a)) - np.exp(-s * np.log(b))
    val = complex(math.fsum(d.real), math.fsum(d.imag))
    err = abs(s) / s.real * a_next ** (-s.real)
    return EvalResult(val, err, cfg, "paired")


def w_shift(M: ArithmeticalList, s, cfg: EvalConfig = DEFAULT) -> EvalResult:
    """w(s) with eta_1(s) = r eta_M(s) + w(s) for an arithmetical list of reason r.

    With ``w_j = eta(list shifted by 0) - eta(list shifted by j)`` the partition
    of the primes gives ``w = r w_(r0-1) - sum_j w_j`` (``w_0 = 0``).
    """
    s = _sigma_guard(s, 0.0, "w_shift")
    if M.kind != "arithmetical":
        raise DomainError("w_shift needs an arithmetical list")
    r = M.r
    parts = [shift_sum(r, j, s, cfg) for j in range(r)]
    total = sum((p.value for p in parts), 0j)
    err = sum(p.err for p in parts)
    base = parts[M.r0 - 1]
    return EvalResult(r * base.value - total, r * base.err + err, cfg, "paired")


def shift_identity_check(M: ArithmeticalList, s, cfg: EvalConfig = DEFAULT) -> IdentityReport:
    """eta_1 - r eta_M against the paired-series w."""
    s = _sigma_guard(s, 1.0, "shift_identity_check")
    e1, em, w = eta(FULL, s, cfg), eta(M, s, cfg), w_shift(M, s, cfg)
    lhs = e1.value - M.r * em.value
    return _report("eta_shift", M, s, lhs, w.value, e1.err + M.r * em.err + w.err)


def _log_weierstrass(z: np.ndarray, order: int) -> np.ndarray:
    """ln W_order(z) = ln(1 - z) + z + z^2/2 + ... + z^order/order."""
    out = _clog1p(-z)
    zm = np.ones_like(z)
    for m in range(1, order + 1):
        zm = zm * z
        out = out + zm / m
    return out


def log_g_k(s, k: int, cfg: EvalConfig = DEFAULT) -> EvalResult:
    """ln g_k(s), with zeta = g_k zeta_k^k and zeta_k the Euler product over p_(1+nk).

    Each factor ``Z_(A_i) / zeta_k`` (A_i the list shifted by i-1) is split into
    a Weierstrass product of order ``k_w``, absolutely convergent for
    ``Re(s) > 1/(k_w+1)``, and ``k_w`` paired alternating series.
    """
    kw = cfg.k_w
    s = _sigma_guard(s, 1.0 / (kw + 1), "g_k")
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if k == 1:
        return EvalResult(0j, 0.0, cfg, "weierstrass-paired")
    sig = s.real
    total = 0j
    err = 0.0
    for i in range(2, k + 1):
        a, b, a_next = _paired(k, i - 1, s, cfg.P)
        za, zb = np.exp(-s * np.log(a)), np.exp(-s * np.log(b))
        part = _log_weierstrass(za, kw) - _log_weierstrass(zb, kw)
        total += complex(np.sum(part))
        zam, zbm = np.ones_like(za), np.ones_like(zb)
        for m in range(1, kw + 1):
            zam, zbm = zam * za, zbm * zb
            d = zbm - zam
            total += complex(math.fsum(d.real), math.fsum(d.imag)) / m
            err += abs(m * s) / (m * sig) * a_next ** (-m * sig) / m
    # Weierstrass remainders over all primes beyond P
    e = (kw + 1) * sig
    lnP = math.log(cfg.P)
    tail = cfg.P ** (1 - e) / ((e - 1) * lnP * (kw + 1)) / (1 - cfg.P ** (-sig)) + cfg.P ** (-e)
    err += 2 * (k - 1) * tail
    return EvalResult(total, err, cfg, "weierstrass-paired")


def g_k(s, k: int, cfg: EvalConfig = DEFAULT) -> EvalResult:
    lg = log_g_k(s, k, cfg)
    val = cmath.exp(lg.value)
    return EvalResult(val, abs(val) * math.expm1(lg.err), cfg, lg.method)


def zeta_k(s, k: int, cfg: EvalConfig = DEFAULT) -> EvalResult:
    """Euler product over p_1, p_(1+k), p_(1+2k), ... (Re(s) > 1)."""
    return zeta_partial(make_list(1, k), s, cfg, "euler")


def riemann_zeta(s) -> complex:
    return complex(mpmath.zeta(complex(s)))


def zeta_k_factorization_check(s, k: int, cfg: EvalConfig = DEFAULT) -> IdentityReport:
    """zeta(s) against g_k(s) zeta_k(s)^k."""
    s = _sigma_guard(s, 1.0, "zeta_k_factorization_check")
    z = riemann_zeta(s)
    g, zk = g_k(s, k, cfg), zeta_k(s, k, cfg)
    rhs = g.value * zk.value ** k
    rel = g.err / abs(g.value) + k * zk.err / abs(zk.value)
    tol = abs(rhs) * rel * (1 + rel) + 1e-14 * abs(z)
    return _report(f"zeta_gk_k{k}", f"k={k}", s, z, rhs, tol)


def zeta_k_path(k: int, path, cfg: EvalConfig = DEFAULT) -> list[EvalResult]:
    """zeta_k along a path as exp((ln zeta - ln g_k)/k), branch tracked from a real anchor.

    ``path[0]`` must be real and > 1, where everything is real positive.  The
    logarithm of zeta is continued stepwise; a step with ``|d ln zeta| >= pi/4``
    is rejected as too coarse to track.
    """
    pts = [complex(p) for p in path]
    if not pts:
        return []
    s0 = pts[0]
    if s0.imag != 0 or not s0.real > 1:
        raise DomainError(f"path must start at a real point > 1, got {s0}")
    out = []
    prev = None
    for s in pts:
        if s == 1:
            raise DomainError("path passes through the pole s = 1")
        zv = mpmath.zeta(s)
        if abs(zv) < 1e-12:
            raise BranchError(f"zeta vanishes (numerically) at s={s}; singular path")
        L = complex(mpmath.log(zv))
        if prev is not None:
            L += 2j * math.pi * round((prev - L).imag / (2 * math.pi))
            if abs(L - prev) >= math.pi / 4:
                raise BranchError(f"|d ln zeta| = {abs(L - prev):.3f} >= pi/4 at s={s}; refine the path")
        prev = L
        lg = log_g_k(s, k, cfg)
        val = cmath.exp((L - lg.value) / k)
        err = abs(val) * math.expm1(lg.err / k + 1e-15)
        out.append(EvalResult(val, err, cfg, "branch-tracked"))
    return out


def ak_stabilization(k: int, s_values, cfg: EvalConfig = DEFAULT) -> list[tuple[float, float]]:
    """(s, zeta_k(s) (s-1)^(1/k)) along a real path decreasing toward 1."""
    s_values = [float(v) for v in s_values]
    if any(v <= 1 for v in s_values):
        raise DomainError("real points must exceed 1")
    res = zeta_k_path(k, s_values, cfg)
    return [(v, (r.value * (v - 1) ** (1.0 / k)).real) for v, r in zip(s_values, res)]


def log_mobius_check(M: ArithmeticalList, s, cfg: EvalConfig = DEFAULT) -> IdentityReport:
    """eta_M(s) against sum_n mu(n)/n ln Z_M(ns)."""
    from .arithfun import mu

    s = _sigma_guard(s, 1.0, "log_mobius_check")
    e = eta(M, s, cfg)
    ps = _list_primes(M, cfg.P)
    if len(ps) == 0 and M.kind == "explicit":
        return _report("eta_log_mobius", M, s, e.value, 0j, 0.0)
    pmin = float(ps[0]) if len(ps) else 2.0
    sig = s.real
    n_mu = max(1, math.ceil(45 / (sig * math.log(pmin))))
    total = 0j
    err = e.err
    for n in range(1, n_mu + 1):
        m = mu(n)
        if m:
            lz = log_euler_product(M, n * s, cfg, corrected=False)
            total += m * lz.value / n
            err += lz.err / n
    q = pmin ** (-sig)
    err += 4 * q ** (n_mu + 1) / (1 - q)
    return _report("eta_log_mobius", M, s, e.value, total, err)


def eta_derivative(M: ArithmeticalList, s, cfg: EvalConfig = DEFAULT) -> EvalResult:
    """d/ds eta_M(s) = -sum ln p / p^s."""
    s = _sigma_guard(s, 1.0, "eta_derivative")
    ps = _list_primes(M, cfg.P)
    if len(ps) == 0:
        return EvalResult(0j, 0.0, cfg, "prime-sum")
    lp = np.log(ps.astype(np.float64))
    val = complex(-np.sum(lp * np.exp(-s * lp)))
    if M.kind == "explicit":
        err = 0.0
    else:
        sig = s.real
        err = SAFETY * cfg.P ** (1 - sig) / (sig - 1) + math.log(cfg.P) * cfg.P ** (-sig)
    return EvalResult(val, err, cfg, "prime-sum")


def _F_pilog(t: np.ndarray, s: complex) -> np.ndarray:
    """Antiderivative of ln t * t^(-s-1)."""
    lt = np.log(t)
    return -np.exp(-s * lt) * (s * lt + 1) / (s * s)


def pi_log_integral(s, X_cut: int, cfg: EvalConfig = DEFAULT) -> EvalResult:
    """-s * integral_2^inf pi(t) ln t t^(-s-1) dt, exact on [2, X_cut] piecewise.

    pi(t) is constant between consecutive primes, so each piece has a closed
    form.  The tail beyond X_cut is bounded with pi(t) <= t.
    """
    s = _sigma_guard(s, 1.0, "pi_log_integral")
    if X_cut < 2:
        raise DomainError("X_cut must be >= 2")
    table = prime_table(X_cut)
    ps = table.primes[: table.pi(X_cut)].astype(np.float64)
    edges = np.append(ps, float(X_cut))
    F = _F_pilog(edges, s)
    j = np.arange(1, len(ps) + 1, dtype=np.float64)
    d = j * (F[1:] - F[:-1])
    integral = complex(math.fsum(d.real), math.fsum(d.imag))
    sig = s.real
    lx = math.log(X_cut)
    tail = abs(s) * X_cut ** (1 - sig) * (lx / (sig - 1) + 1 / (sig - 1) ** 2)
    return EvalResult(-s * integral, tail, cfg, "piecewise")


def pi_log_identity_check(s, X_cut: int | None = None, cfg: EvalConfig = DEFAULT) -> IdentityReport:
    """eta_1'(s) - eta_1(s)/s against the pi(t) ln t integral."""
    s = _sigma_guard(s, 1.0, "pi_log_identity_check")
    X_cut = cfg.P if X_cut is None else X_cut
    d, e = eta_derivative(FULL, s, cfg), eta(FULL, s, cfg)
    rhs = pi_log_integral(s, X_cut, cfg)
    lhs = d.value - e.value / s
    return _report("eta_pi_log", FULL, s, lhs, rhs.value, d.err + e.err / abs(s) + rhs.err)


# -- Laplace-type integrals ----------------------------------------------------------

def g_pop_exp(table: PopulationTable, t: float) -> float:
    """G_pop(e^-t) = sum over members n of e^(-nt), from the table (needs 40/t <= bound)."""
    if t <= 0:
        raise DomainError("t must be positive")
    if table.source.is_full:
        return 1.0 / math.expm1(t)
    cut = 40.0 / t
    if cut > table.bound:
        raise DomainError(f"t={t} needs members up to {cut:.0f} > table bound {table.bound}")
    k = int(np.searchsorted(table.members, int(cut), side="right"))
    ms = table.members[:k].astype(np.float64)
    return float(np.sum(np.exp(-t * ms)))


def g_pop_exp_inclusion_exclusion(M: ArithmeticalList, t: float, K: int | None = None) -> EvalResult:
    """G_pop(e^-t) = sum over squarefree k in pop(complement) of mu(k)/(e^(kt) - 1).

    The products k are truncated at K (default 40/t); the dropped terms are
    bounded by ``2 e^(-(K+1)t) / (1 - e^-t)``.
    """
    from .population import squarefree_products

    if t <= 0:
        raise DomainError("t must be positive")
    K = int(math.ceil(40.0 / t)) if K is None else int(K)
    ks, mus = squarefree_products(M.complement_primes_upto(K), K)
    val = float(np.sum(mus / np.expm1(t * ks.astype(np.float64))))
    err = 2 * math.exp(-(K + 1) * t) / -math.expm1(-t)
    return EvalResult(complex(val), err, DEFAULT, "inclusion-exclusion")


def gamma_integral_check(M: ArithmeticalList, s, cfg: EvalConfig = DEFAULT) -> IdentityReport:
    """Gamma(s) Z_M(s) against integral_0^inf G_pop(e^-t) t^(s-1) dt.

    The integral runs over [t0, t1] in the variable v = ln t; t0 = 40/N is
    the smallest t at which the population table still resolves G.  On
    [0, t0] the integrand is modelled as G(e^-t0) t0/t, with the bound
    0 <= G(e^-t) <= 1/(e^t - 1) <= 1/t giving the error.
    """
    s = _sigma_guard(s, 1.0, "gamma_integral_check")
    sig = s.real
    table = cached_population(M, cfg.N) if not M.is_full else cached_population(M, 1)
    t0 = 1e-8 if M.is_full else 40.0 / cfg.N
    t1 = max(80.0, 4 * sig + 40.0)

    def f(v):
        t = math.exp(v)
        return g_pop_exp(table, t) * cmath.exp(v * s)

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, qerr = integrate.quad(f, math.log(t0), math.log(t1), complex_func=True,
                                       epsabs=cfg.quad_tol, epsrel=cfg.quad_tol, limit=400)
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(f"quadrature on [{t0:g}, {t1:g}] at s={s}: {exc}") from exc
    qerr = abs(complex(qerr)) if not isinstance(qerr, dict) else max(abs(e) for e in qerr.values())
    head = g_pop_exp(table, t0) * t0 ** s / (s - 1)
    head_err = t0 ** (sig - 1) / (sig - 1)
    tail_err = 2 * t1 ** sig * math.exp(-t1)
    rhs = complex(val) + head
    z = zeta_partial(M, s, cfg, "euler")
    gam = complex(special.gamma(s))
    lhs = gam * z.value
    tol = max(qerr, cfg.quad_tol) + head_err + tail_err + abs(gam) * z.err
    return _report("gamma_integral", M, s, lhs, rhs, tol)


def abel_integral_check(M: ArithmeticalList, s, X: int | None = None,
                        cfg: EvalConfig = DEFAULT) -> IdentityReport:
    """Z_M(s) against s * integral_1^X N_pop(t) t^(-s-1) dt, piecewise exact.

    N_pop is constant between consecutive members, so the integral is
    ``sum_j j (m_j^-s - m_(j+1)^-s)``; the tail beyond X is bounded with
    N_pop(t) <= t.
    """
    s = _sigma_guard(s, 1.0, "abel_integral_check")
    X = cfg.N if X is None else int(X)
    table = cached_population(M, X)
    edges = np.append(table.members.astype(np.float64), float(X))
    pw = np.exp(-s * np.log(edges))
    j = np.arange(1, len(table) + 1, dtype=np.float64)
    d = j * (pw[:-1] - pw[1:])
    rhs = complex(math.fsum(d.real), math.fsum(d.imag))
    sig = s.real
    tail = abs(s) * X ** (1 - sig) / (sig - 1)
    z = zeta_partial(M, s, cfg, "euler")
    return _report("abel_integral", M, s, z.value, rhs, tail + z.err)


def perron_estimate(M: ArithmeticalList, x: float, sigma: float = 1.5, T: float = 400.0,
                    cfg: EvalConfig = DEFAULT, P: int = 10**4, h: float = 0.05) -> EvalResult:
    """N_pop(x) by the truncated Perron integral (1/2 pi i) int Z(w) x^w / w dw.

    The contour is sigma - iT .. sigma + iT, integrated by the trapezoid rule
    on its upper half (the integrand is conjugate-symmetric).  Z is the Euler
    product over primes <= max(P, x), whose Dirichlet coefficients agree with
    the population indicator up to x.  The error reports the classical
    truncation bound ``sum_n (x/n)^sigma min(1, 1/(pi T |ln(x/n)|))`` plus the
    difference between steps h and 2h.
    """
    x = float(x)
    if x <= 1:
        raise DomainError("x must exceed 1")
    if x == math.floor(x):
        raise DomainError(f"x={x} is an integer; Perron's formula needs a non-integer x")
    if not sigma > 1:
        raise DomainError("sigma must exceed 1")
    if T <= 0 or h <= 0:
        raise DomainError("T and h must be positive")
    Pe = max(int(P), math.ceil(x))
    ps = _list_primes(M, Pe).astype(np.float64)
    lp = np.log(ps)
    lx = math.log(x)

    def trapezoid(step):
        n = int(math.ceil(T / step))
        t = np.linspace(0.0, T, n + 1)
        w = sigma + 1j * t
        logZ = np.zeros(len(t), dtype=complex)
        for chunk in np.array_split(np.arange(len(lp)), max(1, len(lp) // 256)):
            logZ += -_clog1p(-np.exp(-np.outer(w, lp[chunk]))).sum(axis=1)
        vals = np.real(np.exp(logZ + w * lx) / w)
        dt = T / n
        return (dt * (vals.sum() - 0.5 * (vals[0] + vals[-1]))) / math.pi

    est = trapezoid(h)
    disc = abs(est - trapezoid(2 * h))
    # truncation bound over the population (members up to a generous cutoff)
    nb = max(int(x * 1e3), 10**4)
    table = cached_population(M, min(nb, cfg.N) if M.kind != "explicit" else nb)
    ms = table.members.astype(np.float64)
    ratio = x / ms
    bound = float(np.sum(ratio ** sigma * np.minimum(1.0, 1.0 / (math.pi * T * np.abs(np.log(ratio))))))
    top = float(table.bound)
    bound += x ** sigma / (math.pi * T * math.log(top / x)) * top ** (1 - sigma) / (sigma - 1)
    return EvalResult(complex(est), float(bound + disc), cfg, "perron")


# -- grids -------------------------------------------------------------------------

def _grid_fn(name: str):
    table = {
        "eta": lambda M, s, cfg: eta(M, s, cfg),
        "zeta": lambda M, s, cfg: zeta_partial(M, s, cfg, "euler"),
        "zeta-series": lambda M, s, cfg: zeta_partial(M, s, cfg, "series"),
        "w": lambda M, s, cfg: w_regularized(M, s, cfg),
        "wshift": lambda M, s, cfg: w_shift(M, s, cfg),
        "deta": lambda M, s, cfg: eta_derivative(M, s, cfg),
    }
    if name not in table:
        raise DomainError(f"unknown grid function {name!r}; choose from {sorted(table)}")
    return table[name]


GRID_FUNCTIONS = ("eta", "zeta", "zeta-series", "w", "wshift", "deta")


def grid_csv(name: str, M: ArithmeticalList, points, cfg: EvalConfig = DEFAULT) -> str:
    """CSV dump ``re_s,im_s,re_val,im_val,err`` of one function over points."""
    fn = _grid_fn(name)
    lines = [GRID_HEADER]
    for s in points:
        lines.append(fn(M, complex(s), cfg).csv_row(s))
    return "\n".join(lines) + "\n"


ANALYTIC_CHECKS = ("z_equals_w_exp_eta", "eta_shift", "zeta_gk", "eta_log_mobius", "gamma_integral", "abel_integral")


def analytic_battery(points=(2, 3, 2 + 5j), lists=None, cfg: EvalConfig = DEFAULT,
                     ks=(2, 3)) -> list[IdentityReport]:
    """Every analytic identity at every point and list (Prop-1 checks per k)."""
    if lists is None:
        lists = (FULL, make_list(1, 2), make_list(1, 3))
    out = []
    for s in points:
        for M in lists:
            out.append(regularized_product_check(M, s, cfg))
            out.append(shift_identity_check(M, s, cfg))
            out.append(log_mobius_check(M, s, cfg))
            out.append(gamma_integral_check(M, s, cfg))
            out.append(abel_integral_check(M, s, None, cfg))
        for k in ks:
            out.append(zeta_k_factorization_check(s, k, cfg))
    return out
