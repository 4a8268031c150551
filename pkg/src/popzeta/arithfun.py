"""Arithmetic functions, restricted Dirichlet convolution and the summation
identities over a population.

Every identity is checked with exact integer or rational arithmetic when
its parameters allow it; floats are used only for non-integer exponents.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import ConsistencyError, DomainError, PreconditionError
from .population import PopulationTable, pop_divisors, s_pop
from .primes import prime_table

FLOAT_RTOL = 1e-10


@lru_cache(maxsize=1 << 16)
def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization of n as ``((p, e), ...)`` by trial division."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    out = []
    m = n
    for p in prime_table(max(math.isqrt(n), 2)).primes:
        p = int(p)
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
    if m > 1:
        out.append((m, 1))
    return tuple(out)


def sigma(n: int, a=1):
    """Sum of d**a over divisors d of n.

    Integer ``a >= 0`` gives an int, negative integer ``a`` an exact
    Fraction (``sigma_|a|(n) / n**|a|``), anything else a float.
    """
    fac = factorize(n)
    if isinstance(a, Fraction) and a.denominator == 1:
        a = int(a)
    if isinstance(a, int):
        if a < 0:
            return Fraction(sigma(n, -a), n ** (-a))
        out = 1
        for p, e in fac:
            out *= sum(p ** (a * i) for i in range(e + 1))
        return out
    a = float(a)
    out = 1.0
    for p, e in fac:
        out *= math.fsum(float(p) ** (a * i) for i in range(e + 1))
    return out


@dataclass(frozen=True)
class ArithValues:
    n: int
    mu: int
    phi: int
    tau: int
    nu: int
    factors: tuple[tuple[int, int], ...]

    def sigma(self, a=1):
        return sigma(self.n, a)


@lru_cache(maxsize=1 << 16)
def arith_values(n: int) -> ArithValues:
    fac = factorize(n)
    mu = 0 if any(e > 1 for _, e in fac) else (-1) ** len(fac)
    phi = n
    tau = 1
    for p, e in fac:
        phi = phi // p * (p - 1)
        tau *= e + 1
    return ArithValues(n, mu, phi, tau, len(fac), fac)


def mu(n: int) -> int:
    return arith_values(n).mu


def is_prime(n: int) -> bool:
    fac = factorize(n) if n > 1 else ()
    return len(fac) == 1 and fac[0][1] == 1


def dirichlet_convolve(a: dict, b: dict, table: PopulationTable) -> dict:
    """gamma_n = sum over k*l = n of a_k * b_l for n <= table.bound.

    Both inputs must vanish off the population.  The output is checked to
    vanish off the population as well.
    """
    X = table.bound
    for name, c in (("a", a), ("b", b)):
        bad = [k for k, v in c.items() if v != 0 and (k < 1 or k > X or k not in table)]
        if bad:
            raise PreconditionError(f"input {name} supported off the population at {bad[:5]}")
    out: dict[int, object] = {}
    bs = sorted((k, v) for k, v in b.items() if v != 0)
    for k, av in sorted(a.items()):
        if av == 0:
            continue
        for l, bv in bs:
            n = k * l
            if n > X:
                break
            out[n] = out.get(n, 0) + av * bv
    stray = [n for n, v in out.items() if v != 0 and n not in table]
    if stray:
        raise ConsistencyError(f"convolution leaked outside the population at {stray[:5]}")
    return out


# ---------------------------------------------------------------------------
# Identity reports


@dataclass(frozen=True)
class IdentityReport:
    identity_id: str
    M: str
    x: object
    a: object
    lhs: object
    rhs: object
    residual: object
    passed: bool
    tol: float = 0.0

    def csv_row(self) -> str:
        a = "" if self.a is None else self.a
        return (f"{self.identity_id},{self.M},{self.x},{a},{self.lhs},{self.rhs},"
                f"{self.residual},{'true' if self.passed else 'false'}")


CSV_HEADER = "identity_id,M,x,a,lhs,rhs,residual,pass"


def make_report(identity_id, label, x, a, lhs, rhs, tol=None) -> IdentityReport:
    exact = all(isinstance(v, (int, Fraction)) for v in (lhs, rhs))
    if exact:
        res = lhs - rhs
        return IdentityReport(identity_id, label, x, a, lhs, rhs, res, res == 0, 0.0)
    res = complex(lhs) - complex(rhs)
    if res.imag == 0:
        res = res.real
    scale = max(abs(complex(lhs)), 1e-300)
    tol = FLOAT_RTOL * scale if tol is None else tol
    return IdentityReport(identity_id, label, x, a, lhs, rhs, res, abs(res) <= tol, tol)


def mobius_pair_check(f, table: PopulationTable, x, xs=None) -> IdentityReport:
    """Round-trip f -> F(t) = sum_k f(k t) -> sum_k mu(k) F(k t) over the population.

    ``f`` is a callable vanishing above ``table.bound``; arguments k*t beyond
    the bound are treated as zero.  The reconstruction is compared with f on
    ``xs`` (default ``[x]``) and the largest absolute residual is reported.
    """
    X = table.bound
    members = [int(m) for m in table.members]

    def F(t):
        return sum((f(k * t) for k in members if k * t <= X), 0)

    worst = 0
    lhs_out = rhs_out = None
    for t in (xs if xs is not None else [x]):
        back = sum((mu(k) * F(k * t) for k in members if k * t <= X), 0)
        want = f(t)
        r = abs(back - want)
        if lhs_out is None or r > worst:
            worst, lhs_out, rhs_out = r, back, want
    exact = isinstance(worst, (int, Fraction))
    return IdentityReport("mobius_pair", table.source.label, x, None, lhs_out, rhs_out,
                          worst, worst == 0 if exact else worst <= FLOAT_RTOL, 0.0)


# ---------------------------------------------------------------------------
# Summation identities over pop: LHS by direct summation of the arithmetic
# function, RHS from counting/harmonic queries on the table.

SUM_IDENTITIES = (
    "fr:phipop", "fr:2powipop", "fr:muGpop", "fr:phisuripop", "fr:phidivpop",
    "fr:phinupop", "fr:phisigapop", "fr:phisigminapop", "fr:sigaHonpop",
    "fr:tauaHonpop", "fr:nuaHonpop", "fr:sumHKpop", "fr:sumHKdesipop", "fr:sumHKNpop",
)
A_PARAMETERIZED = {"fr:phisigapop", "fr:phisigminapop", "fr:sigaHonpop",
                   "fr:tauaHonpop", "fr:nuaHonpop"}


def _is_exact(a) -> bool:
    return isinstance(a, int) or (isinstance(a, Fraction) and a.denominator == 1)


def _inv_pow(i: int, a):
    """i**(-a): exact for integer a, float otherwise."""
    if _is_exact(a):
        return Fraction(1, i) ** int(a)
    return float(i) ** (-float(a))


def _pow(i: int, a):
    if _is_exact(a):
        return Fraction(i) ** int(a) if a < 0 else i ** int(a)
    return float(i) ** float(a)


class _Sums:
    """Cached per-table helpers for RHS evaluation."""

    def __init__(self, table: PopulationTable):
        self.table = table
        self._S = {}
        self._prefix = {}

    def members_upto(self, x) -> list[int]:
        return [int(m) for m in self.table.members[: self.table.count(x)]]

    def N(self, u) -> int:
        return self.table.count(u) if u >= 1 else 0

    def S(self, u, a):
        if u < 1:
            return 0
        k = self.table.count(u)
        key = (k, a)
        if key not in self._S:
            top = int(self.table.members[k - 1])
            self._S[key] = s_pop(self.table, top, a, exact=_is_exact(a))
        return self._S[key]

    def prefix(self, name, fn, u):
        """sum of fn(j) over members j <= u, cached by member count."""
        if u < 1:
            return 0
        k = self.table.count(u)
        cache = self._prefix.setdefault(name, [0])
        ms = self.table.members
        while len(cache) <= k:
            cache.append(cache[-1] + fn(int(ms[len(cache) - 1])))
        return cache[k]


_sums_cache: dict[int, _Sums] = {}


def _sums(table: PopulationTable) -> _Sums:
    key = id(table)
    s = _sums_cache.get(key)
    if s is None or s.table is not table:
        s = _Sums(table)
        _sums_cache[key] = s
    return s


def _default_f(i: int) -> int:
    return i


def _default_g(j: int) -> int:
    return arith_values(j).tau


def verify_sum_identity(identity_id: str, table: PopulationTable, x, a=2,
                        f=None, g=None) -> IdentityReport:
    """Check one of the population summation identities at x.

    ``a`` is the exponent for the sigma_a / S_pop(.; a) family.  ``f`` and
    ``g`` parameterize ``fr:sumHKpop`` (defaults: f(i) = i, g(j) = tau(j)).
    """
    if identity_id not in SUM_IDENTITIES:
        raise DomainError(f"unknown identity {identity_id!r}")
    if x < 1:
        raise DomainError(f"x must be >= 1, got {x}")
    if x > table.bound:
        raise DomainError(f"x={x} exceeds population bound {table.bound}")
    sm = _sums(table)
    ms = sm.members_upto(x)
    N, S = sm.N, sm.S
    av = arith_values
    label = table.source.label
    a_used = a if identity_id in A_PARAMETERIZED else None

    # x/i with exact rationals keeps floor semantics exact for rational x
    xq = Fraction(x) if not isinstance(x, float) else x

    def q(i):
        return xq / i

    if identity_id == "fr:phipop":
        lhs = sum(ms)
        rhs = sum(N(q(i)) * av(i).phi for i in ms)
    elif identity_id == "fr:2powipop":
        lhs = sum(2 ** av(i).nu for i in ms)
        rhs = sum(N(q(i)) * abs(av(i).mu) for i in ms)
    elif identity_id == "fr:muGpop":
        lhs = sum(N(q(i)) * av(i).mu for i in ms)
        rhs = 1
    elif identity_id == "fr:phisuripop":
        lhs = sum(Fraction(av(i).phi, i) for i in ms)
        rhs = sum(Fraction(N(q(i)) * av(i).mu, i) for i in ms)
    elif identity_id == "fr:phidivpop":
        lhs = sum(av(i).tau for i in ms)
        rhs = sum(N(q(i)) for i in ms)
    elif identity_id == "fr:phinupop":
        lhs = sum(av(i).nu for i in ms)
        rhs = sum(N(q(i)) for i in ms if is_prime(i))
    elif identity_id == "fr:phisigapop":
        lhs = sum(sigma(i, a) for i in ms)
        rhs = sum(N(q(i)) * _pow(i, a) for i in ms)
    elif identity_id == "fr:phisigminapop":
        lhs = sum(sigma(i, a) * _inv_pow(i, a) for i in ms)
        rhs = sum(N(q(i)) * _inv_pow(i, a) for i in ms)
    elif identity_id == "fr:sigaHonpop":
        lhs = sum(sigma(i, a) * _inv_pow(i, a) for i in ms)
        rhs = sum(S(q(i), a) for i in ms)
    elif identity_id == "fr:tauaHonpop":
        lhs = sum(av(i).tau * _inv_pow(i, a) for i in ms)
        rhs = sum(S(q(i), a) * _inv_pow(i, a) for i in ms)
    elif identity_id == "fr:nuaHonpop":
        lhs = sum(av(i).nu * _inv_pow(i, a) for i in ms)
        rhs = sum(S(q(i), a) * _inv_pow(i, a) for i in ms if is_prime(i))
    elif identity_id == "fr:sumHKpop":
        ff = f or _default_f
        gg = g or _default_g
        lhs = sum(sum(ff(d) * gg(k // d) for d in pop_divisors(table, k)) for k in ms)
        if f is None and g is None:
            rhs = sum(ff(i) * sm.prefix("tau", gg, q(i)) for i in ms)
        else:
            rhs = sum(ff(i) * sum(gg(j) for j in sm.members_upto(q(i))) for i in ms)
    elif identity_id == "fr:sumHKdesipop":
        lhs = sum(ms)
        sig = lambda j: sigma(j, 1)
        mob = lambda j: av(j).mu
        rhs = sum(av(i).mu * sm.prefix("sigma", sig, q(i)) for i in ms)
        rhs2 = sum(sigma(i, 1) * sm.prefix("mu", mob, q(i)) for i in ms)
        if rhs2 != rhs:
            return make_report(identity_id, label, x, None, lhs, rhs2)
    elif identity_id == "fr:sumHKNpop":
        lhs = N(x)
        tau = lambda j: av(j).tau
        mob = lambda j: av(j).mu
        rhs = sum(av(i).mu * sm.prefix("tau", tau, q(i)) for i in ms)
        rhs2 = sum(av(i).tau * sm.prefix("mu", mob, q(i)) for i in ms)
        if rhs2 != rhs:
            return make_report(identity_id, label, x, None, lhs, rhs2)
    return make_report(identity_id, label, x, a_used, lhs, rhs)


def verify_all_sum_identities(table: PopulationTable, x, a=2) -> list[IdentityReport]:
    return [verify_sum_identity(i, table, x, a) for i in SUM_IDENTITIES]


def divisors(n: int) -> list[int]:
    """All positive divisors of n, ascending."""
    ds = [1]
    for p, e in factorize(n):
        ds = [d * p ** k for d in ds for k in range(e + 1)]
    return sorted(ds)


def divisor_mobius_sum(n: int) -> int:
    """sum of mu(d) over d | n."""
    return sum(mu(d) for d in divisors(n))


def mu_table(n_max: int) -> np.ndarray:
    """mu(1..n_max) by a linear sieve; independent of trial-division factorization."""
    mu_arr = np.ones(n_max + 1, dtype=np.int64)
    mu_arr[0] = 0
    is_comp = np.zeros(n_max + 1, dtype=bool)
    for p in range(2, n_max + 1):
        if not is_comp[p]:
            is_comp[2 * p :: p] = True
            mu_arr[p::p] *= -1
            mu_arr[p * p :: p * p] = 0
    return mu_arr


# ---------------------------------------------------------------------------
# Batch verification at every integer x <= x_max.
#
# Each side has the shape  sum over members i <= x (optionally primes only)
# of w(i) * Q[N(x / i)],  where Q is a prefix table indexed by member count,
# or is a plain prefix sum over members <= x.  Rationals are carried as
# Python-int numerators over one shared denominator per vector.


class _Vec:
    __slots__ = ("num", "den", "small")

    def __init__(self, values):
        vals = [Fraction(v) for v in values]
        den = 1
        for v in vals:
            den = math.lcm(den, v.denominator)
        nums = [v.numerator * (den // v.denominator) for v in vals]
        self.den = den
        big = max((abs(n) for n in nums), default=0)
        self.small = den == 1 and big < (1 << 40)
        self.num = np.array(nums, dtype=np.int64) if self.small else nums


def _prefix(values) -> _Vec:
    out, acc = [0], Fraction(0)
    for v in values:
        acc += v
        out.append(acc)
    return _Vec(out)


def _weighted(w: _Vec, Q: _Vec, ks: np.ndarray, sel: np.ndarray | None) -> Fraction:
    m = len(ks)
    idx = np.arange(m) if sel is None else np.flatnonzero(sel[:m])
    if w.small and Q.small:
        wv = w.num[idx]
        qv = Q.num[ks[idx]]
        num = int(np.dot(wv, qv)) if (np.abs(wv).max(initial=0) * np.abs(qv).max(initial=0)
                                      * max(len(idx), 1)) < (1 << 62) else \
            sum(int(a) * int(b) for a, b in zip(wv, qv))
    else:
        wn, qn = w.num, Q.num
        num = sum(int(wn[i]) * int(qn[k]) for i, k in zip(idx, ks[idx]))
    return Fraction(num, w.den * Q.den)


def verify_sum_identity_upto(identity_id: str, table: PopulationTable, x_max: int,
                             a=2) -> list[IdentityReport]:
    """Reports for every integer x in 1..x_max (exact; integer ``a`` only).

    Same identities as :func:`verify_sum_identity`; the LHS comes from prefix
    sums of the arithmetic function over members, the RHS from count
    queries N(x // i) evaluated afresh for every x.
    """
    if identity_id not in SUM_IDENTITIES:
        raise DomainError(f"unknown identity {identity_id!r}")
    if not _is_exact(a):
        return [verify_sum_identity(identity_id, table, x, a) for x in range(1, x_max + 1)]
    a = int(a)
    if x_max > table.bound:
        raise DomainError(f"x_max={x_max} exceeds population bound {table.bound}")
    members = table.members[: table.count(x_max)].astype(np.int64)
    ms = [int(m) for m in members]
    av = [arith_values(i) for i in ms]
    primes_sel = np.array([v.nu == 1 and v.tau == 2 for v in av], dtype=bool)
    inv = [_inv_pow(i, a) for i in ms]

    Ncount = _Vec(range(len(ms) + 1))
    S_a = _prefix(inv)

    lhs_terms = rhs_spec = None
    rhs2_spec = None
    const_rhs = None
    if identity_id == "fr:phipop":
        lhs_terms = ms
        rhs_spec = (_Vec([v.phi for v in av]), Ncount, None)
    elif identity_id == "fr:2powipop":
        lhs_terms = [2 ** v.nu for v in av]
        rhs_spec = (_Vec([abs(v.mu) for v in av]), Ncount, None)
    elif identity_id == "fr:muGpop":
        rhs_spec = (_Vec([v.mu for v in av]), Ncount, None)
        const_rhs = 1
    elif identity_id == "fr:phisuripop":
        lhs_terms = [Fraction(v.phi, i) for v, i in zip(av, ms)]
        rhs_spec = (_Vec([Fraction(v.mu, i) for v, i in zip(av, ms)]), Ncount, None)
    elif identity_id == "fr:phidivpop":
        lhs_terms = [v.tau for v in av]
        rhs_spec = (_Vec([1] * len(ms)), Ncount, None)
    elif identity_id == "fr:phinupop":
        lhs_terms = [v.nu for v in av]
        rhs_spec = (_Vec([1] * len(ms)), Ncount, primes_sel)
    elif identity_id == "fr:phisigapop":
        lhs_terms = [sigma(i, a) for i in ms]
        rhs_spec = (_Vec([_pow(i, a) for i in ms]), Ncount, None)
    elif identity_id == "fr:phisigminapop":
        lhs_terms = [sigma(i, a) * w for i, w in zip(ms, inv)]
        rhs_spec = (_Vec(inv), Ncount, None)
    elif identity_id == "fr:sigaHonpop":
        lhs_terms = [sigma(i, a) * w for i, w in zip(ms, inv)]
        rhs_spec = (_Vec([1] * len(ms)), S_a, None)
    elif identity_id == "fr:tauaHonpop":
        lhs_terms = [v.tau * w for v, w in zip(av, inv)]
        rhs_spec = (_Vec(inv), S_a, None)
    elif identity_id == "fr:nuaHonpop":
        lhs_terms = [v.nu * w for v, w in zip(av, inv)]
        rhs_spec = (_Vec(inv), S_a, primes_sel)
    elif identity_id == "fr:sumHKpop":
        lhs_terms = [sum(d * arith_values(k // d).tau for d in pop_divisors(table, k)) for k in ms]
        rhs_spec = (_Vec(ms), _prefix([v.tau for v in av]), None)
    elif identity_id == "fr:sumHKdesipop":
        lhs_terms = ms
        rhs_spec = (_Vec([v.mu for v in av]), _prefix([sigma(i, 1) for i in ms]), None)
        rhs2_spec = (_Vec([sigma(i, 1) for i in ms]), _prefix([v.mu for v in av]), None)
    elif identity_id == "fr:sumHKNpop":
        lhs_terms = [1] * len(ms)
        rhs_spec = (_Vec([v.mu for v in av]), _prefix([v.tau for v in av]), None)
        rhs2_spec = (_Vec([v.tau for v in av]), _prefix([v.mu for v in av]), None)

    lhs_prefix = _prefix(lhs_terms) if lhs_terms is not None else None
    a_used = a if identity_id in A_PARAMETERIZED else None
    label = table.source.label
    reports = []
    for x in range(1, x_max + 1):
        m = int(np.searchsorted(members, x, side="right"))
        ks = np.searchsorted(members, x // members[:m], side="right")
        rhs = _weighted(*rhs_spec[:2], ks, rhs_spec[2])
        if const_rhs is not None:
            lhs, rhs = rhs, const_rhs
        else:
            lhs = Fraction(int(lhs_prefix.num[m]), lhs_prefix.den)
        if rhs2_spec is not None:
            rhs2 = _weighted(*rhs2_spec[:2], ks, rhs2_spec[2])
            if rhs2 != rhs:
                rhs = rhs2
        lhs = _plain(lhs)
        rhs = _plain(rhs)
        reports.append(make_report(identity_id, label, x, a_used, lhs, rhs))
    return reports


def _plain(v):
    if isinstance(v, Fraction) and v.denominator == 1:
        return int(v)
    return v
