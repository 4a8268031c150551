"""Truncated formal power series with exact rational coefficients, and the
generating-series identities of a population.
"""
from __future__ import annotations

from fractions import Fraction

from .arithfun import IdentityReport, arith_values, mu, sigma
from .errors import DomainError
from .population import PopulationTable, enumerate_pop, pop_divisors, squarefree_products
from .primes import ArithmeticalList

DEFAULT_CAP = 64


class CoefficientSeries:
    """c_0 + c_1 x + ... + c_D x^D, everything above degree D discarded."""

    __slots__ = ("cap", "coeffs")

    def __init__(self, coeffs, cap: int | None = None):
        coeffs = [Fraction(c) for c in coeffs]
        if cap is None:
            cap = max(len(coeffs) - 1, 0)
        if cap < 0:
            raise DomainError("degree cap must be >= 0")
        coeffs = coeffs[: cap + 1]
        coeffs += [Fraction(0)] * (cap + 1 - len(coeffs))
        self.cap = cap
        self.coeffs = tuple(coeffs)

    @classmethod
    def zero(cls, cap: int) -> "CoefficientSeries":
        return cls([], cap)

    @classmethod
    def monomial(cls, k: int, cap: int, c=1) -> "CoefficientSeries":
        out = [0] * (cap + 1)
        if k <= cap:
            out[k] = c
        return cls(out, cap)

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k <= self.cap else Fraction(0)

    def __len__(self) -> int:
        return self.cap + 1

    def _cap_with(self, other: "CoefficientSeries") -> int:
        return min(self.cap, other.cap)

    def __add__(self, other):
        if not isinstance(other, CoefficientSeries):
            return self + CoefficientSeries([other], self.cap)
        D = self._cap_with(other)
        return CoefficientSeries([self[k] + other[k] for k in range(D + 1)], D)

    __radd__ = __add__

    def __neg__(self):
        return CoefficientSeries([-c for c in self.coeffs], self.cap)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, CoefficientSeries):
            c = Fraction(other)
            return CoefficientSeries([c * v for v in self.coeffs], self.cap)
        D = self._cap_with(other)
        out = [Fraction(0)] * (D + 1)
        nz = [(i, c) for i, c in enumerate(self.coeffs[: D + 1]) if c]
        onz = [(j, c) for j, c in enumerate(other.coeffs[: D + 1]) if c]
        for i, c in nz:
            for j, d in onz:
                if i + j > D:
                    break
                out[i + j] += c * d
        return CoefficientSeries(out, D)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, CoefficientSeries):
            return NotImplemented
        return self.cap == other.cap and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.cap, self.coeffs))

    def __repr__(self):
        terms = [f"{c}*x^{k}" for k, c in enumerate(self.coeffs) if c]
        return f"CoefficientSeries({' + '.join(terms) or '0'}; cap={self.cap})"

    def compose_power(self, n: int) -> "CoefficientSeries":
        """f(x^n)."""
        if n < 1:
            raise DomainError("n must be >= 1")
        out = [Fraction(0)] * (self.cap + 1)
        for k, c in enumerate(self.coeffs):
            if k * n > self.cap:
                break
            out[k * n] = c
        return CoefficientSeries(out, self.cap)

    def derivative(self) -> "CoefficientSeries":
        """d/dx; the cap drops by one."""
        if self.cap == 0:
            return CoefficientSeries([0], 0)
        return CoefficientSeries([k * self.coeffs[k] for k in range(1, self.cap + 1)], self.cap - 1)

    def x_derivative(self) -> "CoefficientSeries":
        """x d/dx, keeping the cap."""
        return CoefficientSeries([k * c for k, c in enumerate(self.coeffs)], self.cap)

    def truncate(self, cap: int) -> "CoefficientSeries":
        if cap > self.cap:
            raise DomainError("cannot raise the cap by truncation")
        return CoefficientSeries(self.coeffs[: cap + 1], cap)

    def evaluate(self, x):
        acc = Fraction(0) if isinstance(x, (int, Fraction)) else 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def csv(self) -> str:
        """``k,numerator,denominator`` rows for nonzero coefficients."""
        return "".join(f"{k},{c.numerator},{c.denominator}\n"
                       for k, c in enumerate(self.coeffs) if c)


def _members(M: ArithmeticalList, D: int) -> list[int]:
    return [int(m) for m in enumerate_pop(M, max(D, 1)).members]


def g_pop_series(M: ArithmeticalList, D: int = DEFAULT_CAP) -> CoefficientSeries:
    """sum of q^k over members k of pop(M)."""
    if D < 1:
        raise DomainError("D must be >= 1")
    out = [0] * (D + 1)
    for k in _members(M, D):
        out[k] = 1
    return CoefficientSeries(out, D)


def l_pop_series(M: ArithmeticalList, D: int = DEFAULT_CAP) -> CoefficientSeries:
    """sum of x^k / k over members k of pop(M)."""
    if D < 1:
        raise DomainError("D must be >= 1")
    out = [Fraction(0)] * (D + 1)
    for k in _members(M, D):
        out[k] = Fraction(1, k)
    return CoefficientSeries(out, D)


def log_series(D: int) -> CoefficientSeries:
    """ln(1 / (1 - x)) = sum_{m >= 1} x^m / m."""
    return CoefficientSeries([0] + [Fraction(1, m) for m in range(1, D + 1)], D)


def geometric_tail_series(n: int, D: int) -> CoefficientSeries:
    """x^n / (1 - x^n) = x^n + x^(2n) + ..."""
    out = [0] * (D + 1)
    for k in range(n, D + 1, n):
        out[k] = 1
    return CoefficientSeries(out, D)


SERIES_IDENTITIES = ("log_mobius_l", "l_inclusion_exclusion", "mobius_g", "phi_g", "lambert_tau", "lambert_sigma")


def _report(identity_id, M, D, lhs, rhs, extra_ok=True) -> IdentityReport:
    diff = lhs - rhs
    worst = max((abs(c) for c in diff.coeffs), default=Fraction(0))
    return IdentityReport(identity_id, M.label, D, None, lhs, rhs, worst,
                          worst == 0 and extra_ok, 0.0)


def verify_series_identity(identity_id: str, M: ArithmeticalList, D: int = DEFAULT_CAP) -> IdentityReport:
    """Build both sides to degree D and compare coefficient by coefficient."""
    if identity_id not in SERIES_IDENTITIES:
        raise DomainError(f"unknown series identity {identity_id!r}")
    if D < 2:
        raise DomainError("D must be >= 2")
    table = enumerate_pop(M, D)
    members = [int(m) for m in table.members]
    x = CoefficientSeries.monomial(1, D)

    if identity_id == "log_mobius_l":
        l = l_pop_series(M, D)
        lhs = CoefficientSeries.zero(D)
        for n in members:
            m = mu(n)
            if m:
                lhs = lhs + l.compose_power(n) * Fraction(m, n)
        return _report(identity_id, M, D, lhs, x)

    if identity_id == "l_inclusion_exclusion":
        lhs = l_pop_series(M, D)
        ks, mus = squarefree_products(M.complement_primes_upto(D), D)
        L = log_series(D)
        rhs = CoefficientSeries.zero(D)
        for k, m in zip(ks.tolist(), mus.tolist()):
            rhs = rhs + L.compose_power(k) * Fraction(m, k)
        return _report(identity_id, M, D, lhs, rhs)

    G = g_pop_series(M, D)
    if identity_id == "mobius_g":
        lhs = CoefficientSeries.zero(D)
        for n in members:
            m = mu(n)
            if m:
                lhs = lhs + G.compose_power(n) * m
        return _report(identity_id, M, D, lhs, x)

    if identity_id == "phi_g":
        lhs = CoefficientSeries.zero(D)
        for n in members:
            lhs = lhs + G.compose_power(n) * arith_values(n).phi
        return _report(identity_id, M, D, lhs, G.x_derivative())

    # Lambert splits: sum_{n in pop} a_n x^n/(1-x^n) = sum_{pop} A_n x^n + sum_{not pop} B_n x^n
    weight = (lambda n: 1) if identity_id == "lambert_tau" else (lambda n: n)
    lhs = CoefficientSeries.zero(D)
    for n in members:
        lhs = lhs + geometric_tail_series(n, D) * weight(n)
    full = enumerate_pop(M, D)
    rhs_c = [Fraction(0)] * (D + 1)
    consistent = True
    for n in range(1, D + 1):
        divs = pop_divisors(full, n)
        B = sum(weight(d) for d in divs)
        if n in full:
            A = arith_values(n).tau if identity_id == "lambert_tau" else sigma(n, 1)
            consistent &= A == B
            rhs_c[n] = Fraction(A)
        else:
            rhs_c[n] = Fraction(B)
    return _report(identity_id, M, D, lhs, CoefficientSeries(rhs_c, D), consistent)


def lambert_coefficient(M: ArithmeticalList, n: int, D: int = DEFAULT_CAP) -> int:
    """B_n = card(Div(n) intersected with pop(M))."""
    return len(pop_divisors(enumerate_pop(M, max(D, n)), n))


def bivariate_product_check(M: ArithmeticalList, a, b, D: int = DEFAULT_CAP) -> IdentityReport:
    """G(a) G(b) against sum over members n of sum_{d | n} a^d b^(n/d).

    The left side uses degree-D truncations of G; the right side runs over
    n <= D^2, which covers every pair d, n/d <= D.  The residual is compared
    with the truncation bound of the left side plus the right side's tail.
    """
    a, b = Fraction(a), Fraction(b)
    c = max(abs(a), abs(b))
    if c >= 1:
        raise DomainError("need |a| < 1 and |b| < 1")
    G = g_pop_series(M, D)
    lhs = G.evaluate(a) * G.evaluate(b)
    R = D * D
    table = enumerate_pop(M, R)
    rhs = Fraction(0)
    if c != 0:
        for n in (int(m) for m in table.members):
            for d in pop_divisors(table, n):
                rhs += a ** d * b ** (n // d)
    tail = c ** (D + 1) / (1 - c)
    bound = 2 * tail * max(Fraction(1), c / (1 - c))
    # pairs with d*e > D^2 have d + e > 2D
    m0 = 2 * D + 1
    bound += c ** m0 * (m0 - 1) / (1 - c) + c ** (m0 + 1) / (1 - c) ** 2 if c else 0
    res = abs(lhs - rhs)
    return IdentityReport("gpop_product", M.label, D, f"{a};{b}", lhs, rhs, res, res <= bound,
                          float(bound))
