"""Empirical checks of the asymptotic laws for prime lists and populations.

Every fitted constant comes with an oscillation band: the min and max of the
running estimate over the upper half of the grid.  Nothing here proves that
a limit exists.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, OutOfRangeError, PreconditionError
from .population import PopulationTable
from .primes import ArithmeticalList


def default_grid(lo: float = 1e3, hi: float = 1e7, per_decade: int = 10) -> np.ndarray:
    """Geometric grid with ``per_decade`` points per factor of ten, both ends included."""
    if not 0 < lo < hi:
        raise DomainError(f"need 0 < lo < hi, got {lo}, {hi}")
    n = int(round(per_decade * math.log10(hi / lo)))
    return np.geomspace(lo, hi, max(n, 1) + 1)


@dataclass(frozen=True)
class AsymptoticFit:
    name: str
    M: str
    grid: np.ndarray = field(repr=False)
    observed: np.ndarray = field(repr=False)
    model: np.ndarray = field(repr=False)
    estimates: np.ndarray = field(repr=False)
    constant: float
    band: tuple[float, float]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        if len(g) == 0 or np.any(np.diff(g) <= 0):
            raise DomainError("grid must be non-empty and strictly increasing")

    @property
    def band_width(self) -> float:
        return self.band[1] - self.band[0]

    def full_band(self) -> tuple[float, float]:
        return float(np.min(self.estimates)), float(np.max(self.estimates))

    def csv(self) -> str:
        rows = ["x,observed,model,constant_estimate"]
        for x, o, m, c in zip(self.grid, self.observed, self.model, self.estimates):
            rows.append(f"{float(x)!r},{float(o)!r},{float(m)!r},{float(c)!r}")
        return "\n".join(rows) + "\n"

    def summary(self) -> str:
        lo, hi = self.band
        return ("constant,band_lo,band_hi,grid_max\n"
                f"{self.constant!r},{lo!r},{hi!r},{float(self.grid[-1])!r}\n")


def _band(estimates: np.ndarray) -> tuple[float, float]:
    upper = estimates[len(estimates) // 2:]
    return float(np.min(upper)), float(np.max(upper))


def _fit(name, M, grid, observed, model, estimates, meta=None) -> AsymptoticFit:
    estimates = np.asarray(estimates, dtype=float)
    return AsymptoticFit(name, M if isinstance(M, str) else M.label, np.asarray(grid, dtype=float),
                         np.asarray(observed, dtype=float), np.asarray(model, dtype=float),
                         estimates, float(estimates[-1]), _band(estimates), dict(meta or {}))


def _as_grid(x_grid) -> np.ndarray:
    g = np.atleast_1d(np.asarray(x_grid, dtype=float))
    if len(g) == 0 or np.any(np.diff(g) <= 0):
        raise DomainError("grid must be non-empty and strictly increasing")
    return g


def _reason(M: ArithmeticalList) -> int:
    if M.kind != "arithmetical":
        raise DomainError(f"{M.label} is not an arithmetical list; the exponent 1/r is undefined")
    return M.r


def _prime_cumsum(M: ArithmeticalList, grid: np.ndarray, weight: Callable[[np.ndarray], np.ndarray]):
    """sum of weight(p) over p in M, p <= x, for each x in the grid."""
    ps = M.primes_upto(int(grid[-1]))
    w = np.cumsum(weight(ps.astype(np.float64)))
    idx = np.searchsorted(ps, np.floor(grid), side="right")
    return np.where(idx > 0, w[np.maximum(idx - 1, 0)], 0.0)


def mertens_fit(M: ArithmeticalList, x_grid=None) -> AsymptoticFit:
    """gamma_M estimate ln prod_{p <= x} (1 - 1/p)^-1 - (1/r) ln ln x."""
    r = _reason(M)
    grid = _as_grid(default_grid() if x_grid is None else x_grid)
    if grid[0] < 3:
        raise DomainError("x < 3 leaves ln ln x undefined or nonpositive")
    obs = _prime_cumsum(M, grid, lambda p: -np.log1p(-1.0 / p))
    model = np.log(np.log(grid)) / r
    return _fit("mertens", M, grid, obs, model, obs - model)


def lnp_over_p(M: ArithmeticalList, x_grid=None) -> AsymptoticFit:
    """Residual sum ln p / p - (1/r) ln x, expected to stay bounded."""
    r = _reason(M)
    grid = _as_grid(default_grid() if x_grid is None else x_grid)
    if grid[0] < 2:
        raise DomainError("x must be >= 2")
    obs = _prime_cumsum(M, grid, lambda p: np.log(p) / p)
    model = np.log(grid) / r
    return _fit("lnp_over_p", M, grid, obs, model, obs - model)


def one_over_p(M: ArithmeticalList, x_grid=None) -> AsymptoticFit:
    """b estimate sum 1/p - (1/r) ln ln x."""
    r = _reason(M)
    grid = _as_grid(default_grid() if x_grid is None else x_grid)
    if grid[0] < 3:
        raise DomainError("x < 3 leaves ln ln x undefined or nonpositive")
    obs = _prime_cumsum(M, grid, lambda p: 1.0 / p)
    model = np.log(np.log(grid)) / r
    return _fit("one_over_p", M, grid, obs, model, obs - model)


def _counts(table: PopulationTable, grid: np.ndarray) -> np.ndarray:
    if grid[-1] > table.bound:
        raise OutOfRangeError(f"grid reaches {grid[-1]:g} beyond table bound {table.bound}")
    return np.searchsorted(table.members, np.floor(grid).astype(np.uint64), side="right").astype(float)


def estimate_A(M: ArithmeticalList, x_grid, table: PopulationTable) -> AsymptoticFit:
    """A estimate N_pop(x) ln x / (x (ln x)^(1/r)) along the grid.

    Exploratory: the density law behind it is conjectural, so the output
    carries ``meta["exploratory"] = True``.
    """
    r = _reason(M)
    grid = _as_grid(x_grid)
    if grid[0] <= 1:
        raise DomainError("grid points must exceed 1")
    counts = _counts(table, grid)
    lx = np.log(grid)
    shape = grid * lx ** (1.0 / r) / lx
    est = counts / shape
    return _fit("estimate_A", M, grid, counts, est[-1] * shape, est,
                {"exploratory": True, "law": "N_pop(x) ~ A x (ln x)^(1/r) / ln x"})


def _a_values(A_est, grid: np.ndarray) -> np.ndarray:
    """Per-point A: the running estimates of a fit on the same grid, else a constant."""
    if isinstance(A_est, AsymptoticFit):
        if len(A_est.grid) == len(grid) and np.allclose(A_est.grid, grid):
            return A_est.estimates
        return np.full(len(grid), A_est.constant)
    return np.full(len(grid), float(A_est))


def mesch_check(M: ArithmeticalList, x_grid, A_est, table: PopulationTable) -> AsymptoticFit:
    """Ratio S_pop(x; 1) / (r A (ln x)^(1/r)), expected to tend to 1."""
    r = _reason(M)
    grid = _as_grid(x_grid)
    counts = _counts(table, grid).astype(int)
    h = np.cumsum(1.0 / table.members.astype(np.float64))
    obs = h[counts - 1]
    model = r * _a_values(A_est, grid) * np.log(grid) ** (1.0 / r)
    return _fit("mesch", M, grid, obs, model, obs / model)


def laplace_sides(table: PopulationTable, x: float) -> tuple[float, float]:
    """(sum over members n of e^(-nx), x * integral_1^inf N_pop(t) e^(-tx) dt).

    The integral is exact piece by piece: N_pop = j on [m_j, m_(j+1)).  Both
    sides stop at the table bound, which must be at least 40/x.
    """
    if not x > 0:
        raise DomainError("x must be positive")
    if 40.0 / x > table.bound:
        raise OutOfRangeError(f"x={x:g} needs members up to {40 / x:.0f} > bound {table.bound}")
    ms = table.members.astype(np.float64)
    direct = math.fsum(np.exp(-x * ms))
    j = np.arange(1, len(ms) + 1, dtype=np.float64)
    gaps = np.diff(np.append(ms, np.inf))
    pieces = j * np.exp(-x * ms) * -np.expm1(-x * gaps)
    return direct, math.fsum(pieces)


def sigexp_check(M: ArithmeticalList, x_small_grid, A_est, table: PopulationTable) -> AsymptoticFit:
    """Laplace transform of a population: exact identity and asymptotic ratio.

    ``meta["identity_residuals"]`` holds the relative residuals of the exact
    identity; the estimates are sum / ((A/x) (ln 1/x)^(1/r - 1)).
    """
    r = _reason(M)
    xs = np.asarray(sorted(np.atleast_1d(np.asarray(x_small_grid, dtype=float))), dtype=float)
    sides = [laplace_sides(table, float(x)) for x in xs]
    direct = np.array([d for d, _ in sides])
    resid = [abs(d - i) / abs(d) for d, i in sides]
    A = float(A_est.constant) if isinstance(A_est, AsymptoticFit) else float(A_est)
    lninv = np.log(1.0 / xs)
    model = (A / xs) * lninv ** (1.0 / r - 1.0)
    return _fit("sigexp", M, xs, direct, model, direct / model,
                {"identity_residuals": resid, "integrals": [i for _, i in sides]})


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)


def _unit_integrals(f, starts: np.ndarray, F=None) -> np.ndarray:
    """integral of f over [i, i+1] for each start i."""
    if F is not None:
        return F(starts + 1.0) - F(starts)
    t = starts[:, None] + 0.5 * (_GL_NODES[None, :] + 1.0)
    return 0.5 * (f(t) @ _GL_WEIGHTS)


def series_integral_constant(A, f: Callable, n_max: int, F: Callable | None = None) -> AsymptoticFit:
    """u_n = sum_{i <= n, i in A} f(i) - sum_{i <= n, i in A} integral_i^(i+1) f.

    ``A`` is a population table or any collection of positive integers.  The
    grid is n = 1, 2, 4, ... plus n_max; ``meta["cauchy"]`` lists
    |u_(2n) - u_n| along it and ``meta["cauchy_last"]`` is
    |u_(n_max) - u_(n_max // 2)|.  ``F``, an antiderivative of f, replaces the
    Gauss-Legendre rule when given.
    """
    if n_max < 2:
        raise DomainError("n_max must be >= 2")
    if isinstance(A, PopulationTable):
        if n_max > A.bound:
            raise OutOfRangeError(f"n_max={n_max} beyond table bound {A.bound}")
        mem = A.members[: A.count(n_max)].astype(np.float64)
        label = A.source.label
    else:
        mem = np.unique(np.asarray([int(a) for a in A if 1 <= int(a) <= n_max], dtype=np.float64))
        label = "custom"
    if len(mem) == 0:
        raise DomainError("the set has no elements up to n_max")
    probe = np.geomspace(1.0, float(n_max) + 1.0, 64)
    fp = np.asarray(f(probe), dtype=float)
    if np.any(fp <= 0) or np.any(np.diff(fp) > 0):
        raise PreconditionError("f must be positive and decreasing on [1, n_max + 1]")
    terms = np.asarray(f(mem), dtype=float) - _unit_integrals(f, mem, F)
    u = np.cumsum(terms)
    ns = [1 << k for k in range(int(math.log2(n_max)) + 1)]
    if ns[-1] != n_max:
        ns.append(n_max)
    grid = np.array(ns, dtype=float)
    idx = np.searchsorted(mem, grid, side="right")
    vals = np.where(idx > 0, u[np.maximum(idx - 1, 0)], 0.0)
    cauchy = [abs(vals[i + 1] - vals[i]) for i in range(len(ns) - 1) if ns[i + 1] == 2 * ns[i]]
    half = int(np.searchsorted(mem, n_max // 2, side="right"))
    last = abs(vals[-1] - (u[half - 1] if half else 0.0))
    return _fit("series_integral", label, grid, vals, np.full(len(grid), vals[-1]), vals,
                {"cauchy": cauchy, "cauchy_last": float(last)})
