"""Populations: the integers whose prime factors all lie in a given prime list.

``pop(M)`` always contains 1 (the empty product) and is closed under taking
divisors.  A :class:`PopulationTable` holds ``pop(M)`` up to a bound and
answers counting and harmonic-sum queries by binary search.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction

import numpy as np

from .errors import DomainError, OutOfRangeError
from .primes import FULL, ArithmeticalList

U64_MAX = (1 << 64) - 1


@dataclass(frozen=True)
class PopulationTable:
    source: ArithmeticalList
    bound: int
    members: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, n: int) -> bool:
        if n > self.bound:
            raise OutOfRangeError(f"{n} exceeds table bound {self.bound}")
        i = int(np.searchsorted(self.members, n))
        return i < len(self.members) and int(self.members[i]) == n

    def _check(self, x: float) -> None:
        if x > self.bound:
            raise OutOfRangeError(f"x={x} exceeds table bound {self.bound}")

    def count(self, x) -> int:
        """N_pop(x) for any x >= 0 up to the bound (0 below 1)."""
        self._check(x)
        return int(np.searchsorted(self.members, math.floor(x), side="right"))


def enumerate_pop(M: ArithmeticalList, X: int) -> PopulationTable:
    """All members of pop(M) up to X, ascending.

    Uses a min-heap of ``(value, parent, prime index)`` triples: popping
    ``v = parent * q_i`` pushes ``v * q_i`` (same last prime) and
    ``parent * q_(i+1)`` (next prime), so every member appears exactly once
    with primes taken in nondecreasing order.
    """
    if X < 1:
        raise DomainError(f"X must be >= 1, got {X}")
    X = int(X)
    if X > U64_MAX:
        raise DomainError("X exceeds the unsigned 64-bit member width")
    if M.is_full:
        return PopulationTable(M, X, np.arange(1, X + 1, dtype=np.uint64))
    ps = [int(p) for p in M.primes_upto(X)]
    out = [1]
    heap = []
    if ps:
        heap.append((ps[0], 1, 0))
    push, pop = heapq.heappush, heapq.heappop
    nps = len(ps)
    while heap:
        v, parent, i = pop(heap)
        out.append(v)
        q = ps[i]
        child = v * q
        if child <= X:
            push(heap, (child, v, i))
        if i + 1 < nps:
            sib = parent * ps[i + 1]
            if sib <= X:
                push(heap, (sib, parent, i + 1))
    return PopulationTable(M, X, np.array(out, dtype=np.uint64))


def n_pop(table: PopulationTable, x: float) -> int:
    """N_pop(x) = #{n in pop : n <= x}, floor semantics, 1 <= x <= bound."""
    if x < 1:
        raise DomainError(f"x must be >= 1, got {x}")
    return table.count(x)


def is_member(M: ArithmeticalList, n: int) -> bool:
    """True iff every prime factor of n lies in M."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    # trial division by all primes, stopping at the first factor outside M;
    # the bound shrinks with the cofactor, so tables grow only as far as needed
    lo, hi = 2, 1 << 12
    while n > 1 and lo * lo <= n:
        hi = min(hi, math.isqrt(n))
        for p in FULL.primes_upto(hi)[np.searchsorted(FULL.primes_upto(hi), lo):]:
            p = int(p)
            if p * p > n:
                break
            if n % p == 0:
                if not M.contains(p):
                    return False
                while n % p == 0:
                    n //= p
        lo, hi = hi + 1, hi * 4
    if n == 1:
        return True
    # what is left is a prime
    return M.contains(n)


def s_pop(table: PopulationTable, u: float, a=1, exact: bool = False):
    """S_pop(u; a) = sum of 1/i**a over members i <= u.

    Summed from the largest member down.  With ``exact=True`` and integer
    ``a`` the result is a :class:`~fractions.Fraction`.
    """
    if u < 1:
        raise DomainError(f"u must be >= 1, got {u}")
    k = table.count(u)
    ms = table.members[:k]
    if exact:
        return sum((Fraction(1, int(m)) ** a for m in ms[::-1]), Fraction(0))
    if a == 0:
        return float(k)
    vals = np.power(ms[::-1].astype(np.float64), -float(a))
    return float(math.fsum(vals))


def pop_divisors(table: PopulationTable, n: int) -> list[int]:
    """Divisors of n that belong to the population, ascending."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    table._check(n)
    ms = table.members[: table.count(n)].astype(np.int64)
    return [int(d) for d in ms[n % ms == 0]]


def squarefree_products(primes, limit: int) -> tuple[np.ndarray, np.ndarray]:
    """All squarefree products k <= limit of the given primes with mu(k).

    Depth-first over increasing primes, pruning as soon as k exceeds limit.
    Returns ``(ks, mus)`` sorted by k.
    """
    ps = sorted(int(p) for p in primes if p <= limit)
    ks, mus = [1], [1]
    stack = [(1, 1, 0)]
    while stack:
        k, mu, start = stack.pop()
        for i in range(start, len(ps)):
            nk = k * ps[i]
            if nk > limit:
                break
            ks.append(nk)
            mus.append(-mu)
            stack.append((nk, -mu, i + 1))
    order = np.argsort(ks, kind="stable")
    return np.array(ks, dtype=np.int64)[order], np.array(mus, dtype=np.int64)[order]


def inclusion_exclusion_count(M: ArithmeticalList, n: int, complement_bound: int) -> int:
    """N_pop(n) as the sum of mu(k) * floor(n / k) over squarefree k in pop(P - M)."""
    n = int(math.floor(n))
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if complement_bound < n:
        raise DomainError(
            f"complement primes materialized only to {complement_bound} < n = {n}")
    ks, mus = squarefree_products(M.complement_primes_upto(n), n)
    return int(np.sum(mus * (n // ks)))


def inclusion_exclusion_counts(M: ArithmeticalList, n_max: int) -> np.ndarray:
    """Inclusion-exclusion N_pop(n) for every n = 1..n_max (index 0 holds n = 1)."""
    ks, mus = squarefree_products(M.complement_primes_upto(n_max), n_max)
    out = np.empty(n_max, dtype=np.int64)
    for n in range(1, n_max + 1):
        cut = int(np.searchsorted(ks, n, side="right"))
        out[n - 1] = int(np.dot(mus[:cut], n // ks[:cut]))
    return out


def dump_members(table: PopulationTable, x: float | None = None) -> str:
    """One member per line, decimal, ascending."""
    k = len(table) if x is None else table.count(x)
    return "".join(f"{int(m)}\n" for m in table.members[:k])


@lru_cache(maxsize=16)
def cached_population(M: ArithmeticalList, X: int) -> PopulationTable:
    """Memoized :func:`enumerate_pop`; tables are immutable so sharing is safe."""
    return enumerate_pop(M, X)
