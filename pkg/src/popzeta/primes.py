"""Prime tables and arithmetical lists of primes.

An arithmetical list of reason ``r`` starting at index ``r0`` is the set
``{p_r0, p_(r0+r), p_(r0+2r), ...}`` where ``p_1 = 2, p_2 = 3, ...``.  It is
an index progression inside the sequence of primes, not an arithmetic
progression of integers.  All indexing is 1-based.
"""
from __future__ import annotations

import bisect
import math
import threading
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ResourceError

SEGMENT_SIZE = 1 << 22
MEMORY_BUDGET_BYTES = 1 << 30


def _small_sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def _sieve_segments(lo: int, hi: int, base: np.ndarray) -> np.ndarray:
    """Primes in the half-open range [lo, hi), given all primes <= sqrt(hi)."""
    chunks = []
    start = lo
    while start < hi:
        stop = min(start + SEGMENT_SIZE, hi)
        mark = np.ones(stop - start, dtype=bool)
        if start <= 1:
            mark[: 2 - start] = False
        for p in base:
            p = int(p)
            if p * p >= stop:
                break
            first = max(p * p, -(-start // p) * p)
            mark[first - start :: p] = False
        chunks.append(np.flatnonzero(mark).astype(np.int64) + start)
        start = stop
    if not chunks:
        return np.zeros(0, dtype=np.int64)
    return np.concatenate(chunks)


def _check_budget(limit: int) -> None:
    est = 1.26 * limit / math.log(max(limit, 3))
    if est * 8 > MEMORY_BUDGET_BYTES:
        raise ResourceError(f"prime table up to {limit} exceeds the memory budget")


@dataclass(frozen=True)
class PrimeTable:
    limit: int
    primes: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.primes)

    def __getitem__(self, n: int) -> int:
        """The n-th prime, 1-based."""
        if n < 1 or n > len(self.primes):
            raise IndexError(f"prime index {n} outside table of {len(self.primes)} primes")
        return int(self.primes[n - 1])

    def index_of(self, p: int) -> int:
        """1-based index of the prime ``p``, or 0 if ``p`` is not a prime in the table."""
        i = int(np.searchsorted(self.primes, p))
        if i < len(self.primes) and self.primes[i] == p:
            return i + 1
        return 0

    def pi(self, x: float) -> int:
        """Number of primes <= x (x must not exceed the table limit)."""
        if x > self.limit:
            raise DomainError(f"pi({x}) needs a table beyond limit {self.limit}")
        return int(np.searchsorted(self.primes, math.floor(x), side="right"))

    def extend(self, limit: int) -> "PrimeTable":
        """Return a table up to ``limit``, sieving only the new range."""
        if limit <= self.limit:
            return self
        _check_budget(limit)
        root = math.isqrt(limit)
        if root <= self.limit:
            base = self.primes[: int(np.searchsorted(self.primes, root, side="right"))]
        else:
            base = _small_sieve(root)
        new = _sieve_segments(self.limit + 1, limit + 1, base)
        return PrimeTable(limit, np.concatenate([self.primes, new]))


def sieve_primes(limit: int) -> PrimeTable:
    """All primes <= limit by a segmented sieve of Eratosthenes."""
    if limit < 2:
        raise DomainError(f"empty range: limit={limit} < 2")
    _check_budget(limit)
    base = _small_sieve(math.isqrt(limit))
    return PrimeTable(limit, _sieve_segments(2, limit + 1, base))


_table_lock = threading.Lock()
_shared = PrimeTable(1, np.zeros(0, dtype=np.int64))


def prime_table(limit: int) -> PrimeTable:
    """Process-wide table covering at least ``limit``, grown incrementally."""
    global _shared
    limit = max(int(limit), 2)
    with _table_lock:
        if _shared.limit < limit:
            grow = max(limit, 2 * _shared.limit)
            try:
                _shared = _shared.extend(grow)
            except ResourceError:
                _shared = _shared.extend(limit)
        return _shared


def nth_prime(n: int) -> int:
    limit = 100
    if n > 6:
        limit = int(n * (math.log(n) + math.log(math.log(n)))) + 10
    table = prime_table(limit)
    while len(table) < n:
        table = prime_table(2 * table.limit)
    return table[n]


@dataclass(frozen=True)
class ArithmeticalList:
    """A subset of the primes.

    ``kind`` is one of ``"arithmetical"`` (with ``r0`` and ``r``; the full set
    of primes is ``r0 = r = 1``), ``"explicit"`` (a finite prime set) or
    ``"complement"`` (all primes outside the arithmetical list ``r0, r``).
    """

    kind: str
    r0: int = 1
    r: int = 1
    explicit: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind in ("arithmetical", "complement"):
            if self.r0 < 1 or self.r < 1:
                raise DomainError(f"need r0 >= 1 and r >= 1, got r0={self.r0}, r={self.r}")
            if self.r0 > self.r:
                raise DomainError(f"constraint r0 <= r violated: r0={self.r0}, r={self.r}")
        elif self.kind == "explicit":
            ps = tuple(sorted(set(int(p) for p in self.explicit)))
            if ps and ps[0] < 2:
                raise DomainError("explicit prime set contains a value < 2")
            if ps:
                table = prime_table(ps[-1])
                bad = [p for p in ps if table.index_of(p) == 0]
                if bad:
                    raise DomainError(f"not primes: {bad}")
            object.__setattr__(self, "explicit", ps)
        else:
            raise DomainError(f"unknown list kind {self.kind!r}")

    @property
    def is_full(self) -> bool:
        return self.kind == "arithmetical" and self.r == 1

    @property
    def is_empty(self) -> bool:
        return self.kind == "explicit" and not self.explicit

    @property
    def reason(self) -> int | None:
        return self.r if self.kind == "arithmetical" else None

    @property
    def label(self) -> str:
        if self.kind == "arithmetical":
            return f"{self.r0}:{self.r}"
        if self.kind == "complement":
            return f"not {self.r0}:{self.r}"
        return "{" + ",".join(map(str, self.explicit)) + "}"

    def _selected(self, table: PrimeTable) -> np.ndarray:
        idx = np.arange(len(table.primes))
        return (idx % self.r) == (self.r0 - 1)

    def primes_upto(self, bound: int) -> np.ndarray:
        """Members <= bound, increasing."""
        bound = int(math.floor(bound))
        if self.kind == "explicit":
            ps = np.array(self.explicit, dtype=np.int64)
            return ps[ps <= bound]
        if bound < 2:
            return np.zeros(0, dtype=np.int64)
        table = prime_table(bound)
        ps = table.primes[: table.pi(bound)]
        if self.kind == "arithmetical":
            return ps[self.r0 - 1 :: self.r]
        keep = np.ones(len(ps), dtype=bool)
        keep[self.r0 - 1 :: self.r] = False
        return ps[keep]

    def nth(self, n: int) -> int:
        """n-th member, 1-based (arithmetical kind)."""
        if self.kind == "arithmetical":
            return nth_prime(self.r0 + (n - 1) * self.r)
        if self.kind == "explicit":
            return self.explicit[n - 1]
        raise DomainError("nth() is undefined for complement lists")

    def contains(self, p: int) -> bool:
        if self.kind == "explicit":
            i = bisect.bisect_left(self.explicit, p)
            return i < len(self.explicit) and self.explicit[i] == p
        if p < 2:
            return False
        k = prime_table(p).index_of(p)
        if k == 0:
            return False
        inside = (k - self.r0) % self.r == 0
        return inside if self.kind == "arithmetical" else not inside

    def complement(self) -> "ArithmeticalList":
        """The primes outside this list (finite lists are not supported)."""
        if self.kind == "arithmetical":
            return ArithmeticalList("complement", self.r0, self.r)
        if self.kind == "complement":
            return ArithmeticalList("arithmetical", self.r0, self.r)
        raise DomainError("complement of an explicit finite list is not a supported list kind")

    def complement_primes_upto(self, bound: int) -> np.ndarray:
        """Primes <= bound outside this list; works for every kind."""
        if self.kind == "explicit":
            bound = int(math.floor(bound))
            if bound < 2:
                return np.zeros(0, dtype=np.int64)
            table = prime_table(bound)
            ps = table.primes[: table.pi(bound)]
            return ps[~np.isin(ps, np.array(self.explicit, dtype=np.int64))]
        return self.complement().primes_upto(bound)


FULL = ArithmeticalList("arithmetical", 1, 1)
EMPTY = ArithmeticalList("explicit")


def make_list(r0: int, r: int, bound: int | None = None) -> ArithmeticalList:
    """The list ``{p_(r0 + n r) : n >= 0}``; ``bound`` pre-materializes primes."""
    if r0 < 1 or r < 1:
        raise DomainError(f"need r0 >= 1 and r >= 1, got r0={r0}, r={r}")
    if r0 > r:
        raise DomainError(f"constraint r0 <= r violated: r0={r0}, r={r}")
    lst = ArithmeticalList("arithmetical", r0, r)
    if bound is not None:
        if bound < 2:
            raise DomainError(f"bound must be >= 2, got {bound}")
        prime_table(bound)
    return lst


def explicit_list(primes) -> ArithmeticalList:
    return ArithmeticalList("explicit", explicit=tuple(primes))


def shift_list(M: ArithmeticalList, j: int, bound: int | None = None) -> ArithmeticalList:
    """``M_r`` shifted by ``j`` indices: ``{p_(1 + j + n r)}``."""
    if M.kind != "arithmetical" or M.r0 != 1:
        raise DomainError("shift_list needs an arithmetical list starting at p_1")
    if not 0 <= j < M.r:
        raise DomainError(f"shift j={j} outside [0, {M.r})")
    return make_list(1 + j, M.r, bound)
