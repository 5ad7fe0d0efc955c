"""Multi-index bookkeeping for the graded moment set S_M = {alpha : |alpha| <= M}."""

from __future__ import annotations

from functools import lru_cache
from math import comb, factorial
from typing import NamedTuple

from .errors import InvalidArgumentError

MAX_ORDER = 60
_INT64_MAX = 2**63 - 1


class MultiIndex(NamedTuple):
    a1: int
    a2: int
    a3: int

    @property
    def order(self):
        return self.a1 + self.a2 + self.a3

    def __add__(self, other):
        return MultiIndex(self.a1 + other[0], self.a2 + other[1], self.a3 + other[2])

    def __sub__(self, other):
        return MultiIndex(self.a1 - other[0], self.a2 - other[1], self.a3 - other[2])

    def is_valid(self):
        return self.a1 >= 0 and self.a2 >= 0 and self.a3 >= 0

    def factorial(self):
        return factorial(self.a1) * factorial(self.a2) * factorial(self.a3)


ZERO = MultiIndex(0, 0, 0)


def unit(d, k=1):
    """k * e_d for d in {0, 1, 2}."""
    c = [0, 0, 0]
    c[d] = k
    return MultiIndex(*c)


def _checked_comb(n, k):
    value = comb(n, k)
    if value > _INT64_MAX:
        raise OverflowError(f"binomial({n}, {k}) exceeds 64-bit range")
    return value


def ordinal(alpha):
    """1-based ordinal of ``alpha`` in the graded ordering of S_M."""
    a = tuple(int(c) for c in alpha)
    if len(a) != 3 or any(c < 0 for c in a):
        raise InvalidArgumentError(f"multi-index must have 3 non-negative components, got {alpha!r}")
    total = 1
    for i in range(1, 4):
        tail = sum(a[k - 1] for k in range(4 - i, 4))
        total += _checked_comb(tail + i - 1, i)
    return total


def index_set_size(M):
    return _checked_comb(M + 3, 3)


class IndexSet:
    """All multi-indices with ``|alpha| <= order``; element k sits at ordinal k+1."""

    def __init__(self, order, indices):
        self.order = order
        self.indices = tuple(indices)
        self._position = {alpha: k for k, alpha in enumerate(self.indices)}

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __getitem__(self, k):
        return self.indices[k]

    def __contains__(self, alpha):
        return tuple(alpha) in self._position

    def position(self, alpha):
        """0-based row/column of ``alpha`` (ordinal minus one)."""
        return self._position[MultiIndex(*alpha)]


@lru_cache(maxsize=None)
def enumerate_index_set(M):
    if not isinstance(M, int) or M < 3:
        raise InvalidArgumentError(f"truncation order must be an integer >= 3, got {M!r}")
    if M > MAX_ORDER:
        raise InvalidArgumentError(f"truncation order {M} exceeds supported maximum {MAX_ORDER}")
    alphas = [MultiIndex(a1, a2, n - a1 - a2)
              for n in range(M + 1) for a1 in range(n + 1) for a2 in range(n - a1 + 1)]
    alphas.sort(key=ordinal)
    return IndexSet(M, alphas)
