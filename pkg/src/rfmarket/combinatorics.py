"""Compositions of N EAPs over K types and their multinomial weights."""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable, Iterator, NamedTuple, Optional

import numpy as np

from .errors import DomainError, EnumerationCapError

DEFAULT_CAP = 10**7


class Composition(NamedTuple):
    counts: tuple
    prob: float


def count_compositions(n: int, k: int) -> int:
    """Stars and bars: C(n + k - 1, k - 1)."""
    return math.comb(n + k - 1, k - 1)


def log_multinomial_prob(counts, k: int) -> float:
    n = sum(counts)
    return math.lgamma(n + 1) - sum(math.lgamma(c + 1) for c in counts) - n * math.log(k)


def _check(n, k, cap):
    if n < 0 or k < 1 or int(n) != n or int(k) != k:
        raise DomainError(f"need integers n >= 0 and k >= 1, got n={n}, k={k}")
    total = count_compositions(n, k)
    if total > cap:
        raise EnumerationCapError(f"{total} compositions of {n} over {k} types exceed cap {cap}")
    return total


def _counts(n, k):
    # descending lexicographic: (n, 0, ..., 0) first, (0, ..., 0, n) last
    if k == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in _counts(n - first, k - 1):
            yield (first,) + rest


def enumerate_compositions(n: int, k: int, cap: int = DEFAULT_CAP) -> Iterator[Composition]:
    """Yield every (n_1..n_K) summing to n with its uniform-prior probability."""
    _check(n, k, cap)
    for counts in _counts(n, k):
        yield Composition(counts, math.exp(log_multinomial_prob(counts, k)))


@lru_cache(maxsize=64)
def _table(n, k):
    counts = np.array(list(_counts(n, k)), dtype=np.int64).reshape(-1, k)
    lg = np.array([math.lgamma(i + 1) for i in range(n + 1)])
    logp = math.lgamma(n + 1) - lg[counts].sum(axis=1) - n * math.log(k)
    probs = np.exp(logp)
    counts.setflags(write=False)
    probs.setflags(write=False)
    return counts, probs


def composition_table(n: int, k: int, cap: int = DEFAULT_CAP):
    """Enumeration as arrays: ``counts`` of shape (C, K) and ``probs`` of shape (C,).

    Rows follow the same order as :func:`enumerate_compositions`.  The arrays
    are cached and read-only.
    """
    _check(n, k, cap)
    return _table(int(n), int(k))


def expect(
    f: Callable[[tuple], float],
    n: int,
    k: int,
    weight: Optional[Callable[[tuple], float]] = None,
    cap: int = DEFAULT_CAP,
) -> float:
    """Sum of prob * f(counts) over all compositions.

    ``weight`` replaces the uniform multinomial prior when given; it receives
    the counts tuple and must return that composition's probability.
    """
    terms = []
    for comp in enumerate_compositions(n, k, cap):
        p = comp.prob if weight is None else weight(comp.counts)
        terms.append(p * f(comp.counts))
    return math.fsum(terms)
