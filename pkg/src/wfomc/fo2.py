"""Closed-form weighted counting for universally quantified two-variable sentences.

For a quantifier-free matrix and a 1-type cardinality vector k, the weighted
model count factors into a multinomial, per-1-type weights, and powers of the
pairwise sums r_ij of consistent 2-table weights.  Everything here is exact;
values are ints/Fractions or weight polynomials depending on the weight
function.
"""

from __future__ import annotations

import math
from functools import lru_cache
from itertools import product
from typing import Callable, Iterator, Optional

from .logic import Formula, Signature, TwoType, TypeSpace, TRUE
from .weights import (PolynomialRing, Value, WeightFunction, one_type_weight,
                      two_table_weight, value_is_zero)


@lru_cache(maxsize=None)
def multinomial(k: tuple) -> int:
    total = math.factorial(sum(k))
    for part in k:
        total //= math.factorial(part)
    return total


def compositions(n: int, parts: int) -> Iterator[tuple]:
    """All vectors of `parts` non-negative ints summing to n, lexicographic."""
    if parts == 0:
        if n == 0:
            yield ()
        return
    if parts == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in compositions(n - first, parts - 1):
            yield (first,) + rest


def bounded_vectors(k: tuple) -> Iterator[tuple]:
    """All vectors p with 0 <= p <= k componentwise, lexicographic."""
    return product(*(range(v + 1) for v in k))


def bounded_compositions(k: tuple, m: int) -> Iterator[tuple]:
    """All vectors p <= k componentwise with |p| = m."""
    def rec(i: int, remaining: int):
        if i == len(k):
            if remaining == 0:
                yield ()
            return
        tail_max = sum(k[i + 1:])
        lo = max(0, remaining - tail_max)
        hi = min(k[i], remaining)
        for v in range(lo, hi + 1):
            for rest in rec(i + 1, remaining - v):
                yield (v,) + rest

    return rec(0, m)


def r_matrix(phi: Formula, theta: Formula, signature: Signature, wf: WeightFunction,
             ring: Optional[PolynomialRing] = None) -> list:
    """Full u-by-u matrix of summed 2-table weights consistent with phi and theta."""
    space = TypeSpace(signature)
    u = len(space.one_types)
    table_weights = [two_table_weight(t, signature, wf, ring) for t in space.two_tables]
    zero = ring.zero if ring is not None and ring.symbols else 0
    out = [[zero] * u for _ in range(u)]
    for i in range(u):
        for j in range(u):
            acc = zero
            for l, vl in enumerate(table_weights):
                t = TwoType(i, j, l)
                if space.is_consistent(t, phi) and space.satisfies_directed(t, theta):
                    acc = acc + vl
            out[i][j] = acc
    return out


class Fo2Context:
    """Precomputed type data for one quantifier-free matrix over one signature.

    1-types violating Phi(x,x) can never be realized, so they are dropped from
    the working index set (`active`); vectors over the active set are what the
    recursions iterate.  Full-length vectors in the public API are mapped onto
    the active set (any mass on an inactive type makes the count zero).
    """

    def __init__(self, signature: Signature, phi: Formula, wf: WeightFunction,
                 ring: Optional[PolynomialRing] = None, space: Optional[TypeSpace] = None):
        self.signature = signature
        self.phi = phi
        self.wf = wf
        self.ring = ring if ring is not None and ring.symbols else None
        self.space = space or TypeSpace(signature)
        self.one = self.ring.one if self.ring else 1
        self.zero = self.ring.zero if self.ring else 0

        self.active = tuple(i for i, t in enumerate(self.space.one_types)
                            if self.space.consistent_alone(t, phi))
        self.u = len(self.active)
        self.w = [one_type_weight(self.space.one_types[i], signature, wf, self.ring)
                  for i in self.active]

        self._table_weights = [two_table_weight(t, signature, wf, self.ring)
                               for t in self.space.two_tables]
        self.r = self.cross_matrix(TRUE)
        self._k_memo: dict = {}
        self._pow_memo: dict = {}

    def cross_matrix(self, theta: Formula) -> list:
        """Active-indexed matrix of r_ij values under an extra pair condition theta."""
        out = [[self.zero] * self.u for _ in range(self.u)]
        for a, i in enumerate(self.active):
            for b, j in enumerate(self.active):
                acc = self.zero
                for l, vl in enumerate(self._table_weights):
                    t = TwoType(i, j, l)
                    if self.space.is_consistent(t, self.phi) and \
                            self.space.satisfies_directed(t, theta):
                        acc = acc + vl
                out[a][b] = acc
        return out

    def power(self, tag: str, a: int, b: int, value: Value, e: int) -> Value:
        if e == 0:
            return self.one
        if e == 1:
            return value
        key = (tag, a, b, e)
        cached = self._pow_memo.get(key)
        if cached is None:
            half = self.power(tag, a, b, value, e // 2)
            cached = half * half
            if e & 1:
                cached = cached * value
            self._pow_memo[key] = cached
        return cached

    # -- Theorem-4 closed form ------------------------------------------------

    def wfomc_k(self, k: tuple) -> Value:
        """Weighted count at an active-indexed 1-type cardinality vector."""
        cached = self._k_memo.get(k)
        if cached is not None:
            return cached
        value = multinomial(k) * self.one
        for a, ka in enumerate(k):
            if ka == 0:
                continue
            value = value * self.power("w", a, a, self.w[a], ka)
            if value_is_zero(value):
                break
        if not value_is_zero(value):
            for a in range(self.u):
                if k[a] == 0:
                    continue
                e_self = k[a] * (k[a] - 1) // 2
                if e_self:
                    value = value * self.power("r", a, a, self.r[a][a], e_self)
                for b in range(a + 1, self.u):
                    if k[b] and not value_is_zero(value):
                        value = value * self.power("r", a, b, self.r[a][b], k[a] * k[b])
                if value_is_zero(value):
                    break
        self._k_memo[k] = value
        return value

    def wfomc_k_full(self, k_full: tuple) -> Value:
        """Same, with k indexed over the full enumerate_one_types order."""
        if len(k_full) != len(self.space.one_types):
            raise ValueError("cardinality vector length does not match the 1-type count")
        active_set = set(self.active)
        if any(v and i not in active_set for i, v in enumerate(k_full)):
            return self.zero
        return self.wfomc_k(tuple(k_full[i] for i in self.active))

    def expand(self, k: tuple) -> tuple:
        """Active-indexed vector -> full-length vector."""
        full = [0] * len(self.space.one_types)
        for a, i in enumerate(self.active):
            full[i] = k[a]
        return tuple(full)

    def wfomc_n(self, n: int, unary_filter: Optional[Callable[[tuple], bool]] = None) -> Value:
        """Sum of wfomc_k over all cardinality vectors of total n."""
        total = self.zero
        for k in compositions(n, self.u):
            if unary_filter is not None and not unary_filter(self.expand(k)):
                continue
            total = total + self.wfomc_k(k)
        return total

    # -- helpers for unary cardinalities --------------------------------------

    def unary_mu(self, k: tuple) -> dict:
        """Cardinalities of the unary predicates determined by a vector."""
        counts = {p.name: 0 for p in self.signature.predicates if p.arity == 1}
        for a, i in enumerate(self.active):
            if k[a] == 0:
                continue
            t = self.space.one_types[i]
            for atom, v in zip(self.space.single_atoms, t.values):
                if v and len(atom.args) == 1:
                    counts[atom.pred] += k[a]
        return counts


def wfomc(phi: Formula, n: int, signature: Signature, wf: WeightFunction,
          unary_filter: Optional[Callable] = None) -> Value:
    """One-shot weighted count of `forall x y. phi` on a domain of size n."""
    return Fo2Context(signature, phi, wf).wfomc_n(n, unary_filter)
