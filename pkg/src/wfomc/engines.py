"""Counting kernels for the DAG, connectivity, and forest axioms.

Each engine fills a memo table A indexed by 1-type cardinality vectors, in
order of increasing total size, so that every recursive lookup hits an entry
computed earlier.  The block-merge step is shared: a sum over decompositions
k' + k'' = k weighted by the cross-block factor prod r_ij^(k'_i * k''_j),
where the r matrix encodes which 2-tables are allowed between the blocks.

The pure integer recursions for counting DAGs, connected graphs, and forests
are kept alongside as independent cross-checks of the weighted engines.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from math import comb
from typing import Callable, Optional

from .fo2 import Fo2Context, bounded_compositions, compositions
from .logic import Atom, Formula, Not, Signature, conj
from .weights import Poly, Value, exact_div, value_is_zero

logger = logging.getLogger("wfomc")


# ---------------------------------------------------------------------------
# Pure counting recursions (independent cross-checks)

def count_dags(n: int) -> int:
    """Labeled DAGs on n nodes by inclusion-exclusion over zero-indegree sets."""
    a = [1]
    for i in range(1, n + 1):
        a.append(sum((-1) ** (i - l + 1) * comb(i, l) * 2 ** (l * (i - l)) * a[l]
                     for l in range(i)))
    return a[n]


def count_connected(n: int) -> int:
    """Labeled connected graphs on n nodes via the rooted-component recursion."""
    if n == 0:
        return 0
    c = [0, 1]
    for i in range(2, n + 1):
        rooted = sum(comb(i, m) * m * c[m] * 2 ** comb(i - m, 2) for m in range(1, i))
        c.append(2 ** comb(i, 2) - rooted // i)
    return c[n]


def cayley(m: int) -> int:
    """Number of labeled trees on m nodes."""
    return 1 if m <= 2 else m ** (m - 2)


def count_forests(n: int) -> int:
    """Labeled forests on n nodes: peel off the tree containing node 1."""
    f = [1]
    for i in range(1, n + 1):
        f.append(sum(comb(i - 1, m - 1) * cayley(m) * f[i - m] for m in range(1, i + 1)))
    return f[n]


# ---------------------------------------------------------------------------
# Precondition repair

def needs_antireflexive(signature: Signature, phi: Formula, edge: str) -> bool:
    from .logic import TypeSpace
    space = TypeSpace(signature)
    atoms = signature.single_variable_atoms()
    idx = next(i for i, a in enumerate(atoms) if a.pred == edge and len(a.args) == 2)
    return any(t.values[idx] and space.consistent_alone(t, phi) for t in space.one_types)


def repair_antireflexive(phi: Formula, edge: str, signature: Signature) -> Formula:
    if needs_antireflexive(signature, phi, edge):
        logger.warning("formula admits %s(x,x); conjoining ~%s(x,x) as the axiom requires",
                       edge, edge)
    return conj(phi, Not(Atom(edge, ("x", "x"))))


def repair_symmetric(phi: Formula, edge: str, signature: Signature) -> Formula:
    from .logic import Implies, TwoType, TypeSpace
    space = TypeSpace(signature)
    pair_atoms = signature.two_variable_atoms()
    fwd = next(i for i, a in enumerate(pair_atoms) if a.pred == edge and a.args == ("x", "y"))
    bwd = next(i for i, a in enumerate(pair_atoms) if a.pred == edge and a.args == ("y", "x"))
    asymmetric = False
    for l, table in enumerate(space.two_tables):
        if table.values[fwd] == table.values[bwd]:
            continue
        if any(space.is_consistent(TwoType(i, j, l), phi)
               for i in range(len(space.one_types)) for j in range(len(space.one_types))):
            asymmetric = True
            break
    if asymmetric:
        logger.warning("formula admits asymmetric %s; conjoining the symmetry clause", edge)
    return conj(phi, Implies(Atom(edge, ("x", "y")), Atom(edge, ("y", "x"))))


# ---------------------------------------------------------------------------
# Counting by splitting

def split_sum(prime: Callable[[tuple], Value], double: Callable[[tuple], Value],
              r: list, k: tuple, m: int, ctx: Optional[Fo2Context] = None,
              tag: str = "split") -> Value:
    """Sum over k' + k'' = k with |k'| = m of prime(k') * double(k'') * cross factor."""
    total = 0
    for k1 in bounded_compositions(k, m):
        left = prime(k1)
        if value_is_zero(left):
            continue
        k2 = tuple(a - b for a, b in zip(k, k1))
        right = double(k2)
        if value_is_zero(right):
            continue
        term = left * right
        dead = False
        for a, ka in enumerate(k1):
            if ka == 0 or dead:
                continue
            for b, kb in enumerate(k2):
                if kb == 0:
                    continue
                entry = r[a][b]
                if value_is_zero(entry):
                    dead = True
                    break
                if ctx is not None:
                    term = term * ctx.power(tag, a, b, entry, ka * kb)
                else:
                    term = term * entry ** (ka * kb)
        if not dead:
            total = total + term
    return total


def _all_integer(value: Value) -> bool:
    if isinstance(value, Poly):
        return all(isinstance(c, int) for c in value.terms.values())
    return isinstance(value, int)


class DagEngine:
    """Inclusion-exclusion over sets of zero-indegree elements.

    Requires phi to entail ~edge(x,x) (the caller repairs beforehand).  The
    split uses the edge-free sentence for the zero-indegree block, the engine's
    own table for the rest, and forbids edges back into the block.
    """

    def __init__(self, ctx: Fo2Context, edge: str):
        self.ctx = ctx
        self.edge = edge
        phi_prime = conj(ctx.phi, Not(Atom(edge, ("x", "y"))))
        self.ctx_prime = Fo2Context(ctx.signature, phi_prime, ctx.wf, ctx.ring,
                                    space=ctx.space)
        if self.ctx_prime.active != ctx.active:
            raise AssertionError("edge-free block changed the active 1-types; "
                                 "was ~%s(x,x) conjoined?" % edge)
        self.r = ctx.cross_matrix(Not(Atom(edge, ("y", "x"))))
        self.table = {(0,) * ctx.u: ctx.one}
        self._built = 0

    def build(self, upto: int):
        for size in range(self._built + 1, upto + 1):
            for p in compositions(size, self.ctx.u):
                total = 0
                for m in range(1, size + 1):
                    term = split_sum(self.ctx_prime.wfomc_k, self.table.__getitem__,
                                     self.r, p, m, self.ctx, "dag")
                    if value_is_zero(term):
                        continue
                    coeff = comb(size, m) if m % 2 else -comb(size, m)
                    total = total + coeff * term
                self.table[p] = total
        self._built = max(self._built, upto)

    def at(self, k: tuple) -> Value:
        self.build(sum(k))
        return self.table[k]

    def psi_m(self, k: tuple, m: int) -> Value:
        """Weighted count of models whose first m elements have zero indegree."""
        self.build(sum(k) - 1)
        return split_sum(self.ctx_prime.wfomc_k, self.table.__getitem__,
                         self.r, k, m, self.ctx, "dag")


class ConnectedEngine:
    """Rooted-component recursion; requires a symmetric antireflexive edge."""

    def __init__(self, ctx: Fo2Context, edge: str):
        self.ctx = ctx
        self.edge = edge
        self.r = ctx.cross_matrix(Not(Atom(edge, ("x", "y"))))
        self.table = {(0,) * ctx.u: ctx.zero}
        self._built = 0
        self._check_integral = ctx.wf.all_integer()

    def build(self, upto: int):
        for size in range(self._built + 1, upto + 1):
            for p in compositions(size, self.ctx.u):
                value = self.ctx.wfomc_k(p)
                if size > 1:
                    rooted = 0
                    for m in range(1, size):
                        term = split_sum(self.table.__getitem__, self.ctx.wfomc_k,
                                         self.r, p, m, self.ctx, "conn")
                        if not value_is_zero(term):
                            rooted = rooted + comb(size, m) * m * term
                    value = value - exact_div(rooted, size)
                if self._check_integral:
                    assert _all_integer(value), \
                        f"connected recursion produced a non-integer at {p}"
                self.table[p] = value
        self._built = max(self._built, upto)

    def at(self, k: tuple) -> Value:
        self.build(sum(k))
        return self.table[k]

    def psi_m(self, k: tuple, m: int) -> Value:
        """Weighted count of models in which the first m elements form a component."""
        self.build(sum(k) if m == sum(k) else sum(k) - 1)
        return split_sum(self.table.__getitem__, self.ctx.wfomc_k,
                         self.r, k, m, self.ctx, "conn")


class ForestEngine:
    """Peel off the tree component of the first element; trees come from a callback."""

    def __init__(self, ctx: Fo2Context, edge: str, tree_at: Callable[[tuple], Value]):
        self.ctx = ctx
        self.edge = edge
        self.tree_at = tree_at
        self.r = ctx.cross_matrix(Not(Atom(edge, ("x", "y"))))
        self.table = {(0,) * ctx.u: ctx.one}
        self._built = 0

    def build(self, upto: int):
        for size in range(self._built + 1, upto + 1):
            for p in compositions(size, self.ctx.u):
                total = 0
                for m in range(1, size + 1):
                    term = split_sum(self.tree_at, self.table.__getitem__,
                                     self.r, p, m, self.ctx, "forest")
                    if not value_is_zero(term):
                        total = total + comb(size - 1, m - 1) * term
                self.table[p] = total
        self._built = max(self._built, upto)

    def at(self, k: tuple) -> Value:
        self.build(sum(k))
        return self.table[k]


def tree_from_connected(conn: ConnectedEngine, edge: str) -> Callable[[tuple], Value]:
    """Tree counts as connected counts filtered to exactly |k|-1 edges.

    The edge predicate must be symbolic so edge counts are readable from
    monomial exponents; the count of true ground atoms of a symmetric edge
    relation is twice the number of undirected edges.
    """
    ring = conn.ctx.ring
    if ring is None:
        raise ValueError("the forest/tree route requires the edge predicate "
                         "to be run symbolically")
    from .weights import WeightSymbol
    pos = ring.index[WeightSymbol(edge, True)]
    cache: dict = {}

    def tree_at(k: tuple) -> Value:
        cached = cache.get(k)
        if cached is None:
            want = 2 * (sum(k) - 1) if sum(k) else 0
            value = conn.at(k)
            if isinstance(value, Poly):
                cached = value.filter_monomials(lambda key: key[pos] == want)
            else:
                cached = value if want == 0 else 0
            cache[k] = cached
        return cached

    return tree_at
