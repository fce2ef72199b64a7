"""End-to-end solving: axiom reductions, precondition repair, symbolic weights,
cardinality filtering, and the final summation over 1-type cardinality vectors."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import comb
from typing import Optional, Sequence

from . import axioms as axiom_kinds
from .axioms import GraphAxiom
from .constraints import (CardinalityConstraint, TRUE_CONSTRAINT, conjoin_constraints)
from .engines import (ConnectedEngine, DagEngine, ForestEngine, repair_antireflexive,
                      repair_symmetric, tree_from_connected)
from .fo2 import Fo2Context, compositions
from .logic import Formula, LogicError, Sentence, Signature
from .reductions import FreshNames, Reduction, reduce_axiom, skolemize
from .weights import (Poly, Rational, WeightFunction, WeightSymbol, evaluate_value,
                      monomial_cardinalities, normalize_rational, value_is_zero)

logger = logging.getLogger("wfomc")


class UnsupportedError(LogicError):
    """The job falls outside the supported fragment."""


@dataclass
class Problem:
    signature: Signature
    sentence: Sentence
    axioms: tuple = ()
    constraints: tuple = ()
    weights: Optional[WeightFunction] = None

    def weight_function(self) -> WeightFunction:
        return self.weights if self.weights is not None else WeightFunction(self.signature)


@dataclass
class Compiled:
    signature: Signature
    phi: Formula
    base_axiom: Optional[GraphAxiom]
    gamma: CardinalityConstraint
    wf: WeightFunction
    notes: list = field(default_factory=list)


def compile_problem(problem: Problem, extra_symbolic: Sequence[str] = ()) -> Compiled:
    """Reduce axioms to base engines, skolemize, repair preconditions, and decide
    which predicates must run symbolically."""
    notes = []
    fresh = FreshNames()
    seen = []
    reductions = []
    for ax in problem.axioms:
        if ax in seen:
            continue
        seen.append(ax)
        reductions.append((ax, reduce_axiom(ax, problem.signature, fresh)))
    base_axioms = [red.base_axiom for _, red in reductions if red.base_axiom is not None]
    distinct_bases = []
    for b in base_axioms:
        if b not in distinct_bases:
            distinct_bases.append(b)
    if len(distinct_bases) > 1:
        raise UnsupportedError(
            "at most one graph axiom is supported per problem; got "
            + ", ".join(b.describe() for b in distinct_bases))
    base = distinct_bases[0] if distinct_bases else None

    fresh_preds = tuple(p for _, red in reductions for p in red.fresh)
    signature = problem.signature.with_predicates(fresh_preds)
    clauses = problem.sentence.clauses + tuple(c for _, red in reductions for c in red.clauses)
    sentence, sk = skolemize(Sentence(clauses), fresh)
    signature = signature.with_predicates(sk.fresh)
    if sk.fresh:
        notes.append(f"skolemized {len(sk.fresh)} existential clause(s)")

    wf = problem.weight_function().copy_for(signature)
    for _, red in reductions:
        for name, pair in red.weights.items():
            wf.pairs[name] = pair
    for name, pair in sk.weights.items():
        wf.pairs[name] = pair

    phi = sentence.universal_matrix()
    if base is not None:
        phi = repair_antireflexive(phi, base.edge, signature)
        if base.kind in (axiom_kinds.CONNECTED, axiom_kinds.FOREST):
            phi = repair_symmetric(phi, base.edge, signature)

    gamma = conjoin_constraints(
        tuple(problem.constraints) + tuple(c for _, red in reductions for c in red.constraints))

    for name in gamma.predicates():
        if name not in signature:
            raise LogicError(f"cardinality constraint references unknown predicate: {name}")
        if signature.predicate(name).arity == 2:
            wf.mark_symbolic(name)
    if base is not None and base.kind == axiom_kinds.FOREST:
        wf.mark_symbolic(base.edge)  # the in-block tree counts are edge-count filters
    for name in extra_symbolic:
        if signature.predicate(name).arity == 2:
            wf.mark_symbolic(name)

    for ax, red in reductions:
        if red.base_axiom is not None and red.base_axiom.kind != ax.kind:
            notes.append(f"{ax.describe()} reduced to {red.base_axiom.describe()}"
                         + (f" with {', '.join(c.text for c in red.constraints)}"
                            if red.constraints else ""))
    return Compiled(signature, phi, base, gamma, wf, notes)


def _symbol_caps(compiled: Compiled, n: int) -> dict:
    """Sound per-symbol exponent bounds from the constraint and the axiom."""
    caps = {}
    for name in compiled.wf.symbolic:
        arity = compiled.signature.predicate(name).arity
        bound = compiled.gamma.upper_bound(name, arity, compiled.signature, n)
        if compiled.base_axiom is not None and name == compiled.base_axiom.edge:
            axiom_bound = {
                axiom_kinds.DAG: n * (n - 1) // 2,
                axiom_kinds.CONNECTED: n * (n - 1),
                axiom_kinds.FOREST: max(2 * (n - 1), 0),
            }[compiled.base_axiom.kind]
            bound = axiom_bound if bound is None else min(bound, axiom_bound)
        if bound is not None:
            caps[WeightSymbol(name, True)] = bound
    return caps


@dataclass
class SolveReport:
    n: int
    value: Rational
    poly: Optional[Poly]
    per_k: list  # (active vector, unary cardinalities, exact value)
    compiled: Compiled
    context: Fo2Context

    def cardinality_masses(self, pred: str) -> dict:
        """Exact mass of each cardinality value of `pred` (before normalizing)."""
        arity = self.compiled.signature.predicate(pred).arity
        masses: dict = {}
        if arity == 1:
            for _, mu, value in self.per_k:
                if value != 0:
                    masses[mu[pred]] = masses.get(mu[pred], 0) + value
            return masses
        if self.poly is None:
            raise LogicError(f"predicate {pred} was not run symbolically")
        ring = self.poly.ring
        sym = WeightSymbol(pred, True)
        if sym not in ring.index:
            raise LogicError(f"predicate {pred} was not run symbolically")
        pos = ring.index[sym]
        values = self.compiled.wf.symbol_values()
        buckets: dict = {}
        for key, coeff in self.poly.monomials():
            buckets.setdefault(key[pos], {})[key] = coeff
        for count, terms in buckets.items():
            masses[count] = Poly(ring, terms).evaluate(values)
        return {c: v for c, v in masses.items() if v != 0}


def solve(problem: Problem, n: int, extra_symbolic: Sequence[str] = ()) -> SolveReport:
    compiled = compile_problem(problem, extra_symbolic)
    return solve_compiled(compiled, n)


def solve_compiled(compiled: Compiled, n: int) -> SolveReport:
    if n < 0:
        raise ValueError("domain size must be non-negative")
    ring = compiled.wf.ring(_symbol_caps(compiled, n)) if compiled.wf.symbolic else None
    ctx = Fo2Context(compiled.signature, compiled.phi, compiled.wf, ring)

    base = compiled.base_axiom
    if base is None:
        value_at = ctx.wfomc_k
    elif base.kind == axiom_kinds.DAG:
        value_at = DagEngine(ctx, base.edge).at
    elif base.kind == axiom_kinds.CONNECTED:
        value_at = ConnectedEngine(ctx, base.edge).at
    elif base.kind == axiom_kinds.FOREST:
        conn = ConnectedEngine(ctx, base.edge)
        value_at = ForestEngine(ctx, base.edge, tree_from_connected(conn, base.edge)).at
    else:
        raise UnsupportedError(f"no engine for axiom kind {base.kind}")

    gamma = compiled.gamma
    trivial = gamma is TRUE_CONSTRAINT or not gamma.predicates()
    binary_ranges = {name: (0, n * n) for name in gamma.predicates()
                     if compiled.signature.predicate(name).arity == 2}
    symbol_values = compiled.wf.symbol_values()

    total = 0
    poly_total = ring.zero if ring is not None else None
    per_k = []
    for k in compositions(n, ctx.u):
        mu = ctx.unary_mu(k)
        if not trivial and not gamma.feasible(mu, binary_ranges, n):
            continue
        value = value_at(k)
        if value_is_zero(value):
            continue
        if not trivial:
            if isinstance(value, Poly):
                value = value.filter_monomials(
                    lambda key: gamma.holds({**mu, **monomial_cardinalities(key, ring)}, n))
            elif not gamma.holds(mu, n):
                continue
        if value_is_zero(value):
            continue
        exact = evaluate_value(value, compiled.wf) if isinstance(value, Poly) else value
        per_k.append((k, mu, exact))
        total += exact
        if poly_total is not None:
            poly_total = poly_total + (value if isinstance(value, Poly) else ring.const(value))
    return SolveReport(n, normalize_rational(total), poly_total, per_k, compiled, ctx)


def count(problem: Problem, n: int) -> Rational:
    """The weighted model count as a single exact number."""
    return solve(problem, n).value
