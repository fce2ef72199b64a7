"""Count-preserving rewrites: skolemization and axiom-to-axiom compilations.

All rewrites here are modular: conjoining further clauses before or after
rewriting yields the same counts.  Fresh predicates use the reserved "@"
prefix so they can never capture user names.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import axioms
from .axioms import GraphAxiom
from .constraints import CardinalityConstraint, parse_constraint
from .logic import (And, Atom, ForallXExistsY, ForallXY, Formula, Implies, LogicError,
                    Not, Or, Predicate, Sentence, Signature)


@dataclass
class Reduction:
    """Additions a rewrite makes: clauses, a base axiom, constraints, fresh predicates."""
    clauses: tuple = ()
    base_axiom: Optional[GraphAxiom] = None
    constraints: tuple = ()
    fresh: tuple = ()
    weights: dict = field(default_factory=dict)


class FreshNames:
    """Deterministic generator of reserved predicate names."""

    def __init__(self):
        self.counts = {}

    def make(self, stem: str) -> str:
        i = self.counts.get(stem, 0)
        self.counts[stem] = i + 1
        return f"@{stem}{i}"


def skolem_clause(matrix: Formula, witness_pred: str) -> ForallXY:
    """forall x exists y. psi  becomes  forall x y. S(x) | ~psi."""
    return ForallXY(Or((Atom(witness_pred, ("x",)), Not(matrix))))


def skolemize(sentence: Sentence, fresh: Optional[FreshNames] = None) -> tuple:
    """Replace every existential clause; the fresh witnesses get weights (1, -1)."""
    fresh = fresh or FreshNames()
    clauses = []
    reduction = Reduction()
    for clause in sentence.clauses:
        if isinstance(clause, ForallXExistsY):
            name = fresh.make("sk")
            clauses.append(skolem_clause(clause.matrix, name))
            reduction.fresh += (Predicate(name, 1),)
            reduction.weights[name] = (1, -1)
        elif isinstance(clause, ForallXY):
            clauses.append(clause)
        else:
            raise LogicError(f"unsupported clause form: {clause!r}")
    return Sentence(tuple(clauses)), reduction


def reduce_tree(axiom: GraphAxiom, signature: Signature) -> Reduction:
    """Tree(R) = Connected(R) plus exactly n-1 undirected edges (2n-2 true atoms)."""
    return Reduction(
        base_axiom=GraphAxiom(axioms.CONNECTED, axiom.edge),
        constraints=(parse_constraint(f"|{axiom.edge}| = 2*n - 2", signature),),
    )


def reduce_directed_tree(axiom: GraphAxiom, signature: Signature,
                         fresh: FreshNames) -> Reduction:
    """DirectedTree(R, Root): a DAG in which the root has indegree zero, every
    other element at least one incoming edge, and the edge total pins each
    non-root to exactly one parent."""
    edge, root = axiom.edge, axiom.root
    no_parent = ForallXY(Implies(Atom(root, ("x",)), Not(Atom(edge, ("y", "x")))))
    witness = ForallXExistsY(Or((Atom(root, ("x",)), Atom(edge, ("y", "x")))))
    skolemized, sk = skolemize(Sentence((witness,)), fresh)
    return Reduction(
        clauses=(no_parent,) + skolemized.clauses,
        base_axiom=GraphAxiom(axioms.DAG, edge),
        constraints=(parse_constraint(f"|{root}| = 1", signature),
                     parse_constraint(f"|{edge}| = n - |{root}|", signature)),
        fresh=sk.fresh,
        weights=sk.weights,
    )


def reduce_directed_forest(axiom: GraphAxiom, signature: Signature,
                           fresh: FreshNames) -> Reduction:
    """DirectedForest(R): a DAG with all indegrees at most one.  A fresh marker
    holds exactly on elements with an incoming edge; making the edge total equal
    the marker count forces each marked element to a single parent."""
    edge = axiom.edge
    marker = fresh.make("p")
    marker_pred = Predicate(marker, 1)
    marked = ForallXY(Implies(Atom(edge, ("y", "x")), Atom(marker, ("x",))))
    witness = ForallXExistsY(Or((Not(Atom(marker, ("x",))), Atom(edge, ("y", "x")))))
    extended = signature.with_predicates([marker_pred])
    skolemized, sk = skolemize(Sentence((witness,)), fresh)
    return Reduction(
        clauses=(marked,) + skolemized.clauses,
        base_axiom=GraphAxiom(axioms.DAG, edge),
        constraints=(parse_constraint(f"|{edge}| = |{marker}|", extended),),
        fresh=(marker_pred,) + sk.fresh,
        weights=sk.weights,
    )


def reduce_source_sink(axiom: GraphAxiom, signature: Signature,
                       fresh: FreshNames) -> Reduction:
    """Acyclic(R, Source, Sink): Source marks exactly the zero-indegree elements
    and Sink exactly the zero-outdegree ones."""
    edge, source, sink = axiom.edge, axiom.source, axiom.sink
    clauses = [
        ForallXY(Implies(Atom(edge, ("y", "x")), Not(Atom(source, ("x",))))),
        ForallXY(Implies(Atom(edge, ("x", "y")), Not(Atom(sink, ("x",))))),
    ]
    witnesses = Sentence((
        ForallXExistsY(Or((Atom(source, ("x",)), Atom(edge, ("y", "x"))))),
        ForallXExistsY(Or((Atom(sink, ("x",)), Atom(edge, ("x", "y"))))),
    ))
    skolemized, sk = skolemize(witnesses, fresh)
    return Reduction(
        clauses=tuple(clauses) + skolemized.clauses,
        base_axiom=GraphAxiom(axioms.DAG, edge),
        fresh=sk.fresh,
        weights=sk.weights,
    )


def reduce_axiom(axiom: GraphAxiom, signature: Signature, fresh: FreshNames) -> Reduction:
    """Compile any supported axiom down to a base engine axiom (dag/connected/forest)."""
    if axiom.kind in axioms.BASE_KINDS:
        return Reduction(base_axiom=axiom)
    if axiom.kind == axioms.TREE:
        return reduce_tree(axiom, signature)
    if axiom.kind == axioms.DIRECTED_TREE:
        return reduce_directed_tree(axiom, signature, fresh)
    if axiom.kind == axioms.DIRECTED_FOREST:
        return reduce_directed_forest(axiom, signature, fresh)
    if axiom.kind == axioms.SOURCE_SINK_DAG:
        return reduce_source_sink(axiom, signature, fresh)
    raise LogicError(f"unsupported axiom kind: {axiom.kind}")
