"""Ground-truth by exhaustive enumeration of interpretations on tiny domains.

The walk assigns the diagonal atom block of each element, then the cross atom
block of each pair, pruning as soon as a ground instance of the universal
matrix fails.  Graph axioms are checked graph-algorithmically on the edge
projection, so this module shares no counting logic with the lifted engines.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterator, Optional, Sequence

from . import axioms as axiom_kinds
from .axioms import GraphAxiom
from .constraints import CardinalityConstraint
from .logic import Formula, LogicError, Sentence, Signature, evaluate
from .weights import Rational, WeightFunction, normalize_rational

MAX_GROUND_ATOMS = 28


class OracleCapError(RuntimeError):
    pass


@dataclass
class Interpretation:
    domain: tuple
    atoms: dict  # (pred_name, element_args) -> bool

    def edge_set(self, pred: str) -> set:
        return {args for (name, args), v in self.atoms.items() if name == pred and v}

    def true_unary(self, pred: str) -> set:
        return {args[0] for (name, args), v in self.atoms.items() if name == pred and v}

    def cardinalities(self) -> dict:
        mu = {}
        for (name, _), v in self.atoms.items():
            mu.setdefault(name, 0)
            if v:
                mu[name] += 1
        return mu


def ground_atoms(signature: Signature, domain: Sequence) -> list:
    out = []
    for p in signature.predicates:
        if p.arity == 1:
            out.extend((p.name, (c,)) for c in domain)
        else:
            out.extend((p.name, (c, d)) for c in domain for d in domain)
    return out


def project(omega: Interpretation, subset: Sequence) -> Interpretation:
    keep = set(subset)
    atoms = {key: v for key, v in omega.atoms.items()
             if all(e in keep for e in key[1])}
    return Interpretation(tuple(e for e in omega.domain if e in keep), atoms)


def weight_of(omega: Interpretation, wf: WeightFunction) -> Rational:
    total = 1
    for (name, _), v in omega.atoms.items():
        w, wbar = wf.pairs[name]
        total *= w if v else wbar
    return normalize_rational(total) if not isinstance(total, int) else total


def satisfies(omega: Interpretation, sentence: Sentence) -> bool:
    lookup = lambda pred, args: omega.atoms[(pred, args)]
    phi = sentence.universal_matrix()
    for c in omega.domain:
        for d in omega.domain:
            if not evaluate(phi, lookup, {"x": c, "y": d}):
                return False
    for clause in sentence.existential_clauses():
        for c in omega.domain:
            if not any(evaluate(clause.matrix, lookup, {"x": c, "y": d})
                       for d in omega.domain):
                return False
    return True


# ---------------------------------------------------------------------------
# Axiom checks on the edge projection

def _is_dag(edges: set, domain: tuple) -> bool:
    if any(c == d for c, d in edges):
        return False
    succ = {c: [] for c in domain}
    for c, d in edges:
        succ[c].append(d)
    state = {c: 0 for c in domain}  # 0 new, 1 on stack, 2 done

    def visit(c) -> bool:
        state[c] = 1
        for d in succ[c]:
            if state[d] == 1:
                return False
            if state[d] == 0 and not visit(d):
                return False
        state[c] = 2
        return True

    for c in domain:
        if state[c] == 0 and not visit(c):
            return False
    return True


def _symmetric_antireflexive(edges: set) -> bool:
    return all(c != d and (d, c) in edges for c, d in edges)


def _components(edges: set, domain: tuple) -> int:
    parent = {c: c for c in domain}

    def find(c):
        while parent[c] != c:
            parent[c] = parent[parent[c]]
            c = parent[c]
        return c

    for c, d in edges:
        rc, rd = find(c), find(d)
        if rc != rd:
            parent[rc] = rd
    return len({find(c) for c in domain})


def check_axiom(omega: Interpretation, axiom: GraphAxiom) -> bool:
    edges = omega.edge_set(axiom.edge)
    domain = omega.domain
    kind = axiom.kind
    if kind == axiom_kinds.DAG:
        return _is_dag(edges, domain)
    if kind in (axiom_kinds.CONNECTED, axiom_kinds.FOREST, axiom_kinds.TREE):
        if not _symmetric_antireflexive(edges):
            return False
        undirected = len(edges) // 2
        comps = _components(edges, domain)
        acyclic = undirected == len(domain) - comps
        if kind == axiom_kinds.CONNECTED:
            return len(domain) >= 1 and comps == 1
        if kind == axiom_kinds.TREE:
            return len(domain) >= 1 and comps == 1 and acyclic
        return acyclic
    indegree = {c: 0 for c in domain}
    outdegree = {c: 0 for c in domain}
    for c, d in edges:
        outdegree[c] += 1
        indegree[d] += 1
    if kind == axiom_kinds.DIRECTED_FOREST:
        return _is_dag(edges, domain) and all(v <= 1 for v in indegree.values())
    if kind == axiom_kinds.DIRECTED_TREE:
        roots = {c for c in domain if indegree[c] == 0}
        return (_is_dag(edges, domain)
                and len(roots) == 1
                and all(indegree[c] == 1 for c in domain if c not in roots)
                and omega.true_unary(axiom.root) == roots)
    if kind == axiom_kinds.SOURCE_SINK_DAG:
        return (_is_dag(edges, domain)
                and omega.true_unary(axiom.source) == {c for c in domain if indegree[c] == 0}
                and omega.true_unary(axiom.sink) == {c for c in domain if outdegree[c] == 0})
    raise LogicError(f"unknown axiom kind: {kind}")


# ---------------------------------------------------------------------------
# Enumeration

class _Walker:
    def __init__(self, sentence: Sentence, n: int, signature: Signature,
                 wf: Optional[WeightFunction],
                 axioms: Sequence[GraphAxiom] = (),
                 constraints: Sequence[CardinalityConstraint] = ()):
        self.signature = signature
        self.wf = wf or WeightFunction(signature)
        self.domain = tuple(range(1, n + 1))
        self.n = n
        if len(ground_atoms(signature, self.domain)) > MAX_GROUND_ATOMS:
            raise OracleCapError(
                f"{len(ground_atoms(signature, self.domain))} ground atoms exceed "
                f"the brute-force cap of {MAX_GROUND_ATOMS}")
        self.sentence = sentence
        self.phi = sentence.universal_matrix()
        self.exist = sentence.existential_clauses()
        self.axioms = tuple(axioms)
        self.constraints = tuple(constraints)
        self.diag_preds = [(p.name, p.arity) for p in signature.predicates]
        self.cross_preds = [p.name for p in signature.predicates if p.arity == 2]
        self.diag_options = self._diag_options()
        self._pair_cache: dict = {}

    def _diag_options(self) -> list:
        """Admissible diagonal blocks for a single element, with their weights."""
        options = []
        for values in product((False, True), repeat=len(self.diag_preds)):
            table = {}
            weight = 1
            for (name, arity), v in zip(self.diag_preds, values):
                table[(name, ("e",) * arity)] = v
                w, wbar = self.wf.pairs[name]
                weight *= w if v else wbar
            if evaluate(self.phi, lambda p, a: table[(p, a)], {"x": "e", "y": "e"}):
                options.append((values, weight))
        return options

    def _pair_options(self, diag_c: tuple, diag_d: tuple) -> list:
        """Admissible cross blocks for a pair, given the two diagonal blocks."""
        key = (diag_c, diag_d)
        cached = self._pair_cache.get(key)
        if cached is not None:
            return cached
        base = {}
        for (name, arity), v in zip(self.diag_preds, diag_c):
            base[(name, ("c",) * arity)] = v
        for (name, arity), v in zip(self.diag_preds, diag_d):
            base[(name, ("d",) * arity)] = v
        options = []
        for values in product((False, True), repeat=2 * len(self.cross_preds)):
            table = dict(base)
            weight = 1
            for idx, name in enumerate(self.cross_preds):
                fwd, bwd = values[2 * idx], values[2 * idx + 1]
                table[(name, ("c", "d"))] = fwd
                table[(name, ("d", "c"))] = bwd
                w, wbar = self.wf.pairs[name]
                weight *= (w if fwd else wbar) * (w if bwd else wbar)
            lookup = lambda p, a: table[(p, a)]
            if evaluate(self.phi, lookup, {"x": "c", "y": "d"}) and \
                    evaluate(self.phi, lookup, {"x": "d", "y": "c"}):
                options.append((values, weight))
        self._pair_cache[key] = options
        return options

    def run(self, yield_models: bool = False):
        domain = self.domain
        pairs = [(c, d) for i, c in enumerate(domain) for d in domain[i + 1:]]
        atoms: dict = {}
        diag_choice: dict = {}
        total = [0]
        collected = [] if yield_models else None

        def leaf(weight):
            lookup = lambda p, a: atoms[(p, a)]
            for clause in self.exist:
                for c in domain:
                    if not any(evaluate(clause.matrix, lookup, {"x": c, "y": d})
                               for d in domain):
                        return
            omega = Interpretation(domain, atoms)
            if not all(check_axiom(omega, ax) for ax in self.axioms):
                return
            if self.constraints:
                mu = omega.cardinalities()
                for p in self.signature.predicates:
                    mu.setdefault(p.name, 0)
                if not all(g.holds(mu, self.n) for g in self.constraints):
                    return
            total[0] += weight
            if collected is not None:
                collected.append((Interpretation(domain, dict(atoms)), weight))

        def assign_pairs(idx, weight):
            if idx == len(pairs):
                leaf(weight)
                return
            c, d = pairs[idx]
            for values, w in self._pair_options(diag_choice[c], diag_choice[d]):
                for i, name in enumerate(self.cross_preds):
                    atoms[(name, (c, d))] = values[2 * i]
                    atoms[(name, (d, c))] = values[2 * i + 1]
                assign_pairs(idx + 1, weight * w)

        def assign_diag(idx, weight):
            if idx == len(domain):
                assign_pairs(0, weight)
                return
            c = domain[idx]
            for values, w in self.diag_options:
                diag_choice[c] = values
                for (name, arity), v in zip(self.diag_preds, values):
                    atoms[(name, (c,) * arity)] = v
                assign_diag(idx + 1, weight * w)

        assign_diag(0, 1)
        return (total[0], collected) if yield_models else (total[0], None)


def enumerate_weighted(sentence: Sentence, n: int, signature: Signature,
                       wf: Optional[WeightFunction] = None,
                       axioms: Sequence[GraphAxiom] = (),
                       constraints: Sequence[CardinalityConstraint] = ()) -> Rational:
    """Exact weighted count of all interpretations satisfying everything."""
    total, _ = _Walker(sentence, n, signature, wf, axioms, constraints).run()
    return normalize_rational(total) if not isinstance(total, int) else total


def models(sentence: Sentence, n: int, signature: Signature,
           wf: Optional[WeightFunction] = None,
           axioms: Sequence[GraphAxiom] = (),
           constraints: Sequence[CardinalityConstraint] = ()) -> Iterator:
    """All (interpretation, weight) pairs; for small-domain property tests."""
    _, collected = _Walker(sentence, n, signature, wf, axioms, constraints).run(
        yield_models=True)
    return iter(collected)
