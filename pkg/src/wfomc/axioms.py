"""Graph axioms attachable to a distinguished binary predicate."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .logic import LogicError, Signature

DAG = "dag"
CONNECTED = "connected"
FOREST = "forest"
TREE = "tree"
DIRECTED_TREE = "directed_tree"
DIRECTED_FOREST = "directed_forest"
SOURCE_SINK_DAG = "source_sink_dag"

BASE_KINDS = (DAG, CONNECTED, FOREST)
KINDS = BASE_KINDS + (TREE, DIRECTED_TREE, DIRECTED_FOREST, SOURCE_SINK_DAG)


@dataclass(frozen=True)
class GraphAxiom:
    kind: str
    edge: str
    root: Optional[str] = None
    source: Optional[str] = None
    sink: Optional[str] = None

    def describe(self) -> str:
        if self.kind == DIRECTED_TREE:
            return f"directed_tree({self.edge}, {self.root})"
        if self.kind == SOURCE_SINK_DAG:
            return f"dag({self.edge}, {self.source}, {self.sink})"
        return f"{self.kind}({self.edge})"


_AXIOM_RE = re.compile(r"\s*([a-z_]+)\s*\(\s*([^)]*)\)\s*")


def parse_axiom(text: str, signature: Signature) -> GraphAxiom:
    """Parse axiom syntax: dag(R), connected(R), forest(R), tree(R),
    directed_tree(R, Root), directed_forest(R), dag(R, Source, Sink)."""
    m = _AXIOM_RE.fullmatch(text)
    if not m:
        raise LogicError(f"bad axiom syntax: {text!r}")
    name = m.group(1)
    args = [a.strip() for a in m.group(2).split(",")] if m.group(2).strip() else []

    def binary(arg):
        if signature.predicate(arg).arity != 2:
            raise LogicError(f"axiom edge predicate {arg} must be binary")
        return arg

    def unary(arg):
        if signature.predicate(arg).arity != 1:
            raise LogicError(f"axiom role predicate {arg} must be unary")
        return arg

    if name == "dag" and len(args) == 1:
        return GraphAxiom(DAG, binary(args[0]))
    if name == "dag" and len(args) == 3:
        return GraphAxiom(SOURCE_SINK_DAG, binary(args[0]),
                          source=unary(args[1]), sink=unary(args[2]))
    if name in (CONNECTED, FOREST, TREE, DIRECTED_FOREST) and len(args) == 1:
        return GraphAxiom(name, binary(args[0]))
    if name == DIRECTED_TREE and len(args) == 2:
        return GraphAxiom(DIRECTED_TREE, binary(args[0]), root=unary(args[1]))
    raise LogicError(f"unrecognized axiom: {text!r}")
