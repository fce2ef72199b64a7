"""Signatures, two-variable formulas, the DSL parser, and 1-type/2-table machinery."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Sequence

VARIABLES = ("x", "y")
RESERVED_PREFIX = "@"


class LogicError(ValueError):
    pass


class ParseError(LogicError):
    def __init__(self, message: str, line: int = None, column: int = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


# ---------------------------------------------------------------------------
# Signature

@dataclass(frozen=True)
class Predicate:
    name: str
    arity: int

    def __post_init__(self):
        if self.arity not in (1, 2):
            raise LogicError(f"predicate {self.name}: arity must be 1 or 2, got {self.arity}")


class Signature:
    """An ordered list of predicates of arity <= 2.

    The declaration order is significant: it fixes the atom order used for
    1-type and 2-table indexing, so counts are reproducible across runs.
    """

    def __init__(self, predicates: Sequence[Predicate]):
        names = [p.name for p in predicates]
        if len(set(names)) != len(names):
            raise LogicError("duplicate predicate names in signature")
        self.predicates = tuple(predicates)
        self._by_name = {p.name: p for p in predicates}

    @classmethod
    def parse(cls, text: str) -> "Signature":
        """Parse a declaration like ``"R/2, Smokes/1"`` (empty string allowed)."""
        preds = []
        text = text.strip()
        if text:
            for part in text.split(","):
                m = re.fullmatch(r"\s*([A-Za-z_@][A-Za-z0-9_]*)\s*/\s*([12])\s*", part)
                if not m:
                    raise ParseError(f"bad predicate declaration: {part.strip()!r}")
                preds.append(Predicate(m.group(1), int(m.group(2))))
        return cls(preds)

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def __iter__(self) -> Iterator[Predicate]:
        return iter(self.predicates)

    def predicate(self, name: str) -> Predicate:
        try:
            return self._by_name[name]
        except KeyError:
            raise LogicError(f"unknown predicate: {name}") from None

    def binary_predicates(self) -> list[Predicate]:
        return [p for p in self.predicates if p.arity == 2]

    def with_predicates(self, extra: Sequence[Predicate]) -> "Signature":
        return Signature(self.predicates + tuple(extra))

    def single_variable_atoms(self) -> list["Atom"]:
        """All atoms over the single variable x: P(x) and R(x,x), declaration order."""
        out = []
        for p in self.predicates:
            if p.arity == 1:
                out.append(Atom(p.name, ("x",)))
            else:
                out.append(Atom(p.name, ("x", "x")))
        return out

    def two_variable_atoms(self) -> list["Atom"]:
        """All atoms with exactly the two variables x, y: R(x,y) then R(y,x) per binary R."""
        out = []
        for p in self.predicates:
            if p.arity == 2:
                out.append(Atom(p.name, ("x", "y")))
                out.append(Atom(p.name, ("y", "x")))
        return out

    def describe(self) -> str:
        return ", ".join(f"{p.name}/{p.arity}" for p in self.predicates)


# ---------------------------------------------------------------------------
# Quantifier-free formulas

@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple


@dataclass(frozen=True)
class Not:
    sub: "Formula"


@dataclass(frozen=True)
class And:
    parts: tuple


@dataclass(frozen=True)
class Or:
    parts: tuple


@dataclass(frozen=True)
class Implies:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class Iff:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class TrueFormula:
    pass


@dataclass(frozen=True)
class FalseFormula:
    pass


Formula = object
TRUE = TrueFormula()
FALSE = FalseFormula()


def conj(*formulas: Formula) -> Formula:
    """Conjoin formulas, flattening nested conjunctions and dropping `true`."""
    parts = []
    for f in formulas:
        if isinstance(f, TrueFormula):
            continue
        if isinstance(f, FalseFormula):
            return FALSE
        if isinstance(f, And):
            parts.extend(f.parts)
        else:
            parts.append(f)
    if not parts:
        return TRUE
    if len(parts) == 1:
        return parts[0]
    return And(tuple(parts))


def atoms_of(formula: Formula) -> Iterator[Atom]:
    if isinstance(formula, Atom):
        yield formula
    elif isinstance(formula, Not):
        yield from atoms_of(formula.sub)
    elif isinstance(formula, (And, Or)):
        for p in formula.parts:
            yield from atoms_of(p)
    elif isinstance(formula, (Implies, Iff)):
        yield from atoms_of(formula.lhs)
        yield from atoms_of(formula.rhs)


def free_variables(formula: Formula) -> set:
    return {v for a in atoms_of(formula) for v in a.args}


def evaluate(formula: Formula, lookup: Callable[[str, tuple], bool],
             binding: Optional[dict] = None) -> bool:
    """Evaluate under a total assignment; `binding` maps variables to elements."""
    if isinstance(formula, TrueFormula):
        return True
    if isinstance(formula, FalseFormula):
        return False
    if isinstance(formula, Atom):
        args = formula.args if binding is None else tuple(binding[v] for v in formula.args)
        return lookup(formula.pred, args)
    if isinstance(formula, Not):
        return not evaluate(formula.sub, lookup, binding)
    if isinstance(formula, And):
        return all(evaluate(p, lookup, binding) for p in formula.parts)
    if isinstance(formula, Or):
        return any(evaluate(p, lookup, binding) for p in formula.parts)
    if isinstance(formula, Implies):
        return (not evaluate(formula.lhs, lookup, binding)) or evaluate(formula.rhs, lookup, binding)
    if isinstance(formula, Iff):
        return evaluate(formula.lhs, lookup, binding) == evaluate(formula.rhs, lookup, binding)
    raise TypeError(f"not a formula: {formula!r}")


# ---------------------------------------------------------------------------
# Sentences

@dataclass(frozen=True)
class ForallXY:
    matrix: Formula


@dataclass(frozen=True)
class ForallXExistsY:
    matrix: Formula


@dataclass(frozen=True)
class Sentence:
    clauses: tuple

    def universal_matrix(self) -> Formula:
        return conj(*(c.matrix for c in self.clauses if isinstance(c, ForallXY)))

    def existential_clauses(self) -> list[ForallXExistsY]:
        return [c for c in self.clauses if isinstance(c, ForallXExistsY)]

    def conjoin(self, other: "Sentence") -> "Sentence":
        return Sentence(self.clauses + other.clauses)


EMPTY_SENTENCE = Sentence(())


# ---------------------------------------------------------------------------
# Parser

_TOKEN_RE = re.compile(
    r"(?P<name>[A-Za-z_@][A-Za-z0-9_]*)|(?P<iff><->)|(?P<arrow>->)|(?P<op>[~&|().,=])"
)

_KEYWORDS = {"forall", "exists", "true", "false"}


@dataclass
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    for lineno, line in enumerate(text.split("\n"), start=1):
        line = line.split("#", 1)[0]
        pos = 0
        while pos < len(line):
            if line[pos].isspace():
                pos += 1
                continue
            m = _TOKEN_RE.match(line, pos)
            if not m:
                raise ParseError(f"unexpected character {line[pos]!r}", lineno, pos + 1)
            kind, word = m.lastgroup, m.group(m.lastgroup)
            if kind == "name" and word in _KEYWORDS:
                kind = word
            tokens.append(_Token(kind, word, lineno, pos + 1))
            pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], signature: Signature, allow_reserved: bool = False):
        self.tokens = tokens
        self.signature = signature
        self.allow_reserved = allow_reserved
        self.pos = 0

    def peek(self, ahead: int = 0) -> Optional[_Token]:
        i = self.pos + ahead
        return self.tokens[i] if i < len(self.tokens) else None

    def next(self) -> _Token:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else None
            raise ParseError("unexpected end of input",
                             last.line if last else 1, last.column if last else 1)
        self.pos += 1
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.peek()
        if tok is None or tok.kind != kind or tok.text != what:
            got = tok.text if tok else "end of input"
            raise ParseError(f"expected {what!r}, got {got!r}",
                             tok.line if tok else None, tok.column if tok else None)
        return self.next()

    def error(self, message: str, tok: Optional[_Token] = None):
        tok = tok or self.peek() or (self.tokens[-1] if self.tokens else None)
        raise ParseError(message, tok.line if tok else None, tok.column if tok else None)

    # sentence := clause ("&" clause)*, clause boundaries marked by "forall"
    def sentence(self) -> Sentence:
        clauses = []
        if self.peek() is None:
            return EMPTY_SENTENCE
        while True:
            clauses.append(self.clause())
            tok = self.peek()
            if tok is None:
                break
            if tok.text == "&" and self.peek(1) is not None and self.peek(1).kind == "forall":
                self.next()
                continue
            self.error(f"unexpected {tok.text!r} after clause")
        return Sentence(tuple(clauses))

    def clause(self):
        self.expect("forall", "forall")
        names = []
        while self.peek() is not None and self.peek().kind == "name":
            names.append(self.next())
        if [t.text for t in names] == ["x", "y"]:
            self.expect("op", ".")
            return ForallXY(self.formula())
        if [t.text for t in names] == ["x"]:
            self.expect("op", ".")
            tok = self.peek()
            if tok is not None and tok.kind == "exists":
                self.next()
                v = self.next()
                if v.text != "y":
                    self.error("the existential variable must be y "
                               "(see the skolemization notes in the README)", v)
                self.expect("op", ".")
                return ForallXExistsY(self.formula())
            return ForallXY(self.formula())
        bad = next((t for t in names if t.text not in VARIABLES), None)
        if bad is not None:
            self.error(f"variable {bad.text!r} not allowed: only x and y are supported", bad)
        self.error("supported clause forms are 'forall x y.' / 'forall x.' / "
                   "'forall x. exists y.' (richer nesting must be skolemized first)")

    # precedence: <-> < -> < | < & < ~
    def formula(self):
        lhs = self.implication()
        while self.peek() is not None and self.peek().kind == "iff":
            self.next()
            lhs = Iff(lhs, self.implication())
        return lhs

    def implication(self):
        lhs = self.disjunction()
        if self.peek() is not None and self.peek().kind == "arrow":
            self.next()
            return Implies(lhs, self.implication())
        return lhs

    def disjunction(self):
        parts = [self.conjunction()]
        while self.peek() is not None and self.peek().text == "|":
            self.next()
            parts.append(self.conjunction())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conjunction(self):
        parts = [self.unary()]
        while (self.peek() is not None and self.peek().text == "&"
               and (self.peek(1) is None or self.peek(1).kind != "forall")):
            self.next()
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self):
        tok = self.peek()
        if tok is not None and tok.text == "~":
            self.next()
            return Not(self.unary())
        return self.primary()

    def primary(self):
        tok = self.next()
        if tok.text == "(":
            inner = self.formula()
            self.expect("op", ")")
            return inner
        if tok.kind == "true":
            return TRUE
        if tok.kind == "false":
            return FALSE
        if tok.kind == "name":
            nxt = self.peek()
            if nxt is not None and nxt.text == "=":
                self.error("equality atoms are not supported", nxt)
            if tok.text in VARIABLES:
                self.error(f"unexpected variable {tok.text!r}; expected an atom", tok)
            return self.atom(tok)
        if tok.text == "=":
            self.error("equality atoms are not supported", tok)
        self.error(f"unexpected {tok.text!r}", tok)

    def atom(self, name_tok: _Token) -> Atom:
        name = name_tok.text
        if name.startswith(RESERVED_PREFIX) and not self.allow_reserved:
            self.error(f"predicate names starting with {RESERVED_PREFIX!r} are reserved", name_tok)
        if name not in self.signature:
            self.error(f"unknown predicate: {name}", name_tok)
        pred = self.signature.predicate(name)
        self.expect("op", "(")
        args = [self.variable()]
        if self.peek() is not None and self.peek().text == ",":
            self.next()
            args.append(self.variable())
        self.expect("op", ")")
        if len(args) != pred.arity:
            self.error(f"{name} has arity {pred.arity}, got {len(args)} arguments", name_tok)
        return Atom(name, tuple(args))

    def variable(self) -> str:
        tok = self.next()
        if tok.text == "=":
            self.error("equality atoms are not supported", tok)
        if tok.text not in VARIABLES:
            self.error(f"variable {tok.text!r} not allowed: only x and y are supported", tok)
        return tok.text


def parse(text: str, signature: Signature) -> Sentence:
    """Parse a sentence in the DSL (conjunction of forall-xy / forall-x-exists-y clauses)."""
    return _Parser(_tokenize(text), signature).sentence()


def parse_formula(text: str, signature: Signature, allow_reserved: bool = False) -> Formula:
    """Parse a bare quantifier-free formula with free variables among x, y."""
    parser = _Parser(_tokenize(text), signature, allow_reserved=allow_reserved)
    f = parser.formula()
    if parser.peek() is not None:
        parser.error(f"unexpected {parser.peek().text!r} after formula")
    return f


# ---------------------------------------------------------------------------
# Pretty printing (inverse of parse, up to whitespace)

_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4, Not: 5}


def format_formula(formula: Formula, parent_prec: int = 0) -> str:
    if isinstance(formula, TrueFormula):
        return "true"
    if isinstance(formula, FalseFormula):
        return "false"
    if isinstance(formula, Atom):
        return f"{formula.pred}({','.join(formula.args)})"
    if isinstance(formula, Not):
        return "~" + format_formula(formula.sub, _PREC[Not])
    prec = _PREC[type(formula)]
    if isinstance(formula, And):
        body = " & ".join(format_formula(p, prec + 1) for p in formula.parts)
    elif isinstance(formula, Or):
        body = " | ".join(format_formula(p, prec + 1) for p in formula.parts)
    elif isinstance(formula, Implies):
        body = f"{format_formula(formula.lhs, prec + 1)} -> {format_formula(formula.rhs, prec)}"
    else:
        body = f"{format_formula(formula.lhs, prec + 1)} <-> {format_formula(formula.rhs, prec + 1)}"
    return f"({body})" if prec < parent_prec else body


def format_sentence(sentence: Sentence) -> str:
    parts = []
    for clause in sentence.clauses:
        if isinstance(clause, ForallXY):
            parts.append(f"forall x y. {format_formula(clause.matrix)}")
        else:
            parts.append(f"forall x. exists y. {format_formula(clause.matrix)}")
    return " & ".join(parts)


# ---------------------------------------------------------------------------
# 1-types and 2-tables

@dataclass(frozen=True)
class OneType:
    """Complete truth assignment to the single-variable atoms.

    Atom j (in signature declaration order) is true iff bit j of `index` is
    set; index 0 is the all-negative type.
    """
    index: int
    values: tuple


@dataclass(frozen=True)
class TwoTable:
    """Complete truth assignment to the two-variable atoms; same bit order rule."""
    index: int
    values: tuple


@dataclass(frozen=True)
class TwoType:
    i: int
    j: int
    l: int


def enumerate_one_types(signature: Signature) -> list[OneType]:
    atoms = signature.single_variable_atoms()
    return [OneType(i, tuple(bool((i >> j) & 1) for j in range(len(atoms))))
            for i in range(1 << len(atoms))]


def enumerate_two_tables(signature: Signature) -> list[TwoTable]:
    atoms = signature.two_variable_atoms()
    return [TwoTable(i, tuple(bool((i >> j) & 1) for j in range(len(atoms))))
            for i in range(1 << len(atoms))]


class TypeSpace:
    """Shared atom indexing for evaluating formulas on one- and two-element assignments."""

    def __init__(self, signature: Signature):
        self.signature = signature
        self.one_types = enumerate_one_types(signature)
        self.two_tables = enumerate_two_tables(signature)
        self.single_atoms = signature.single_variable_atoms()
        self.pair_atoms = signature.two_variable_atoms()

    def pair_lookup(self, i: OneType, j: OneType, l: TwoTable) -> Callable:
        """Ground-atom lookup over the two elements 'a', 'b' described by a 2-type."""
        table = {}
        for atom, v in zip(self.single_atoms, i.values):
            table[(atom.pred, tuple("a" for _ in atom.args))] = v
        for atom, v in zip(self.single_atoms, j.values):
            table[(atom.pred, tuple("b" for _ in atom.args))] = v
        sub = {"x": "a", "y": "b"}
        for atom, v in zip(self.pair_atoms, l.values):
            table[(atom.pred, tuple(sub[t] for t in atom.args))] = v
        return lambda pred, args: table[(pred, args)]

    def single_lookup(self, i: OneType) -> Callable:
        table = {}
        for atom, v in zip(self.single_atoms, i.values):
            table[(atom.pred, tuple("a" for _ in atom.args))] = v
        return lambda pred, args: table[(pred, args)]

    def consistent_alone(self, i: OneType, phi: Formula) -> bool:
        """Whether a single element of 1-type i satisfies Phi(x,x)."""
        return evaluate(phi, self.single_lookup(i), {"x": "a", "y": "a"})

    def is_consistent(self, t: TwoType, phi: Formula) -> bool:
        """Whether the 2-type entails Phi(x,x) & Phi(x,y) & Phi(y,x) & Phi(y,y)."""
        lookup = self.pair_lookup(self.one_types[t.i], self.one_types[t.j],
                                  self.two_tables[t.l])
        return all(evaluate(phi, lookup, {"x": vx, "y": vy})
                   for vx, vy in (("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")))

    def satisfies_directed(self, t: TwoType, theta: Formula) -> bool:
        """Whether the 2-type satisfies theta(x,y) in the (x, y) orientation only."""
        lookup = self.pair_lookup(self.one_types[t.i], self.one_types[t.j],
                                  self.two_tables[t.l])
        return evaluate(theta, lookup, {"x": "a", "y": "b"})


def is_consistent(t: TwoType, phi: Formula, signature: Signature) -> bool:
    return TypeSpace(signature).is_consistent(t, phi)
