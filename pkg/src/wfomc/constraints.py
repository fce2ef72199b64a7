"""Cardinality constraints: boolean combinations of linear comparisons over |P| and n."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .logic import LogicError, ParseError, Signature


@dataclass(frozen=True)
class Linear:
    """constant + sum of coeff * |P| terms + coeff * n."""
    constant: int
    n_coeff: int
    pred_coeffs: tuple  # ((name, coeff), ...)

    def value(self, mu: dict, n: int) -> int:
        total = self.constant + self.n_coeff * n
        for name, coeff in self.pred_coeffs:
            total += coeff * mu[name]
        return total

    def bounds(self, known: dict, ranges: dict, n: int) -> tuple:
        lo = hi = self.constant + self.n_coeff * n
        for name, coeff in self.pred_coeffs:
            if name in known:
                lo += coeff * known[name]
                hi += coeff * known[name]
            else:
                a, b = ranges[name]
                lo += coeff * (a if coeff > 0 else b)
                hi += coeff * (b if coeff > 0 else a)
        return lo, hi


_OPS = {
    "=": lambda a, b: a == b,
    "<=": lambda a, b: a <= b,
    ">=": lambda a, b: a >= b,
    "<": lambda a, b: a < b,
    ">": lambda a, b: a > b,
}


@dataclass(frozen=True)
class Comparison:
    lhs: Linear
    op: str
    rhs: Linear


@dataclass(frozen=True)
class CNot:
    sub: object


@dataclass(frozen=True)
class CAnd:
    parts: tuple


@dataclass(frozen=True)
class COr:
    parts: tuple


@dataclass(frozen=True)
class CTrue:
    pass


class CardinalityConstraint:
    """A parsed constraint; evaluates against a map of predicate cardinalities."""

    def __init__(self, node, text: Optional[str] = None):
        self.node = node
        self.text = text

    def predicates(self) -> set:
        out = set()

        def walk(node):
            if isinstance(node, Comparison):
                out.update(name for name, _ in node.lhs.pred_coeffs)
                out.update(name for name, _ in node.rhs.pred_coeffs)
            elif isinstance(node, CNot):
                walk(node.sub)
            elif isinstance(node, (CAnd, COr)):
                for p in node.parts:
                    walk(p)

        walk(self.node)
        return out

    def holds(self, mu: dict, n: int) -> bool:
        def walk(node):
            if isinstance(node, CTrue):
                return True
            if isinstance(node, Comparison):
                return _OPS[node.op](node.lhs.value(mu, n), node.rhs.value(mu, n))
            if isinstance(node, CNot):
                return not walk(node.sub)
            if isinstance(node, CAnd):
                return all(walk(p) for p in node.parts)
            if isinstance(node, COr):
                return any(walk(p) for p in node.parts)
            raise TypeError(node)

        return walk(self.node)

    def feasible(self, known: dict, ranges: dict, n: int) -> bool:
        """Three-valued check: False only if no completion of `ranges` can satisfy it."""
        def walk(node):
            # returns True / False / None (unknown)
            if isinstance(node, CTrue):
                return True
            if isinstance(node, Comparison):
                llo, lhi = node.lhs.bounds(known, ranges, n)
                rlo, rhi = node.rhs.bounds(known, ranges, n)
                if node.op == "=":
                    if lhi < rlo or rhi < llo:
                        return False
                    if llo == lhi == rlo == rhi:
                        return True
                    return None
                if node.op in ("<=", "<"):
                    strict = node.op == "<"
                    if (lhi < rlo) or (not strict and lhi <= rlo):
                        return True
                    if (llo > rhi) or (strict and llo >= rhi):
                        return False
                    return None
                # >=, >
                strict = node.op == ">"
                if (llo > rhi) or (not strict and llo >= rhi):
                    return True
                if (lhi < rlo) or (strict and lhi <= rlo):
                    return False
                return None
            if isinstance(node, CNot):
                v = walk(node.sub)
                return None if v is None else not v
            if isinstance(node, CAnd):
                vals = [walk(p) for p in node.parts]
                if any(v is False for v in vals):
                    return False
                return True if all(v is True for v in vals) else None
            if isinstance(node, COr):
                vals = [walk(p) for p in node.parts]
                if any(v is True for v in vals):
                    return True
                return False if all(v is False for v in vals) else None
            raise TypeError(node)

        return walk(self.node) is not False

    def upper_bound(self, pred: str, arity: int, signature: Signature, n: int) -> Optional[int]:
        """Largest feasible cardinality of `pred`, or None if unconstrained."""
        if pred not in self.predicates():
            return None
        ranges = {q: (0, n ** signature.predicate(q).arity)
                  for q in self.predicates() if q != pred}
        best = None
        for v in range(n ** arity, -1, -1):
            if self.feasible({pred: v}, ranges, n):
                best = v
                break
        return best

    def __repr__(self):
        return f"CardinalityConstraint({self.text or self.node!r})"


TRUE_CONSTRAINT = CardinalityConstraint(CTrue(), "true")


def conjoin_constraints(constraints) -> CardinalityConstraint:
    parts = [c.node for c in constraints if not isinstance(c.node, CTrue)]
    if not parts:
        return TRUE_CONSTRAINT
    if len(parts) == 1:
        return CardinalityConstraint(parts[0], " and ".join(c.text or "?" for c in constraints))
    return CardinalityConstraint(CAnd(tuple(parts)),
                                 " and ".join(c.text or "?" for c in constraints))


# ---------------------------------------------------------------------------
# Parser:  |R| = 2*n - 2,  |Source| = 1,  |R| = |P|,  |F| >= 2*(n - 1), ...

_CARD_TOKEN = re.compile(
    r"\s*(?:(?P<card>\|\s*[A-Za-z_@][A-Za-z0-9_]*\s*\|)|(?P<num>\d+)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<cmp><=|>=|=|<|>)|(?P<op>[-+*()]))"
)


class _CardParser:
    def __init__(self, text: str, signature: Signature):
        self.signature = signature
        self.tokens = []
        pos = 0
        while pos < len(text):
            if text[pos].isspace():
                pos += 1
                continue
            m = _CARD_TOKEN.match(text, pos)
            if not m:
                raise ParseError(f"bad cardinality constraint near {text[pos:]!r}")
            self.tokens.append((m.lastgroup, m.group(m.lastgroup).strip()))
            pos = m.end()
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def next(self):
        tok = self.peek()
        if tok[0] is None:
            raise ParseError("unexpected end of cardinality constraint")
        self.pos += 1
        return tok

    def parse(self):
        node = self.or_expr()
        if self.peek()[0] is not None:
            raise ParseError(f"unexpected {self.peek()[1]!r} in cardinality constraint")
        return node

    def or_expr(self):
        parts = [self.and_expr()]
        while self.peek() == ("name", "or"):
            self.next()
            parts.append(self.and_expr())
        return parts[0] if len(parts) == 1 else COr(tuple(parts))

    def and_expr(self):
        parts = [self.not_expr()]
        while self.peek() == ("name", "and"):
            self.next()
            parts.append(self.not_expr())
        return parts[0] if len(parts) == 1 else CAnd(tuple(parts))

    def not_expr(self):
        if self.peek() == ("name", "not"):
            self.next()
            return CNot(self.not_expr())
        if self.peek() == ("name", "true"):
            self.next()
            return CTrue()
        if self.peek() == ("op", "("):
            # lookahead: boolean group or arithmetic group
            save = self.pos
            self.next()
            try:
                node = self.or_expr()
                if self.peek() == ("op", ")") and isinstance(node, (Comparison, CNot, CAnd, COr, CTrue)):
                    self.next()
                    return node
            except ParseError:
                pass
            self.pos = save
        return self.comparison()

    def comparison(self):
        lhs = self.linear()
        kind, op = self.next()
        if kind != "cmp":
            raise ParseError(f"expected a comparison operator, got {op!r}")
        rhs = self.linear()
        return Comparison(lhs, op, rhs)

    def linear(self) -> Linear:
        const, ncoef, preds = self.linear_triple()
        return Linear(const, ncoef, tuple(sorted(preds.items())))

    def linear_triple(self):
        const, ncoef, preds = self.term()
        while self.peek()[1] in ("+", "-"):
            sign = 1 if self.next()[1] == "+" else -1
            c2, n2, p2 = self.term()
            const += sign * c2
            ncoef += sign * n2
            preds = _merge(preds, {k: sign * v for k, v in p2.items()})
        return const, ncoef, preds

    def term(self):
        # product of factors; at most one non-constant factor keeps it linear
        triple = self.factor()
        while self.peek()[1] == "*":
            self.next()
            other = self.factor()
            if _is_const(triple):
                triple = _scale(other, triple[0])
            elif _is_const(other):
                triple = _scale(triple, other[0])
            else:
                raise ParseError("cardinality constraints must be linear")
        return triple

    def factor(self):
        kind, text = self.next()
        if kind == "num":
            return int(text), 0, {}
        if kind == "name" and text == "n":
            return 0, 1, {}
        if kind == "card":
            name = text.strip("|").strip()
            if name not in self.signature:
                raise LogicError(f"cardinality constraint references unknown predicate: {name}")
            return 0, 0, {name: 1}
        if kind == "op" and text == "(":
            triple = self.linear_triple()
            if self.peek() != ("op", ")"):
                raise ParseError("expected ')' in cardinality constraint")
            self.next()
            return triple
        if kind == "op" and text == "-":
            return _scale(self.factor(), -1)
        raise ParseError(f"unexpected {text!r} in cardinality constraint")


def _is_const(triple) -> bool:
    return triple[1] == 0 and not triple[2]


def _scale(triple, c: int):
    const, ncoef, preds = triple
    return const * c, ncoef * c, {k: v * c for k, v in preds.items()}


def _merge(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + v
    return out


def parse_constraint(text: str, signature: Signature) -> CardinalityConstraint:
    node = _CardParser(text, signature).parse()
    return CardinalityConstraint(node, text.strip())
