"""Exact rational weights and the symbolic weight-polynomial ring.

Weighted counts are computed over an exact commutative ring: plain Python
ints / Fractions when every weight is numeric, or multivariate polynomials
with one symbol per (predicate, polarity) when a predicate is run
symbolically.  Monomial exponents of the positive symbol of a predicate P
equal the number of true ground P-atoms, which is what cardinality
constraints filter on.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional, Sequence, Union

from .logic import LogicError, Signature

Rational = Union[int, Fraction]


def normalize_rational(value) -> Rational:
    """Collapse integral Fractions to int (faster arithmetic, cleaner output)."""
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return int(value)
        return value
    if isinstance(value, int):
        return value
    raise LogicError(f"not an exact rational: {value!r}")


def parse_rational(text: str) -> Rational:
    """Parse 'a/b' or 'a' into an exact rational."""
    return normalize_rational(Fraction(text.strip()))


@dataclass(frozen=True)
class WeightSymbol:
    predicate: str
    positive: bool

    def __str__(self):
        return f"w({self.predicate})" if self.positive else f"wbar({self.predicate})"


class PolynomialRing:
    """Polynomials over a fixed tuple of weight symbols.

    `caps` optionally bounds the exponent of a symbol: monomials exceeding a
    cap are dropped during multiplication.  This is sound whenever the final
    result provably carries no monomial above the cap (exponents never
    decrease under ring operations), and is used to keep cardinality-filtered
    runs small.
    """

    def __init__(self, symbols: Sequence[WeightSymbol], caps: Optional[dict] = None):
        self.symbols = tuple(symbols)
        self.index = {s: i for i, s in enumerate(self.symbols)}
        if len(self.index) != len(self.symbols):
            raise LogicError("duplicate symbols in ring")
        self.caps = tuple((caps or {}).get(s) for s in self.symbols)
        self._zero_key = (0,) * len(self.symbols)
        self.zero = Poly(self, {})
        self.one = Poly(self, {self._zero_key: 1})

    def const(self, value: Rational) -> "Poly":
        value = normalize_rational(value)
        if value == 0:
            return self.zero
        return Poly(self, {self._zero_key: value})

    def symbol_poly(self, symbol: WeightSymbol) -> "Poly":
        key = tuple(1 if i == self.index[symbol] else 0 for i in range(len(self.symbols)))
        return Poly(self, {key: 1})

    def within_caps(self, key: tuple) -> bool:
        return all(c is None or e <= c for e, c in zip(key, self.caps))


class Poly:
    """Immutable multivariate polynomial with exact rational coefficients."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolynomialRing, terms: dict):
        self.ring = ring
        self.terms = terms

    def is_zero(self) -> bool:
        return not self.terms

    def constant(self) -> Rational:
        return self.terms.get(self.ring._zero_key, 0)

    def monomials(self) -> Iterator[tuple]:
        return iter(self.terms.items())

    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.ring is not self.ring:
                raise LogicError("polynomials from different rings")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        out = dict(a)
        for key, coeff in b.items():
            s = out.get(key, 0) + coeff
            if s == 0:
                out.pop(key, None)
            else:
                out[key] = s
        return Poly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ring, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return self.ring.zero
            return Poly(self.ring, {k: c * other for k, c in self.terms.items()})
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        ring = self.ring
        capped = any(c is not None for c in ring.caps)
        out = {}
        for ka, ca in a.items():
            for kb, cb in b.items():
                key = tuple(x + y for x, y in zip(ka, kb))
                if capped and not ring.within_caps(key):
                    continue
                s = out.get(key, 0) + ca * cb
                if s == 0:
                    out.pop(key, None)
                else:
                    out[key] = s
        return Poly(ring, out)

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if exponent < 0:
            raise LogicError("negative polynomial exponent")
        result = self.ring.one
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ring is other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == ({} if other == 0 else {self.ring._zero_key: other})
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for key in sorted(self.terms):
            factors = [str(self.terms[key])]
            for sym, e in zip(self.ring.symbols, key):
                if e:
                    factors.append(f"{sym}^{e}" if e > 1 else str(sym))
            bits.append("*".join(factors))
        return " + ".join(bits)

    def filter_monomials(self, keep: Callable[[tuple], bool]) -> "Poly":
        return Poly(self.ring, {k: c for k, c in self.terms.items() if keep(k)})

    def evaluate(self, values: dict) -> Rational:
        """Substitute a numeric value for every symbol; exact result."""
        missing = [s for s in self.ring.symbols if s not in values]
        if missing and any(any(k[self.ring.index[s]] for s in missing) for k in self.terms):
            raise LogicError(f"no value for symbol {missing[0]}")
        total = 0
        vals = [values.get(s, 1) for s in self.ring.symbols]
        for key, coeff in self.terms.items():
            term = coeff
            for v, e in zip(vals, key):
                if e:
                    term = term * v ** e
            total += term
        return normalize_rational(Fraction(total)) if isinstance(total, Fraction) else total


Value = Union[int, Fraction, Poly]


def exact_div(value: Value, divisor: int) -> Value:
    """Divide by a nonzero integer, staying exact (int when it divides evenly)."""
    if isinstance(value, Poly):
        return Poly(value.ring, {k: exact_div(c, divisor) for k, c in value.terms.items()})
    if isinstance(value, int):
        q, r = divmod(value, divisor)
        if r == 0:
            return q
    return normalize_rational(Fraction(value, divisor))


def value_is_zero(value: Value) -> bool:
    return value.is_zero() if isinstance(value, Poly) else value == 0


# ---------------------------------------------------------------------------
# Weight functions

class WeightFunction:
    """Per-predicate symmetric weight pairs (w, wbar), numeric or symbolic.

    Every predicate defaults to (1, 1).  Marking a predicate symbolic makes
    both its weight factors enter computations as ring symbols; its numeric
    pair is still kept and used for the final substitution.
    """

    def __init__(self, signature: Signature):
        self.signature = signature
        self.pairs = {p.name: (1, 1) for p in signature.predicates}
        self.symbolic = set()

    def copy_for(self, signature: Signature) -> "WeightFunction":
        wf = WeightFunction(signature)
        for name, pair in self.pairs.items():
            if name in signature:
                wf.pairs[name] = pair
        wf.symbolic = {name for name in self.symbolic if name in signature}
        return wf

    def set(self, name: str, w, wbar) -> "WeightFunction":
        if name not in self.signature:
            raise LogicError(f"unknown predicate: {name}")
        self.pairs[name] = (normalize_rational(w), normalize_rational(wbar))
        return self

    def mark_symbolic(self, name: str) -> "WeightFunction":
        if name not in self.signature:
            raise LogicError(f"unknown predicate: {name}")
        self.symbolic.add(name)
        return self

    def all_integer(self) -> bool:
        return all(isinstance(w, int) and isinstance(v, int) for w, v in self.pairs.values())

    def ring(self, caps: Optional[dict] = None) -> PolynomialRing:
        """Ring over the symbolic predicates' symbols, in declaration order."""
        symbols = []
        for p in self.signature.predicates:
            if p.name in self.symbolic:
                symbols.append(WeightSymbol(p.name, True))
                symbols.append(WeightSymbol(p.name, False))
        return PolynomialRing(symbols, caps)

    def factor(self, name: str, positive: bool, ring: Optional[PolynomialRing]) -> Value:
        if name in self.symbolic:
            if ring is None:
                raise LogicError(f"predicate {name} is symbolic but no ring was provided")
            return ring.symbol_poly(WeightSymbol(name, positive))
        w, wbar = self.pairs[name]
        return w if positive else wbar

    def symbol_values(self) -> dict:
        out = {}
        for name in self.symbolic:
            w, wbar = self.pairs[name]
            out[WeightSymbol(name, True)] = w
            out[WeightSymbol(name, False)] = wbar
        return out

    def interpretation_weight(self, true_atoms: Iterable[str], false_atoms: Iterable[str]) -> Rational:
        """Product weight of an interpretation given per-atom predicate names."""
        total = 1
        for name in true_atoms:
            total *= self.pairs[name][0]
        for name in false_atoms:
            total *= self.pairs[name][1]
        return normalize_rational(Fraction(total)) if isinstance(total, Fraction) else total


def evaluate_value(value: Value, wf: WeightFunction) -> Rational:
    """Final numeric value of a run result (substitutes symbols if needed)."""
    if isinstance(value, Poly):
        return value.evaluate(wf.symbol_values())
    return value


# ---------------------------------------------------------------------------
# Type weights (the per-1-type and per-2-table weight parameters)

def one_type_weight(one_type, signature: Signature, wf: WeightFunction,
                    ring: Optional[PolynomialRing] = None) -> Value:
    """Product of w/wbar factors over the single-variable atoms of a 1-type."""
    total = ring.one if ring is not None and ring.symbols else 1
    for atom, positive in zip(signature.single_variable_atoms(), one_type.values):
        total = total * wf.factor(atom.pred, positive, ring)
    return total


def two_table_weight(two_table, signature: Signature, wf: WeightFunction,
                     ring: Optional[PolynomialRing] = None) -> Value:
    """Product of w/wbar factors over the two-variable atoms of a 2-table."""
    total = ring.one if ring is not None and ring.symbols else 1
    for atom, positive in zip(signature.two_variable_atoms(), two_table.values):
        total = total * wf.factor(atom.pred, positive, ring)
    return total


def monomial_cardinalities(key: tuple, ring: PolynomialRing) -> dict:
    """Per-predicate true-ground-atom counts read off a monomial's exponents."""
    return {s.predicate: e for s, e in zip(ring.symbols, key) if s.positive}
