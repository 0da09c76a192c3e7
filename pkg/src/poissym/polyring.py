"""Sparse multivariate polynomials with exact rational coefficients.

A :class:`Poly` is a mapping from exponent tuples to nonzero
:class:`fractions.Fraction` coefficients over a :class:`VarRing`.  Values are
immutable once constructed.  Monomial orders are plain key functions: the
larger key is the larger monomial.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence, Union

Monomial = tuple  # tuple[int, ...] of exponents
Scalar = Union[int, Fraction]

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class VarRing:
    """The polynomial ring k[x1..xn] over the rationals, with optional grading."""

    variables: tuple
    weights: tuple = None

    def __post_init__(self):
        variables = tuple(self.variables)
        if not variables:
            raise ValueError("a ring needs at least one variable")
        for name in variables:
            if not _NAME_RE.match(name):
                raise ValueError(f"invalid variable name {name!r}")
        if len(set(variables)) != len(variables):
            raise ValueError(f"duplicate variable names in {variables}")
        weights = (1,) * len(variables) if self.weights is None else tuple(self.weights)
        if len(weights) != len(variables) or any(int(w) < 1 for w in weights):
            raise ValueError("weights must be positive integers, one per variable")
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "weights", tuple(int(w) for w in weights))

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r}") from None

    def zero(self) -> "Poly":
        return Poly(self)

    def one(self) -> "Poly":
        return self.const(1)

    def const(self, c: Scalar) -> "Poly":
        return Poly(self, {(0,) * self.nvars: c})

    def gen(self, i: int) -> "Poly":
        exps = [0] * self.nvars
        exps[i] = 1
        return Poly(self, {tuple(exps): 1})

    def gens(self) -> list:
        return [self.gen(i) for i in range(self.nvars)]

    def __call__(self, text: str) -> "Poly":
        return parse_poly(text, self)

    def __str__(self):
        return "QQ[" + ", ".join(self.variables) + "]"


def _grevlex_key(e):
    return (sum(e), tuple(-x for x in reversed(e)))


@dataclass(frozen=True)
class MonomialOrder:
    """A term order on exponent tuples, or POT order on (position, exponents).

    ``kind`` is one of ``"lex"``, ``"grevlex"``, ``"elim"`` (first ``block``
    variables eliminated, grevlex inside each block) and ``"pot"`` (module
    order over ``base``; a higher position index is the larger position).
    """

    kind: str = "grevlex"
    block: int = 0
    base: "MonomialOrder" = None
    key: Callable = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        if self.kind == "lex":
            key = tuple
        elif self.kind == "grevlex":
            key = _grevlex_key
        elif self.kind == "elim":
            k = self.block
            if k < 1:
                raise ValueError("elimination block must contain at least one variable")

            def key(e, k=k):
                return (_grevlex_key(e[:k]), _grevlex_key(e[k:]))
        elif self.kind == "pot":
            if self.base is None or self.base.kind == "pot":
                raise ValueError("POT order needs a term order as base")
            base_key = self.base.key

            def key(t, base_key=base_key):
                return (t[0], base_key(t[1]))
        else:
            raise ValueError(f"unknown monomial order {self.kind!r}")
        object.__setattr__(self, "key", key)

    @classmethod
    def lex(cls):
        return cls("lex")

    @classmethod
    def grevlex(cls):
        return cls("grevlex")

    @classmethod
    def elimination(cls, k: int):
        return cls("elim", block=k)

    @classmethod
    def pot(cls, base: "MonomialOrder" = None):
        return cls("pot", base=base or GREVLEX)

    @classmethod
    def from_name(cls, name: str) -> "MonomialOrder":
        if name not in ("lex", "grevlex"):
            raise ValueError(f"unknown order {name!r} (expected lex or grevlex)")
        return cls(name)

    def __str__(self):
        if self.kind == "elim":
            return f"elim({self.block})"
        if self.kind == "pot":
            return f"pot({self.base})"
        return self.kind


GREVLEX = MonomialOrder.grevlex()
LEX = MonomialOrder.lex()


def _coerce(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"cannot use {type(c).__name__} as an exact coefficient")


class Poly:
    """Polynomial over a :class:`VarRing`; never stores zero coefficients."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: VarRing, terms: Mapping = None):
        self.ring = ring
        clean = {}
        if terms:
            n = ring.nvars
            for mono, c in terms.items():
                c = _coerce(c)
                if c:
                    mono = tuple(mono)
                    if len(mono) != n:
                        raise ValueError(f"monomial {mono} does not match ring arity {n}")
                    clean[mono] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, ring, terms):
        # trusted constructor: terms already clean
        p = cls.__new__(cls)
        p.ring = ring
        p.terms = terms
        p._hash = None
        return p

    # -- predicates -----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_value(self) -> Fraction:
        return self.terms.get((0,) * self.ring.nvars, Fraction(0))

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self.terms), default=-1)

    def weighted_degree(self) -> int:
        w = self.ring.weights
        return max((sum(a * b for a, b in zip(m, w)) for m in self.terms), default=-1)

    def variables_used(self) -> set:
        used = set()
        for m in self.terms:
            used.update(i for i, e in enumerate(m) if e)
        return used

    # -- arithmetic -----------------------------------------------------
    def _lift(self, other):
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for m, c in other.terms.items():
            s = terms.get(m, 0) + c
            if s:
                terms[m] = s
            else:
                terms.pop(m, None)
        return Poly._raw(self.ring, terms)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return Poly._raw(self.ring, {})
            return Poly._raw(self.ring, {m: c * other for m, c in self.terms.items()})
        other = self._lift(other)
        if other is NotImplemented:
            return other
        terms = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                terms[m] = terms.get(m, 0) + c1 * c2
        return Poly._raw(self.ring, {m: c for m, c in terms.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / other)
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers are supported")
        result, base = self.ring.one(), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring.variables, frozenset(self.terms.items())))
        return self._hash

    # -- structure ------------------------------------------------------
    def sorted_terms(self, order: MonomialOrder = GREVLEX) -> list:
        """Terms as (monomial, coefficient), largest first."""
        return sorted(self.terms.items(), key=lambda t: order.key(t[0]), reverse=True)

    def leading_term(self, order: MonomialOrder = GREVLEX):
        return leading_term(self, order)

    def diff(self, i: int) -> "Poly":
        return partial_derivative(self, i)

    def content(self) -> Fraction:
        """Positive rational c such that self / c has coprime integer coefficients."""
        from math import gcd

        if not self.terms:
            return Fraction(0)
        num = den = 0
        for c in self.terms.values():
            num = gcd(num, c.numerator)
            den = den * c.denominator // gcd(den, c.denominator) if den else c.denominator
        return Fraction(num, den)

    def primitive(self, order: MonomialOrder = GREVLEX) -> "Poly":
        """Integer-primitive associate with positive leading coefficient."""
        if not self.terms:
            return self
        c = self.content()
        if leading_term(self, order)[1] < 0:
            c = -c
        return self * (1 / c)

    def compose(self, images: Sequence["Poly"], ring: VarRing = None) -> "Poly":
        """Substitute ``images[i]`` for the i-th variable."""
        if len(images) != self.ring.nvars:
            raise ValueError("need one image per variable")
        if ring is None:
            ring = images[0].ring if images else self.ring
        result = ring.zero()
        powers = [dict() for _ in images]

        def power(i, e):
            cache = powers[i]
            if e not in cache:
                cache[e] = images[i] ** e
            return cache[e]

        for m, c in self.terms.items():
            t = ring.const(c)
            for i, e in enumerate(m):
                if e:
                    t = t * power(i, e)
            result = result + t
        return result

    def embed(self, ring: VarRing) -> "Poly":
        """Re-home into ``ring`` matching variables by name."""
        if ring == self.ring:
            return self
        idx = [ring.index(v) for v in self.ring.variables]
        terms = {}
        n = ring.nvars
        for m, c in self.terms.items():
            e = [0] * n
            for i, k in enumerate(m):
                if k:
                    e[idx[i]] = k
            terms[tuple(e)] = c
        return Poly._raw(ring, terms)

    def __str__(self):
        return canonical_string(self)

    def __repr__(self):
        return f"Poly({canonical_string(self)!r})"


def partial_derivative(f: Poly, i: int) -> Poly:
    """Formal partial derivative of ``f`` in its i-th variable."""
    if not 0 <= i < f.ring.nvars:
        raise IndexError(f"variable index {i} out of range")
    terms = {}
    for m, c in f.terms.items():
        e = m[i]
        if e:
            mm = m[:i] + (e - 1,) + m[i + 1:]
            terms[mm] = c * e
    return Poly._raw(f.ring, terms)


def leading_term(f: Poly, order: MonomialOrder = GREVLEX):
    """Largest (monomial, coefficient) of ``f`` under ``order``."""
    if not f.terms:
        raise ValueError("the zero polynomial has no leading term")
    m = max(f.terms, key=order.key)
    return m, f.terms[m]


# -- printing -----------------------------------------------------------

def _format_coefficient(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _format_monomial(ring: VarRing, m) -> str:
    parts = []
    for name, e in zip(ring.variables, m):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def canonical_string(f: Poly, order: MonomialOrder = GREVLEX) -> str:
    """Deterministic rendering, terms in decreasing order under ``order``."""
    if not f.terms:
        return "0"
    out = []
    for k, (m, c) in enumerate(f.sorted_terms(order)):
        mono = _format_monomial(f.ring, m)
        mag = abs(c)
        if not mono:
            body = _format_coefficient(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_format_coefficient(mag)}*{mono}"
        if k == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)


# -- parsing ------------------------------------------------------------

class PolySyntaxError(ValueError):
    """Malformed polynomial expression; ``position`` is a 0-based offset."""

    def __init__(self, message: str, position: int, text: str = ""):
        self.message = message
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class UnknownVariableError(PolySyntaxError):
    pass


_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:  # trailing whitespace
            break
        if m.group(1) is not None:
            tokens.append(("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), m.start(2)))
        else:
            tokens.append(("op", m.group(3), m.start(3)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, ring: VarRing):
        self.text = text
        self.ring = ring
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        raise PolySyntaxError(message, tok[2], self.text)

    def expect_op(self, op):
        tok = self.peek()
        if tok[0] != "op" or tok[1] != op:
            self.fail(f"expected {op!r}")
        self.take()

    def parse(self) -> Poly:
        result = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected {self.peek()[1]!r}")
        return result

    def expr(self) -> Poly:
        negate = False
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.take()
            negate = True
        acc = self.term()
        if negate:
            acc = -acc
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] in "+-":
                self.take()
                t = self.term()
                acc = acc + t if tok[1] == "+" else acc - t
            else:
                return acc

    def term(self) -> Poly:
        acc = self.power()
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.take()
            acc = acc * self.power()
        return acc

    def power(self) -> Poly:
        base = self.atom()
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "^":
            self.take()
            exp = self.take()
            if exp[0] != "int":
                self.fail("expected a non-negative integer exponent", exp)
            return base ** int(exp[1])
        return base

    def atom(self) -> Poly:
        tok = self.take()
        kind, value, pos = tok
        if kind == "int":
            num = int(value)
            nxt = self.peek()
            if nxt[0] == "op" and nxt[1] == "/":
                self.take()
                den = self.take()
                if den[0] != "int":
                    self.fail("expected an integer denominator", den)
                if int(den[1]) == 0:
                    self.fail("zero denominator", den)
                return self.ring.const(Fraction(num, int(den[1])))
            return self.ring.const(num)
        if kind == "name":
            if value not in self.ring.variables:
                raise UnknownVariableError(f"unknown variable {value!r}", pos, self.text)
            return self.ring.gen(self.ring.index(value))
        if kind == "op" and value == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        if kind == "end":
            self.fail("unexpected end of input", tok)
        self.fail(f"unexpected {value!r}", tok)


def parse_poly(text: str, ring: VarRing) -> Poly:
    """Parse ``text`` (integers/rationals, variables, + - * ^, parentheses)."""
    return _Parser(text, ring).parse()


def poly_from_terms(ring: VarRing, terms: Iterable) -> Poly:
    """Build from an iterable of (monomial, coefficient) pairs, summing repeats."""
    acc = {}
    for m, c in terms:
        m = tuple(m)
        acc[m] = acc.get(m, 0) + _coerce(c)
    return Poly(ring, acc)
