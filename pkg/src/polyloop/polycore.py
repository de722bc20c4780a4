"""Exact multivariate polynomials over the rationals.

Polynomials are immutable maps from monomials to nonzero ``Fraction``
coefficients.  Variables are identified by name; :class:`Var` only carries
the kind metadata (program variable, loop counter, template unknown, ...).
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Mapping

from .errors import MissingAssignment, ParseError, UnknownVariable

Rat = Fraction

VAR_KINDS = ("program", "counter", "exponential", "template", "parameter", "auxiliary")


@dataclass(frozen=True)
class Var:
    name: str
    kind: str = "program"

    def __post_init__(self):
        if self.kind not in VAR_KINDS:
            raise ValueError(f"unknown variable kind {self.kind!r}")
        if not _IDENT_RE.fullmatch(self.name):
            raise ValueError(f"invalid identifier {self.name!r}")

    def __str__(self):
        return self.name


def as_rat(value):
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as a rational")


def format_rat(value):
    value = as_rat(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class Monomial(tuple):
    """Power product stored as name-sorted ``(name, exponent)`` pairs."""

    __slots__ = ()

    def __new__(cls, powers=()):
        items = powers.items() if isinstance(powers, Mapping) else powers
        merged = {}
        for name, exp in items:
            if exp < 0:
                raise ValueError("negative exponent")
            if exp:
                merged[name] = merged.get(name, 0) + exp
        return tuple.__new__(cls, sorted(merged.items()))

    @classmethod
    def _raw(cls, pairs):
        return tuple.__new__(cls, pairs)

    @property
    def degree(self):
        return sum(e for _, e in self)

    def exponent(self, name):
        for n, e in self:
            if n == name:
                return e
        return 0

    def variables(self):
        return frozenset(n for n, _ in self)

    def as_dict(self):
        return dict(self)

    def __mul__(self, other):
        if not other:
            return self
        if not self:
            return other
        merged = dict(self)
        for n, e in other:
            merged[n] = merged.get(n, 0) + e
        return Monomial._raw(tuple(sorted(merged.items())))

    __rmul__ = __mul__

    def divides(self, other):
        mine = dict(other)
        return all(mine.get(n, 0) >= e for n, e in self)

    def __truediv__(self, other):
        merged = dict(self)
        for n, e in other:
            left = merged.get(n, 0) - e
            if left < 0:
                raise ValueError("monomial does not divide")
            if left:
                merged[n] = left
            else:
                del merged[n]
        return Monomial._raw(tuple(sorted(merged.items())))

    def lcm(self, other):
        merged = dict(self)
        for n, e in other:
            if e > merged.get(n, 0):
                merged[n] = e
        return Monomial._raw(tuple(sorted(merged.items())))

    def restrict(self, names):
        return Monomial._raw(tuple(p for p in self if p[0] in names))

    def __str__(self):
        if not self:
            return "1"
        return "*".join(n if e == 1 else f"{n}^{e}" for n, e in self)

    def __repr__(self):
        return f"Monomial({dict(self)!r})"


ONE_MONOMIAL = Monomial()


@dataclass(frozen=True)
class MonomialOrder:
    """A monomial order over an explicit variable precedence.

    ``precedence`` lists variables from largest to smallest.  For the block
    scheme, ``blocks`` is a sequence of ``(scheme, variables)`` pairs; earlier
    blocks dominate later ones.
    """

    scheme: str
    precedence: tuple = ()
    blocks: tuple = ()

    def __post_init__(self):
        if self.scheme not in ("lex", "deglex", "grevlex", "block"):
            raise ValueError(f"unknown monomial order {self.scheme!r}")
        if self.scheme == "block":
            blocks = tuple((s, tuple(vs)) for s, vs in self.blocks)
            if any(s == "block" for s, _ in blocks):
                raise ValueError("nested block orders are not supported")
            object.__setattr__(self, "blocks", blocks)
            object.__setattr__(self, "precedence", tuple(v for _, vs in blocks for v in vs))
        else:
            object.__setattr__(self, "precedence", tuple(self.precedence))
        if len(set(self.precedence)) != len(self.precedence):
            raise ValueError("duplicate variable in monomial order")
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(self.precedence)})

    @classmethod
    def elimination(cls, drop, keep):
        return cls("block", blocks=(("lex", tuple(drop)), ("grevlex", tuple(keep))))

    def vector(self, mono):
        vec = [0] * len(self.precedence)
        index = self._index
        for n, e in mono:
            try:
                vec[index[n]] = e
            except KeyError:
                raise UnknownVariable(f"variable {n} is not covered by the monomial order") from None
        return vec

    def key(self, mono):
        return self._vector_key(self.vector(mono))

    def _vector_key(self, vec):
        if self.scheme == "block":
            parts = []
            start = 0
            for scheme, names in self.blocks:
                parts.append(_scheme_key(scheme, vec[start:start + len(names)]))
                start += len(names)
            return tuple(parts)
        return _scheme_key(self.scheme, vec)

    def compare(self, u, v):
        ku, kv = self.key(u), self.key(v)
        return (ku > kv) - (ku < kv)


def _scheme_key(scheme, vec):
    if scheme == "lex":
        return tuple(vec)
    if scheme == "deglex":
        return (sum(vec), tuple(vec))
    return (sum(vec), tuple(-e for e in reversed(vec)))


def default_order(names):
    return MonomialOrder("grevlex", tuple(sorted(names)))


class Polynomial:
    """Immutable polynomial with rational coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms=None):
        clean = {}
        if terms:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for mono, coeff in items:
                if not isinstance(mono, Monomial):
                    mono = Monomial(mono)
                coeff = as_rat(coeff)
                total = clean.get(mono, 0) + coeff
                if total:
                    clean[mono] = total
                else:
                    clean.pop(mono, None)
        self._terms = clean
        self._hash = None

    @classmethod
    def _wrap(cls, terms):
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def var(cls, name):
        if isinstance(name, Var):
            name = name.name
        return cls._wrap({Monomial._raw(((name, 1),)): Fraction(1)})

    @classmethod
    def const(cls, value):
        value = as_rat(value)
        return cls._wrap({ONE_MONOMIAL: value} if value else {})

    @classmethod
    def coerce(cls, value):
        if isinstance(value, Polynomial):
            return value
        if isinstance(value, Var):
            return cls.var(value)
        if isinstance(value, (int, Fraction)):
            return cls.const(value)
        if isinstance(value, str):
            return parse_poly(value)
        raise TypeError(f"cannot convert {value!r} to a polynomial")

    # -- inspection -------------------------------------------------------

    def items(self):
        return self._terms.items()

    def monomials(self):
        return self._terms.keys()

    def coefficient(self, mono):
        if not isinstance(mono, Monomial):
            mono = Monomial(mono)
        return self._terms.get(mono, Fraction(0))

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self):
        return not self._terms

    def is_constant(self):
        return not self._terms or (len(self._terms) == 1 and ONE_MONOMIAL in self._terms)

    @property
    def constant(self):
        return self._terms.get(ONE_MONOMIAL, Fraction(0))

    def variables(self):
        out = set()
        for mono in self._terms:
            out.update(n for n, _ in mono)
        return frozenset(out)

    @property
    def total_degree(self):
        if not self._terms:
            return -1
        return max(m.degree for m in self._terms)

    def degree(self, name):
        if not self._terms:
            return -1
        return max(m.exponent(name) for m in self._terms)

    def terms(self, order=None):
        """Terms sorted from largest to smallest monomial under ``order``."""
        if order is None:
            order = default_order(self.variables())
        return sorted(self._terms.items(), key=lambda t: order.key(t[0]), reverse=True)

    def leading_term(self, order):
        mono = max(self._terms, key=order.key)
        return mono, self._terms[mono]

    def monic(self, order):
        if not self._terms:
            return self
        _, lc = self.leading_term(order)
        return self * (1 / lc)

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        try:
            other = Polynomial.coerce(other)
        except TypeError:
            return NotImplemented
        if len(other._terms) > len(self._terms):
            big, small = other, self
        else:
            big, small = self, other
        out = dict(big._terms)
        for mono, coeff in small._terms.items():
            total = out.get(mono, 0) + coeff
            if total:
                out[mono] = total
            else:
                out.pop(mono, None)
        return Polynomial._wrap(out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._wrap({m: -c for m, c in self._terms.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        try:
            other = Polynomial.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        try:
            other = Polynomial.coerce(other)
        except TypeError:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return Polynomial()
            return Polynomial._wrap({m: c * other for m, c in self._terms.items()})
        try:
            other = Polynomial.coerce(other)
        except TypeError:
            return NotImplemented
        out = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                mono = m1 * m2
                total = out.get(mono, 0) + c1 * c2
                if total:
                    out[mono] = total
                else:
                    out.pop(mono, None)
        return Polynomial._wrap(out)

    __rmul__ = __mul__

    def __pow__(self, exp):
        if not isinstance(exp, int) or exp < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Polynomial.const(1)
        base = self
        while exp:
            if exp & 1:
                result = result * base
            exp >>= 1
            if exp:
                base = base * base
        return result

    def mul_term(self, mono, coeff):
        """Multiply by the single term ``coeff * mono``."""
        if not coeff:
            return Polynomial()
        return Polynomial._wrap({m * mono: c * coeff for m, c in self._terms.items()})

    # -- comparison -------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == Polynomial.const(other)._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- printing ---------------------------------------------------------

    def to_str(self, order=None):
        if not self._terms:
            return "0"
        parts = []
        for i, (mono, coeff) in enumerate(self.terms(order)):
            sign = "-" if coeff < 0 else "+"
            mag = -coeff if coeff < 0 else coeff
            if not mono:
                body = format_rat(mag)
            elif mag == 1:
                body = str(mono)
            else:
                body = f"{format_rat(mag)}*{mono}"
            if i == 0:
                parts.append(body if sign == "+" else f"-{body}")
            else:
                parts.append(f" {sign} {body}")
        return "".join(parts)

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"Polynomial({self.to_str()!r})"


def poly_arith(p, q, op):
    p, q = Polynomial.coerce(p), Polynomial.coerce(q)
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown operation {op!r}")


def substitute(p, mapping):
    """Simultaneously replace variables by polynomials."""
    p = Polynomial.coerce(p)
    if not mapping:
        return p
    images = {}
    for key, value in mapping.items():
        name = key.name if isinstance(key, Var) else key
        images[name] = Polynomial.coerce(value)
    powers = {}

    def power(name, exp):
        cached = powers.get((name, exp))
        if cached is None:
            cached = images[name] ** exp
            powers[(name, exp)] = cached
        return cached

    out = Polynomial()
    for mono, coeff in p.items():
        kept = []
        factor = Polynomial.const(coeff)
        for name, exp in mono:
            if name in images:
                factor = factor * power(name, exp)
            else:
                kept.append((name, exp))
        if kept:
            factor = factor.mul_term(Monomial._raw(tuple(kept)), 1)
        out = out + factor
    return out


def poly_eval(p, values):
    """Exact value of ``p`` under a total assignment of its variables."""
    p = Polynomial.coerce(p)
    env = {(k.name if isinstance(k, Var) else k): as_rat(v) for k, v in values.items()}
    total = Fraction(0)
    for mono, coeff in p.items():
        term = coeff
        for name, exp in mono:
            try:
                term *= env[name] ** exp
            except KeyError:
                raise MissingAssignment(f"no value for variable {name}") from None
        total += term
    return total


def collect(p, group_vars):
    """Split ``p`` into coefficients of power products of ``group_vars``.

    Returns a dict ``{monomial in group_vars: coefficient polynomial}`` with
    ``p == sum(m * c)`` and no group variable occurring in any coefficient.
    """
    p = Polynomial.coerce(p)
    names = frozenset(v.name if isinstance(v, Var) else v for v in group_vars)
    groups = {}
    for mono, coeff in p.items():
        key = Monomial._raw(tuple(t for t in mono if t[0] in names))
        rest = Monomial._raw(tuple(t for t in mono if t[0] not in names))
        groups.setdefault(key, {})[rest] = coeff
    return {k: Polynomial._wrap(v) for k, v in groups.items()}


def shift(p, name, offset=1):
    """Substitute ``name -> name + offset``."""
    return substitute(p, {name: Polynomial.var(name) + offset})


def binomial(n, k):
    return comb(n, k)


# -- text syntax ----------------------------------------------------------

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*^()]))"
)


def tokenize(text):
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", position=pos)
        start = m.start(m.lastgroup)
        tokens.append((m.lastgroup, m.group(m.lastgroup), start))
        pos = m.end()
    return tokens


class _PolyParser:
    def __init__(self, text, variables):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0
        self.variables = variables

    def peek(self):
        if self.i < len(self.tokens):
            return self.tokens[self.i]
        return ("eof", "", len(self.text))

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def parse(self):
        if not self.tokens:
            raise ParseError("empty expression", position=0)
        result = self.expr()
        kind, value, pos = self.peek()
        if kind != "eof":
            if kind in ("ident", "num") or value == "(":
                raise ParseError("implicit multiplication is not allowed; use '*'", position=pos)
            raise ParseError(f"unexpected {value!r}", position=pos)
        return result

    def expr(self):
        result = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            result = result + rhs if op == "+" else result - rhs
        return result

    def term(self):
        result = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.take()
            result = result * self.unary()
        return result

    def unary(self):
        kind, value, _ = self.peek()
        if kind == "op" and value in ("+", "-"):
            self.take()
            inner = self.unary()
            return -inner if value == "-" else inner
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            kind, value, pos = self.take()
            if kind != "num" or "/" in value:
                raise ParseError("exponent must be a non-negative integer literal", position=pos)
            base = base ** int(value)
        return base

    def atom(self):
        kind, value, pos = self.take()
        if kind == "num":
            return Polynomial.const(Fraction(value))
        if kind == "ident":
            if self.variables is not None and value not in self.variables:
                raise UnknownVariable(f"unknown variable {value!r} at col {pos}")
            return Polynomial.var(value)
        if kind == "op" and value == "(":
            inner = self.expr()
            k, v, p = self.take()
            if v != ")":
                raise ParseError("expected ')'", position=p)
            return inner
        if kind == "eof":
            raise ParseError("unexpected end of expression", position=pos)
        raise ParseError(f"unexpected {value!r}", position=pos)


def parse_poly(text, variables=None):
    """Parse the polynomial text syntax (``x - y^2``, ``7/2*x + 1``).

    If ``variables`` is given, identifiers outside it raise UnknownVariable.
    """
    return _PolyParser(text, variables).parse()


def is_identifier(name):
    return bool(_IDENT_RE.fullmatch(name))


def fresh_name(base, taken):
    """``base`` or ``base`` with the smallest numeric suffix not in ``taken``."""
    if base not in taken:
        return base
    k = 1
    while f"{base}{k}" in taken:
        k += 1
    return f"{base}{k}"
