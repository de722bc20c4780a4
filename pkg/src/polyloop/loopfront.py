"""Loop mini-language: parsing, printing, recurrence extraction, execution.

A loop file looks like::

    vars: x, z, y
    (x, z, y) := (0, 0, 0)
    while y < N:
        x := x + z + 1
        z := z + 2
        y := y + 1

The guard is kept as raw text and otherwise ignored.  Variables without an
initial value get a symbolic parameter ``<name>0``.
"""

import re
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    EmptyInvariant,
    NonAffineUpdate,
    NondeterministicUpdate,
    ParseError,
    SymbolicInitial,
    UnknownVariable,
)
from .polycore import (
    MonomialOrder,
    Polynomial,
    fresh_name,
    is_identifier,
    parse_poly,
    substitute,
    tokenize,
)


class GuardIgnoredWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Assignment:
    """``targets := exprs``; a single assignment has one target."""

    targets: tuple
    exprs: tuple

    def __post_init__(self):
        if len(self.targets) != len(self.exprs):
            raise ValueError("arity mismatch in assignment")


@dataclass(frozen=True)
class LoopProgram:
    vars: tuple
    init: dict
    body: tuple
    guard: str = "true"
    auxiliary: frozenset = field(default=frozenset(), compare=False)

    @property
    def parameters(self):
        names = set()
        for value in self.init.values():
            names |= value.variables()
        return tuple(sorted(names))

    def has_numeric_init(self):
        return all(v.is_constant() for v in self.init.values())


@dataclass(frozen=True)
class RecurrenceSystem:
    """Simultaneous affine update ``x(n+1) = A x(n) + b`` from ``x(0) = x0``."""

    var_names: tuple
    matrix: tuple
    offset: tuple
    init: tuple

    def __post_init__(self):
        m = len(self.var_names)
        if len(self.matrix) != m or any(len(row) != m for row in self.matrix):
            raise ValueError("matrix shape does not match the variable list")
        if len(self.offset) != m or len(self.init) != m:
            raise ValueError("offset/init length does not match the variable list")

    @property
    def dim(self):
        return len(self.var_names)

    @property
    def parameters(self):
        names = set()
        for value in self.init:
            names |= Polynomial.coerce(value).variables()
        return tuple(sorted(names))

    def step(self, state):
        return tuple(
            sum((a * s for a, s in zip(row, state) if a), start=Polynomial.const(0)) + off
            if isinstance(state[0], Polynomial)
            else sum((a * s for a, s in zip(row, state)), start=Fraction(0)) + off
            for row, off in zip(self.matrix, self.offset)
        )

    def update_polys(self):
        """The update as polynomials over the variable names."""
        xs = [Polynomial.var(v) for v in self.var_names]
        return tuple(
            sum((a * x for a, x in zip(row, xs) if a), start=Polynomial.const(off))
            for row, off in zip(self.matrix, self.offset)
        )


# -- parsing ----------------------------------------------------------------

_ASSIGN_RE = re.compile(r"^(?P<lhs>.+?):=(?P<rhs>.*)$")
_NONDET_RE = re.compile(r"\bnondet\s*\(")


def _strip_comment(line):
    idx = line.find("#")
    return line if idx < 0 else line[:idx]


def _split_tuple(text, lineno, what):
    text = text.strip()
    if not (text.startswith("(") and text.endswith(")")):
        raise ParseError(f"expected parenthesised {what}", line=lineno)
    inner = text[1:-1]
    parts, depth, cur = [], 0, []
    for ch in inner:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    parts = [p.strip() for p in parts]
    if any(not p for p in parts):
        raise ParseError(f"empty element in {what}", line=lineno)
    return parts


def _is_tuple(text):
    text = text.strip()
    return text.startswith("(") and "," in text


def _parse_assignment(text, lineno):
    m = _ASSIGN_RE.match(text.strip())
    if not m:
        raise ParseError("expected an assignment 'lhs := rhs'", line=lineno)
    lhs, rhs = m.group("lhs").strip(), m.group("rhs").strip()
    if _is_tuple(lhs):
        targets = _split_tuple(lhs, lineno, "targets")
        exprs = _split_tuple(rhs, lineno, "values")
        if len(targets) != len(exprs):
            raise ParseError("tuple assignment arity mismatch", line=lineno)
    else:
        targets, exprs = [lhs], [rhs]
    for t in targets:
        if not is_identifier(t):
            raise ParseError(f"invalid assignment target {t!r}", line=lineno)
    if len(set(targets)) != len(targets):
        raise ParseError("duplicate target in tuple assignment", line=lineno)
    return targets, exprs


def _parse_expr(text, lineno, variables=None):
    try:
        return parse_poly(text, variables)
    except ParseError as exc:
        raise ParseError(str(exc), position=exc.position, line=lineno) from None
    except UnknownVariable as exc:
        raise UnknownVariable(f"line {lineno}: {exc}") from None


def parse_loop(text):
    lines = [(i + 1, _strip_comment(raw).rstrip()) for i, raw in enumerate(text.splitlines())]
    lines = [(n, l) for n, l in lines if l.strip()]
    if not lines:
        raise ParseError("empty loop file", line=1)

    lineno, first = lines[0]
    m = re.match(r"^\s*vars\s*:(.*)$", first)
    if not m:
        raise ParseError("loop file must start with 'vars: ...'", line=lineno)
    names = [v.strip() for v in m.group(1).split(",")]
    if not names or any(not is_identifier(v) for v in names):
        raise ParseError("invalid variable list", line=lineno)
    if len(set(names)) != len(names):
        raise ParseError("duplicate variable in declaration", line=lineno)
    declared = set(names)

    init = {}
    idx = 1
    while idx < len(lines) and not re.match(r"^\s*while\b", lines[idx][1]):
        lineno, text = lines[idx]
        targets, exprs = _parse_assignment(text, lineno)
        for target, expr in zip(targets, exprs):
            if target not in declared:
                raise UnknownVariable(f"line {lineno}: {target!r} is not declared")
            value = _parse_expr(expr, lineno)
            if not value.is_constant():
                ident = expr.strip()
                if not is_identifier(ident):
                    raise ParseError(
                        f"initial value of {target} must be a rational or a parameter name",
                        line=lineno,
                    )
                if ident in declared:
                    raise ParseError(
                        f"initial value of {target} refers to program variable {ident}",
                        line=lineno,
                    )
            init[target] = value
        idx += 1
    if idx >= len(lines):
        raise ParseError("missing 'while' header", line=lines[-1][0])

    lineno, header = lines[idx]
    hm = re.match(r"^\s*while\s+(?P<cond>.*):\s*$", header) or re.match(
        r"^\s*while(?P<cond>):\s*$", header
    )
    if not hm:
        raise ParseError("expected 'while <guard>:'", line=lineno)
    guard = hm.group("cond").strip() or "true"
    if guard != "true":
        warnings.warn(f"loop guard {guard!r} is ignored", GuardIgnoredWarning, stacklevel=2)
    idx += 1

    body = []
    for lineno, text in lines[idx:]:
        if text.strip() == "end" and not text[0].isspace():
            continue
        if not text[0].isspace():
            raise ParseError("loop body statements must be indented", line=lineno)
        targets, exprs = _parse_assignment(text, lineno)
        polys = []
        for target, expr in zip(targets, exprs):
            if target not in declared:
                raise UnknownVariable(f"line {lineno}: {target!r} is not declared")
            if _NONDET_RE.search(expr):
                raise NondeterministicUpdate(
                    f"line {lineno}: nondeterministic assignment to {target} is not supported"
                )
            poly = _parse_expr(expr, lineno, declared)
            if poly.total_degree > 1:
                raise NonAffineUpdate(f"line {lineno}: {target} := {expr.strip()} is not affine")
            polys.append(poly)
        body.append(Assignment(tuple(targets), tuple(polys)))

    taken = set(declared)
    for value in init.values():
        taken |= value.variables()
    for v in names:
        if v not in init:
            param = fresh_name(f"{v}0", taken)
            taken.add(param)
            init[v] = Polynomial.var(param)
    return LoopProgram(tuple(names), {v: init[v] for v in names}, tuple(body), guard)


def _display_order(names):
    return MonomialOrder("grevlex", tuple(names))


def format_expr(poly, names):
    extra = sorted(poly.variables() - set(names))
    return poly.to_str(_display_order(list(names) + extra))


def print_loop(loop):
    """Canonical text form; ``parse_loop(print_loop(L)) == L``."""
    names = loop.vars
    lines = [f"vars: {', '.join(names)}"]
    inits = [format_expr(loop.init[v], names) for v in names]
    if len(names) == 1:
        lines.append(f"{names[0]} := {inits[0]}")
    elif names:
        lines.append(f"({', '.join(names)}) := ({', '.join(inits)})")
    lines.append(f"while {loop.guard}:")
    for asg in loop.body:
        exprs = [format_expr(e, names) for e in asg.exprs]
        if len(asg.targets) == 1:
            lines.append(f"    {asg.targets[0]} := {exprs[0]}")
        else:
            lines.append(f"    ({', '.join(asg.targets)}) := ({', '.join(exprs)})")
    return "\n".join(lines) + "\n"


# -- semantics --------------------------------------------------------------

def body_effect(loop):
    """Forward-substitute the body: each variable's new value over old values."""
    state = {v: Polynomial.var(v) for v in loop.vars}
    for asg in loop.body:
        new = [substitute(e, state) for e in asg.exprs]
        for target, value in zip(asg.targets, new):
            state[target] = value
    return state


def to_simultaneous(loop):
    effect = body_effect(loop)
    names = loop.vars
    matrix = []
    offset = []
    for v in names:
        poly = effect[v]
        row = []
        for w in names:
            row.append(poly.coefficient({w: 1}))
        matrix.append(tuple(row))
        offset.append(poly.constant)
    return RecurrenceSystem(
        tuple(names), tuple(matrix), tuple(offset), tuple(loop.init[v] for v in names)
    )


def run_body(loop, state):
    """Execute the body once, sequentially, on a concrete state dict."""
    state = dict(state)
    for asg in loop.body:
        values = []
        for e in asg.exprs:
            total = Fraction(0)
            for mono, coeff in e.items():
                term = coeff
                for name, exp in mono:
                    term *= state[name] ** exp
                total += term
            values.append(total)
        for target, value in zip(asg.targets, values):
            state[target] = value
    return state


def numeric_init(sys):
    values = []
    for name, value in zip(sys.var_names, sys.init):
        value = Polynomial.coerce(value)
        if not value.is_constant():
            raise SymbolicInitial(f"initial value of {name} is symbolic ({value})")
        values.append(value.constant)
    return tuple(values)


def interpret(sys, n):
    """Exact state after ``n`` simultaneous updates."""
    if n < 0:
        raise ValueError("iteration count must be non-negative")
    state = numeric_init(sys)
    for _ in range(n):
        state = sys.step(state)
    return state


def trajectory(sys, count, start=None):
    """States for n = 0 .. count-1 (numeric or polynomial)."""
    if start is None:
        state = tuple(Polynomial.coerce(v) for v in sys.init)
        if all(v.is_constant() for v in state):
            state = tuple(v.constant for v in state)
    else:
        state = tuple(start)
    out = []
    for _ in range(count):
        out.append(state)
        state = sys.step(state)
    return out


# -- invariant files --------------------------------------------------------

def _invariant_lines(text):
    for i, raw in enumerate(text.splitlines()):
        line = _strip_comment(raw).strip()
        if line:
            yield i + 1, line


def parse_invariants(text, variables=None):
    """Parse one polynomial or ``p = q`` equation per line into polynomials."""
    return read_invariants(text, variables)[1]


def read_invariants(text, variables=None):
    """Return ``(variable order, polynomials)`` for an invariant file.

    An optional leading ``vars: ...`` line fixes the variable order; otherwise
    variables are ordered by first appearance.
    """
    declared = None if variables is None else list(variables)
    polys = []
    order = []
    for lineno, line in _invariant_lines(text):
        m = re.match(r"^vars\s*:(.*)$", line)
        if m:
            if polys or declared is not None and variables is None:
                raise ParseError("'vars:' must be the first line", line=lineno)
            declared = [v.strip() for v in m.group(1).split(",")]
            if any(not is_identifier(v) for v in declared):
                raise ParseError("invalid variable list", line=lineno)
            continue
        sides = line.split("=")
        if len(sides) > 2:
            raise ParseError("at most one '=' per line", line=lineno)
        allowed = None if declared is None else set(declared)
        polys_side = [_parse_expr(s, lineno, allowed) for s in sides]
        poly = polys_side[0] - polys_side[1] if len(polys_side) == 2 else polys_side[0]
        if poly.is_zero():
            raise EmptyInvariant(f"line {lineno}: invariant {line!r} is the zero polynomial")
        for kind, value, _ in tokenize(line.replace("=", " ")):
            if kind == "ident" and value not in order:
                order.append(value)
        polys.append(poly)
    if declared is not None:
        order = declared
    return order, polys
