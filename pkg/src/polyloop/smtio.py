"""SMT-LIB2 (QF_NRA) export of PCPs and a subprocess solver client."""

import os
import shlex
import subprocess
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import NonRationalModel, SolverNotFound, SolverProtocolError, SolverTimeout
from .loopsynth.search import Model
from .polycore import default_order

SOLVER_ENV = "POLYLOOP_SMT_SOLVER"
DEFAULT_SOLVER = "z3 -in"


def default_command():
    return tuple(shlex.split(os.environ.get(SOLVER_ENV, DEFAULT_SOLVER)))


@dataclass(frozen=True)
class SolverSpec:
    command: tuple = field(default_factory=default_command)
    timeout: float = 60.0
    logic: str = "QF_NRA"


@dataclass(frozen=True)
class SolverResult:
    status: str
    values: dict = field(default_factory=dict)
    output: str = ""


# -- emission ---------------------------------------------------------------

def smt_rat(value):
    value = Fraction(value)
    mag = -value if value < 0 else value
    text = str(mag.numerator) if mag.denominator == 1 else f"(/ {mag.numerator} {mag.denominator})"
    return f"(- {text})" if value < 0 else text


def smt_term(poly):
    if poly.is_zero():
        return "0"
    parts = []
    for mono, coeff in poly.terms(default_order(poly.variables())):
        factors = [name for name, exp in mono for _ in range(exp)]
        if not factors:
            parts.append(smt_rat(coeff))
        elif coeff == 1 and len(factors) == 1:
            parts.append(factors[0])
        elif coeff == 1:
            parts.append(f"(* {' '.join(factors)})")
        else:
            parts.append(f"(* {smt_rat(coeff)} {' '.join(factors)})")
    return parts[0] if len(parts) == 1 else f"(+ {' '.join(parts)})"


def smt_constraint(poly, equality=True):
    const = poly.constant
    atom = f"(= {smt_term(poly - const)} {smt_rat(-const)})"
    return atom if equality else f"(not {atom})"


def _case_atoms(case):
    return [smt_constraint(c.poly, True) for c in case.equalities] + [
        smt_constraint(c.poly, False) for c in case.disequalities
    ]


def _document(names, asserts, logic, comment=None):
    lines = []
    if comment:
        lines.append(f"; {comment}")
    lines.append(f"(set-logic {logic})")
    lines += [f"(declare-const {n} Real)" for n in names]
    lines += [f"(assert {a})" for a in asserts]
    lines.append("(check-sat)")
    if names:
        lines.append(f"(get-value ({' '.join(names)}))")
    return "\n".join(lines) + "\n"


def emit_smt(pcp, mode="per_case", logic="QF_NRA"):
    """SMT-LIB2 documents for a PCP: one per case, or one disjunction."""
    names = list(pcp.unknown_names())
    if mode == "per_case":
        return [
            _document(names, _case_atoms(case), logic, f"case {i}: {case.label()}")
            for i, case in enumerate(pcp.cases)
        ]
    if mode == "disjunctive":
        conj = []
        for case in pcp.cases:
            atoms = _case_atoms(case)
            if not atoms:
                conj.append("true")
            elif len(atoms) == 1:
                conj.append(atoms[0])
            else:
                conj.append(f"(and {' '.join(atoms)})")
        if not conj:
            asserts = ["false"]
        elif len(conj) == 1:
            asserts = conj
        else:
            asserts = [f"(or {' '.join(conj)})"]
        return [_document(names, asserts, logic, f"{len(pcp.cases)} cases")]
    raise ValueError(f"unknown emission mode {mode!r}")


# -- s-expressions ----------------------------------------------------------

def parse_sexprs(text):
    tokens = []
    cur = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == ";":
            while i < len(text) and text[i] != "\n":
                i += 1
            continue
        if ch == '"':
            j = text.index('"', i + 1)
            tokens.append(text[i:j + 1])
            i = j + 1
            continue
        if ch in "()":
            if cur:
                tokens.append("".join(cur))
                cur = []
            tokens.append(ch)
        elif ch.isspace():
            if cur:
                tokens.append("".join(cur))
                cur = []
        else:
            cur.append(ch)
        i += 1
    if cur:
        tokens.append("".join(cur))
    stack = [[]]
    for tok in tokens:
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if len(stack) == 1:
                raise SolverProtocolError("unbalanced ')' in solver output")
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise SolverProtocolError("unbalanced '(' in solver output")
    return stack[0]


def sexpr_to_str(expr):
    if isinstance(expr, list):
        return "(" + " ".join(sexpr_to_str(e) for e in expr) + ")"
    return expr


# -- solving ----------------------------------------------------------------

def run_solver(doc, spec=None):
    spec = spec or SolverSpec()
    try:
        proc = subprocess.run(
            list(spec.command), input=doc, capture_output=True, text=True, timeout=spec.timeout
        )
    except FileNotFoundError:
        raise SolverNotFound(f"solver executable {spec.command[0]!r} not found") from None
    except subprocess.TimeoutExpired:
        raise SolverTimeout(f"solver did not answer within {spec.timeout} s") from None
    out = proc.stdout
    exprs = parse_sexprs(out)
    if not exprs:
        raise SolverProtocolError(f"empty solver response (stderr: {proc.stderr.strip()!r})")
    head = exprs[0]
    if head in ("unsat", "unknown", "timeout"):
        return SolverResult(head, {}, out)
    if head != "sat":
        raise SolverProtocolError(f"unexpected solver response {sexpr_to_str(head)!r}")
    values = {}
    for expr in exprs[1:]:
        if not isinstance(expr, list) or (expr and expr[0] == "error"):
            raise SolverProtocolError(f"unexpected solver output {sexpr_to_str(expr)!r}")
        for pair in expr:
            if not isinstance(pair, list) or len(pair) != 2 or isinstance(pair[0], list):
                raise SolverProtocolError(f"malformed get-value entry {sexpr_to_str(pair)!r}")
            values[pair[0]] = sexpr_to_str(pair[1])
    return SolverResult("sat", values, out)


def _rational(expr, name):
    if isinstance(expr, str):
        if "?" in expr:
            raise NonRationalModel(name, expr)
        try:
            return Fraction(expr)
        except ValueError:
            raise SolverProtocolError(f"cannot read value {expr!r} of {name}") from None
    if not expr:
        raise SolverProtocolError(f"empty value for {name}")
    head = expr[0]
    if head == "-" and len(expr) == 2:
        return -_rational(expr[1], name)
    if head == "/" and len(expr) == 3:
        den = _rational(expr[2], name)
        if den == 0:
            raise SolverProtocolError(f"division by zero in value of {name}")
        return _rational(expr[1], name) / den
    if head in ("root-obj", "_", "algebraic") or (isinstance(head, list) and head[:2] == ["_", "root-obj"]):
        raise NonRationalModel(name, sexpr_to_str(expr))
    raise SolverProtocolError(f"cannot read value {sexpr_to_str(expr)!r} of {name}")


def parse_value(raw, name="?"):
    exprs = parse_sexprs(raw) if isinstance(raw, str) else [raw]
    if len(exprs) != 1:
        raise SolverProtocolError(f"expected a single value for {name}, got {raw!r}")
    return _rational(exprs[0], name)


def parse_model(raw_values, case=0):
    """Exact rational Model from ``get-value`` output."""
    return Model({name: parse_value(raw, name) for name, raw in raw_values.items()}, case)
