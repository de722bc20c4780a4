"""Turning PCP models back into loops, and checking models exactly."""

from fractions import Fraction

from ..cfinite import closed_forms
from ..errors import MissingAssignment, NonRationalModel
from ..loopfront import Assignment, LoopProgram, RecurrenceSystem
from ..polycore import Monomial, Polynomial, collect, fresh_name, poly_eval
from .search import Model
from .template import root_values


def _value(poly, values):
    poly = Polynomial.coerce(poly)
    if poly.is_constant():
        return poly.constant
    (name,) = poly.variables()
    v = values.get(name)
    if not isinstance(v, (int, Fraction)):
        raise NonRationalModel(name, v)
    return Fraction(v)


def model_recurrence(template, model):
    """The recurrence system (simultaneous form) selected by ``model``."""
    vals = model.values
    matrix = tuple(tuple(_value(b, vals) for b in row) for row in template.matrix)
    offset = tuple(_value(b, vals) for b in template.offset)
    init = tuple(Polynomial.const(_value(a, vals)) for a in template.init)
    return RecurrenceSystem(template.vars, matrix, offset, init)


def sequentialize(names, matrix, offset):
    """Sequential assignments realising the simultaneous affine update.

    Returns ``(temps, body)`` where ``temps`` lists ``(temp name, saved var)``
    pairs and ``body`` is a list of :class:`Assignment`.
    """
    s = len(names)
    reads = [{j for j in range(s) if j != i and matrix[i][j]} for i in range(s)]
    saved = {}
    taken = set(names)
    placed = []
    remaining = set(range(s))
    while remaining:
        ready = sorted(
            i for i in remaining
            if not any(i in reads[k] and i not in saved for k in remaining if k != i)
        )
        if ready:
            placed.append(ready[0])
            remaining.discard(ready[0])
            continue
        # every remaining variable is still read by another one: save the most-read
        readers = {
            j: sum(1 for k in remaining if k != j and j in reads[k] and j not in saved)
            for j in remaining if j not in saved
        }
        victim = min(readers, key=lambda j: (-readers[j], j))
        base = "t" if not saved else f"t{len(saved) + 1}"
        temp = fresh_name(base, taken)
        taken.add(temp)
        saved[victim] = temp
    temps = [(saved[j], names[j]) for j in saved]
    body = [Assignment((t,), (Polynomial.var(v),)) for t, v in temps]
    for i in placed:
        expr = Polynomial.const(offset[i])
        for j in range(s):
            if matrix[i][j]:
                src = saved[j] if (j in saved and j != i) else names[j]
                expr = expr + matrix[i][j] * Polynomial.var(src)
        body.append(Assignment((names[i],), (expr,)))
    return temps, body


def model_to_loop(template, model):
    sys = model_recurrence(template, model)
    temps, body = sequentialize(sys.var_names, sys.matrix, sys.offset)
    names = tuple(sys.var_names) + tuple(t for t, _ in temps)
    init = {v: x for v, x in zip(sys.var_names, sys.init)}
    for t, _ in temps:
        init[t] = Polynomial.const(0)
    return LoopProgram(names, init, tuple(body), "true", frozenset(t for t, _ in temps))


def verify_model(pcp, model):
    """Exact re-evaluation of every constraint of the model's case."""
    if not 0 <= model.case < len(pcp.cases):
        return False
    case = pcp.cases[model.case]
    env = {}
    for name in pcp.unknown_names():
        v = model.values.get(name)
        if not isinstance(v, (int, Fraction)):
            return False
        env[name] = Fraction(v)
    try:
        return all(poly_eval(c.poly, env) == 0 for c in case.equalities) and all(
            poly_eval(c.poly, env) != 0 for c in case.disequalities
        )
    except MissingAssignment:
        return False


def _spare_roots(used, count):
    out = []
    cand = 2
    while len(out) < count:
        for v in (Fraction(cand), Fraction(-cand)):
            if v not in used and len(out) < count:
                out.append(v)
                used.add(v)
        cand += 1
    return out


def pack_model(template, pcp, sys):
    """Encode a known recurrence and its closed forms as a template model.

    ``sys`` must range over the template variables with numeric initial
    values.  Returns a Model pointing at the case that matches the root
    coincidence pattern, or None if the loop does not fit the template.
    """
    T = template
    if tuple(sys.var_names) != tuple(T.vars):
        raise ValueError("recurrence variables must match the template variables")
    cf = closed_forms(sys, use_orbit=True)
    if cf.valid_from:
        return None
    symbolic = [r for r in T.roots[1:] if not r.is_constant()]
    if len(cf.roots) > len(symbolic):
        return None
    roots = list(cf.roots) + _spare_roots(set(cf.roots) | {Fraction(1), Fraction(0)},
                                          len(symbolic) - len(cf.roots))
    values = {}

    def put(poly, value):
        if poly.is_constant():
            return poly.constant == value
        (name,) = poly.variables()
        values[name] = Fraction(value)
        return True

    for a, x in zip(T.init, sys.init):
        if not put(a, Polynomial.coerce(x).constant):
            return None
    for row_t, row_v in zip(T.matrix, sys.matrix):
        for b, v in zip(row_t, row_v):
            if not put(b, v):
                return None
    for b, v in zip(T.offset, sys.offset):
        if not put(b, v):
            return None
    for root, lam in zip(symbolic, roots):
        put(root, lam)
    exp_of_root = dict(zip(cf.roots, cf.exp_vars))
    n = cf.counter
    for i, v in enumerate(T.vars):
        parts = collect(cf.forms[v], cf.exp_vars)
        for rho, lam in enumerate(root_values(T, values)):
            if lam == 1:
                part = parts.get(Monomial(), Polynomial())
            elif lam in exp_of_root:
                part = parts.get(Monomial({exp_of_root[lam]: 1}), Polynomial())
            else:
                part = Polynomial()
            if part.total_degree > T.config.degree:
                return None
            for k in range(T.config.degree + 1):
                if not put(T.coeffs[(i, rho, k)], part.coefficient({n: k})):
                    return None
    for idx in range(len(pcp.cases)):
        model = Model(dict(values), idx)
        if verify_model(pcp, model):
            return model
    return Model(dict(values), -1)
