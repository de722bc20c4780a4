"""Polynomial invariant ideals of affine single-path loops."""

import time
from dataclasses import dataclass, field

from .cfinite import closed_forms
from .errors import SymbolicInitial
from .groebner import (
    DEFAULT_STEP_BUDGET,
    IdealBasis,
    buchberger,
    eliminate,
    intersect_ideals,
    normal_form,
)
from .loopfront import LoopProgram, interpret, to_simultaneous
from .polycore import MonomialOrder, Polynomial, fresh_name, poly_eval, substitute


@dataclass(frozen=True)
class InvariantReport:
    basis: IdealBasis
    closed_forms: object
    valid_from: int
    diagnostics: dict = field(default_factory=dict)


def invariant_ideal(loop, budget=DEFAULT_STEP_BUDGET):
    """All polynomial equalities holding at every iteration of ``loop``."""
    timings = {}
    t0 = time.perf_counter()
    sys = to_simultaneous(loop) if isinstance(loop, LoopProgram) else loop
    cf = closed_forms(sys)
    timings["closed_forms"] = (time.perf_counter() - t0) * 1000

    keep = tuple(sys.var_names) + tuple(sys.parameters)
    taken = set(keep) | {cf.counter} | set(cf.exp_vars)
    inverses = []
    for u in cf.exp_vars:
        name = fresh_name(f"{u}inv", taken)
        taken.add(name)
        inverses.append(name)

    gens = [Polynomial.var(v) - cf.forms[v] for v in sys.var_names]
    gens += list(cf.relations)
    # u * u^-1 = 1 makes lattice-basis binomials generate the full lattice ideal
    gens += [Polynomial.var(u) * Polynomial.var(w) - 1 for u, w in zip(cf.exp_vars, inverses)]
    drop = (cf.counter,) + tuple(cf.exp_vars) + tuple(inverses)

    t1 = time.perf_counter()
    basis = eliminate(gens, drop, keep, budget)
    if cf.valid_from:
        for k in range(cf.valid_from):
            state = interpret(sys, k)
            point = buchberger(
                [Polynomial.var(v) - s for v, s in zip(sys.var_names, state)],
                MonomialOrder("grevlex", keep),
            )
            basis = intersect_ideals(basis, point, budget)
    timings["elimination"] = (time.perf_counter() - t1) * 1000

    diagnostics = {
        "eigenvalues": [(lam, mult) for lam, mult in cf.eigenvalues],
        "relations": [str(r) for r in cf.relations],
        "timings_ms": timings,
    }
    return InvariantReport(basis, cf, cf.valid_from, diagnostics)


def check_inductive(p, sys, basis=None):
    """``p`` holds initially and is preserved by one step modulo ``basis``."""
    p = Polynomial.coerce(p)
    if isinstance(sys, LoopProgram):
        sys = to_simultaneous(sys)
    if basis is None:
        basis = buchberger([p]) if not p.is_zero() else IdealBasis((), MonomialOrder("grevlex"))
    init = {v: Polynomial.coerce(x) for v, x in zip(sys.var_names, sys.init)}
    if not substitute(p, init).is_zero():
        return False
    update = dict(zip(sys.var_names, sys.update_polys()))
    stepped = substitute(p, update)
    if basis.is_zero():
        return stepped.is_zero()
    return normal_form(stepped, basis).is_zero()


def first_failure(p, loop, iters):
    """Smallest n <= iters where ``p`` does not vanish, or None."""
    p = Polynomial.coerce(p)
    sys = to_simultaneous(loop) if isinstance(loop, LoopProgram) else loop
    state = interpret(sys, 0)
    for n in range(iters + 1):
        if poly_eval(p, dict(zip(sys.var_names, state))) != 0:
            return n
        state = sys.step(state)
    return None


def oracle_check(p, loop, iters):
    """True iff ``p`` vanishes on the concrete states for n = 0..iters."""
    return first_failure(p, loop, iters) is None


def concretize(loop, values):
    """Replace symbolic initial parameters by rationals."""
    init = {v: substitute(x, {k: Polynomial.const(c) for k, c in values.items()})
            for v, x in loop.init.items()}
    for v, x in init.items():
        if not x.is_constant():
            raise SymbolicInitial(f"initial value of {v} is still symbolic ({x})")
    return LoopProgram(loop.vars, init, loop.body, loop.guard, loop.auxiliary)
