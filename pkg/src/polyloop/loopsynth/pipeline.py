"""Invariants in, verified loops out."""

from dataclasses import dataclass, field

from ..errors import PolyloopError, Unsat, UsageError
from ..groebner import DEFAULT_STEP_BUDGET, buchberger, ideal_member
from ..invgen import invariant_ideal, oracle_check
from ..loopfront import print_loop
from ..polycore import Polynomial
from .. import smtio
from .decode import model_to_loop, verify_model
from .pcp import build_pcp
from .search import DEFAULT_MODEL_CAP, DEFAULT_NODE_BUDGET, solve_builtin
from .template import TemplateConfig, build_template

ROUNDTRIP_ITERS = 30


@dataclass(frozen=True)
class Synthesized:
    loop: object
    model: object
    text: str


@dataclass(frozen=True)
class SynthesisResult:
    template: object
    pcp: object
    loops: tuple
    models: int = 0
    rejected: tuple = ()
    diagnostics: dict = field(default_factory=dict)


def check_invariant_input(invariants):
    polys = [Polynomial.coerce(p) for p in invariants]
    if not polys or all(p.is_zero() for p in polys):
        raise UsageError("no invariant given")
    if buchberger(polys).is_unit():
        raise UsageError("the invariants generate the unit ideal; no loop can satisfy them")
    return polys


def roundtrip(loop, invariants, iters=ROUNDTRIP_ITERS, budget=DEFAULT_STEP_BUDGET):
    """None if every invariant lies in the loop's invariant ideal and passes the
    oracle, else a short reason."""
    try:
        basis = invariant_ideal(loop, budget).basis
    except PolyloopError as exc:
        return f"invgen failed: {type(exc).__name__}: {exc}"
    for p in invariants:
        if not ideal_member(p, basis):
            return f"{p} is not in the invariant ideal"
        if not oracle_check(p, loop, iters):
            return f"{p} fails on the concrete run"
    return None


def _solve_smt(pcp, spec, mode):
    models = []
    if mode == "disjunctive":
        (doc,) = smtio.emit_smt(pcp, "disjunctive", spec.logic)
        res = smtio.run_solver(doc, spec)
        if res.status == "sat":
            raw = smtio.parse_model(res.values)
            for idx in range(len(pcp.cases)):
                model = type(raw)(raw.values, idx)
                if verify_model(pcp, model):
                    models.append(model)
                    break
        return models, [res.status]
    statuses = []
    for idx, doc in enumerate(smtio.emit_smt(pcp, "per_case", spec.logic)):
        res = smtio.run_solver(doc, spec)
        statuses.append(res.status)
        if res.status == "sat":
            model = smtio.parse_model(res.values, idx)
            # the PCP, not the solver, decides
            if verify_model(pcp, model):
                models.append(model)
    return models, statuses


def synthesize(invariants, variables=None, config=None, solver="builtin", bound=2,
               enumerate_all=False, max_models=DEFAULT_MODEL_CAP,
               node_budget=DEFAULT_NODE_BUDGET, check=True, spec=None, smt_mode="per_case",
               budget=DEFAULT_STEP_BUDGET):
    """Loops whose invariant ideal contains ``invariants``.

    With the builtin solver every model in ``[-bound, bound]`` is found when
    ``enumerate_all`` is set; the SMT backend contributes one model per case.
    Loops are deduplicated by their printed text.  With ``check`` on, a loop is
    only returned after the invgen round-trip succeeds.  Raises Unsat when no
    loop survives.
    """
    polys = check_invariant_input(invariants)
    if variables is None:
        variables = sorted(set().union(*(p.variables() for p in polys)))
    config = config or TemplateConfig(size=len(variables))
    template = build_template(list(variables), config)
    pcp = build_pcp(template, polys)
    diagnostics = {"cases": len(pcp.cases), "unknowns": len(pcp.unknowns)}

    if solver == "builtin":
        models = solve_builtin(pcp, bound, enumerate_all, max_models, node_budget)
    elif solver == "smt":
        models, statuses = _solve_smt(pcp, spec or smtio.SolverSpec(), smt_mode)
        diagnostics["solver_status"] = statuses
        if not models:
            raise Unsat(f"solver found no model (case answers: {', '.join(statuses)})")
    else:
        raise UsageError(f"unknown solver {solver!r}")

    loops, rejected, seen = [], [], set()
    for model in models:
        loop = model_to_loop(template, model)
        text = print_loop(loop)
        if text in seen:
            continue
        seen.add(text)
        reason = roundtrip(loop, polys, budget=budget) if check else None
        if reason is None:
            loops.append(Synthesized(loop, model, text))
        else:
            rejected.append((text, reason))
        if not enumerate_all and loops:
            break
    if not loops:
        raise Unsat("no synthesized loop passed the round-trip check")
    return SynthesisResult(template, pcp, tuple(loops), len(models), tuple(rejected), diagnostics)
