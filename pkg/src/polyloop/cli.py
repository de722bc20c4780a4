"""Command-line interface: ``polyloop {invgen,synth,check,emit-pcp}``.

Exit codes: 0 success, 1 usage or I/O error, 2 analysis error, 3 unsat.
"""

import argparse
import json
import os
import shlex
import sys
import warnings
from fractions import Fraction
from math import gcd, lcm

from . import smtio
from .errors import ParseError, PolyloopError, UnknownVariable, Unsat, UsageError
from .groebner import DEFAULT_STEP_BUDGET, ideal_member
from .invgen import check_inductive, first_failure, invariant_ideal
from .loopfront import parse_loop, read_invariants, to_simultaneous
from .loopsynth import TemplateConfig, build_pcp, build_template, pcp_to_json, synthesize
from .loopsynth.pipeline import check_invariant_input
from .loopsynth.search import DEFAULT_MODEL_CAP, DEFAULT_NODE_BUDGET
from .polycore import MonomialOrder, format_rat, parse_poly

EXIT_OK, EXIT_USAGE, EXIT_ANALYSIS, EXIT_UNSAT = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load_loop(path):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        loop = parse_loop(_read(path))
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return loop


def _assignments(text, what):
    """``x=0,y=1/2`` -> {name: Fraction}."""
    out = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"{what}: expected name=value, got {item!r}")
        try:
            out[name.strip()] = Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"{what}: {value.strip()!r} is not a rational number") from None
    return out


def display_invariant(poly, names):
    """Primitive integer form in lex order over ``names``, leading coefficient positive."""
    extra = sorted(poly.variables() - set(names))
    order = MonomialOrder("lex", tuple(names) + tuple(extra))
    if poly.is_zero():
        return "0"
    coeffs = [c for _, c in poly.items()]
    scale = Fraction(lcm(*(c.denominator for c in coeffs)), gcd(*(c.numerator for c in coeffs)))
    if poly.leading_term(order)[1] < 0:
        scale = -scale
    return (poly * scale).to_str(order)


def _sorted_invariants(basis, names):
    extra = sorted(set().union(*(g.variables() for g in basis.generators)) - set(names))
    order = MonomialOrder("lex", tuple(names) + tuple(extra))
    gens = sorted(basis.generators, key=lambda g: order.key(g.leading_term(order)[0]), reverse=True)
    return [display_invariant(g, names) for g in gens]


# -- invgen -----------------------------------------------------------------

def invgen_report(loop, budget=DEFAULT_STEP_BUDGET, timings=False):
    rep = invariant_ideal(loop, budget)
    cf = rep.closed_forms
    names = list(loop.vars)
    order = MonomialOrder("grevlex", (cf.counter,) + tuple(cf.exp_vars) + tuple(sorted(loop.parameters)))
    out = {
        "invariants": _sorted_invariants(rep.basis, names),
        "closed_forms": {v: cf.forms[v].to_str(order) for v in cf.var_names},
        "eigenvalues": [format_rat(lam) for lam, mult in cf.eigenvalues for _ in range(mult)],
        "valid_from": rep.valid_from,
        "timings_ms": {k: round(v, 3) for k, v in rep.diagnostics["timings_ms"].items()} if timings else {},
    }
    if cf.exp_vars:
        out["exp_bases"] = {u: format_rat(lam) for u, lam in zip(cf.exp_vars, cf.roots)}
    return out


def _print_invgen(rep):
    print("invariants:")
    for p in rep["invariants"]:
        print(f"  {p}")
    if not rep["invariants"]:
        print("  (none)")
    print(f"closed forms (n >= {rep['valid_from']}):")
    for v, f in rep["closed_forms"].items():
        print(f"  {v} = {f}")
    for u, lam in rep.get("exp_bases", {}).items():
        print(f"  where {u} = ({lam})^n")
    print(f"eigenvalues: {', '.join(rep['eigenvalues'])}")
    if rep["timings_ms"]:
        print("timings (ms): " + ", ".join(f"{k} {v}" for k, v in rep["timings_ms"].items()))


def cmd_invgen(args):
    loop = _load_loop(args.loop)
    rep = invgen_report(loop, args.budget, args.timings)
    if args.format == "json":
        print(json.dumps(rep, indent=2))
    else:
        _print_invgen(rep)
    return EXIT_OK


# -- synth / emit-pcp -------------------------------------------------------

def _template_args(p):
    p.add_argument("invariants", help="invariant file ('-' for stdin)")
    p.add_argument("--size", type=int, help="number of loop variables (default: invariant variables)")
    p.add_argument("--roots", type=int, default=1, help="symbolic roots besides 1 (default 1)")
    p.add_argument("--degree", type=int, help="max power of n per root (default: size)")
    p.add_argument("--fix-init", default="", metavar="x=0,y=0", help="fix initial values")
    p.add_argument("--fix", default="", metavar="b1_1=1,...", help="fix template unknowns")
    p.add_argument("--rational", action="store_true", help="rational coefficient domain")


def _template_from(args):
    names, polys = read_invariants(_read(args.invariants))
    polys = check_invariant_input(polys)
    size = args.size if args.size is not None else len(names)
    try:
        cfg = TemplateConfig(
            size, args.roots, args.degree, _assignments(args.fix_init, "--fix-init"),
            _assignments(args.fix, "--fix"), "rational" if args.rational else "integer",
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return names, polys, cfg


def _solver_spec(args):
    cmd = tuple(shlex.split(args.solver_cmd)) if args.solver_cmd else smtio.default_command()
    return smtio.SolverSpec(cmd, args.timeout)


def cmd_synth(args):
    names, polys, cfg = _template_from(args)
    try:
        res = synthesize(
            polys, names, cfg, args.solver, args.bound, args.all, args.max_models,
            args.node_budget, not args.no_roundtrip, _solver_spec(args), args.smt_mode, args.budget,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    for k, item in enumerate(res.loops, 1):
        if len(res.loops) > 1:
            print(f"# loop {k} (case {item.model.case})")
        sys.stdout.write(item.text)
        if k < len(res.loops):
            print()
    if args.emit_loop:
        if len(res.loops) == 1:
            with open(args.emit_loop, "w", encoding="utf-8") as fh:
                fh.write(res.loops[0].text)
        else:
            os.makedirs(args.emit_loop, exist_ok=True)
            for k, item in enumerate(res.loops, 1):
                with open(os.path.join(args.emit_loop, f"loop_{k:04d}.loop"), "w", encoding="utf-8") as fh:
                    fh.write(item.text)
    if res.rejected:
        print(f"warning: {len(res.rejected)} decoded loop(s) failed the round-trip check", file=sys.stderr)
    return EXIT_OK


def cmd_emit_pcp(args):
    names, polys, cfg = _template_from(args)
    try:
        pcp = build_pcp(build_template(names, cfg), polys)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.format == "json":
        files = [("pcp.json", json.dumps(pcp_to_json(pcp), indent=2) + "\n")]
    else:
        docs = smtio.emit_smt(pcp, args.mode)
        if args.mode == "per_case":
            files = [(f"case_{i:03d}.smt2", d) for i, d in enumerate(docs)]
        else:
            files = [("pcp.smt2", docs[0])]
    if args.out is None:
        sys.stdout.write("\n".join(text for _, text in files))
        return EXIT_OK
    os.makedirs(args.out, exist_ok=True)
    for name, text in files:
        with open(os.path.join(args.out, name), "w", encoding="utf-8") as fh:
            fh.write(text)
    print(f"wrote {len(files)} file(s) to {args.out}")
    return EXIT_OK


# -- check ------------------------------------------------------------------

def cmd_check(args):
    loop = _load_loop(args.loop)
    exprs = list(args.invariant or [])
    try:
        polys = [parse_poly(e, set(loop.vars) | set(loop.parameters)) for e in exprs]
        if args.invariants:
            polys += read_invariants(_read(args.invariants), loop.vars)[1]
    except UnknownVariable as exc:
        raise UsageError(f"invariant mentions a variable the loop does not declare: {exc}") from None
    if not polys:
        raise UsageError("give at least one --invariant or --invariants file")
    sys_ = to_simultaneous(loop)
    try:
        basis = invariant_ideal(sys_, args.budget).basis
    except PolyloopError as exc:
        basis = None
        print(f"note: invariant ideal unavailable ({type(exc).__name__})", file=sys.stderr)
    for p in polys:
        ind = "PASS" if check_inductive(p, sys_) else "FAIL"
        if loop.has_numeric_init():
            n = first_failure(p, sys_, args.iters)
            oracle = f"PASS (n <= {args.iters})" if n is None else f"FAIL at n={n}"
        else:
            oracle = "SKIP (symbolic initial values)"
        member = "n/a" if basis is None else ("PASS" if ideal_member(p, basis) else "FAIL")
        print(f"{display_invariant(p, loop.vars)}: inductive {ind}, oracle {oracle}, ideal {member}")
    return EXIT_OK


# -- entry point ------------------------------------------------------------

def build_parser():
    parser = _Parser(prog="polyloop", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("invgen", help="invariant ideal of a loop")
    p.add_argument("loop", help="loop file ('-' for stdin)")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--timings", action="store_true", help="include timings (not reproducible)")
    p.add_argument("--budget", type=int, default=DEFAULT_STEP_BUDGET, help="Groebner step budget")
    p.set_defaults(func=cmd_invgen)

    p = sub.add_parser("synth", help="loops from invariants")
    _template_args(p)
    p.add_argument("--solver", choices=("builtin", "smt"), default="builtin")
    p.add_argument("--bound", type=int, default=2, help="builtin search range [-bound, bound]")
    p.add_argument("--all", action="store_true", help="enumerate all loops")
    p.add_argument("--max-models", type=int, default=DEFAULT_MODEL_CAP)
    p.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET)
    p.add_argument("--no-roundtrip", action="store_true", help="skip the invgen round-trip check")
    p.add_argument("--emit-loop", metavar="PATH", help="write the loop (a directory with --all)")
    p.add_argument("--solver-cmd", help=f"SMT solver command (default ${smtio.SOLVER_ENV} or '{smtio.DEFAULT_SOLVER}')")
    p.add_argument("--timeout", type=float, default=60.0, help="SMT timeout per document (s)")
    p.add_argument("--smt-mode", choices=("per_case", "disjunctive"), default="per_case")
    p.add_argument("--budget", type=int, default=DEFAULT_STEP_BUDGET, help="Groebner step budget")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("check", help="check invariants on a loop")
    p.add_argument("loop")
    p.add_argument("--invariant", action="append", metavar="EXPR")
    p.add_argument("--invariants", metavar="FILE", help="invariant file")
    p.add_argument("--iters", type=int, default=30)
    p.add_argument("--budget", type=int, default=DEFAULT_STEP_BUDGET, help="Groebner step budget")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("emit-pcp", help="write the synthesis PCP without solving")
    _template_args(p)
    p.add_argument("--format", choices=("smt", "json"), default="smt")
    p.add_argument("--mode", choices=("per_case", "disjunctive"), default="per_case")
    p.add_argument("--out", metavar="DIR", help="output directory (default stdout)")
    p.set_defaults(func=cmd_emit_pcp)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Unsat as exc:
        print(f"unsat: {exc}", file=sys.stderr)
        return EXIT_UNSAT
    except (UsageError, ParseError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PolyloopError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
