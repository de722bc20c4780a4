"""Acceptance criteria 1-7.  Each prints one PASS/FAIL line in the summary.

Run alone with ``pytest tests/test_acceptance.py`` or ``python tests/test_acceptance.py``.
"""

import random
import time
import warnings
from fractions import Fraction as F
from itertools import combinations

import pytest

from polyloop.cfinite import closed_forms
from polyloop.cli import EXIT_ANALYSIS, EXIT_USAGE, main
from polyloop.errors import IrrationalEigenvalue, Unsat, UsageError
from polyloop.groebner import buchberger, ideal_member, normal_form, s_polynomial
from polyloop.invgen import first_failure, invariant_ideal, oracle_check
from polyloop.loopfront import Assignment, LoopProgram, parse_loop, read_invariants, to_simultaneous, trajectory
from polyloop.loopsynth import (
    TemplateConfig,
    build_pcp,
    build_template,
    pack_model,
    solve_builtin,
    synthesize,
    verify_model,
)
from polyloop.polycore import Polynomial, parse_poly, poly_eval, substitute

from conftest import LOOPS, load
from randsys import random_systems
from synthgen import solvable_instances
from test_loopsynth import odd_sum3_system, grid_models, model_set, random_pcp

P = parse_poly
XY2 = [P("x - y^2")]
ODD_SUM = "vars: x, y\n(x, y) := (0, 0)\nwhile true:\n    x := x + 2*y + 1\n    y := y + 1\n"


def criterion(n, title):
    return pytest.mark.criterion(n, title)


def cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def both_ways(basis, gens):
    return all(ideal_member(g, basis) for g in gens) and all(
        ideal_member(b, buchberger(gens)) for b in basis)


# -- 1 ----------------------------------------------------------------------

@criterion(1, "squares loop: invariant ideal and closed forms, exact, < 1 s")
def test_c1_squares_ideal():
    start = time.perf_counter()
    with pytest.warns(UserWarning):
        loop = load("squares.loop")
    rep = invariant_ideal(loop)
    elapsed = time.perf_counter() - start
    assert both_ways(rep.basis, [P("x - y^2"), P("z - 2*y")])
    n = Polynomial.var(rep.closed_forms.counter)
    assert rep.closed_forms.forms == {"x": n ** 2, "z": 2 * n, "y": n}
    assert elapsed < 1.0


@criterion(1, "squares loop: invariant ideal and closed forms, exact, < 1 s")
def test_c1_squares_symbolic_closed_forms():
    loop = load("symbolic.loop")
    start = time.perf_counter()
    cf = closed_forms(to_simultaneous(loop))
    elapsed = time.perf_counter() - start
    n = Polynomial.var(cf.counter)
    assert set(loop.parameters) == {"x0", "z0", "y0"}
    x0, z0, y0 = P("x0"), P("z0"), P("y0")
    assert cf.forms["z"] == z0 + 2 * n
    assert cf.forms["y"] == y0 + n
    # x also carries z0*n; it reduces to x0 + n^2 on the loop's own z0 = 0
    assert cf.forms["x"] == x0 + n ** 2 + z0 * n
    assert substitute(cf.forms["x"], {"z0": Polynomial.const(0)}) == x0 + n ** 2
    assert elapsed < 1.0


# -- 2 ----------------------------------------------------------------------

@criterion(2, "synthesis round trip for x - y^2, s = 2, builtin bound 2, < 30 s")
def test_c2_roundtrip(capsys):
    start = time.perf_counter()
    res = synthesize(XY2, ["x", "y"], TemplateConfig(2), solver="builtin", bound=2)
    elapsed = time.perf_counter() - start
    assert res.loops
    for item in res.loops:
        assert ideal_member(XY2[0], invariant_ideal(item.loop).basis)
        assert oracle_check(XY2[0], item.loop, 30)
    assert elapsed < 30.0
    code, out, _ = cli(capsys, "synth", LOOPS / "xy2.inv", "--size", "2", "--bound", "2")
    assert code == 0
    synthesized = parse_loop(out)
    assert ideal_member(XY2[0], invariant_ideal(synthesized).basis)
    assert oracle_check(XY2[0], synthesized, 30)


# -- 3 ----------------------------------------------------------------------

@criterion(3, "odd-sum loop enumerated; three-variable odd-sum loop packs and verifies")
def test_c3_odd_sum_enumerated():
    cfg = TemplateConfig(2, fixed_init={"x": 0, "y": 0})
    res = synthesize(XY2, ["x", "y"], cfg, bound=2, enumerate_all=True)
    assert ODD_SUM in {item.text for item in res.loops}


@criterion(3, "odd-sum loop enumerated; three-variable odd-sum loop packs and verifies")
def test_c3_odd_sum3_packed():
    T = build_template(["x", "y"], TemplateConfig(3))
    pcp = build_pcp(T, XY2)
    model = pack_model(T, pcp, odd_sum3_system())
    assert model is not None and verify_model(pcp, model)


# -- 4 ----------------------------------------------------------------------

@criterion(4, "repair: broken loop fails at n = 0, both odd-sum loops pass")
def test_c4_repair(capsys, broken, odd_sum, odd_sum3):
    assert first_failure(XY2[0], broken, 30) == 0
    for good in (odd_sum, odd_sum3):
        assert oracle_check(XY2[0], good, 30)
        assert ideal_member(XY2[0], invariant_ideal(good).basis)
    code, out, _ = cli(capsys, "check", LOOPS / "broken.loop", "--invariant", "x - y^2")
    assert code == 0 and "oracle FAIL at n=0" in out and "ideal FAIL" in out
    for name in ("odd_sum.loop", "odd_sum3.loop"):
        code, out, _ = cli(capsys, "check", LOOPS / name, "--invariant", "x - y^2")
        assert code == 0 and "oracle PASS (n <= 30)" in out and "ideal PASS" in out


# -- 5 ----------------------------------------------------------------------

@criterion(5, "exponential loop: y - x^2 via u2 - u1^2, oracle n <= 20")
def test_c5_exponentials():
    loop = load("powers.loop")
    rep = invariant_ideal(loop)
    assert ideal_member(P("y - x^2"), rep.basis)
    cf = rep.closed_forms
    assert cf.roots == (2, 4)
    u1, u2 = (Polynomial.var(u) for u in cf.exp_vars)
    assert ideal_member(u2 - u1 ** 2, buchberger(cf.relations))
    assert oracle_check(P("y - x^2"), loop, 20)
    for n, state in enumerate(trajectory(to_simultaneous(loop), 21)):
        assert state == (F(2) ** n, F(4) ** n)


# -- 6 ----------------------------------------------------------------------

SUITE_START = {}


def _suite_clock():
    SUITE_START.setdefault("t", time.perf_counter())
    return time.perf_counter() - SUITE_START["t"]


def _random_generators(rng):
    names = ["x", "y", "z"]
    gens = []
    for _ in range(rng.randint(1, 3)):
        p = Polynomial.const(rng.randint(-2, 2))
        for _ in range(rng.randint(1, 3)):
            term = Polynomial.const(rng.choice([-2, -1, 1, 3]))
            for _ in range(rng.randint(1, 2)):
                term = term * Polynomial.var(rng.choice(names))
            p = p + term
        gens.append(p)
    return gens


@criterion(6, "property suites (a)-(d), total < 5 min")
def test_c6a_spolys_reduce():
    _suite_clock()
    rng = random.Random(60)
    bases = [buchberger(_random_generators(rng)) for _ in range(30)]
    for sys in random_systems(61, 10):
        bases.append(invariant_ideal(loop_of(sys)).basis)
    for G in bases:
        for f, g in combinations(G.generators, 2):
            assert normal_form(s_polynomial(f, g, G.order), G).is_zero()


def loop_of(sys):
    names = tuple(sys.var_names)
    return LoopProgram(names, dict(zip(names, sys.init)), (Assignment(names, sys.update_polys()),))


@criterion(6, "property suites (a)-(d), total < 5 min")
def test_c6b_closed_forms_agree():
    _suite_clock()
    systems = random_systems(62, 50)
    assert all(len(s.var_names) <= 3 for s in systems)
    for sys in systems:
        cf = closed_forms(sys)
        for n, state in enumerate(trajectory(sys, 26)):
            if n < cf.valid_from:
                continue
            env = {cf.counter: F(n)}
            env.update({u: F(lam) ** n for u, lam in zip(cf.exp_vars, cf.roots)})
            assert tuple(poly_eval(cf.forms[v], env) for v in sys.var_names) == state


@criterion(6, "property suites (a)-(d), total < 5 min")
def test_c6c_synthesis_soundness():
    _suite_clock()
    for sys, invariants, _ in solvable_instances(63, 20):
        res = synthesize(list(invariants), sys.var_names, TemplateConfig(len(sys.var_names)))
        assert res.loops
        for item in res.loops:
            basis = invariant_ideal(item.loop).basis
            for p in invariants:
                assert ideal_member(p, basis)
                assert oracle_check(p, item.loop, 30)


@criterion(6, "property suites (a)-(d), total < 5 min")
def test_c6d_builtin_matches_grid():
    _suite_clock()
    rng = random.Random(64)
    for _ in range(30):
        pcp = random_pcp(rng, rng.randint(1, 6))
        assert len(pcp.unknowns) <= 6
        try:
            found = model_set(solve_builtin(pcp, 2, enumerate_all=True, max_models=10 ** 6),
                              pcp.unknown_names())
        except Unsat:
            found = set()
        assert found == grid_models(pcp, 2)
    assert _suite_clock() < 300.0


# -- 7 ----------------------------------------------------------------------

@criterion(7, "limitations: irrational eigenvalues and unit-ideal input rejected")
def test_c7_limitations(capsys):
    with pytest.raises(IrrationalEigenvalue):
        invariant_ideal(load("fib.loop"))
    code, _, err = cli(capsys, "invgen", LOOPS / "fib.loop")
    assert code == EXIT_ANALYSIS and "IrrationalEigenvalue" in err
    names, polys = read_invariants((LOOPS / "unit.inv").read_text())
    with pytest.raises(UsageError):
        synthesize(polys)
    code, _, err = cli(capsys, "synth", LOOPS / "unit.inv")
    assert code == EXIT_USAGE and "unit ideal" in err
    # Constraint counts are reported for information only.
    T = build_template(["x", "y"], TemplateConfig(2))
    pcp = build_pcp(T, XY2)
    print(f"note: x - y^2, s = 2 gives {len(pcp.cases)} cases over {len(pcp.unknowns)} unknowns")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
