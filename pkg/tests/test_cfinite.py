import random
from fractions import Fraction

import pytest

from polyloop.cfinite import (
    char_poly,
    closed_forms,
    exponent_lattice,
    exponent_relations,
    homogenize,
    local_minimal_polynomial,
)
from polyloop.errors import IrrationalEigenvalue, SymbolicInitial
from polyloop.lattice import hermite_normal_form, integer_kernel
from polyloop.loopfront import RecurrenceSystem, interpret, to_simultaneous, trajectory
from polyloop.polycore import Polynomial, parse_poly, poly_eval, substitute

from randsys import random_systems

P = parse_poly
F = Fraction


def system(matrix, offset, init, names=None):
    names = names or ("x", "y", "z")[:len(matrix)]
    return RecurrenceSystem(
        names,
        tuple(tuple(F(a) for a in row) for row in matrix),
        tuple(F(b) for b in offset),
        tuple(Polynomial.coerce(v) for v in init),
    )


def assert_oracle(sys, cf, upto=25):
    for n in range(cf.valid_from, cf.valid_from + upto + 1):
        assert cf.evaluate(n) == interpret(sys, n)


def assert_shift_identity(sys, cf):
    shift = {cf.counter: Polynomial.var(cf.counter) + 1}
    for u, lam in zip(cf.exp_vars, cf.roots):
        shift[u] = lam * Polynomial.var(u)
    for i, v in enumerate(sys.var_names):
        lhs = substitute(cf.forms[v], shift)
        rhs = Polynomial.const(sys.offset[i])
        for a, w in zip(sys.matrix[i], sys.var_names):
            rhs = rhs + a * cf.forms[w]
        assert lhs == rhs


def test_homogenize_counter():
    h = homogenize(system([[1]], [1], [0]))
    assert h.matrix == ((1, 1), (0, 1))
    assert h.offset == (0, 0)
    assert h.init == (0, 1)


def test_homogenize_zero_offset():
    h = homogenize(system([[2, 1], [0, 3]], [0, 0], [1, 1]))
    assert h.matrix == ((2, 1, 0), (0, 3, 0), (0, 0, 1))


def test_homogenize_squares_trajectory(squares):
    sys = to_simultaneous(squares)
    h = homogenize(sys)
    for n, state in enumerate(trajectory(h, 11)):
        assert state[:3] == interpret(sys, n) and state[3] == 1


def test_char_poly_examples():
    cp = char_poly([[1, 0], [0, 1]])
    assert cp.factors == ((1, 2),) and cp.residual == (1,)
    cp = char_poly([[2, 0], [0, 4]])
    assert cp.factors == ((2, 1), (4, 1))
    cp = char_poly([[0, 1], [1, 1]])
    assert cp.factors == ()
    assert cp.residual_polynomial() == P("lambda^2 - lambda - 1")


def test_char_poly_rational_roots():
    cp = char_poly([[F(1, 2), 1], [0, F(-2, 3)]])
    assert cp.factors == ((F(-2, 3), 1), (F(1, 2), 1))


def test_cayley_hamilton_random():
    rng = random.Random(11)
    for _ in range(30):
        n = rng.randint(1, 4)
        A = [[F(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(n)] for _ in range(n)]
        coeffs = char_poly(A).coefficients
        acc = [[F(0)] * n for _ in range(n)]
        for c in reversed(coeffs):
            acc = [[sum(acc[i][k] * A[k][j] for k in range(n)) + (c if i == j else 0)
                    for j in range(n)] for i in range(n)]
        assert all(v == 0 for row in acc for v in row)


def test_local_minimal_polynomial():
    # orbit of e1 under diag(2, 3) only sees the eigenvalue 2
    assert local_minimal_polynomial([[F(2), F(0)], [F(0), F(3)]], [F(1), F(0)]) == (-2, 1)


def test_closed_forms_squares(squares):
    sys = to_simultaneous(squares)
    cf = closed_forms(sys)
    n = Polynomial.var(cf.counter)
    assert cf.forms == {"x": n ** 2, "z": 2 * n, "y": n}
    assert cf.roots == () and cf.exp_vars == () and cf.valid_from == 0


def test_closed_forms_squares_symbolic():
    sys = system([[1, 1, 0], [0, 1, 0], [0, 0, 1]], [1, 2, 1], ["x0", "z0", "y0"],
                 ("x", "z", "y"))
    cf = closed_forms(sys)
    n = Polynomial.var(cf.counter)
    assert cf.forms["x"] == P("x0") + n ** 2 + P("z0") * n
    assert cf.forms["z"] == P("z0") + 2 * n
    assert cf.forms["y"] == P("y0") + n


def test_closed_forms_geometric():
    cf = closed_forms(system([[2]], [0], [1]))
    assert cf.roots == (2,)
    assert cf.forms["x"] == Polynomial.var(cf.exp_vars[0])


def test_closed_forms_two_geometrics():
    sys = system([[2, 0], [0, 4]], [0, 0], [1, 1])
    cf = closed_forms(sys)
    assert cf.roots == (2, 4)
    assert cf.forms == {"x": P("u1"), "y": P("u2")}
    assert cf.relations == (P("u1^2 - u2"),)
    assert_oracle(sys, cf, 10)


def test_closed_forms_irrational():
    with pytest.raises(IrrationalEigenvalue) as info:
        closed_forms(system([[0, 1], [1, 1]], [0, 0], [0, 1]))
    assert info.value.residual == P("lambda^2 - lambda - 1")


def test_closed_forms_zero_eigenvalue_unrolls():
    sys = system([[0, 1], [0, 0]], [0, 1], [5, 7])
    cf = closed_forms(sys)
    assert cf.valid_from >= 1
    assert_oracle(sys, cf, 10)


def test_closed_forms_zero_eigenvalue_symbolic():
    with pytest.raises(SymbolicInitial):
        closed_forms(system([[0, 1], [0, 0]], [0, 0], ["a", "b"]))


def test_exponent_relations_examples():
    assert exponent_relations([F(2), F(4)]) == [P("u1^2 - u2")]
    assert exponent_relations([F(2), F(3)]) == []
    assert exponent_relations([F(-1)]) == [P("u1^2 - 1")]


def test_exponent_relations_mixed_signs():
    roots = [F(-2), F(4), F(1, 2)]
    rels = exponent_relations(roots)
    assert rels
    for rel in rels:
        for n in range(11):
            env = {f"u{j + 1}": lam ** n for j, lam in enumerate(roots)}
            assert poly_eval(rel, env) == 0


def test_lattice_vectors_in_kernel():
    roots = [F(2), F(8), F(6), F(3)]
    for vec in exponent_lattice(roots):
        value = F(1)
        for lam, e in zip(roots, vec):
            value *= lam ** e
        assert value == 1


def test_integer_kernel_and_hnf():
    K = integer_kernel([[1, 2, 3]], 3)
    assert len(K) == 2
    assert all(a + 2 * b + 3 * c == 0 for a, b, c in K)
    H = hermite_normal_form([[2, 4], [1, 3]])
    assert H == [[1, 1], [0, 2]]


# -- properties -------------------------------------------------------------

@pytest.mark.parametrize("sys", random_systems(5, 40), ids=lambda s: str(s.matrix))
def test_random_systems(sys):
    cf = closed_forms(sys)
    assert_oracle(sys, cf)
    assert_shift_identity(sys, cf)
    for rel in cf.relations:
        for n in range(11):
            env = {u: lam ** n for u, lam in zip(cf.exp_vars, cf.roots)}
            assert poly_eval(rel, env) == 0


@pytest.mark.parametrize("sys", random_systems(6, 10), ids=lambda s: str(s.matrix))
def test_random_systems_full_charpoly(sys):
    cf = closed_forms(sys, use_orbit=False)
    assert_oracle(sys, cf)
