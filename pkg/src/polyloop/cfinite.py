"""Closed forms of affine (C-finite) recurrence systems.

Solutions are written as ``sum_l p_l(n) * u_l`` where ``u_l`` stands for
``lambda_l^n``.  The eigenvalue 1 contributes a plain polynomial in ``n``;
zero eigenvalues are removed by unrolling the recurrence.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt

from .errors import IrrationalEigenvalue, SymbolicInitial
from .lattice import hermite_normal_form, integer_kernel
from .loopfront import RecurrenceSystem, numeric_init, trajectory
from .polycore import Monomial, Polynomial, format_rat, fresh_name, substitute


@dataclass(frozen=True)
class CharPoly:
    """Monic polynomial (coefficients ascending) with its rational factorization."""

    coefficients: tuple
    factors: tuple
    residual: tuple

    @property
    def degree(self):
        return len(self.coefficients) - 1

    def as_polynomial(self, var="lambda"):
        return _univariate(self.coefficients, var)

    def residual_polynomial(self, var="lambda"):
        return _univariate(self.residual, var)


@dataclass(frozen=True)
class ClosedFormSystem:
    counter: str
    roots: tuple
    exp_vars: tuple
    forms: dict
    relations: tuple
    valid_from: int
    var_names: tuple
    eigenvalues: tuple = field(default=())

    def evaluate(self, n, parameters=None):
        """Forms at iteration ``n`` with ``u_j = roots[j]**n``.

        Values are Fractions when no symbolic parameters remain, otherwise
        Polynomials over the parameters.
        """
        env = {k: Polynomial.const(v) for k, v in (parameters or {}).items()}
        env[self.counter] = Polynomial.const(n)
        for u, lam in zip(self.exp_vars, self.roots):
            env[u] = Polynomial.const(Fraction(lam) ** n)
        out = []
        for v in self.var_names:
            value = substitute(self.forms[v], env)
            out.append(value.constant if value.is_constant() else value)
        return tuple(out)


def _univariate(coeffs, var):
    return Polynomial({((var, k),) if k else (): c for k, c in enumerate(coeffs) if c})


# -- linear algebra ---------------------------------------------------------

def _matmul(A, B):
    n, k, m = len(A), len(B), len(B[0])
    return [[sum(A[i][t] * B[t][j] for t in range(k)) for j in range(m)] for i in range(n)]


def homogenize(sys):
    """Fold the offset into an extra component that stays constantly 1."""
    m = sys.dim
    matrix = [list(row) + [off] for row, off in zip(sys.matrix, sys.offset)]
    matrix.append([Fraction(0)] * m + [Fraction(1)])
    name = fresh_name("one", set(sys.var_names))
    return RecurrenceSystem(
        tuple(sys.var_names) + (name,),
        tuple(tuple(Fraction(a) for a in row) for row in matrix),
        (Fraction(0),) * (m + 1),
        tuple(sys.init) + (Polynomial.const(1),),
    )


def faddeev_leverrier(A):
    """Coefficients (ascending, monic) of ``det(lambda*I - A)``."""
    n = len(A)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    M = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        AM = _matmul(A, M) if k > 1 else [[Fraction(0)] * n for _ in range(n)]
        M = [[AM[i][j] + (coeffs[n - k + 1] if i == j else 0) for j in range(n)] for i in range(n)]
        AM = _matmul(A, M)
        coeffs[n - k] = -sum(AM[i][i] for i in range(n)) / k
    return coeffs


def _divisors(n):
    n = abs(n)
    small, large = [], []
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
    return small + large[::-1]


def _horner(coeffs, x):
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _deflate(coeffs, root):
    """Divide by (lambda - root); coefficients ascending."""
    n = len(coeffs) - 1
    out = [Fraction(0)] * n
    acc = Fraction(0)
    for k in range(n, 0, -1):
        acc = acc * root + coeffs[k]
        out[k - 1] = acc
    return out


def factor_rational_roots(coeffs):
    """Split off rational roots (with multiplicity) by the rational-root test."""
    coeffs = [Fraction(c) for c in coeffs]
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    factors = {}
    while len(coeffs) > 1 and coeffs[0] == 0:
        coeffs = coeffs[1:]
        factors[Fraction(0)] = factors.get(Fraction(0), 0) + 1
    if len(coeffs) > 1:
        denom = 1
        for c in coeffs:
            denom = denom * c.denominator // gcd(denom, c.denominator)
        ints = [int(c * denom) for c in coeffs]
        candidates = set()
        for p in _divisors(ints[0]):
            for q in _divisors(ints[-1]):
                candidates.add(Fraction(p, q))
                candidates.add(Fraction(-p, q))
        for cand in sorted(candidates):
            while len(coeffs) > 1 and _horner(coeffs, cand) == 0:
                coeffs = _deflate(coeffs, cand)
                factors[cand] = factors.get(cand, 0) + 1
    lead = coeffs[-1]
    residual = tuple(c / lead for c in coeffs)
    return tuple(sorted(factors.items())), residual


def char_poly(A):
    A = [[Fraction(a) for a in row] for row in A]
    coeffs = faddeev_leverrier(A)
    factors, residual = factor_rational_roots(coeffs)
    return CharPoly(tuple(coeffs), factors, residual)


def _solve_numeric(matrix, rhs):
    """Solve ``matrix @ x = rhs`` exactly; rhs entries may be polynomials."""
    n = len(matrix)
    M = [list(row) for row in matrix]
    R = list(rhs)
    for col in range(n):
        piv = next((i for i in range(col, n) if M[i][col]), None)
        if piv is None:
            raise ArithmeticError("singular system")
        M[col], M[piv] = M[piv], M[col]
        R[col], R[piv] = R[piv], R[col]
        p = M[col][col]
        M[col] = [a / p for a in M[col]]
        R[col] = R[col] * (1 / p)
        for i in range(n):
            if i != col and M[i][col]:
                f = M[i][col]
                M[i] = [a - f * b for a, b in zip(M[i], M[col])]
                R[i] = R[i] - R[col] * f
    return R


def local_minimal_polynomial(A, v):
    """Monic annihilating polynomial of minimal degree for the orbit of ``v``."""
    krylov = [list(v)]
    while True:
        nxt = [sum(a * x for a, x in zip(row, krylov[-1])) for row in A]
        k = len(krylov)
        # find c with sum_i c_i * krylov[i] == nxt, via elimination on the columns
        rows = len(v)
        aug = [[krylov[j][r] for j in range(k)] + [nxt[r]] for r in range(rows)]
        sol = _least_solution(aug, k)
        if sol is not None:
            return tuple([-c for c in sol] + [Fraction(1)])
        krylov.append(nxt)


def _least_solution(aug, k):
    """Solve an (over/under-determined) consistent system, or return None."""
    rows = [list(r) for r in aug]
    pivots = []
    r = 0
    for c in range(k):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        rows[r] = [a / p for a in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    if any(row[k] for row in rows[r:]):
        return None
    sol = [Fraction(0)] * k
    for i, c in enumerate(pivots):
        sol[c] = rows[i][k]
    return sol


# -- closed forms -----------------------------------------------------------

def closed_forms(sys, counter=None, exp_prefix="u", use_orbit=True):
    """Closed-form solution of ``sys``.

    With a numeric initial state the roots come from the minimal polynomial of
    the initial vector's orbit (so eigenvalues the trajectory never excites do
    not matter); with symbolic initial values the full characteristic
    polynomial is used.
    """
    hom = homogenize(sys)
    A = [list(row) for row in hom.matrix]
    try:
        x0 = numeric_init(hom)
    except SymbolicInitial:
        x0 = None
    if x0 is not None and use_orbit:
        coeffs = local_minimal_polynomial(A, x0)
        factors, residual = factor_rational_roots(coeffs)
    else:
        cp = char_poly(A)
        factors, residual = cp.factors, cp.residual
    if len(residual) > 1:
        raise IrrationalEigenvalue(_univariate(residual, "lambda"))

    mult = dict(factors)
    nu = mult.pop(Fraction(0), 0)
    if nu and x0 is None:
        raise SymbolicInitial("zero eigenvalue requires unrolling, which needs a numeric initial state")

    roots = sorted(mult)
    taken = set(sys.var_names) | set(sys.parameters)
    n_name = counter or fresh_name("n", taken)
    taken.add(n_name)
    exp_vars = {}
    for lam in roots:
        if lam != 1:
            name = fresh_name(f"{exp_prefix}{len(exp_vars) + 1}", taken)
            taken.add(name)
            exp_vars[lam] = name

    basis = [(lam, k) for lam in roots for k in range(mult[lam])]
    size = len(basis)
    samples = trajectory(sys, nu + size)[nu:]
    V = [[Fraction(nu + i) ** k * lam ** (nu + i) for lam, k in basis] for i in range(size)]

    forms = {}
    n_poly = Polynomial.var(n_name)
    for j, v in enumerate(sys.var_names):
        rhs = [Polynomial.coerce(s[j]) for s in samples]
        coeffs = _solve_numeric(V, rhs) if size else []
        form = Polynomial()
        for (lam, k), c in zip(basis, coeffs):
            term = c * n_poly ** k
            if lam != 1:
                term = term * Polynomial.var(exp_vars[lam])
            form = form + term
        forms[v] = form

    nonunit = [lam for lam in roots if lam != 1]
    u_names = tuple(exp_vars[lam] for lam in nonunit)
    relations = tuple(exponent_relations(nonunit, u_names))
    eigen = tuple(sorted(factors))
    return ClosedFormSystem(
        n_name, tuple(nonunit), u_names, forms, relations, nu, tuple(sys.var_names), eigen
    )


def _factor_int(n):
    n = abs(n)
    out = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def exponent_lattice(roots):
    """Basis of ``{v in Z^r : prod roots[j]**v[j] == 1}``."""
    roots = [Fraction(r) for r in roots]
    if any(r == 0 for r in roots):
        raise ValueError("roots must be nonzero")
    r = len(roots)
    if r == 0:
        return []
    exps = []
    for lam in roots:
        e = dict(_factor_int(lam.numerator))
        for p, k in _factor_int(lam.denominator).items():
            e[p] = e.get(p, 0) - k
        exps.append(e)
    primes = sorted({p for e in exps for p in e})
    rows = [[e.get(p, 0) for e in exps] + [0] for p in primes]
    # parity of the sign: sum of v_j over negative roots must be even
    rows.append([1 if lam < 0 else 0 for lam in roots] + [-2])
    kernel = integer_kernel(rows, r + 1)
    return hermite_normal_form([vec[:r] for vec in kernel])


def exponent_relations(roots, exp_vars=None):
    """Binomials ``prod u^v+ - prod u^v-`` for a basis of the exponent lattice."""
    if exp_vars is None:
        exp_vars = tuple(f"u{j + 1}" for j in range(len(roots)))
    out = []
    for vec in exponent_lattice(roots):
        pos = Monomial({u: e for u, e in zip(exp_vars, vec) if e > 0})
        neg = Monomial({u: -e for u, e in zip(exp_vars, vec) if e < 0})
        out.append(Polynomial({pos: 1}) - Polynomial({neg: 1}))
    return out


def describe_root(lam):
    return format_rat(lam)
