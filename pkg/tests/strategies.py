"""Hypothesis strategies shared by the property tests."""

from fractions import Fraction

from hypothesis import strategies as st

from polyloop.polycore import Monomial, Polynomial

NAMES = ("x", "y", "z")

small_rats = st.builds(
    Fraction, st.integers(-6, 6), st.integers(1, 4)
)

monomials = st.builds(
    lambda exps: Monomial({n: e for n, e in zip(NAMES, exps) if e}),
    st.tuples(*(st.integers(0, 3) for _ in NAMES)),
)

polys = st.builds(
    Polynomial,
    st.lists(st.tuples(monomials, small_rats), max_size=4),
)


def affine_matrices(dim, lo=-2, hi=2):
    return st.lists(
        st.lists(st.integers(lo, hi), min_size=dim, max_size=dim), min_size=dim, max_size=dim
    )

small_monomials = st.builds(
    lambda exps: Monomial({n: e for n, e in zip(NAMES, exps) if e}),
    st.tuples(*(st.integers(0, 2) for _ in NAMES)),
)

nonzero_polys = st.builds(
    Polynomial,
    st.lists(st.tuples(small_monomials, small_rats.filter(bool)), min_size=1, max_size=3),
).filter(lambda p: not p.is_zero())
