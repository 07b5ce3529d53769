from __future__ import annotations

import itertools
import random

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import from_sympy, random_poly, same, sym, to_sympy
from freediv.errors import (
    IndexOutOfRange,
    NonSquare,
    NotExactDivision,
    NotSkewSymmetric,
    UnassignedVariable,
    ZeroPolynomial,
)
from freediv.poly import (
    ONE,
    ZERO,
    PolyMatrix,
    Polynomial,
    Variable,
    determinant,
    divides,
    dress_wenzel_check,
    dress_wenzel_pairs,
    exact_div,
    gcd,
    is_squarefree,
    pf_minor,
    pfaffian,
    proportionality,
    pullback,
    squarefree_part,
    var,
)
from freediv.spaces import General, Skew, Symmetric, corner_det

a11, a12, a13, a14 = var(1, 1), var(1, 2), var(1, 3), var(1, 4)
a21, a22, a23, a24 = var(2, 1), var(2, 2), var(2, 3), var(2, 4)
a34 = var(3, 4)


# -- ring operations ---------------------------------------------------------------------


def test_difference_of_squares():
    assert (a11 + a12) * (a11 - a12) == a11**2 - a12**2


def test_derivative_linear_in_entry():
    assert (a11 * a22 - a12**2).diff(Variable(2, 2)) == a11


def test_derivative_of_corner_minor_is_previous_minor():
    A = General(3, 3)
    assert corner_det(A, 3).diff(Variable(3, 3)) == corner_det(A, 2)


def test_ring_ops_against_sympy(rng):
    for _ in range(30):
        p, q = random_poly(rng), random_poly(rng)
        P, Q = to_sympy(p), to_sympy(q)
        assert same(p + q, P + Q)
        assert same(p - q, P - Q)
        assert same(p * q, P * Q)
        assert same(p.diff(Variable(1, 2)), sp.diff(P, sym(1, 2)))


def test_from_sympy_roundtrip(rng):
    for _ in range(10):
        p = random_poly(rng)
        assert from_sympy(to_sympy(p)) == p


def test_text_form_and_parse(rng):
    p = 3 * a11**2 - a12 * a21 / 2 + 1
    text = p.to_text()
    assert "-1/2 * a_1_2 * a_2_1" in text and "3 * a_1_1^2" in text
    assert Polynomial.parse(text) == p
    for _ in range(20):
        q = random_poly(rng)
        assert Polynomial.parse(q.to_text()) == q


def test_zero_and_one_text():
    assert ZERO.to_text() == "0"
    assert ONE.to_text() == "1"


def test_grlex_order_variables():
    assert Variable(1, 1).index < Variable(1, 2).index < Variable(2, 1).index


def test_evaluate_and_degree():
    p = a11**2 * a22 + a12
    assert p.total_degree() == 3
    assert p.degree_in(Variable(1, 1)) == 2
    assert p.evaluate({Variable(1, 1): 2, Variable(2, 2): 3, Variable(1, 2): -1}) == 11


def test_exact_division():
    p = (a11 + a12) * (a11 * a22 - a12 * a21)
    assert exact_div(p, a11 + a12) == a11 * a22 - a12 * a21
    with pytest.raises(NotExactDivision):
        exact_div(p, a13)
    assert divides(a11 + a12, p)
    assert proportionality(3 * p, p) == 3


# -- gcd and squarefreeness --------------------------------------------------------------


def test_gcd_examples():
    assert gcd(a11**2, a11) == a11
    assert gcd(a12 * a23, a12 * a14) == a12
    assert gcd(a11 * a22 - a12**2, a11) == ONE


def test_gcd_of_zero_is_normalized_other():
    assert gcd(ZERO, -2 * a11 - 4 * a12) == a11 + 2 * a12


def test_gcd_normalization():
    g = gcd(-6 * a11 * a12, 4 * a11 * a13)
    assert g == a11
    assert g.content() == 1 and g.leading_coefficient() > 0


def test_gcd_against_sympy(rng):
    for _ in range(15):
        f, g, h = (random_poly(rng, terms=3, deg=2) for _ in range(3))
        if f.is_zero() or g.is_zero() or h.is_zero():
            continue
        ours = gcd(f * h, g * h)
        oracle = sp.gcd(to_sympy(f * h), to_sympy(g * h))
        assert proportionality(ours, from_sympy(oracle)) is not None
        assert divides(ours, f * h) and divides(ours, g * h)


def test_is_squarefree_examples():
    assert not is_squarefree(a11**2)
    assert is_squarefree(a11 * (a11 * a22 - a12**2))
    assert not is_squarefree(a11**2 * (a11 * a22 - a12 * a21))
    with pytest.raises(ZeroPolynomial):
        is_squarefree(ZERO)


def test_squarefree_part():
    p = a11**3 * (a11 * a22 - a12 * a21) ** 2
    assert proportionality(squarefree_part(p), a11 * (a11 * a22 - a12 * a21)) is not None


# -- determinants and Pfaffians ----------------------------------------------------------


def test_determinant_examples():
    assert determinant(PolyMatrix.identity(3)) == ONE
    M = General(2, 2).generic_matrix()
    assert determinant(M) == a11 * a22 - a12 * a21
    with pytest.raises(NonSquare):
        determinant(General(2, 3).generic_matrix())


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_determinant_methods_agree_with_sympy(n):
    M = General(n, n).generic_matrix()
    oracle = sp.Matrix(n, n, lambda i, j: sym(i + 1, j + 1)).det(method="berkowitz")
    d = determinant(M)
    assert d == determinant(M, method="cofactor")
    assert same(d, oracle)


def test_determinant_with_zero_pivot():
    # leading entry vanishes identically; row exchange keeps elimination going
    M = PolyMatrix([[ZERO, a12], [a21, a22]])
    assert determinant(M) == -a12 * a21


def test_determinant_symmetric_against_sympy():
    M = Symmetric(4).generic_matrix()
    oracle = sp.Matrix(4, 4, lambda i, j: sym(min(i, j) + 1, max(i, j) + 1)).det()
    assert same(determinant(M), oracle)


def test_pfaffian_examples():
    assert pfaffian(Skew(2).generic_matrix()) == a12
    assert pfaffian(Skew(4).generic_matrix()) == a12 * a34 - a13 * a24 + a14 * a23
    J4 = PolyMatrix(
        [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]]
    )
    assert pfaffian(J4) == ONE
    assert pfaffian(Skew(3).generic_matrix()) == ZERO
    assert pfaffian(PolyMatrix([])) == ONE
    with pytest.raises(NotSkewSymmetric):
        pfaffian(General(2, 2).generic_matrix())


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_pfaffian_squared_is_determinant(n):
    M = Skew(n).generic_matrix()
    assert pfaffian(M) ** 2 == determinant(M)


def test_pfaffian_six_against_sympy_det():
    n = 6
    M = sp.Matrix(n, n, lambda i, j: sym(i + 1, j + 1) if i < j else (-sym(j + 1, i + 1) if i > j else 0))
    assert same(pfaffian(Skew(n).generic_matrix()) ** 2, M.det(method="berkowitz"))


def test_pf_minor_matches_submatrix():
    M = Skew(5).generic_matrix()
    S = (1, 3, 4, 5)
    assert pf_minor(S) == pfaffian(M.submatrix([s - 1 for s in S], [s - 1 for s in S]))


# -- pullback ----------------------------------------------------------------------------


def test_pullback_examples():
    v = Variable(1, 1)
    assert pullback(a11, {v: ZERO}) == ZERO
    d2 = corner_det(General(2, 2), 2)
    ident = {w: Polynomial.var(w) for w in General(2, 2).coordinates()}
    assert pullback(d2, {**ident, v: ZERO}) == -a12 * a21
    S = Symmetric(2)
    prod = corner_det(S, 1) * corner_det(S, 2)
    assert pullback(prod, {w: Polynomial.var(w) for w in S.coordinates()}) == prod
    with pytest.raises(UnassignedVariable):
        pullback(a11 * a12, {v: ONE})


# -- Dress-Wenzel ------------------------------------------------------------------------


def test_dress_wenzel_examples():
    assert dress_wenzel_check({1, 2, 3, 4}, {1, 2}, 4)
    assert dress_wenzel_check({1, 2}, {1, 2}, 4)
    assert dress_wenzel_check({1, 2, 3}, {2, 3, 4, 5}, 5)
    with pytest.raises(IndexOutOfRange):
        dress_wenzel_check({1, 7}, {1}, 4)


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
def test_dress_wenzel_exhaustive(m):
    pairs = list(dress_wenzel_pairs(m))
    assert len(pairs) == 4**m
    assert all(dress_wenzel_check(I1, I2, m) for I1, I2 in pairs)


def test_dress_wenzel_sampled_m6():
    r = random.Random(6)
    subsets = [frozenset(s) for k in range(7) for s in itertools.combinations(range(1, 7), k)]
    for _ in range(200):
        assert dress_wenzel_check(r.choice(subsets), r.choice(subsets), 6)


# -- properties --------------------------------------------------------------------------

_vars = [Variable(i, j) for i in range(1, 3) for j in range(1, 4)]


@st.composite
def polys(draw):
    n = draw(st.integers(0, 4))
    out = Polynomial()
    for _ in range(n):
        exps = {v: draw(st.integers(0, 3)) for v in draw(st.lists(st.sampled_from(_vars), max_size=2))}
        out = out + Polynomial.monomial(exps, draw(st.integers(-5, 5)))
    return out


@settings(max_examples=60, deadline=None)
@given(polys(), polys(), polys())
def test_ring_axioms(p, q, r):
    assert (p * q).to_text() == (q * p).to_text()
    assert (p + q) + r == p + (q + r)
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert (p - p).is_zero()


@settings(max_examples=40, deadline=None)
@given(polys(), polys())
def test_gcd_divides_both(p, q):
    g = gcd(p * q + p, p)
    if not g.is_zero():
        assert divides(g, p) and divides(g, p * q + p)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_squarefree_products(seed):
    r = random.Random(seed)
    pool = [a11, a12 + a21, a11 * a22 - a12 * a21, a13 - 2 * a22, a11 + a12 + a13, a23 * a11 + a14]
    p, q = r.sample(pool, 2)
    assert not is_squarefree(p**2 * q)
    assert is_squarefree(p * q)


@settings(max_examples=30, deadline=None)
@given(polys(), polys())
def test_text_roundtrip(p, q):
    f = p * q - q
    assert Polynomial.parse(f.to_text()) == f
