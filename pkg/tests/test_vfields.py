from __future__ import annotations

from fractions import Fraction

import pytest
import sympy as sp

from conftest import random_poly, same, sym, to_sympy
from freediv.errors import IndexOutOfRange, ShapeMismatch, SpaceMismatch
from freediv.poly import Polynomial, pf_minor, var
from freediv.spaces import FAMILY_NAMES, MIN_M, General, Skew, Symmetric, build_family, eta
from freediv.vfields import (
    PolyVectorField,
    eta_eta_closed_form,
    eta_field,
    family_fields,
    lie_bracket,
    project_field,
    rep_field_bilinear,
    rep_field_linear,
    verify_bracket_closure,
    zero_field,
)

a = var


def field(space, coeffs):
    return PolyVectorField(space, tuple(coeffs))


def test_linear_left_action():
    f = rep_field_linear((1, 1), None, General(2, 2))
    assert f.as_dict() == field(General(2, 2), [a(1, 1), a(1, 2), Polynomial(), Polynomial()]).as_dict()


def test_linear_right_action():
    f = rep_field_linear(None, (1, 2), General(2, 2))
    d = f.as_dict()
    assert d[a(1, 2).variables().pop()] == -a(1, 1)
    assert d[a(2, 2).variables().pop()] == -a(2, 1)
    assert sum(1 for v in d.values() if not v.is_zero()) == 2


def test_linear_zero_action():
    assert rep_field_linear(None, None, General(2, 3)).is_zero()


def test_linear_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        rep_field_linear((3, 1), None, General(2, 2))
    with pytest.raises(ShapeMismatch):
        rep_field_linear((1, 1), None, Symmetric(2))


def test_bilinear_fields():
    S2 = Symmetric(2)
    assert rep_field_bilinear((1, 1), S2).as_dict() == field(S2, [2 * a(1, 1), a(1, 2), Polynomial()]).as_dict()
    assert rep_field_bilinear((2, 1), S2).as_dict() == field(S2, [Polynomial(), a(1, 1), 2 * a(1, 2)]).as_dict()
    K2 = Skew(2)
    assert rep_field_bilinear((1, 1), K2).as_dict() == field(K2, [a(1, 2)]).as_dict()


def test_eta_fields():
    f = eta_field(4, 2)
    nz = {v: c for v, c in f.as_dict().items() if not c.is_zero()}
    assert list(nz) == [a(3, 4).variables().pop()]
    assert nz[a(3, 4).variables().pop()] == a(1, 2) * a(3, 4) - a(1, 3) * a(2, 4) + a(1, 4) * a(2, 3)
    g = {v: c for v, c in eta_field(5, 3).as_dict().items() if not c.is_zero()}
    assert g == {a(4, 5).variables().pop(): pf_minor((2, 3, 4, 5))}
    h = {v: c for v, c in eta_field(5, 2).as_dict().items() if not c.is_zero()}
    assert h == {
        a(3, 4).variables().pop(): pf_minor((1, 2, 3, 4)),
        a(3, 5).variables().pop(): pf_minor((1, 2, 3, 5)),
        a(4, 5).variables().pop(): pf_minor((1, 2, 4, 5)),
    }
    with pytest.raises(IndexOutOfRange):
        eta_field(4, 3)


@pytest.mark.parametrize("m", [4, 5, 6, 7])
def test_eta_homogeneous(m):
    for k in range(2, m - 1):
        degs = {c.total_degree() for c in eta_field(m, k).as_dict().values() if not c.is_zero()}
        assert len(degs) == 1
        assert all(c.is_homogeneous() for c in eta_field(m, k).as_dict().values())
        assert degs == {k // 2 + 1}


def test_bracket_toy():
    V = General(1, 1)
    x = field(V, [a(1, 1)])
    d = field(V, [Polynomial.const(1)])
    assert lie_bracket(x, d).as_dict() == field(V, [Polynomial.const(-1)]).as_dict()


def test_bracket_linear_sign():
    V = General(2, 1)
    x11 = rep_field_linear((1, 1), None, V)
    x12 = rep_field_linear((1, 2), None, V)
    assert lie_bracket(x11, x12).as_dict() == x12.scale(-1).as_dict()


def test_bracket_space_mismatch():
    with pytest.raises(SpaceMismatch):
        lie_bracket(zero_field(General(2, 2)), zero_field(Symmetric(2)))


def test_bracket_against_sympy(rng):
    V = General(2, 2)
    coords = V.coordinates()
    syms = [sym(v.row, v.col) for v in coords]
    for _ in range(10):
        X = field(V, [random_poly(rng, terms=2, deg=2) for _ in coords])
        Y = field(V, [random_poly(rng, terms=2, deg=2) for _ in coords])
        Xs = [to_sympy(c) for c in X.coeffs]
        Ys = [to_sympy(c) for c in Y.coeffs]
        Z = lie_bracket(X, Y)
        for i, v in enumerate(coords):
            oracle = sum(Xs[j] * sp.diff(Ys[i], syms[j]) - Ys[j] * sp.diff(Xs[i], syms[j]) for j in range(len(coords)))
            assert same(Z.coefficient(v), oracle)


def test_sym2_closure():
    r = verify_bracket_closure(build_family("Sym", 2))
    assert r.closed and r.linear_identity
    assert len({(p.left, p.right) for p in r.pairs}) == 9


def _entry(report, left, right):
    return next(p for p in report.pairs if p.left == left and p.right == right)


def test_nonlinear_4_eta_brackets():
    r = verify_bracket_closure(build_family("SkewNonlinear", 4))
    assert _entry(r, "E11", "eta2").witness == "1*eta2"
    assert _entry(r, "E33", "eta2").witness == "0"
    assert _entry(r, "E43", "eta2").witness == "0"
    assert r.closed and not r.discrepancies


def test_nonlinear_5_eta_eta():
    r = verify_bracket_closure(build_family("SkewNonlinear", 5))
    e = _entry(r, "eta2", "eta3")
    assert e.verdict and e.witness.startswith("0*")
    assert lie_bracket(eta_field(5, 2), eta_field(5, 3)).is_zero()
    c, _ = eta_eta_closed_form(2, 3)
    assert c == 0


def test_eta_eta_closed_form_nonzero():
    c, p = eta_eta_closed_form(2, 4)
    # one half of (delta + l - k - 1) with delta = 1 for equal parities
    assert c == Fraction(1, 2) * (1 + 4 - 2 - 1)
    assert p == pf_minor((1, 2))
    direct = lie_bracket(eta_field(6, 2), eta_field(6, 4))
    expected = {v: c * p * q for v, q in eta_field(6, 4).as_dict().items()}
    assert direct.as_dict() == expected


@pytest.mark.parametrize("name", FAMILY_NAMES)
def test_closure_and_linear_identity(name):
    for m in range(MIN_M[name], 6):
        r = verify_bracket_closure(build_family(name, m))
        assert r.closed, (name, m, [p for p in r.pairs if not p.verdict][:3])
        assert r.linear_identity
        assert not r.discrepancies


@pytest.mark.parametrize("name", FAMILY_NAMES)
def test_pi_related(name):
    for m in range(MIN_M[name] + 1, 6):
        up, down = build_family(name, m), build_family(name, m - 1)
        upstairs = {g.label: f for g, f in zip(up.generators, family_fields(up))}
        assert set(down.space.coordinates()) <= set(up.space.coordinates())
        for g, f in zip(down.generators, family_fields(down)):
            assert project_field(upstairs[g.label], down.space).as_dict() == f.as_dict(), (name, m, g.label)


def test_eta_generator_label():
    assert eta(3).label == "eta3"
