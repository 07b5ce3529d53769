from __future__ import annotations

import random

import pytest
import sympy as sp

from freediv.poly import Polynomial, Variable


def sym(i: int, j: int) -> sp.Symbol:
    return sp.Symbol(f"a_{i}_{j}")


def to_sympy(p: Polynomial) -> sp.Expr:
    """Independent conversion through sympy's own constructors (no text parsing)."""
    out = sp.Integer(0)
    for exps, c in p.terms():
        term = sp.Rational(c.numerator, c.denominator)
        for v, e in exps.items():
            term *= sym(v.row, v.col) ** e
        out += term
    return out


def from_sympy(expr: sp.Expr) -> Polynomial:
    expr = sp.expand(expr)
    gens = sorted(expr.free_symbols, key=str)
    if not gens:
        return Polynomial.const(sp.Rational(expr).p) / sp.Rational(expr).q
    out = Polynomial()
    for mon, c in sp.Poly(expr, *gens).terms():
        exps = {}
        for g, e in zip(gens, mon):
            if e:
                _, i, j = str(g).split("_")
                exps[Variable(int(i), int(j))] = e
        c = sp.Rational(c)
        out = out + Polynomial.monomial(exps, 1) * c.p / c.q
    return out


def same(p: Polynomial, expr: sp.Expr) -> bool:
    return sp.expand(to_sympy(p) - expr) == 0


def random_poly(rng: random.Random, nvars: int = 4, terms: int = 4, deg: int = 3) -> Polynomial:
    vs = [Variable(1 + k // 3, 1 + k % 3) for k in range(nvars)]
    out = Polynomial()
    for _ in range(terms):
        exps = {v: rng.randint(0, deg) for v in rng.sample(vs, rng.randint(1, min(2, nvars)))}
        out = out + Polynomial.monomial(exps, rng.choice([-3, -2, -1, 1, 2, 5]))
    return out


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20261015)


_SUITE_START: list[float] = []
WALL_LIMIT = 600.0


def pytest_sessionstart(session):
    import time

    _SUITE_START.append(time.perf_counter())


def pytest_terminal_summary(terminalreporter):
    import time

    if not _SUITE_START:
        return
    elapsed = time.perf_counter() - _SUITE_START[0]
    verdict = "PASS" if elapsed <= WALL_LIMIT else "FAIL"
    terminalreporter.write_line(f"CRITERION 10 (suite wall time): {verdict} {elapsed:.1f} s <= {WALL_LIMIT:.0f} s")
