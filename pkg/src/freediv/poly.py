"""Exact multivariate polynomials over Q in matrix-entry variables ``a_i_j``.

Monomials are packed into a single Python int: eight bits per variable
(seven for the exponent, one guard bit used by the divisibility test) with
the total degree stored above all variable fields.  Variables are indexed
row-major, so the integer order of packed monomials is graded lexicographic
with ``a_1_1 < a_1_2 < ... < a_2_1 < ...``.

Coefficients are Python ints where possible and :class:`fractions.Fraction`
otherwise; nothing in this module touches floating point.
"""

from __future__ import annotations

import heapq
import math
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import combinations
from typing import Iterable, Mapping, Sequence, Union

from .errors import (
    IndexOutOfRange,
    NonSquare,
    NotExactDivision,
    NotSkewSymmetric,
    UnassignedVariable,
    ZeroPolynomial,
)

Rational = Union[int, Fraction]

MAX_INDEX = 9
_BITS = 8
_NVARS = MAX_INDEX * MAX_INDEX
_FIELD = (1 << _BITS) - 1
_EXP_MAX = (1 << (_BITS - 1)) - 1
_DEG_SHIFT = _BITS * _NVARS
_DEG_UNIT = 1 << _DEG_SHIFT
_VAR_MASK = _DEG_UNIT - 1
_GUARD = sum(1 << (_BITS * v + _BITS - 1) for v in range(_NVARS))


@dataclass(frozen=True, order=True)
class Variable:
    """The matrix entry ``a_{row,col}``."""

    row: int
    col: int

    def __post_init__(self):
        if not (1 <= self.row <= MAX_INDEX and 1 <= self.col <= MAX_INDEX):
            raise IndexOutOfRange(f"variable a_{self.row}_{self.col} outside 1..{MAX_INDEX}")

    @property
    def index(self) -> int:
        return (self.row - 1) * MAX_INDEX + (self.col - 1)

    @classmethod
    def from_index(cls, v: int) -> "Variable":
        return cls(v // MAX_INDEX + 1, v % MAX_INDEX + 1)

    def __str__(self) -> str:
        return f"a_{self.row}_{self.col}"


def _var_mono(v: int) -> int:
    return (1 << (_BITS * v)) + _DEG_UNIT


def _exp(mono: int, v: int) -> int:
    return (mono >> (_BITS * v)) & _FIELD


def _mono_items(mono: int):
    """Yield (variable index, exponent) for the nonzero fields of a monomial."""
    low = mono & _VAR_MASK
    v = 0
    while low:
        f = low & _FIELD
        if f:
            yield v, f
        low >>= _BITS
        v += 1


def _mono_divides(a: int, b: int) -> bool:
    d = (b | _GUARD) - a
    return d >= 0 and (d & _GUARD) == _GUARD


def _norm(c):
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def _div_coeff(a: Rational, b: Rational) -> Rational:
    if type(a) is int and type(b) is int:
        q, r = divmod(a, b)
        if r == 0:
            return q
    return _norm(Fraction(a) / b)


def _clean(terms: dict) -> dict:
    out = {}
    for k, c in terms.items():
        if c:
            out[k] = _norm(c)
    return out


class Polynomial:
    """Immutable sparse polynomial; ``terms`` maps packed monomials to coefficients."""

    __slots__ = ("_t", "_hash")

    def __init__(self, terms: Mapping[int, Rational] | None = None, *, _trusted: bool = False):
        if terms is None:
            self._t = {}
        elif _trusted:
            self._t = terms  # type: ignore[assignment]
        else:
            self._t = _clean(dict(terms))
        self._hash = None

    # -- construction -------------------------------------------------------
    @classmethod
    def const(cls, c: Rational) -> "Polynomial":
        c = _norm(c)
        return cls({0: c}, _trusted=True) if c else cls()

    @classmethod
    def var(cls, row: int | Variable, col: int | None = None) -> "Polynomial":
        v = row if isinstance(row, Variable) else Variable(row, col)  # type: ignore[arg-type]
        return cls({_var_mono(v.index): 1}, _trusted=True)

    @classmethod
    def monomial(cls, exponents: Mapping[Variable, int], coeff: Rational = 1) -> "Polynomial":
        key = 0
        for v, e in exponents.items():
            if e < 0 or e > _EXP_MAX:
                raise ValueError(f"exponent {e} out of range")
            key += e * _var_mono(v.index)
        return cls({key: coeff})

    @staticmethod
    def coerce(x) -> "Polynomial":
        if isinstance(x, Polynomial):
            return x
        if isinstance(x, (int, Fraction)):
            return Polynomial.const(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to Polynomial")

    # -- basic protocol -----------------------------------------------------
    def __len__(self) -> int:
        return len(self._t)

    def __bool__(self) -> bool:
        return bool(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def is_constant(self) -> bool:
        return not self._t or (len(self._t) == 1 and 0 in self._t)

    def constant_value(self) -> Rational:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self._t.get(0, 0)

    def terms(self) -> list[tuple[dict[Variable, int], Rational]]:
        """Terms in descending monomial order as (exponent map, coefficient)."""
        return [
            ({Variable.from_index(v): e for v, e in _mono_items(k)}, self._t[k])
            for k in sorted(self._t, reverse=True)
        ]

    def coefficients(self) -> list[Rational]:
        return list(self._t.values())

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Polynomial.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._t == other._t

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._t.items()))
        return self._hash

    # -- ring operations ----------------------------------------------------
    def __neg__(self) -> "Polynomial":
        return Polynomial({k: -c for k, c in self._t.items()}, _trusted=True)

    def __add__(self, other) -> "Polynomial":
        other = Polynomial.coerce(other)
        if len(other._t) > len(self._t):
            big, small = other._t, self._t
        else:
            big, small = self._t, other._t
        r = dict(big)
        for k, c in small.items():
            s = r.get(k, 0) + c
            if s:
                r[k] = _norm(s)
            else:
                r.pop(k, None)
        return Polynomial(r, _trusted=True)

    __radd__ = __add__

    def __sub__(self, other) -> "Polynomial":
        return self + (-Polynomial.coerce(other))

    def __rsub__(self, other) -> "Polynomial":
        return Polynomial.coerce(other) + (-self)

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            if not other:
                return Polynomial()
            return Polynomial({k: _norm(c * other) for k, c in self._t.items()}, _trusted=True)
        other = Polynomial.coerce(other)
        a, b = self._t, other._t
        if not a or not b:
            return Polynomial()
        if len(a) < len(b):
            a, b = b, a
        r: dict = {}
        get = r.get
        for kb, cb in b.items():
            for ka, ca in a.items():
                k = ka + kb
                r[k] = get(k, 0) + ca * cb
        out = _clean(r)
        for k in out:
            if k & _GUARD:
                raise OverflowError(f"exponent exceeds {_EXP_MAX}")
        return Polynomial(out, _trusted=True)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative power")
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __truediv__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / other)
        return exact_div(self, Polynomial.coerce(other))

    # -- structure ----------------------------------------------------------
    def variables(self) -> set[Variable]:
        return {Variable.from_index(v) for v in self._var_indices()}

    def _var_indices(self) -> set[int]:
        acc = 0
        for k in self._t:
            acc |= k & _VAR_MASK
        out = set()
        v = 0
        while acc:
            if acc & _FIELD:
                out.add(v)
            acc >>= _BITS
            v += 1
        return out

    def total_degree(self) -> int:
        if not self._t:
            return -1
        return max(k >> _DEG_SHIFT for k in self._t)

    def is_homogeneous(self) -> bool:
        return len({k >> _DEG_SHIFT for k in self._t}) <= 1

    def degree_in(self, var: Variable) -> int:
        if not self._t:
            return -1
        return max(_exp(k, var.index) for k in self._t)

    def leading_term(self) -> tuple[int, Rational]:
        k = max(self._t)
        return k, self._t[k]

    def leading_coefficient(self) -> Rational:
        return self._t[max(self._t)] if self._t else 0

    def diff(self, var: Variable) -> "Polynomial":
        """Partial derivative with respect to ``var``."""
        v = var.index
        step = _var_mono(v)
        r = {}
        for k, c in self._t.items():
            e = _exp(k, v)
            if e:
                r[k - step] = c * e
        return Polynomial(r, _trusted=True)

    def coefficient_in(self, var: Variable, e: int) -> "Polynomial":
        """Coefficient of ``var**e`` as a polynomial free of ``var``."""
        return _univariate(self, var.index).get(e, ZERO)

    def evaluate(self, values: Mapping[Variable, object]):
        """Evaluate at a point; missing variables raise UnassignedVariable."""
        idx = {}
        for v in self._var_indices():
            var = Variable.from_index(v)
            if var not in values:
                raise UnassignedVariable(str(var))
            idx[v] = values[var]
        total = 0
        for k, c in self._t.items():
            t = c
            for v, e in _mono_items(k):
                t = t * idx[v] ** e
            total = total + t
        return total

    # -- content and normalization ----------------------------------------
    def content(self) -> Fraction:
        """Rational content: gcd of numerators over lcm of denominators."""
        if not self._t:
            return Fraction(0)
        nums = []
        dens = []
        for c in self._t.values():
            c = Fraction(c)
            nums.append(abs(c.numerator))
            dens.append(c.denominator)
        return Fraction(reduce(math.gcd, nums), reduce(_lcm, dens))

    def primitive(self) -> "Polynomial":
        """Integer polynomial with coprime coefficients and positive leading coefficient."""
        if not self._t:
            return self
        c = self.content()
        if self.leading_coefficient() < 0:
            c = -c
        if c == 1:
            return self
        return Polynomial({k: _norm(Fraction(v) / c) for k, v in self._t.items()}, _trusted=True)

    # -- text form ----------------------------------------------------------
    def to_text(self) -> str:
        if not self._t:
            return "0"
        parts = []
        for i, k in enumerate(sorted(self._t, reverse=True)):
            c = self._t[k]
            neg = c < 0
            a = -c if neg else c
            factors = [
                str(Variable.from_index(v)) + (f"^{e}" if e > 1 else "")
                for v, e in sorted(_mono_items(k))
            ]
            if a != 1 or not factors:
                factors.insert(0, str(a))
            body = " * ".join(factors)
            if i == 0:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)

    __str__ = to_text

    def __repr__(self) -> str:
        return f"Polynomial({self.to_text()!r})"

    @classmethod
    def parse(cls, text: str) -> "Polynomial":
        """Inverse of :meth:`to_text`."""
        s = text.strip()
        if s == "0":
            return ZERO
        if not s.startswith("-"):
            s = "+ " + s
        else:
            s = "- " + s[1:]
        chunks = re.findall(r"([+-])\s*([^+-]+)", s)
        if "".join(sign + body for sign, body in chunks).replace(" ", "") != s.replace(" ", ""):
            raise ValueError(f"unparseable polynomial: {text!r}")
        acc: dict = {}
        for sign, body in chunks:
            coeff: Rational = 1
            key = 0
            for f in body.split("*"):
                f = f.strip()
                m = re.fullmatch(r"a_(\d+)_(\d+)(?:\^(\d+))?", f)
                if m:
                    e = int(m.group(3) or 1)
                    key += e * _var_mono(Variable(int(m.group(1)), int(m.group(2))).index)
                else:
                    coeff = coeff * Fraction(f)
            if sign == "-":
                coeff = -coeff
            acc[key] = acc.get(key, 0) + coeff
        return cls(acc)


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


ZERO = Polynomial()
ONE = Polynomial.const(1)


def var(row: int, col: int) -> Polynomial:
    """Shorthand for the polynomial ``a_row_col``."""
    return Polynomial.var(row, col)


# -- division -------------------------------------------------------------


def divmod_poly(p: Polynomial, q: Polynomial) -> tuple[Polynomial, Polynomial]:
    """Multivariate division by the leading term of ``q`` (graded lex).

    Returns (quotient, remainder) with ``p = quotient*q + remainder`` and no
    term of the remainder divisible by the leading monomial of ``q``.
    """
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    lm, lc = q.leading_term()
    qrest = [(k - lm, c) for k, c in q._t.items() if k != lm]  # offsets relative to lm
    r = dict(p._t)
    heap = [-k for k in r]
    heapq.heapify(heap)
    quot: dict = {}
    rem: dict = {}
    while heap:
        k = -heapq.heappop(heap)
        c = r.pop(k, 0)
        if not c:
            continue
        while heap and -heap[0] == k:
            heapq.heappop(heap)
        if _mono_divides(lm, k):
            t = _div_coeff(c, lc)
            shift = k - lm
            quot[shift] = t
            for off, qc in qrest:
                kk = shift + lm + off
                new = r.get(kk, 0) - t * qc
                if kk not in r:
                    heapq.heappush(heap, -kk)
                if new:
                    r[kk] = new
                else:
                    r.pop(kk, None)
        else:
            rem[k] = c
    return Polynomial(quot), Polynomial(rem)


def exact_div(p: Polynomial, q: Polynomial) -> Polynomial:
    """Quotient ``p / q``; raises NotExactDivision if ``q`` does not divide ``p``."""
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if q.is_constant():
        return p * (Fraction(1) / Fraction(q.constant_value()))
    lm, lc = q.leading_term()
    qrest = [(k - lm, c) for k, c in q._t.items() if k != lm]
    r = dict(p._t)
    heap = [-k for k in r]
    heapq.heapify(heap)
    quot: dict = {}
    while heap:
        k = -heapq.heappop(heap)
        c = r.pop(k, 0)
        if not c:
            continue
        if not _mono_divides(lm, k):
            raise NotExactDivision("divisor does not divide dividend")
        t = _div_coeff(c, lc)
        shift = k - lm
        quot[shift] = t
        for off, qc in qrest:
            kk = k + off
            old = r.get(kk)
            if old is None:
                heapq.heappush(heap, -kk)
                r[kk] = -t * qc
            else:
                new = old - t * qc
                if new:
                    r[kk] = new
                else:
                    r[kk] = 0
    return Polynomial(quot)


def divides(q: Polynomial, p: Polynomial) -> bool:
    if q.is_zero():
        return p.is_zero()
    try:
        exact_div(p, q)
    except NotExactDivision:
        return False
    return True


def proportionality(p: Polynomial, q: Polynomial) -> Fraction | None:
    """The constant ``c`` with ``p == c*q`` (both nonzero), or None."""
    if p.is_zero() or q.is_zero() or p._t.keys() != q._t.keys():
        return None
    it = iter(p._t)
    k0 = next(it)
    c = Fraction(p._t[k0]) / q._t[k0]
    for k in it:
        if Fraction(p._t[k]) != c * q._t[k]:
            return None
    return c


# -- gcd -------------------------------------------------------------------


def _univariate(p: Polynomial, v: int) -> dict[int, Polynomial]:
    """Split ``p`` as sum_e c_e * x_v**e with c_e free of x_v."""
    step = _var_mono(v)
    parts: dict[int, dict] = {}
    for k, c in p._t.items():
        e = _exp(k, v)
        parts.setdefault(e, {})[k - e * step] = c
    return {e: Polynomial(t, _trusted=True) for e, t in parts.items()}


def _from_univariate(coeffs: Sequence[Polynomial], v: int) -> Polynomial:
    step = _var_mono(v)
    r: dict = {}
    for e, c in enumerate(coeffs):
        for k, a in c._t.items():
            r[k + e * step] = a
    return Polynomial(r, _trusted=True)


def _monomial_gcd(p: Polynomial, q: Polynomial) -> Polynomial:
    """gcd when one side is a single term: the common monomial part."""
    keys = list(p._t) + list(q._t)
    common = {}
    first = True
    for k in keys:
        items = dict(_mono_items(k))
        if first:
            common = items
            first = False
        else:
            common = {v: min(e, items[v]) for v, e in common.items() if v in items}
        if not common:
            return ONE
    key = sum(e * _var_mono(v) for v, e in common.items())
    return Polynomial({key: 1}, _trusted=True)


def _eval_except(p: Polynomial, v: int, point: Mapping[int, int]) -> list[int]:
    """Integer univariate image of ``p`` in x_v, other variables at ``point``."""
    coeffs: dict[int, Rational] = {}
    for k, c in p._t.items():
        e = 0
        t = c
        for w, f in _mono_items(k):
            if w == v:
                e = f
            else:
                t *= point[w] ** f
        coeffs[e] = coeffs.get(e, 0) + t
    deg = max((e for e, c in coeffs.items() if c), default=-1)
    return [coeffs.get(e, 0) for e in range(deg + 1)]


def _uni_gcd(a: list, b: list) -> list[Fraction]:
    """gcd of two univariate rational polynomials given as coefficient lists, low first."""
    a = [Fraction(x) for x in a]
    b = [Fraction(x) for x in b]
    while a and a[-1] == 0:
        a.pop()
    while b and b[-1] == 0:
        b.pop()
    while b:
        while a and len(a) >= len(b):
            f = a[-1] / b[-1]
            off = len(a) - len(b)
            for i, bc in enumerate(b):
                a[i + off] -= f * bc
            while a and a[-1] == 0:
                a.pop()
        a, b = b, a
    return a


_RNG = random.Random(0x5A170)


def _coprime_certificate(polys: Sequence[Polynomial], common: set[int]) -> bool:
    """Rigorous sufficient test that gcd(polys) is a constant.

    For every shared variable x, the polys are specialised at a random integer
    point in the remaining variables.  When the x-degrees survive and the
    univariate images have a constant gcd, no common factor can involve x.
    """
    others = set()
    for p in polys:
        others |= p._var_indices()
    for v in common:
        degs = [max(_exp(k, v) for k in p._t) for p in polys]
        ok = False
        for _ in range(3):
            point = {w: _RNG.randint(-97, 97) for w in others if w != v}
            images = [_eval_except(p, v, point) for p in polys]
            if any(len(img) - 1 != d for img, d in zip(images, degs)):
                continue
            g = images[0]
            for img in images[1:]:
                g = _uni_gcd(g, img)
                if len(g) <= 1:
                    break
            if len(g) <= 1:
                ok = True
                break
        if not ok:
            return False
    return True


def _prem(a: list[Polynomial], b: list[Polynomial]) -> list[Polynomial]:
    """Pseudo-remainder lc(b)^(deg a - deg b + 1) * a mod b, coefficient lists low first."""
    db = len(b) - 1
    lcb = b[-1]
    r = list(a)
    e = len(a) - len(b) + 1
    while r and len(r) - 1 >= db:
        dr = len(r) - 1
        lcr = r[-1]
        new = [c * lcb for c in r]
        off = dr - db
        for i, bc in enumerate(b):
            if bc:
                new[i + off] = new[i + off] - lcr * bc
        new.pop()
        while new and new[-1].is_zero():
            new.pop()
        r = new
        e -= 1
    if e > 0 and r:
        f = lcb ** e
        r = [c * f for c in r]
    return r


def _subresultant_gcd(a: list[Polynomial], b: list[Polynomial]) -> list[Polynomial]:
    """Last nonzero term of the subresultant PRS of two primitive univariate polys."""
    if len(a) < len(b):
        a, b = b, a
    g = ONE
    h = ONE
    while True:
        delta = len(a) - len(b)
        r = _prem(a, b)
        if not r:
            return b
        if len(r) == 1:
            return [ONE]
        a = b
        denom = g * h ** delta
        b = [exact_div(c, denom) for c in r]
        g = a[-1]
        if delta == 0:
            pass
        elif delta == 1:
            h = g
        else:
            h = exact_div(g ** delta, h ** (delta - 1))


def _gcd_many(polys: Iterable[Polynomial]) -> Polynomial:
    g = None
    for p in polys:
        if p.is_zero():
            continue
        g = p.primitive() if g is None else _gcd_rec(g, p.primitive())
        if g.is_constant():
            return ONE
    return ONE if g is None else g


def _gcd_rec(p: Polynomial, q: Polynomial) -> Polynomial:
    """gcd of nonzero integer polynomials, returned primitive with positive lc."""
    if p.is_constant() or q.is_constant():
        return ONE
    if len(p) == 1 or len(q) == 1:
        return _monomial_gcd(p, q)
    common = p._var_indices() & q._var_indices()
    if not common:
        return ONE
    if _coprime_certificate([p, q], common):
        return ONE
    if p == q:
        return p.primitive()
    # main variable: smallest combined degree keeps the PRS short
    v = min(common, key=lambda w: (max(_exp(k, w) for k in p._t) + max(_exp(k, w) for k in q._t), -w))
    pu = _univariate(p, v)
    qu = _univariate(q, v)
    cp = _gcd_many(pu.values())
    cq = _gcd_many(qu.values())
    c = _gcd_rec(cp, cq) if not (cp.is_constant() or cq.is_constant()) else ONE
    pa = [exact_div(pu.get(e, ZERO), cp) for e in range(max(pu) + 1)]
    qa = [exact_div(qu.get(e, ZERO), cq) for e in range(max(qu) + 1)]
    if len(pa) == 1 or len(qa) == 1:
        return c.primitive()
    g = _subresultant_gcd(pa, qa)
    if len(g) == 1:
        return c.primitive()
    cg = _gcd_many(g)
    g = [exact_div(x, cg) for x in g]
    return (c * _from_univariate(g, v)).primitive()


def gcd(p: Polynomial, q: Polynomial) -> Polynomial:
    """Greatest common divisor over Q, normalized: integer content 1, leading coefficient > 0.

    ``gcd(0, q)`` is the normalized ``q``; ``gcd(0, 0)`` is 0.
    """
    p = Polynomial.coerce(p)
    q = Polynomial.coerce(q)
    if p.is_zero():
        return q.primitive()
    if q.is_zero():
        return p.primitive()
    return _gcd_rec(p.primitive(), q.primitive())


def gcd_list(polys: Iterable[Polynomial]) -> Polynomial:
    g = ZERO
    for p in polys:
        g = gcd(g, p)
        if g == ONE:
            break
    return g


def _joint_derivative_gcd(p: Polynomial) -> Polynomial:
    g = p.primitive()
    for v in sorted(p._var_indices(), key=lambda w: -max(_exp(k, w) for k in p._t)):
        g = gcd(g, p.diff(Variable.from_index(v)))
        if g.is_constant():
            return ONE
    return g


def is_squarefree(p: Polynomial) -> bool:
    """True iff gcd(p, dp/dx_1, ..., dp/dx_n) has total degree 0."""
    if p.is_zero():
        raise ZeroPolynomial("squarefree test of the zero polynomial")
    if p.is_constant():
        return True
    return _joint_derivative_gcd(p).total_degree() == 0


def squarefree_part(p: Polynomial) -> Polynomial:
    """Radical of ``p`` (product of its distinct irreducible factors), normalized."""
    if p.is_zero():
        raise ZeroPolynomial("squarefree part of the zero polynomial")
    if p.is_constant():
        return ONE
    return exact_div(p.primitive(), _joint_derivative_gcd(p))


# -- matrices ----------------------------------------------------------------


class PolyMatrix:
    """Dense rectangular grid of polynomials."""

    __slots__ = ("_rows",)

    def __init__(self, rows: Iterable[Iterable]):
        data = tuple(tuple(Polynomial.coerce(x) for x in r) for r in rows)
        if data and len({len(r) for r in data}) != 1:
            raise ValueError("ragged matrix")
        if not data or not data[0]:
            data = ()
        self._rows = data

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "PolyMatrix":
        return cls([[ZERO] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, n: int) -> "PolyMatrix":
        return cls([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    @property
    def rows(self) -> int:
        return len(self._rows)

    @property
    def cols(self) -> int:
        return len(self._rows[0]) if self._rows else 0

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij: tuple[int, int]) -> Polynomial:
        i, j = ij
        return self._rows[i][j]

    def row(self, i: int) -> tuple[Polynomial, ...]:
        return self._rows[i]

    def tolist(self) -> list[list[Polynomial]]:
        return [list(r) for r in self._rows]

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyMatrix) and self._rows == other._rows

    def __hash__(self) -> int:
        return hash(self._rows)

    def __repr__(self) -> str:
        return f"PolyMatrix({[[str(x) for x in r] for r in self._rows]})"

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix(zip(*self._rows)) if self._rows else PolyMatrix([])

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "PolyMatrix":
        return PolyMatrix([[self._rows[i][j] for j in cols] for i in rows])

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        out = []
        for r in self._rows:
            row = []
            for j in range(other.cols):
                acc = ZERO
                for k, x in enumerate(r):
                    if x and other._rows[k][j]:
                        acc = acc + x * other._rows[k][j]
                row.append(acc)
            out.append(row)
        return PolyMatrix(out)

    def map(self, f) -> "PolyMatrix":
        return PolyMatrix([[f(x) for x in r] for r in self._rows])

    def is_skew_symmetric(self) -> bool:
        n = self.rows
        if n != self.cols:
            return False
        return all(
            self._rows[i][j] == -self._rows[j][i] for i in range(n) for j in range(i, n)
        )


def _bareiss(rows: list[list[Polynomial]]) -> Polynomial:
    n = len(rows)
    m = [list(r) for r in rows]
    sign = 1
    prev = ONE
    for k in range(n - 1):
        if m[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not m[i][k].is_zero()), None)
            if swap is None:
                return ZERO
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        piv = m[k][k]
        rowk = m[k]
        for i in range(k + 1, n):
            rowi = m[i]
            mik = rowi[k]
            for j in range(k + 1, n):
                a = rowi[j]
                b = rowk[j]
                if mik.is_zero() or b.is_zero():
                    if a.is_zero():
                        continue
                    num = piv * a
                else:
                    num = piv * a - mik * b if not a.is_zero() else -(mik * b)
                rowi[j] = exact_div(num, prev) if prev != ONE else num
            rowi[k] = ZERO
        prev = piv
    d = m[n - 1][n - 1]
    return -d if sign < 0 else d


def _cofactor(rows: list[list[Polynomial]]) -> Polynomial:
    """Laplace expansion down the columns, memoised on the set of used rows."""
    n = len(rows)
    memo: dict[int, Polynomial] = {}

    def rec(col: int, used: int) -> Polynomial:
        if col == n:
            return ONE
        if used in memo:
            return memo[used]
        acc = ZERO
        sign = 1
        for i in range(n):
            if used >> i & 1:
                continue
            x = rows[i][col]
            if not x.is_zero():
                sub = rec(col + 1, used | (1 << i))
                if not sub.is_zero():
                    t = x * sub
                    acc = acc + t if sign > 0 else acc - t
            sign = -sign
        memo[used] = acc
        return acc

    return rec(0, 0)


def determinant(M: PolyMatrix, method: str = "bareiss") -> Polynomial:
    """Exact determinant of a square polynomial matrix.

    ``bareiss`` is fraction-free elimination with row interchange on a zero
    pivot; ``cofactor`` is memoised Laplace expansion.  Both are exact and
    agree on every input.
    """
    if M.rows != M.cols:
        raise NonSquare(f"{M.rows}x{M.cols} matrix has no determinant")
    n = M.rows
    if n == 0:
        return ONE
    rows = M.tolist()
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    if method == "bareiss":
        return _bareiss(rows)
    if method == "cofactor":
        return _cofactor(rows)
    raise ValueError(f"unknown determinant method {method!r}")


def pfaffian(M: PolyMatrix) -> Polynomial:
    """Pfaffian by first-row expansion, normalised so Pf([[0, a], [-a, 0]]) = a.

    Odd size gives 0 and the empty matrix gives 1.
    """
    if M.rows != M.cols:
        raise NonSquare("Pfaffian needs a square matrix")
    if not M.is_skew_symmetric():
        raise NotSkewSymmetric("matrix is not skew-symmetric")
    return _pfaffian_rows(M.tolist())


def _pfaffian_rows(rows: list[list[Polynomial]]) -> Polynomial:
    n = len(rows)
    if n % 2:
        return ZERO
    memo: dict[tuple[int, ...], Polynomial] = {(): ONE}

    def rec(idx: tuple[int, ...]) -> Polynomial:
        if idx in memo:
            return memo[idx]
        first, rest = idx[0], idx[1:]
        acc = ZERO
        for pos, j in enumerate(rest):
            x = rows[first][j]
            if x.is_zero():
                continue
            sub = rec(rest[:pos] + rest[pos + 1:])
            if sub.is_zero():
                continue
            # (-1)^j with j the 1-based column position inside idx
            acc = acc + x * sub if pos % 2 == 0 else acc - x * sub
        memo[idx] = acc
        return acc

    return rec(tuple(range(n)))


def pullback(p: Polynomial, assignment: Mapping[Variable, object]) -> Polynomial:
    """Substitute a polynomial (or rational) for every variable of ``p``."""
    sub: dict[int, Polynomial] = {}
    for v in p._var_indices():
        var_ = Variable.from_index(v)
        if var_ not in assignment:
            raise UnassignedVariable(str(var_))
        sub[v] = Polynomial.coerce(assignment[var_])
    powers: dict[tuple[int, int], Polynomial] = {}

    def power(v: int, e: int) -> Polynomial:
        key = (v, e)
        if key not in powers:
            powers[key] = sub[v] if e == 1 else power(v, e - 1) * sub[v]
        return powers[key]

    acc: dict = {}
    for k, c in p._t.items():
        t = Polynomial.const(c)
        for v, e in _mono_items(k):
            t = t * power(v, e)
            if t.is_zero():
                break
        for kk, cc in t._t.items():
            acc[kk] = acc.get(kk, 0) + cc
    return Polynomial(acc)


# -- Pfaffian minors of the generic skew matrix -------------------------------


def skew_entry(i: int, j: int) -> Polynomial:
    """Entry (i, j) (1-based) of the generic skew matrix in variables a_i_j, i < j."""
    if i == j:
        return ZERO
    return var(i, j) if i < j else -var(j, i)


_PF_CACHE: dict[tuple[int, ...], Polynomial] = {}


def pf_minor(S: Iterable[int]) -> Polynomial:
    """Pf_S of the generic skew matrix: rows and columns indexed by S (1-based), in increasing order."""
    idx = tuple(sorted(set(S)))
    if idx in _PF_CACHE:
        return _PF_CACHE[idx]
    if len(idx) % 2:
        res = ZERO
    elif not idx:
        res = ONE
    else:
        first, rest = idx[0], idx[1:]
        res = ZERO
        for pos, j in enumerate(rest):
            t = skew_entry(first, j) * pf_minor(rest[:pos] + rest[pos + 1:])
            res = res + t if pos % 2 == 0 else res - t
    _PF_CACHE[idx] = res
    return res


def dress_wenzel_check(I1: Iterable[int], I2: Iterable[int], m: int) -> bool:
    """Verify sum_tau (-1)^tau Pf_{I1 xor {i_tau}} Pf_{I2 xor {i_tau}} = 0 on generic skew A of size m."""
    s1, s2 = set(I1), set(I2)
    for i in s1 | s2:
        if not 1 <= i <= m:
            raise IndexOutOfRange(f"index {i} outside 1..{m}")
    if m > MAX_INDEX:
        raise IndexOutOfRange(f"size {m} exceeds {MAX_INDEX}")
    diff = sorted(s1 ^ s2)
    total = ZERO
    for tau, i in enumerate(diff, start=1):
        t = pf_minor(s1 ^ {i}) * pf_minor(s2 ^ {i})
        total = total - t if tau % 2 else total + t
    return total.is_zero()


def dress_wenzel_pairs(m: int) -> Iterable[tuple[frozenset, frozenset]]:
    """All ordered pairs of subsets of {1..m}."""
    universe = range(1, m + 1)
    subsets = [frozenset(c) for r in range(m + 1) for c in combinations(universe, r)]
    for a in subsets:
        for b in subsets:
            yield a, b
