"""Representation vector fields, the Pfaffian fields eta_k, and Lie brackets."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import ClosureFailure, NotExactDivision, IndexOutOfRange, ShapeMismatch, SpaceMismatch, ValueNotInSpace
from .poly import ZERO, Polynomial, Variable, exact_div, pf_minor
from .spaces import (
    BILINEAR,
    ETA,
    GENERAL,
    LEFT,
    RIGHT,
    SKEW,
    SYMMETRIC,
    FamilySpec,
    Generator,
    SpaceKind,
    Skew,
    epsilon,
    as_matrix,
    commutator,
)

Elems = Sequence[tuple[int, int]]


@dataclass(frozen=True)
class PolyVectorField:
    """sum_i coeffs[i] * d/d(coordinate i) on a matrix space."""

    space: SpaceKind
    coeffs: tuple[Polynomial, ...]
    label: str = ""

    def __post_init__(self):
        if len(self.coeffs) != self.space.dim:
            raise ShapeMismatch(f"{len(self.coeffs)} coefficients for a space of dimension {self.space.dim}")

    @property
    def coords(self) -> list[Variable]:
        return self.space.coordinates()

    def coefficient(self, v: Variable) -> Polynomial:
        return self.coeffs[self.coords.index(v)]

    def as_dict(self) -> dict[Variable, Polynomial]:
        return dict(zip(self.coords, self.coeffs))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def _check(self, other: "PolyVectorField") -> None:
        if self.space != other.space:
            raise SpaceMismatch(f"{self.space.describe()} vs {other.space.describe()}")

    def __add__(self, other: "PolyVectorField") -> "PolyVectorField":
        self._check(other)
        return PolyVectorField(self.space, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "PolyVectorField") -> "PolyVectorField":
        self._check(other)
        return PolyVectorField(self.space, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "PolyVectorField":
        return PolyVectorField(self.space, tuple(-a for a in self.coeffs), self.label)

    def scale(self, c) -> "PolyVectorField":
        return PolyVectorField(self.space, tuple(a * c for a in self.coeffs))

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyVectorField) and self.space == other.space and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.space, self.coeffs))

    def apply(self, p: Polynomial) -> Polynomial:
        """Derivative of ``p`` along the field."""
        acc = ZERO
        for v, c in zip(self.coords, self.coeffs):
            if not c.is_zero():
                d = p.diff(v)
                if not d.is_zero():
                    acc = acc + c * d
        return acc

    def to_text(self) -> str:
        parts = [f"({c}) * d/d{v}" for v, c in zip(self.coords, self.coeffs) if not c.is_zero()]
        return " + ".join(parts) if parts else "0"

    def __str__(self) -> str:
        return self.to_text()


def zero_field(space: SpaceKind) -> PolyVectorField:
    return PolyVectorField(space, tuple(ZERO for _ in range(space.dim)))


def _normalize(B) -> tuple[tuple[int, int], ...]:
    """Accept None / () for zero, a single (i, j) or a sequence of positions."""
    if B is None:
        return ()
    B = tuple(B)
    if len(B) == 2 and all(isinstance(x, int) for x in B):
        return (B,)  # type: ignore[return-value]
    return tuple(tuple(x) for x in B)  # type: ignore[misc]


def _value_to_field(space: SpaceKind, value, label: str) -> PolyVectorField:
    """Read coefficients off a value matrix given as a function (i, j) -> Polynomial."""
    for v in space.zeros:
        if not value(v.row, v.col).is_zero():
            raise ValueNotInSpace(f"field leaves the subspace at {v}")
    coeffs = []
    for v in space.coordinates():
        coeffs.append(value(v.row, v.col))
    return PolyVectorField(space, tuple(coeffs), label)


def rep_field_linear(B, C, space: SpaceKind, label: str = "") -> PolyVectorField:
    """Field of the action A -> B A C^{-1}: value B*A - A*C at the generic A."""
    if space.kind != GENERAL:
        raise ShapeMismatch("linear action lives on a general matrix space")
    B, C = _normalize(B), _normalize(C)
    m, p = space.m, space.p
    for i, j in B:
        if not (1 <= i <= m and 1 <= j <= m):
            raise ShapeMismatch(f"E{i}{j} is not an {m}x{m} matrix unit")
    for i, j in C:
        if not (1 <= i <= p and 1 <= j <= p):
            raise ShapeMismatch(f"E{i}{j} is not a {p}x{p} matrix unit")

    def value(i, j):
        acc = ZERO
        for r, s in B:
            if r == i:
                acc = acc + space.entry(s, j)
        for r, s in C:
            if s == j:
                acc = acc - space.entry(i, r)
        return acc

    return _value_to_field(space, value, label)


def rep_field_bilinear(B, space: SpaceKind, label: str = "") -> PolyVectorField:
    """Field of the action A -> B A B^T: value B*A + A*B^T, read at i <= j (Sym) or i < j (Sk)."""
    if space.kind not in (SYMMETRIC, SKEW):
        raise ShapeMismatch("bilinear action lives on a symmetric or skew space")
    B = _normalize(B)
    m = space.m
    for i, j in B:
        if not (1 <= i <= m and 1 <= j <= m):
            raise ShapeMismatch(f"E{i}{j} is not an {m}x{m} matrix unit")

    def value(i, j):
        acc = ZERO
        for r, s in B:
            if r == i:
                acc = acc + space.entry(s, j)
            if r == j:
                acc = acc + space.entry(i, s)
        return acc

    # the value matrix must again be symmetric / skew
    sign = 1 if space.kind == SYMMETRIC else -1
    touched = {r for r, _ in B}
    for i in touched:
        for j in range(1, m + 1):
            if value(i, j) != value(j, i) * sign:
                raise ValueNotInSpace(f"value matrix is not in {space.describe()} at ({i}, {j})")
    return _value_to_field(space, value, label)


def eta_field(m: int, k: int, space: SpaceKind | None = None) -> PolyVectorField:
    """eta_k = sum_{k<p<q<=m} Pf_{eps(k)..k,p,q} d/da_pq on Sk_m."""
    if not 2 <= k <= m - 2:
        raise IndexOutOfRange(f"eta_{k} needs 2 <= k <= m-2 (m = {m})")
    space = space or Skew(m)
    base = list(range(epsilon(k), k + 1))
    coeffs = []
    for v in space.coordinates():
        if k < v.row < v.col <= m:
            coeffs.append(pf_minor(base + [v.row, v.col]))
        else:
            coeffs.append(ZERO)
    return PolyVectorField(space, tuple(coeffs), f"eta{k}")


def generator_field(g: Generator, space: SpaceKind) -> PolyVectorField:
    if g.side == LEFT:
        return rep_field_linear(g.elems, None, space, g.label)
    if g.side == RIGHT:
        return rep_field_linear(None, g.elems, space, g.label)
    if g.side == BILINEAR:
        return rep_field_bilinear(g.elems, space, g.label)
    if g.side == ETA:
        return eta_field(space.m, g.k, space)
    raise ValueError(f"unknown generator side {g.side!r}")


def family_fields(fam: FamilySpec) -> list[PolyVectorField]:
    return [generator_field(g, fam.space) for g in fam.generators]


def lie_bracket(X: PolyVectorField, Y: PolyVectorField) -> PolyVectorField:
    """[X, Y]_i = sum_j X_j dY_i/dx_j - Y_j dX_i/dx_j."""
    X._check(Y)
    return PolyVectorField(X.space, tuple(X.apply(yi) - Y.apply(xi) for xi, yi in zip(X.coeffs, Y.coeffs)))


def matrix_commutator(g: Generator, h: Generator, sizes: tuple[int, int]) -> dict:
    """[g, h] as a sparse matrix of gl_{n1} x gl_{n2} (block diagonal embedding)."""
    return commutator(as_matrix(g, sizes), as_matrix(h, sizes))


def field_of_matrix(mat: Mapping[tuple[int, int], Fraction], side_kind: str, space: SpaceKind, sizes) -> PolyVectorField:
    """Field of a (possibly non-elementary) Lie algebra element, by linearity."""
    acc = zero_field(space)
    n1 = sizes[0]
    for (i, j), c in mat.items():
        if side_kind == BILINEAR:
            f = rep_field_bilinear((i, j), space)
        elif i > n1:
            f = rep_field_linear(None, (i - n1, j - n1), space)
        else:
            f = rep_field_linear((i, j), None, space)
        acc = acc + f.scale(c)
    return acc


# -- bracket closure ---------------------------------------------------------------


def _flatten(f: PolyVectorField) -> dict:
    out = {}
    for idx, c in enumerate(f.coeffs):
        for k, a in c._t.items():
            out[(idx, k)] = Fraction(a)
    return out


class LinearSpan:
    """Echelon form of a list of fields over Q, tracking how each row was combined."""

    def __init__(self, basis: Sequence[PolyVectorField]):
        self.n = len(basis)
        self.rows: list[tuple[object, dict, dict]] = []
        for i, f in enumerate(basis):
            vec, combo = self._reduce(_flatten(f), {i: Fraction(1)})
            if vec:
                piv = min(vec)
                inv = 1 / vec[piv]
                vec = {k: x * inv for k, x in vec.items()}
                combo = {k: x * inv for k, x in combo.items()}
                self.rows.append((piv, vec, combo))

    def _reduce(self, vec: dict, combo: dict) -> tuple[dict, dict]:
        for piv, rv, rc in self.rows:
            c = vec.get(piv)
            if c:
                for k, x in rv.items():
                    y = vec.get(k, 0) - c * x
                    if y:
                        vec[k] = y
                    else:
                        vec.pop(k, None)
                for k, x in rc.items():
                    combo[k] = combo.get(k, 0) - c * x
        return vec, combo

    def solve(self, target: PolyVectorField) -> list[Fraction] | None:
        vec, combo = self._reduce(_flatten(target), {})
        if vec:
            return None
        sol = [Fraction(0)] * self.n
        for k, x in combo.items():
            sol[k] = -x
        return sol


def solve_combination(target: PolyVectorField, basis: Sequence[PolyVectorField]) -> list[Fraction] | None:
    """Rational constants c with target = sum c_i basis_i, or None."""
    return LinearSpan(basis).solve(target)


@dataclass
class BracketEntry:
    left: str
    right: str
    verdict: bool
    witness: str
    discrepancy: str = ""


@dataclass
class BracketReport:
    family: str
    m: int
    pairs: list[BracketEntry] = field(default_factory=list)
    linear_identity: bool = True

    @property
    def closed(self) -> bool:
        return all(p.verdict for p in self.pairs)

    @property
    def discrepancies(self) -> list[BracketEntry]:
        return [p for p in self.pairs if p.discrepancy]


def _fmt_combo(coeffs: Sequence[Fraction], labels: Sequence[str]) -> str:
    parts = [f"{c}*{l}" for c, l in zip(coeffs, labels) if c != 0]
    return " + ".join(parts) if parts else "0"


def xi_eta_closed_form(g: Generator, k: int) -> int:
    """Multiple of eta_k predicted for [xi_g, eta_k] by the bracket table."""
    if len(g.elems) != 1:
        return 0
    p, q = g.elems[0]
    return 1 if p == q and epsilon(k) <= p <= k else 0


def eta_eta_closed_form(k: int, l: int) -> tuple[Fraction, Polynomial]:
    """[eta_k, eta_l] = c * P * eta_l for k < l, returned as (c, P)."""
    delta = 1 if epsilon(k) == epsilon(l) else 0
    c = Fraction(delta + l - k - 1, 2)
    return c, pf_minor(range(epsilon(k), k + 1))


def verify_bracket_closure(fam: FamilySpec, *, strict: bool = False) -> BracketReport:
    """Check that every ordered pair of generator fields brackets back into the module.

    Linear pairs are matched to a constant combination of the linear fields.
    Pairs involving eta fields are compared with the closed forms of the
    bracket table; when the table's constant is off, a polynomial multiple of
    the stated field is still an exact witness and the discrepancy is
    recorded.
    """
    gens = fam.generators
    fields = family_fields(fam)
    labels = [g.label for g in gens]
    lin_idx = [i for i, g in enumerate(gens) if g.side != ETA]
    lin_fields = [fields[i] for i in lin_idx]
    lin_labels = [labels[i] for i in lin_idx]
    span = LinearSpan(lin_fields)
    report = BracketReport(fam.name, fam.m)
    side_kind = BILINEAR if fam.space.kind != GENERAL else LEFT
    for a, ga in enumerate(gens):
        for b, gb in enumerate(gens):
            br = lie_bracket(fields[a], fields[b])
            if ga.side != ETA and gb.side != ETA:
                combo = span.solve(br)
                ok = combo is not None
                witness = _fmt_combo(combo, lin_labels) if ok else "no constant combination"
                # [xi_A, xi_B] + xi_[A,B] = 0
                comm = matrix_commutator(ga, gb, fam.group_sizes)
                if comm:
                    ident = br + field_of_matrix(comm, side_kind, fam.space, fam.group_sizes)
                else:
                    ident = br
                if not ident.is_zero():
                    report.linear_identity = False
                entry = BracketEntry(labels[a], labels[b], ok, witness)
            else:
                entry = _eta_entry(ga, gb, br, fields, gens, labels)
            report.pairs.append(entry)
            if strict and not entry.verdict:
                raise ClosureFailure((labels[a], labels[b]), br)
    return report


def _eta_entry(ga, gb, br, fields, gens, labels) -> BracketEntry:
    idx = {g.label: i for i, g in enumerate(gens)}
    la, lb = ga.label, gb.label
    if ga.side == ETA and gb.side == ETA:
        k, l = ga.k, gb.k
        if k == l:
            return BracketEntry(la, lb, br.is_zero(), "0", "" if br.is_zero() else "nonzero self-bracket")
        lo, hi = (k, l) if k < l else (l, k)
        sign = 1 if k < l else -1
        c, P = eta_eta_closed_form(lo, hi)
        target = fields[idx[f"eta{hi}"]]
        predicted = target.scale(P * (c * sign))
        if br == predicted:
            return BracketEntry(la, lb, True, f"{sign * c}*Pf{{{epsilon(lo)}..{lo}}}*eta{hi}")
        ratio = _field_ratio(br, target)
        if ratio is not None:
            return BracketEntry(
                la, lb, True, f"({ratio})*eta{hi}",
                f"table predicts {sign * c}*Pf{{{epsilon(lo)}..{lo}}}*eta{hi}",
            )
        return BracketEntry(la, lb, False, "no multiple of eta", "not a multiple of the predicted field")
    # one linear field, one eta field
    if ga.side == ETA:
        g, k, sign = gb, ga.k, -1
    else:
        g, k, sign = ga, gb.k, 1
    target = fields[idx[f"eta{k}"]]
    c = xi_eta_closed_form(g, k) * sign
    predicted = target.scale(c)
    if br == predicted:
        return BracketEntry(la, lb, True, f"{c}*eta{k}" if c else "0")
    ratio = _field_ratio(br, target)
    if ratio is not None:
        return BracketEntry(la, lb, True, f"({ratio})*eta{k}", f"table predicts {c}*eta{k}")
    return BracketEntry(la, lb, False, "no multiple of eta", "not a multiple of the predicted field")


def _field_ratio(X: PolyVectorField, Y: PolyVectorField) -> Polynomial | None:
    """Polynomial P with X = P * Y, if one exists."""
    if X.is_zero():
        return ZERO
    ratio = None
    for x, y in zip(X.coeffs, Y.coeffs):
        if y.is_zero():
            if not x.is_zero():
                return None
            continue
        if ratio is None:
            try:
                ratio = exact_div(x, y)
            except NotExactDivision:
                return None
        if ratio * y != x:
            return None
    return ratio


def project_field(f: PolyVectorField, target: SpaceKind) -> PolyVectorField:
    """Restrict a field to the coordinates of a smaller space (tower projection)."""
    d = f.as_dict()
    return PolyVectorField(target, tuple(d[v] for v in target.coordinates()), f.label)
