"""Saito coefficient matrices, block determinants and free / free* certificates."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import BlockViolation, NotATower, NotExactDivision, NotLinearInY
from .poly import (
    ONE,
    PolyMatrix,
    Polynomial,
    Variable,
    determinant,
    exact_div,
    gcd,
    is_squarefree,
    proportionality,
    pullback,
    squarefree_part,
)
from .spaces import NONREDUCED, FamilySpec, Factor, build_family, canonical_name, expected_factors
from .vfields import family_fields

FREE = "free"
FREE_STAR = "free-star"
DEGENERATE = "degenerate"

# symbolic full determinants are only expanded up to this matrix size
FULL_DET_LIMIT = 10
# expanded determinant text is emitted only below this many (estimated) terms
EXPAND_LIMIT = 20000


@dataclass(frozen=True)
class SaitoMatrix:
    matrix: PolyMatrix
    block_sizes: tuple[int, ...]
    row_labels: tuple[Variable, ...]
    col_labels: tuple[str, ...]

    @property
    def size(self) -> int:
        return self.matrix.rows

    def block_ranges(self) -> list[range]:
        out, start = [], 0
        for s in self.block_sizes:
            out.append(range(start, start + s))
            start += s
        return out

    def diagonal_block(self, j: int) -> PolyMatrix:
        r = self.block_ranges()[j]
        return self.matrix.submatrix(r, r)

    def block_labels(self) -> list[str]:
        return [f"p{j + 1}" for j in range(len(self.block_sizes))]


def _check_triangular(M: PolyMatrix, sizes: Sequence[int]) -> None:
    start = 0
    for s in sizes:
        for i in range(start, start + s):
            for j in range(start + s, M.cols):
                if not M[i, j].is_zero():
                    raise BlockViolation(i, j, M[i, j])
        start += s


def assemble(fam: FamilySpec) -> SaitoMatrix:
    """Coefficient matrix: column i holds generator i's field in the family's coordinate order."""
    fields = family_fields(fam)
    coords = fam.coord_order
    dicts = [f.as_dict() for f in fields]
    M = PolyMatrix([[d[v] for d in dicts] for v in coords])
    _check_triangular(M, fam.block_sizes)
    return SaitoMatrix(M, tuple(fam.block_sizes), tuple(coords), tuple(g.label for g in fam.generators))


def block_determinants(S: SaitoMatrix) -> list[Polynomial]:
    return [determinant(S.diagonal_block(j)) for j in range(len(S.block_sizes))]


def open_orbit_check(S: SaitoMatrix) -> bool:
    """True iff every relative coefficient determinant is a nonzero polynomial."""
    return all(not d.is_zero() for d in block_determinants(S))


# -- exact factor bookkeeping -----------------------------------------------------


@dataclass
class Cancellation:
    constant: Fraction | None
    numer_left: list[Polynomial]
    denom_left: list[Polynomial]

    @property
    def exact(self) -> bool:
        return self.constant is not None


def cancel(numer: Sequence[Polynomial], denom: Sequence[Polynomial]) -> Cancellation:
    """Compare prod(numer) with prod(denom) without expanding either product.

    Each denominator factor is divided out of the numerator factors, splitting
    by gcd where needed.  When everything cancels, ``constant`` is the exact
    ratio prod(numer) / prod(denom).
    """
    num = [p for p in numer]
    left_d = []
    for d in denom:
        for i, n in enumerate(num):
            if d.is_constant():
                break
            if n.is_constant():
                continue
            c = proportionality(n, d)
            if c is not None:
                num[i] = Polynomial.const(c)
                d = ONE
                break
            try:
                num[i] = exact_div(n, d)
                d = ONE
                break
            except NotExactDivision:
                pass
            g = gcd(d, n)
            if not g.is_constant():
                num[i] = exact_div(n, g)
                d = exact_div(d, g)
        left_d.append(d)
    left_n = [n for n in num if not n.is_constant()]
    bad_d = [d for d in left_d if not d.is_constant()]
    if left_n or bad_d:
        return Cancellation(None, left_n, bad_d)
    c = Fraction(1)
    for n in num:
        c *= Fraction(n.constant_value())
    for d in left_d:
        c /= Fraction(d.constant_value())
    return Cancellation(c, [], [])


def _expand(factors: Sequence[Factor]) -> list[Polynomial]:
    return [f.poly for f in factors for _ in range(f.power)]


def _product(polys: Sequence[Polynomial]) -> Polynomial:
    out = ONE
    for p in polys:
        out = out * p
    return out


def _eval_det(M: PolyMatrix, point: Mapping[Variable, int]) -> Fraction:
    rows = [[Fraction(M[i, j].evaluate(point)) for j in range(M.cols)] for i in range(M.rows)]
    n = len(rows)
    det = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if rows[i][k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            rows[k], rows[piv] = rows[piv], rows[k]
            det = -det
        det *= rows[k][k]
        for i in range(k + 1, n):
            f = rows[i][k] / rows[k][k]
            if f:
                for j in range(k, n):
                    rows[i][j] -= f * rows[k][j]
    return det


def crosscheck_determinant(S: SaitoMatrix, blocks: Sequence[Polynomial], points: int = 3, seed: int = 7) -> bool:
    """Check det(S) = prod(blocks) independently of the block structure.

    Matrices up to FULL_DET_LIMIT are expanded symbolically; larger ones are
    compared by exact rational evaluation at random integer points.
    """
    if S.size <= FULL_DET_LIMIT:
        return determinant(S.matrix) == _product(blocks)
    rng = random.Random(seed)
    for _ in range(points):
        point = {v: rng.randint(-50, 50) for v in S.row_labels}
        prod = Fraction(1)
        for b in blocks:
            prod *= Fraction(b.evaluate(point))
        if _eval_det(S.matrix, point) != prod:
            return False
    return True


def same_support(blocks: Sequence[Polynomial], reduced: Sequence[Polynomial]) -> bool:
    """True iff the radical of prod(blocks) equals prod(reduced) up to a constant.

    ``reduced`` must be squarefree and pairwise coprime (checked here).
    """
    for i, r in enumerate(reduced):
        if not is_squarefree(r):
            return False
        for s in reduced[i + 1:]:
            if not gcd(r, s).is_constant():
                return False
    used = [False] * len(reduced)
    for b in blocks:
        for i, r in enumerate(reduced):
            while not b.is_constant():
                try:
                    b = exact_div(b, r)
                    used[i] = True
                except NotExactDivision:
                    break
        if not b.is_constant():
            return False
    return all(used)


# -- reports ------------------------------------------------------------------------


@dataclass
class DivisorReport:
    family: str
    m: int
    block_labels: list[str]
    block_dets: list[Polynomial]
    squarefree: bool
    pairwise_coprime: bool
    classification: str
    paper_match: bool
    constant: Fraction | None
    component_count: tuple[int, int]
    full_check: bool
    reduced_match: bool | None = None
    reduced_equation: list[Factor] = field(default_factory=list)

    @property
    def nonzero(self) -> bool:
        return all(not b.is_zero() for b in self.block_dets)

    def determinant(self) -> Polynomial:
        return _product(self.block_dets)

    def determinant_text(self) -> str:
        est = 1
        for b in self.block_dets:
            est *= max(len(b), 1)
        if est <= EXPAND_LIMIT:
            return self.determinant().to_text()
        return " * ".join(f"({b.to_text()})" for b in self.block_dets)


def classify(S: SaitoMatrix, fam: FamilySpec) -> DivisorReport:
    blocks = block_determinants(S)
    labels = S.block_labels()
    full = crosscheck_determinant(S, blocks)
    reduced = expected_factors(fam, reduced=True)
    exp = expected_factors(fam)
    if any(b.is_zero() for b in blocks):
        return DivisorReport(
            fam.name, fam.m, labels, blocks, False, False, DEGENERATE, False, None,
            (len(blocks), len(reduced)), full,
        )
    sq_each = all(is_squarefree(b) for b in blocks)
    coprime = all(
        gcd(blocks[i], blocks[j]).is_constant() for i in range(len(blocks)) for j in range(i + 1, len(blocks))
    )
    squarefree = sq_each and coprime
    c = cancel(blocks, _expand(exp))
    cls = FREE if squarefree else FREE_STAR
    report = DivisorReport(
        fam.name, fam.m, labels, blocks, squarefree, coprime, cls, c.exact, c.constant,
        (len(blocks), len(reduced)), full,
    )
    if fam.name in NONREDUCED:
        report.reduced_equation = reduced
        report.reduced_match = same_support(blocks, [squarefree_part(f.poly) for f in reduced])
    return report


def expected_equation(fam: FamilySpec, reduced: bool = False) -> Polynomial:
    """Expanded expected equation (the coefficient determinant unless ``reduced``)."""
    return _product(_expand(expected_factors(fam, reduced)))


def expected_classification(fam: FamilySpec) -> str:
    """Verdict predicted for the family; the smallest general and skew cases are reduced."""
    if fam.name == "GenLU" and fam.m == 1:
        return FREE
    if fam.name == "SkewD" and fam.m == 2:
        return FREE
    return FREE_STAR if fam.name in NONREDUCED else FREE


# -- towers --------------------------------------------------------------------------


@dataclass
class TowerResult:
    ok: bool
    constant: Fraction | None
    top_factors: list[Polynomial]
    new_blocks: int


def tower_step(name: str, m: int) -> TowerResult:
    """det(m) = (new factors) * pullback(det(m-1)) up to a constant, checked factor-wise.

    The projection forgets the coordinates added at level m, so det(m-1) is
    pulled back by the identity on the surviving coordinates.
    """
    name = canonical_name(name)
    up = build_family(name, m) if m >= 1 else None
    if up is None or m - 1 < up.min_m:
        raise NotATower(f"{name} at m = {m} has no predecessor")
    down = build_family(name, m - 1)
    S_up, S_down = assemble(up), assemble(down)
    b_up = block_determinants(S_up)
    b_down = block_determinants(S_down)
    ident = {v: Polynomial.var(v) for v in down.space.coordinates()}
    pulled = [pullback(b, ident) for b in b_down]
    # the quotient by the new coordinates reproduces the lower level's fields
    k = len(b_down)
    lower_same = S_up.row_labels[: sum(S_down.block_sizes)] == S_down.row_labels
    res = cancel(b_up, pulled)
    if res.exact:
        top = [b for b in b_up[k:]]
        return TowerResult(lower_same, res.constant, top, len(b_up) - k)
    # factors left over after removing the lower level must be polynomial
    if res.denom_left:
        return TowerResult(False, None, res.numer_left, len(b_up) - k)
    return TowerResult(lower_same, Fraction(1), res.numer_left, len(b_up) - k)


# -- irreducibility certificate ---------------------------------------------------------

CERTIFIED = "certified-irreducible"
INCONCLUSIVE = "inconclusive"


def lemma_irreducible(
    f: Polynomial,
    y: Variable,
    witnesses: Sequence[tuple[Polynomial, Mapping[Variable, object]]] | None = None,
) -> str:
    """Irreducibility certificate for f linear in y, with g = df/dy.

    (i) gcd(f, g) = 1 certifies.  (ii) Alternatively ``witnesses`` lists
    (g1, point) pairs, one per irreducible factor g1 of g (irreducibility of
    each g1 is the caller's claim); g1 must vanish at the point while f does
    not, and the g1 must account for all of g.  Never reports "reducible".
    """
    if f.degree_in(y) != 1:
        raise NotLinearInY(f"degree of f in {y} is {f.degree_in(y)}")
    g = f.diff(y)
    if gcd(f, g).is_constant():
        return CERTIFIED
    if not witnesses:
        return INCONCLUSIVE
    rest = g
    for g1, point in witnesses:
        if g1.is_constant():
            return INCONCLUSIVE
        if g1.evaluate(point) != 0 or f.evaluate(point) == 0:
            return INCONCLUSIVE
        while True:
            try:
                rest = exact_div(rest, g1)
            except NotExactDivision:
                break
    return CERTIFIED if rest.is_constant() else INCONCLUSIVE


def symmetric_witness(ell: int, m: int | None = None) -> dict[Variable, int]:
    """Symmetric matrix I_{ell-2} + [[0,1],[1,0]] + 0 where det A^(ell-1) = 0 but det A^(ell) != 0."""
    m = m or ell
    out = {}
    for i in range(1, m + 1):
        for j in range(i, m + 1):
            out[Variable(i, j)] = 0
    for i in range(1, ell - 1):
        out[Variable(i, i)] = 1
    if ell >= 2:
        out[Variable(ell - 1, ell)] = 1
    return out
