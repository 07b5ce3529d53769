"""Matrix spaces, solvable group generators and the block bases of each family.

Every family is stored as an ordered list of blocks.  A block pairs a set of
coordinates (a complementary basis of one invariant subspace in the next)
with the group generators acting on it.  Blocks are listed from the smallest
matrix indices upward, which makes the coefficient matrix lower block
triangular.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import NotClosedUnderBracket, SizeTooSmall, UnknownFamily
from .poly import ONE, ZERO, PolyMatrix, Polynomial, Variable, determinant, pf_minor, var

GENERAL = "general"
SYMMETRIC = "symmetric"
SKEW = "skew"


@dataclass(frozen=True)
class SpaceKind:
    """M_{m,p}, Sym_m or Sk_m, optionally restricted by forcing some entries to zero."""

    kind: str
    m: int
    p: int
    zeros: frozenset = frozenset()

    def __post_init__(self):
        if self.kind not in (GENERAL, SYMMETRIC, SKEW):
            raise ValueError(f"unknown space kind {self.kind!r}")
        if self.m < 1 or self.p < 1:
            raise ValueError("matrix sizes must be positive")
        if self.kind != GENERAL and self.m != self.p:
            raise ValueError("symmetric and skew spaces are square")

    def full_basis(self) -> list[Variable]:
        if self.kind == GENERAL:
            return [Variable(i, j) for i in range(1, self.m + 1) for j in range(1, self.p + 1)]
        if self.kind == SYMMETRIC:
            return [Variable(i, j) for i in range(1, self.m + 1) for j in range(i, self.m + 1)]
        return [Variable(i, j) for i in range(1, self.m + 1) for j in range(i + 1, self.m + 1)]

    def coordinates(self) -> list[Variable]:
        return [v for v in self.full_basis() if v not in self.zeros]

    @property
    def dim(self) -> int:
        return len(self.coordinates())

    def entry(self, i: int, j: int) -> Polynomial:
        """Entry (i, j) (1-based) of the generic matrix of this space."""
        if self.kind == GENERAL:
            v = Variable(i, j)
            return ZERO if v in self.zeros else Polynomial.var(v)
        if i == j and self.kind == SKEW:
            return ZERO
        lo, hi = (i, j) if i <= j else (j, i)
        v = Variable(lo, hi)
        if v in self.zeros:
            return ZERO
        x = Polynomial.var(v)
        return -x if (self.kind == SKEW and i > j) else x

    def generic_matrix(self) -> PolyMatrix:
        return PolyMatrix([[self.entry(i, j) for j in range(1, self.p + 1)] for i in range(1, self.m + 1)])

    def describe(self) -> str:
        base = {GENERAL: f"M_{self.m},{self.p}", SYMMETRIC: f"Sym_{self.m}", SKEW: f"Sk_{self.m}"}[self.kind]
        if self.zeros:
            base += " with " + ", ".join(f"{v}=0" for v in sorted(self.zeros))
        return base


def General(m: int, p: int, zeros: Iterable[Variable] = ()) -> SpaceKind:
    return SpaceKind(GENERAL, m, p, frozenset(zeros))


def Symmetric(m: int, zeros: Iterable[Variable] = ()) -> SpaceKind:
    return SpaceKind(SYMMETRIC, m, m, frozenset(zeros))


def Skew(m: int, zeros: Iterable[Variable] = ()) -> SpaceKind:
    return SpaceKind(SKEW, m, m, frozenset(zeros))


LEFT = "left"
RIGHT = "right"
BILINEAR = "bilinear"
ETA = "eta"

Elems = tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class Generator:
    """One Lie algebra basis element: a sum of elementary matrices on one side, or an eta marker."""

    side: str
    elems: Elems = ()
    k: int = 0

    @property
    def label(self) -> str:
        if self.side == ETA:
            return f"eta{self.k}"
        body = "+".join(f"E{i}{j}" if max(i, j) < 10 else f"E{i},{j}" for i, j in self.elems)
        if self.side == LEFT:
            return f"({body},0)"
        if self.side == RIGHT:
            return f"(0,{body})"
        return body

    def __str__(self) -> str:
        return self.label


def left(*elems: tuple[int, int]) -> Generator:
    return Generator(LEFT, tuple(elems))


def right(*elems: tuple[int, int]) -> Generator:
    return Generator(RIGHT, tuple(elems))


def bil(*elems: tuple[int, int]) -> Generator:
    return Generator(BILINEAR, tuple(elems))


def eta(k: int) -> Generator:
    return Generator(ETA, (), k)


@dataclass(frozen=True)
class Block:
    coords: tuple[Variable, ...]
    generators: tuple[Generator, ...]


@dataclass(frozen=True)
class FamilySpec:
    name: str
    m: int
    space: SpaceKind
    blocks: tuple[Block, ...]
    min_m: int
    # sizes of the matrices on the left and right of the action
    group_sizes: tuple[int, int] = (0, 0)

    @property
    def cli_name(self) -> str:
        return CLI_NAMES[self.name]

    @property
    def generators(self) -> list[Generator]:
        return [g for b in self.blocks for g in b.generators]

    @property
    def coord_order(self) -> list[Variable]:
        return [v for b in self.blocks for v in b.coords]

    @property
    def block_sizes(self) -> list[int]:
        return [len(b.coords) for b in self.blocks]

    @property
    def linear_generators(self) -> list[Generator]:
        return [g for g in self.generators if g.side != ETA]


def epsilon(k: int) -> int:
    """1 or 2, of parity opposite to k."""
    return 1 if k % 2 == 0 else 2


# -- family constructors --------------------------------------------------------


def _E(i, j):
    return Variable(i, j)


def _sym_blocks(m: int, start: int = 1) -> list[Block]:
    return [
        Block(tuple(_E(i, k) for i in range(1, k + 1)), tuple(bil((k, j)) for j in range(1, k + 1)))
        for k in range(start, m + 1)
    ]


def _lu_blocks(rows: int, cols: int, modified: bool, first_col: int = 1) -> list[Block]:
    """Interleaved column and row blocks for B x N (or B x C) acting on M_{rows,cols}."""
    out = []
    for lp in range(first_col - 1, cols):
        c = lp + 1
        nrow = min(lp, rows)
        if nrow:
            gens = range(2, c + 1) if modified else range(1, c)
            out.append(Block(tuple(_E(i, c) for i in range(1, nrow + 1)), tuple(right((j, c)) for j in gens)))
        r = lp + 1
        if r <= rows and r <= cols:
            out.append(Block(tuple(_E(r, j) for j in range(1, r + 1)), tuple(left((r, j)) for j in range(1, r + 1))))
    return out


def _skew_g_blocks(m: int) -> list[Block]:
    out = []
    for lp in range(1, m):
        coords = tuple(_E(i, lp + 1) for i in range(1, lp + 1))
        if lp % 2 == 0:
            gens = tuple(bil((lp + 1, j)) for j in range(1, lp + 1))
        else:
            gens = tuple(bil((lp + 1, j)) for j in range(1, lp)) + (bil((lp + 1, lp + 1)),)
        out.append(Block(coords, gens))
    return out


def _skew_d_blocks(m: int) -> list[Block]:
    out = []
    for b in range(m // 2):
        r1, r2 = 2 * b + 1, 2 * b + 2
        coords = tuple(_E(i, r1) for i in range(1, r1)) + tuple(_E(i, r2) for i in range(1, r2))
        gens = (
            tuple(bil((r1, j)) for j in range(1, r1))
            + tuple(bil((r2, j)) for j in range(1, r1))
            + (bil((r1, r1), (r2, r2)),)
        )
        out.append(Block(coords, gens))
    if m % 2:
        out.append(Block(tuple(_E(i, m) for i in range(1, m)), tuple(bil((m, j)) for j in range(1, m))))
    return out


def _skew_nonlinear_blocks(m: int) -> list[Block]:
    out = [Block((_E(1, 2), _E(1, 3), _E(2, 3)), (bil((1, 1)), bil((2, 2)), bil((3, 3))))]
    for lp in range(3, m):
        coords = tuple(_E(i, lp + 1) for i in range(1, lp + 1))
        gens = tuple(bil((lp + 1, j)) for j in range(3, lp + 2)) + (eta(lp - 1),)
        out.append(Block(coords, gens))
    return out


def _sym_restrict_1(m: int) -> list[Block]:
    return [
        Block((_E(1, 2), _E(2, 2)), (bil((1, 1)), bil((2, 2)))),
        Block((_E(1, 3), _E(2, 3), _E(3, 3)), (bil((3, 1)), bil((3, 2)), bil((3, 3)))),
    ] + _sym_blocks(m, 4)


def _sym_restrict_2(m: int) -> list[Block]:
    first = Block(
        (_E(1, 3), _E(2, 3), _E(3, 3), _E(1, 4), _E(2, 4), _E(3, 4), _E(4, 4)),
        (bil((1, 1)), bil((2, 2)), bil((3, 2)), bil((3, 3)), bil((4, 2)), bil((4, 3)), bil((4, 4))),
    )
    return [first] + _sym_blocks(m, 5)


def _gen_restrict(rows: int, cols: int) -> list[Block]:
    first = Block((_E(1, 2), _E(2, 1), _E(2, 2)), (left((1, 1)), left((2, 2)), right((2, 2))))
    return [first] + _lu_blocks(rows, cols, modified=True, first_col=3)


def _sym_extension(m: int) -> list[Block]:
    first = Block(
        (_E(1, 2), _E(2, 2), _E(1, 3), _E(2, 3), _E(3, 3)),
        (bil((1, 1)), bil((2, 2)), bil((2, 3)), bil((3, 2)), bil((3, 3))),
    )
    return [first] + _sym_blocks(m, 4)


CLI_NAMES = {
    "Sym": "sym",
    "GenLU": "gen-lu",
    "SkewD": "skew-d",
    "SkewG": "skew-g",
    "ModLU": "mod-lu",
    "ModLURect": "mod-lu-rect",
    "SkewNonlinear": "skew-nonlinear",
    "SymRestrict1": "sym-restrict-1",
    "SymRestrict2": "sym-restrict-2",
    "GenRestrict": "gen-restrict",
    "GenRestrictRect": "gen-restrict-rect",
    "SymExtension": "sym-extension",
}
FROM_CLI = {v: k for k, v in CLI_NAMES.items()}

MIN_M = {
    "Sym": 1,
    "GenLU": 1,
    "SkewD": 2,
    "SkewG": 3,
    "ModLU": 2,
    "ModLURect": 2,
    "SkewNonlinear": 3,
    "SymRestrict1": 3,
    "SymRestrict2": 4,
    "GenRestrict": 3,
    "GenRestrictRect": 3,
    "SymExtension": 3,
}

FAMILY_NAMES = list(CLI_NAMES)


def canonical_name(name: str) -> str:
    if name in CLI_NAMES:
        return name
    if name in FROM_CLI:
        return FROM_CLI[name]
    raise UnknownFamily(name)


def build_family(name: str, m: int) -> FamilySpec:
    """Descriptor of family ``name`` at size ``m`` (either the CamelCase or the CLI name)."""
    name = canonical_name(name)
    lo = MIN_M[name]
    if m < lo:
        raise SizeTooSmall(f"{name} needs m >= {lo}, got {m}")
    if m > 9:
        raise SizeTooSmall(f"m = {m} exceeds the supported range (<= 9)")
    z1 = {_E(1, 1)}
    if name == "Sym":
        space, blocks, sizes = Symmetric(m), _sym_blocks(m), (m, 0)
    elif name == "GenLU":
        space, blocks, sizes = General(m, m), _lu_blocks(m, m, modified=False), (m, m)
    elif name == "ModLU":
        space, blocks, sizes = General(m, m), _lu_blocks(m, m, modified=True), (m, m)
    elif name == "ModLURect":
        space, blocks, sizes = General(m - 1, m), _lu_blocks(m - 1, m, modified=True), (m - 1, m)
    elif name == "SkewD":
        space, blocks, sizes = Skew(m), _skew_d_blocks(m), (m, 0)
    elif name == "SkewG":
        space, blocks, sizes = Skew(m), _skew_g_blocks(m), (m, 0)
    elif name == "SkewNonlinear":
        space, blocks, sizes = Skew(m), _skew_nonlinear_blocks(m), (m, 0)
    elif name == "SymRestrict1":
        space, blocks, sizes = Symmetric(m, z1), _sym_restrict_1(m), (m, 0)
    elif name == "SymRestrict2":
        space = Symmetric(m, {_E(1, 1), _E(1, 2), _E(2, 2)})
        blocks, sizes = _sym_restrict_2(m), (m, 0)
    elif name == "GenRestrict":
        space, blocks, sizes = General(m, m, z1), _gen_restrict(m, m), (m, m)
    elif name == "GenRestrictRect":
        space, blocks, sizes = General(m - 1, m, z1), _gen_restrict(m - 1, m), (m - 1, m)
    else:  # SymExtension
        space, blocks, sizes = Symmetric(m, z1), _sym_extension(m), (m, 0)
    fam = FamilySpec(name, m, space, tuple(blocks), lo, sizes)
    _check_shape(fam)
    return fam


def _check_shape(fam: FamilySpec) -> None:
    coords = fam.coord_order
    if sorted(coords) != sorted(fam.space.coordinates()) or len(set(coords)) != len(coords):
        raise AssertionError(f"{fam.name}({fam.m}): coordinate blocks do not cover the space")
    for b in fam.blocks:
        if len(b.coords) != len(b.generators):
            raise AssertionError(f"{fam.name}({fam.m}): block is not square")


# -- derived series ---------------------------------------------------------------


def as_matrix(g: Generator, sizes: tuple[int, int]) -> dict[tuple[int, int], Fraction]:
    """Embed a generator as a sparse matrix of gl_{n1} x gl_{n2}, block diagonally."""
    off = sizes[0] if g.side == RIGHT else 0
    return {(i + off, j + off): Fraction(1) for i, j in g.elems}


def commutator(a: dict, b: dict) -> dict:
    out: dict = {}
    for (i, j), x in a.items():
        for (k, l), y in b.items():
            if j == k:
                out[(i, l)] = out.get((i, l), 0) + x * y
            if l == i:
                out[(k, j)] = out.get((k, j), 0) - x * y
    return {k: v for k, v in out.items() if v}


def _row_reduce(vectors: Sequence[dict]) -> list[dict]:
    """Basis (in echelon form) of the span of sparse vectors over Q."""
    basis: list[tuple[object, dict]] = []
    for v in vectors:
        v = dict(v)
        for piv, b in basis:
            c = v.get(piv)
            if c:
                for k, x in b.items():
                    nv = v.get(k, 0) - c * x
                    if nv:
                        v[k] = nv
                    else:
                        v.pop(k, None)
        if v:
            piv = min(v)
            inv = 1 / v[piv]
            v = {k: x * inv for k, x in v.items()}
            for idx, (p2, b) in enumerate(basis):
                c = b.get(piv)
                if c:
                    nb = dict(b)
                    for k, x in v.items():
                        y = nb.get(k, 0) - c * x
                        if y:
                            nb[k] = y
                        else:
                            nb.pop(k, None)
                    basis[idx] = (p2, nb)
            basis.append((piv, v))
    return [b for _, b in basis]


def _in_span(basis: list[dict], v: dict) -> bool:
    return len(_row_reduce(basis + [v])) == len(basis)


@dataclass(frozen=True)
class DerivedSeries:
    dims: list[int]
    solvable: bool


def derived_series(generators: Sequence, m: int, p: int = 0) -> DerivedSeries:
    """Dimensions of g, [g,g], [[g,g],[g,g]], ... until the series stabilises.

    ``generators`` are Generator objects (eta markers are skipped) or raw
    sparse matrices given as sequences of (i, j) elementary positions.
    """
    mats = []
    for g in generators:
        if isinstance(g, Generator):
            if g.side == ETA:
                continue
            mats.append(as_matrix(g, (m, p)))
        else:
            mats.append({tuple(ij): Fraction(1) for ij in g})
    basis = _row_reduce(mats)
    for a in basis:
        for b in basis:
            c = commutator(a, b)
            if c and not _in_span(basis, c):
                raise NotClosedUnderBracket("generator span is not a Lie subalgebra")
    dims = [len(basis)]
    while basis:
        nxt = _row_reduce([commutator(a, b) for i, a in enumerate(basis) for b in basis[i + 1:]])
        if len(nxt) == len(basis):
            return DerivedSeries(dims, False)
        basis = nxt
        dims.append(len(basis))
    return DerivedSeries(dims, True)


# -- minors appearing in the expected equations -----------------------------------


def corner_det(space: SpaceKind, k: int, col_offset: int = 0) -> Polynomial:
    """det of rows 1..k and columns col_offset+1..col_offset+k of the generic matrix."""
    if k == 0:
        return ONE
    M = PolyMatrix([[space.entry(i, j + col_offset) for j in range(1, k + 1)] for i in range(1, k + 1)])
    return determinant(M)


def pf_eps(k: int) -> Polynomial:
    return pf_minor(range(epsilon(k), k + 1))


def _pf_name(idx: Iterable[int]) -> str:
    return "Pf{" + ",".join(map(str, idx)) + "}"


@dataclass(frozen=True)
class Factor:
    name: str
    poly: Polynomial
    power: int = 1


def expected_factors(fam: FamilySpec, reduced: bool = False) -> list[Factor]:
    """Factored form of the expected coefficient determinant (or the reduced equation)."""
    n, m = fam.name, fam.m
    sp = fam.space
    out: list[Factor] = []
    if n == "Sym":
        out = [Factor(f"detA{k}", corner_det(sp, k)) for k in range(1, m + 1)]
    elif n == "GenLU":
        out = [Factor(f"detA{k}", corner_det(sp, k), 1 if (reduced or k == m) else 2) for k in range(1, m + 1)]
    elif n in ("ModLU", "ModLURect"):
        top = m if n == "ModLU" else m - 1
        out = [Factor(f"detA{k}", corner_det(sp, k)) for k in range(1, top + 1)]
        out += [Factor(f"detAhat{k}", corner_det(sp, k, 1)) for k in range(1, m)]
    elif n == "SkewD":
        if reduced:
            out = [Factor(f"detA{2 * k}", corner_det(sp, 2 * k)) for k in range(1, m // 2 + 1)]
        else:
            for b in range(m // 2):
                if b:
                    out.append(Factor(_pf_name(range(1, 2 * b + 1)), pf_minor(range(1, 2 * b + 1)), 3))
                out.append(Factor(_pf_name(range(1, 2 * b + 3)), pf_minor(range(1, 2 * b + 3))))
            if m % 2 and m > 1:
                out.append(Factor(_pf_name(range(1, m)), pf_minor(range(1, m)), 2))
    elif n == "SkewG":
        if reduced:
            out = [Factor(f"detA{2 * k}", corner_det(sp, 2 * k)) for k in range(1, m // 2 + 1)]
        else:
            for lp in range(1, m):
                if lp % 2 == 0:
                    out.append(Factor(_pf_name(range(1, lp + 1)), pf_minor(range(1, lp + 1)), 2))
                else:
                    out.append(Factor(_pf_name(range(1, lp + 2)), pf_minor(range(1, lp + 2))))
                    if lp > 1:
                        out.append(Factor(_pf_name(range(1, lp)), pf_minor(range(1, lp))))
    elif n == "SkewNonlinear":
        out = [Factor(f"detAhathat{k}", corner_det(sp, k, 2)) for k in range(1, m - 1)]
        out += [Factor(_pf_name(range(epsilon(k), k + 1)), pf_eps(k)) for k in range(2, m + 1)]
    elif n == "SymRestrict1":
        a = lambda i, j: var(i, j)
        out = [
            Factor("a12", a(1, 2)),
            Factor("a22", a(2, 2)),
            Factor("detA3_1", a(3, 3) * a(1, 2) ** 2 - 2 * a(2, 3) * a(1, 2) * a(1, 3) + a(2, 2) * a(1, 3) ** 2),
        ]
        out += [Factor(f"detA{k}_1", corner_det(sp, k)) for k in range(4, m + 1)]
    elif n == "SymRestrict2":
        a = lambda i, j: var(i, j)
        out = [
            Factor("a13", a(1, 3)),
            Factor("a23", a(2, 3)),
            Factor("q1324", a(1, 3) * a(2, 4) - a(1, 4) * a(2, 3)),
            Factor("q3", a(3, 3) * a(2, 4) ** 2 - 2 * a(3, 4) * a(2, 4) * a(2, 3) + a(4, 4) * a(2, 3) ** 2),
        ]
        out += [Factor(f"detA{k}_2", corner_det(sp, k)) for k in range(5, m + 1)]
    elif n in ("GenRestrict", "GenRestrictRect"):
        a = lambda i, j: var(i, j)
        out = [
            Factor("a12", a(1, 2)),
            Factor("a21", a(2, 1)),
            Factor("a22", a(2, 2)),
            Factor("q1223", a(1, 2) * a(2, 3) - a(1, 3) * a(2, 2)),
        ]
        top = m if n == "GenRestrict" else m - 1
        out += [Factor(f"detA{k}_1", corner_det(sp, k)) for k in range(3, top + 1)]
        out += [Factor(f"detAhat{k}_1", corner_det(sp, k, 1)) for k in range(3, m)]
    elif n == "SymExtension":
        a = lambda i, j: var(i, j)
        out = [Factor("q2233", a(2, 2) * a(3, 3) - a(2, 3) ** 2)]
        out += [Factor(f"detA{k}_1", corner_det(sp, k)) for k in range(3, m + 1)]
    if reduced:
        out = [Factor(f.name, f.poly, 1) for f in out]
    return out


# names of the free* families whose coefficient determinant is nonreduced
NONREDUCED = {"GenLU", "SkewD", "SkewG"}


def minor_polynomials(fam: FamilySpec) -> list[tuple[str, Polynomial]]:
    """Minors and Pfaffians appearing in the family's (reduced) defining equation."""
    return [(f.name, f.poly) for f in expected_factors(fam, reduced=True)]
