"""Complex Cholesky-type factorizations and their existence conditions.

All transposes are plain (bilinear) transposes, never conjugate ones.  Each
elimination step divides by one pivot; a pivot that vanishes relative to the
magnitude of the terms it was computed from is reported as the leading minor
it stands for.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ExistenceConditionViolated, NotSkew, NotSymmetric, ShapeError

CHOLESKY = "cholesky"
LU = "lu"
SKEW_CHOLESKY = "skew-cholesky"
MOD_LU = "mod-lu"
MOD_LU_RECT = "mod-lu-rect"
KINDS = (CHOLESKY, LU, SKEW_CHOLESKY, MOD_LU, MOD_LU_RECT)

DEFAULT_TOL = 1e-12


def tolerance() -> float:
    """Relative pivot threshold; the SAITO_TOL environment variable overrides the default."""
    raw = os.environ.get("SAITO_TOL")
    return float(raw) if raw else DEFAULT_TOL


@dataclass
class Factorization:
    kind: str
    factors: dict[str, np.ndarray]
    residual: float
    conditions: list[tuple[str, complex]] = field(default_factory=list)

    def product(self) -> np.ndarray:
        f = self.factors
        if self.kind == CHOLESKY:
            return f["B"] @ f["B"].T
        if self.kind == LU:
            return f["B"] @ f["C"]
        if self.kind == SKEW_CHOLESKY:
            return f["B"] @ f["J"] @ f["B"].T
        return f["B"] @ f["K"] @ f["C"]


# -- shapes and minors -------------------------------------------------------------


def _as_array(A) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2:
        raise ShapeError("expected a matrix")
    if not np.all(np.isfinite(A)):
        raise ShapeError("matrix has non-finite entries")
    return A


def _check_shape(kind: str, A: np.ndarray) -> None:
    r, c = A.shape
    if kind not in KINDS:
        raise ShapeError(f"unknown factorization kind {kind!r}")
    if kind == MOD_LU_RECT:
        if c != r + 1 or r < 1:
            raise ShapeError(f"{kind} needs an (m-1) x m matrix, got {r}x{c}")
    elif r != c or r < 1:
        raise ShapeError(f"{kind} needs a square matrix, got {r}x{c}")
    if kind == MOD_LU and r < 2:
        raise ShapeError("mod-lu needs m >= 2")


def minor_names(kind: str, shape: tuple[int, int]) -> list[tuple[str, tuple[int, int, int]]]:
    """(name, (k, row_count, column_offset)) of every existence minor, in checking order."""
    r, c = shape
    if kind in (CHOLESKY, LU):
        return [(f"detA{k}", (k, k, 0)) for k in range(1, r + 1)]
    if kind == SKEW_CHOLESKY:
        return [(f"detA{2 * k}", (2 * k, 2 * k, 0)) for k in range(1, r // 2 + 1)]
    out = []
    for k in range(1, c):
        out.append((f"detA{k}", (k, k, 0)))
        out.append((f"detAhat{k}", (k, k, 1)))
    if kind == MOD_LU:
        out.append((f"detA{r}", (r, r, 0)))
    return out


def existence_conditions(kind: str, A) -> list[tuple[str, complex]]:
    """Value of every minor that must be nonzero for the factorization to exist."""
    A = _as_array(A)
    _check_shape(kind, A)
    minors = minor_names(kind, A.shape)
    # reporting order: all leading minors first, then the column-shifted ones
    minors = [s for s in minors if s[1][2] == 0] + [s for s in minors if s[1][2] == 1]
    return [(name, complex(np.linalg.det(A[:k, off:off + k]))) for name, (k, _, off) in minors]


def _pivot(value: complex, scale: float, name: str, tol: float) -> complex:
    if abs(value) <= tol * max(scale, np.finfo(float).tiny):
        raise ExistenceConditionViolated(name, value)
    return value


def _dot(x: np.ndarray, y: np.ndarray, reverse: bool) -> complex:
    if len(x) == 0:
        return 0j
    if reverse:
        x, y = x[::-1], y[::-1]
    total = 0j
    for a, b in zip(x, y):
        total += a * b
    return total


def _absdot(x: np.ndarray, y: np.ndarray) -> float:
    return float(np.sum(np.abs(x) * np.abs(y))) if len(x) else 0.0


# -- the five factorizations -----------------------------------------------------------


def _cholesky(A, tol, reverse):
    m = A.shape[0]
    B = np.zeros((m, m), dtype=complex)
    for j in range(m):
        d = A[j, j] - _dot(B[j, :j], B[j, :j], reverse)
        scale = abs(A[j, j]) + _absdot(B[j, :j], B[j, :j])
        _pivot(d, scale, f"detA{j + 1}", tol)
        B[j, j] = np.sqrt(d)
        for i in range(j + 1, m):
            B[i, j] = (A[i, j] - _dot(B[i, :j], B[j, :j], reverse)) / B[j, j]
    return {"B": B}


def _lu(A, tol, reverse):
    m = A.shape[0]
    B = np.zeros((m, m), dtype=complex)
    C = np.eye(m, dtype=complex)
    for k in range(m):
        for i in range(k, m):
            B[i, k] = A[i, k] - _dot(B[i, :k], C[:k, k], reverse)
        scale = abs(A[k, k]) + _absdot(B[k, :k], C[:k, k])
        _pivot(B[k, k], scale, f"detA{k + 1}", tol)
        for j in range(k + 1, m):
            C[k, j] = (A[k, j] - _dot(B[k, :k], C[:k, j], reverse)) / B[k, k]
    return {"B": B, "C": C}


def _J(m: int) -> np.ndarray:
    J = np.zeros((m, m), dtype=complex)
    for b in range(m // 2):
        J[2 * b, 2 * b + 1] = -1
        J[2 * b + 1, 2 * b] = 1
    return J


def _skew_cholesky(A, tol, reverse):
    m = A.shape[0]
    B = np.zeros((m, m), dtype=complex)
    S = A.copy()
    mag = np.abs(A).astype(float)
    J2 = _J(2)
    for b in range(m // 2):
        i0 = 2 * b
        s = -S[i0, i0 + 1]
        _pivot(s, mag[i0, i0 + 1], f"detA{i0 + 2}", tol)
        r = np.sqrt(s)
        B[i0, i0] = B[i0 + 1, i0 + 1] = r
        rest = slice(i0 + 2, m)
        # rows below: S[rest, blk] = B[rest, blk] J (r I), so B[rest, blk] = S[rest, blk] J^T / r
        blk = S[rest, i0:i0 + 2] @ J2.T / r
        B[rest, i0:i0 + 2] = blk
        upd = blk @ J2 @ blk.T
        if reverse:
            upd = (blk[:, ::-1] @ J2[::-1, ::-1] @ blk[:, ::-1].T)
        S[rest, rest] = S[rest, rest] - upd
        mag[rest, rest] = mag[rest, rest] + np.abs(blk) @ np.abs(J2) @ np.abs(blk).T
    if m % 2:
        B[m - 1, m - 1] = 1
    return {"B": B, "J": _J(m)}


def _mod_lu(A, tol, reverse):
    """A = B K C with K the ones-on-diagonal-and-superdiagonal base point."""
    rows, cols = A.shape
    B = np.zeros((rows, rows), dtype=complex)
    C = np.zeros((cols, cols), dtype=complex)
    C[0, 0] = 1
    K = np.zeros((rows, cols), dtype=complex)
    for i in range(rows):
        K[i, i] = 1
        if i + 1 < cols:
            K[i, i + 1] = 1
    P = lambda i, r: (B[i, r] if r < rows else 0j) + (B[i, r - 1] if r >= 1 else 0j)  # (B K)[i, r]
    bscale = np.zeros(rows)
    cscale = np.zeros(cols)
    B[:, 0] = A[:, 0]
    bscale[0] = abs(A[0, 0])
    for j in range(1, cols):
        # rows above the diagonal: A[i, j] = sum_{r<=i} P[i, r] C[r, j] + B[i, i] C[i+1, j]
        for i in range(min(j, rows)):
            _pivot(B[i, i], bscale[i], f"detA{i + 1}", tol)
            ps = np.array([P(i, r) for r in range(1, i + 1)])
            rest = _dot(ps, C[1:i + 1, j], reverse)
            C[i + 1, j] = (A[i, j] - rest) / B[i, i]
            if i + 1 == j:
                cscale[j] = (abs(A[i, j]) + _absdot(ps, C[1:i + 1, j])) / abs(B[i, i])
        if j >= rows:
            continue
        # on and below the diagonal: A[i, j] = sum_{r<j} P[i, r] C[r, j] + (B[i, j] + B[i, j-1]) C[j, j]
        cj = _pivot(C[j, j], cscale[j], f"detAhat{j}", tol)
        for i in range(j, rows):
            ps = np.array([P(i, r) for r in range(1, j)])
            rest = _dot(ps, C[1:j, j], reverse) + B[i, j - 1] * cj
            B[i, j] = (A[i, j] - rest) / cj
            if i == j:
                bscale[j] = (abs(A[i, j]) + _absdot(ps, C[1:j, j]) + abs(B[i, j - 1] * cj)) / abs(cj)
    if rows == cols:
        _pivot(B[rows - 1, rows - 1], bscale[rows - 1], f"detA{rows}", tol)
    else:
        _pivot(C[cols - 1, cols - 1], cscale[cols - 1], f"detAhat{cols - 1}", tol)
    return {"B": B, "K": K, "C": C}


def factorize(kind: str, A, *, tol: float | None = None, reverse: bool = False) -> Factorization:
    """Structured factorization of ``A``; ``reverse`` flips the summation order of inner products."""
    A = _as_array(A)
    _check_shape(kind, A)
    tol = tolerance() if tol is None else tol
    norm = float(np.max(np.abs(A))) if A.size else 0.0
    if kind == CHOLESKY and np.max(np.abs(A - A.T)) > tol * (1 + norm):
        raise NotSymmetric("Cholesky needs a symmetric matrix")
    if kind == SKEW_CHOLESKY and np.max(np.abs(A + A.T)) > tol * (1 + norm):
        raise NotSkew("skew Cholesky needs a skew-symmetric matrix")
    if kind == CHOLESKY:
        factors = _cholesky(A, tol, reverse)
    elif kind == LU:
        factors = _lu(A, tol, reverse)
    elif kind == SKEW_CHOLESKY:
        factors = _skew_cholesky(A, tol, reverse)
    else:
        factors = _mod_lu(A, tol, reverse)
    f = Factorization(kind, factors, 0.0, existence_conditions(kind, A))
    f.residual = float(np.max(np.abs(A - f.product())))
    return f


def residual_bound(A) -> float:
    """Acceptance bound 1e-10 * (1 + max |a_ij|)."""
    return 1e-10 * (1 + float(np.max(np.abs(np.asarray(A)))))


# -- uniqueness ------------------------------------------------------------------------


def _block_sign_matrix(kind: str, m: int, rng: np.random.Generator) -> np.ndarray:
    if kind == CHOLESKY:
        return np.diag(rng.choice([-1.0, 1.0], size=m)).astype(complex)
    S = np.eye(m, dtype=complex)
    for b in range(m // 2):
        s = rng.choice([-1.0, 1.0])
        S[2 * b, 2 * b] = S[2 * b + 1, 2 * b + 1] = s
    return S


def _agree_up_to_signs(kind: str, B1: np.ndarray, B2: np.ndarray, tol: float) -> bool:
    m = B1.shape[0]
    step = 1 if kind == CHOLESKY else 2
    for c in range(0, m, step):
        cols = slice(c, min(c + step, m))
        a, b = B1[:, cols], B2[:, cols]
        scale = 1 + float(np.max(np.abs(a)))
        if not (np.max(np.abs(a - b)) <= tol * scale or np.max(np.abs(a + b)) <= tol * scale):
            return False
    return True


def uniqueness_probe(kind: str, A, trials: int = 10, seed: int = 0) -> bool:
    """Probe the stated uniqueness of the factors.

    Cholesky-type kinds: every sign (or 2x2 block sign) change of B still
    reconstructs A, and a rerun with reversed summation order agrees up to
    such signs.  LU-type kinds: the rerun agrees exactly and every random
    perturbation of the normalised factor breaks the reconstruction.
    """
    A = _as_array(A)
    f = factorize(kind, A)
    g = factorize(kind, A, reverse=True)
    rng = np.random.default_rng(seed)
    bound = residual_bound(A)
    check_tol = 1e-8
    if kind in (CHOLESKY, SKEW_CHOLESKY):
        B = f.factors["B"]
        for _ in range(trials):
            S = _block_sign_matrix(kind, A.shape[0], rng)
            Bs = B @ S
            prod = Bs @ Bs.T if kind == CHOLESKY else Bs @ f.factors["J"] @ Bs.T
            if np.max(np.abs(A - prod)) > bound:
                return False
        return _agree_up_to_signs(kind, B, g.factors["B"], check_tol)
    for name in f.factors:
        a, b = f.factors[name], g.factors[name]
        if np.max(np.abs(a - b)) > check_tol * (1 + float(np.max(np.abs(a)))):
            return False
    key = "C"
    for _ in range(trials):
        C = f.factors[key].copy()
        # move one normalised entry (a unit diagonal or the fixed first row)
        j = int(rng.integers(0, C.shape[0]))
        C[0 if kind != LU else j, j] += complex(*rng.uniform(0.1, 1.0, size=2))
        pert = Factorization(kind, {**f.factors, key: C}, 0.0)
        if np.max(np.abs(A - pert.product())) <= bound:
            return False
    return True


# -- sampling helpers ------------------------------------------------------------------


def shape_for(kind: str, m: int) -> tuple[int, int]:
    return (m - 1, m) if kind == MOD_LU_RECT else (m, m)


def _raw(kind: str, m: int, rng: np.random.Generator) -> np.ndarray:
    r, c = shape_for(kind, m)
    A = rng.uniform(0, 1, size=(r, c)) + 1j * rng.uniform(0, 1, size=(r, c))
    if kind == CHOLESKY:
        A = np.triu(A) + np.triu(A, 1).T
    elif kind == SKEW_CHOLESKY:
        A = np.triu(A, 1) - np.triu(A, 1).T
    return A


def random_matrix(kind: str, m: int, rng: np.random.Generator, min_minor: float = 1e-3) -> np.ndarray:
    """Entries uniform in the unit square, rejected until every existence minor exceeds ``min_minor``."""
    while True:
        A = _raw(kind, m, rng)
        if all(abs(v) > min_minor for _, v in existence_conditions(kind, A)):
            return A


def on_variety_matrix(kind: str, m: int, name: str, rng: np.random.Generator) -> np.ndarray:
    """Random matrix on the hypersurface ``name = 0`` with every other condition nonzero.

    The minor is affine in one entry (the corner entry of the minor, or for the
    skew kind the last superdiagonal entry of its Pfaffian), which is solved for.
    """
    k, _, off = dict(minor_names(kind, shape_for(kind, m)))[name]
    while True:
        A = random_matrix(kind, m, rng)
        i, j = k - 1, k - 1 + off
        if kind == SKEW_CHOLESKY:
            i, j = k - 2, k - 1
        def minor_at(x):
            Z = A.copy()
            Z[i, j] = x
            if kind == CHOLESKY:
                Z[j, i] = x
            elif kind == SKEW_CHOLESKY:
                Z[j, i] = -x
            return Z, complex(np.linalg.det(Z[:k, off:off + k]))
        if kind == SKEW_CHOLESKY:
            # det = Pf^2 and Pf is affine in the entry: Pf(x) = Pf(0) + x * c
            def pf(x):
                Z, _ = minor_at(x)
                return _pfaffian(Z[:k, :k])
            p0, p1 = pf(0.0), pf(1.0)
            x = -p0 / (p1 - p0)
        else:
            _, d0 = minor_at(0.0)
            _, d1 = minor_at(1.0)
            x = -d0 / (d1 - d0)
        Z, _ = minor_at(x)
        conds = existence_conditions(kind, Z)
        if all(abs(v) > 1e-3 for n, v in conds if n != name):
            return Z


def _pfaffian(S: np.ndarray) -> complex:
    n = S.shape[0]
    if n == 0:
        return 1
    if n % 2:
        return 0
    total = 0j
    for j in range(1, n):
        keep = [t for t in range(1, n) if t != j]
        sign = 1 if j % 2 == 1 else -1
        total += sign * S[0, j] * _pfaffian(S[np.ix_(keep, keep)])
    return total


# -- JSON ------------------------------------------------------------------------------


def matrix_to_json(M: np.ndarray) -> dict:
    M = np.asarray(M, dtype=complex)
    return {
        "rows": int(M.shape[0]),
        "cols": int(M.shape[1]),
        "entries": [[float(z.real), float(z.imag)] for z in M.reshape(-1)],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        r, c = int(obj["rows"]), int(obj["cols"])
        entries = obj["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ShapeError(f"malformed matrix JSON: {exc}") from exc
    if len(entries) != r * c:
        raise ShapeError(f"expected {r * c} entries, got {len(entries)}")
    vals = []
    for e in entries:
        if isinstance(e, (int, float)):
            vals.append(complex(e))
        else:
            re, im = e
            vals.append(complex(re, im))
    return np.array(vals, dtype=complex).reshape(r, c)


def factorization_to_json(f: Factorization) -> dict:
    return {
        "kind": f.kind,
        "factors": {k: matrix_to_json(v) for k, v in sorted(f.factors.items())},
        "residual": f.residual,
        "conditions": [{"minor": n, "value": [v.real, v.imag]} for n, v in f.conditions],
    }
