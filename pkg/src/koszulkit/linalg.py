"""Deterministic dense linear algebra in two arithmetic modes.

Exact mode works over Gaussian rationals with fraction-free (Bareiss)
elimination and full pivoting, so kernels, ranks and solutions carry no
rounding error at all.  Float mode works over complex doubles and makes
every rank decision through an explicit relative tolerance via the SVD.

Pivots are chosen by (largest magnitude, then lowest index), which makes
every returned basis reproducible across runs.
"""

from __future__ import annotations

import numpy as np

from .errors import ModeMismatch, ShapeError
from .scalars import EXACT, FLOAT, GR_ONE, GR_ZERO, GaussianRational, as_scalar

#: default relative rank tolerance for float mode
TOL_RANK = 1e-10

#: spectral_radius refuses matrices larger than this
MAX_EIG_DIM = 64


class Mat:
    """Dense rows x cols matrix; entries exact Gaussian rationals or an
    ndarray of complex doubles, depending on ``mode``.

    Values are immutable after construction (float data is treated as
    read-only by convention); all operations are pure functions.
    """

    __slots__ = ("rows", "cols", "mode", "_ex", "_fl")

    def __init__(self, rows, cols, data, mode):
        self.rows = int(rows)
        self.cols = int(cols)
        self.mode = mode
        if mode == EXACT:
            flat = tuple(data)
            if len(flat) != self.rows * self.cols:
                raise ShapeError(
                    f"entry count {len(flat)} != {self.rows}x{self.cols}"
                )
            self._ex = flat
            self._fl = None
        elif mode == FLOAT:
            arr = np.asarray(data, dtype=complex).reshape(self.rows, self.cols)
            self._ex = None
            self._fl = arr
        else:
            raise ValueError(f"unknown mode {mode!r}")

    # -- construction -------------------------------------------------

    @classmethod
    def from_rows(cls, rows, mode=EXACT) -> "Mat":
        r = len(rows)
        c = len(rows[0]) if r else 0
        if any(len(row) != c for row in rows):
            raise ShapeError("ragged row lengths")
        if mode == EXACT:
            flat = [as_scalar(v, EXACT) for row in rows for v in row]
            return cls(r, c, flat, EXACT)
        return cls(r, c, [[as_scalar(v, FLOAT) for v in row] for row in rows], FLOAT)

    @classmethod
    def from_numpy(cls, arr) -> "Mat":
        arr = np.asarray(arr, dtype=complex)
        if arr.ndim != 2:
            raise ShapeError("expected a 2-d array")
        return cls(arr.shape[0], arr.shape[1], arr, FLOAT)

    @classmethod
    def zeros(cls, rows, cols, mode=EXACT) -> "Mat":
        if mode == EXACT:
            return cls(rows, cols, (GR_ZERO,) * (rows * cols), EXACT)
        return cls(rows, cols, np.zeros((rows, cols), dtype=complex), FLOAT)

    @classmethod
    def identity(cls, d, mode=EXACT) -> "Mat":
        if mode == EXACT:
            flat = [GR_ONE if i == j else GR_ZERO for i in range(d) for j in range(d)]
            return cls(d, d, flat, EXACT)
        return cls(d, d, np.eye(d, dtype=complex), FLOAT)

    # -- access -------------------------------------------------------

    @property
    def shape(self):
        return (self.rows, self.cols)

    def at(self, i, j):
        if self.mode == EXACT:
            return self._ex[i * self.cols + j]
        return complex(self._fl[i, j])

    def row_lists(self):
        """Rows as fresh mutable lists (exact mode only)."""
        c = self.cols
        return [list(self._ex[i * c : (i + 1) * c]) for i in range(self.rows)]

    def column(self, j) -> "Mat":
        if self.mode == EXACT:
            ent = [self._ex[i * self.cols + j] for i in range(self.rows)]
            return Mat(self.rows, 1, ent, EXACT)
        return Mat(self.rows, 1, self._fl[:, j : j + 1], FLOAT)

    def to_numpy(self) -> np.ndarray:
        if self.mode == FLOAT:
            return self._fl.copy()
        out = np.empty((self.rows, self.cols), dtype=complex)
        for i in range(self.rows):
            for j in range(self.cols):
                out[i, j] = self._ex[i * self.cols + j].to_complex()
        return out

    # -- algebra ------------------------------------------------------

    def _check_mode(self, other: "Mat"):
        if self.mode != other.mode:
            raise ModeMismatch(f"mixed modes {self.mode}/{other.mode}")

    def __add__(self, other: "Mat") -> "Mat":
        self._check_mode(other)
        if self.shape != other.shape:
            raise ShapeError(f"add shape mismatch {self.shape} vs {other.shape}")
        if self.mode == EXACT:
            ent = tuple(a + b for a, b in zip(self._ex, other._ex))
            return Mat(self.rows, self.cols, ent, EXACT)
        return Mat(self.rows, self.cols, self._fl + other._fl, FLOAT)

    def __sub__(self, other: "Mat") -> "Mat":
        return self + (-other)

    def __neg__(self) -> "Mat":
        if self.mode == EXACT:
            return Mat(self.rows, self.cols, tuple(-a for a in self._ex), EXACT)
        return Mat(self.rows, self.cols, -self._fl, FLOAT)

    def scale(self, c) -> "Mat":
        s = as_scalar(c, self.mode)
        if self.mode == EXACT:
            return Mat(self.rows, self.cols, tuple(s * a for a in self._ex), EXACT)
        return Mat(self.rows, self.cols, s * self._fl, FLOAT)

    def __matmul__(self, other: "Mat") -> "Mat":
        self._check_mode(other)
        if self.cols != other.rows:
            raise ShapeError(f"matmul shape mismatch {self.shape} @ {other.shape}")
        if self.mode == FLOAT:
            return Mat(self.rows, other.cols, self._fl @ other._fl, FLOAT)
        n, k, m = self.rows, self.cols, other.cols
        a, b = self._ex, other._ex
        out = []
        for i in range(n):
            arow = a[i * k : (i + 1) * k]
            for j in range(m):
                s = GR_ZERO
                for t in range(k):
                    av = arow[t]
                    if not av.is_zero():
                        bv = b[t * m + j]
                        if not bv.is_zero():
                            s = s + av * bv
                out.append(s)
        return Mat(n, m, out, EXACT)

    def adjoint(self) -> "Mat":
        """Conjugate transpose."""
        if self.mode == FLOAT:
            return Mat(self.cols, self.rows, self._fl.conj().T, FLOAT)
        ent = [
            self._ex[i * self.cols + j].conjugate()
            for j in range(self.cols)
            for i in range(self.rows)
        ]
        return Mat(self.cols, self.rows, ent, EXACT)

    def is_zero(self, tol: float = 0.0) -> bool:
        if self.mode == EXACT:
            return all(a.is_zero() for a in self._ex)
        if self._fl.size == 0:
            return True
        return float(np.abs(self._fl).max()) <= tol

    def fro_norm(self) -> float:
        if self.mode == FLOAT:
            return float(np.linalg.norm(self._fl))
        return float(np.sqrt(sum(float(a.abs2()) for a in self._ex)))

    def max_abs(self) -> float:
        if self.mode == FLOAT:
            return float(np.abs(self._fl).max()) if self._fl.size else 0.0
        return max((a.magnitude() for a in self._ex), default=0.0)

    def __eq__(self, other):
        if not isinstance(other, Mat):
            return NotImplemented
        if self.mode != other.mode or self.shape != other.shape:
            return False
        if self.mode == EXACT:
            return self._ex == other._ex
        return bool(np.array_equal(self._fl, other._fl))

    def __repr__(self):
        return f"Mat({self.rows}x{self.cols}, {self.mode})"


# -- assembly helpers -------------------------------------------------


def mat_hstack(mats) -> Mat:
    mats = list(mats)
    if not mats:
        raise ShapeError("hstack of nothing")
    mode = mats[0].mode
    rows = mats[0].rows
    for m in mats:
        if m.mode != mode:
            raise ModeMismatch("mixed modes in hstack")
        if m.rows != rows:
            raise ShapeError("hstack row mismatch")
    if mode == FLOAT:
        return Mat.from_numpy(np.hstack([m._fl for m in mats]))
    ent = []
    for i in range(rows):
        for m in mats:
            ent.extend(m._ex[i * m.cols : (i + 1) * m.cols])
    return Mat(rows, sum(m.cols for m in mats), ent, EXACT)


def mat_vstack(mats) -> Mat:
    mats = list(mats)
    if not mats:
        raise ShapeError("vstack of nothing")
    mode = mats[0].mode
    cols = mats[0].cols
    for m in mats:
        if m.mode != mode:
            raise ModeMismatch("mixed modes in vstack")
        if m.cols != cols:
            raise ShapeError("vstack col mismatch")
    if mode == FLOAT:
        return Mat.from_numpy(np.vstack([m._fl for m in mats]))
    ent = []
    for m in mats:
        ent.extend(m._ex)
    return Mat(sum(m.rows for m in mats), cols, ent, EXACT)


def mat_block(grid) -> Mat:
    """Assemble a matrix from a 2-d grid of blocks."""
    return mat_vstack([mat_hstack(row) for row in grid])


def block_diag_copies(S: Mat, k: int) -> Mat:
    """Block-diagonal matrix with k copies of S (k = 0 gives a 0x0 matrix)."""
    if k == 0:
        return Mat.zeros(0, 0, S.mode)
    z = Mat.zeros(S.rows, S.cols, S.mode)
    grid = [[S if i == j else z for j in range(k)] for i in range(k)]
    return mat_block(grid)


def mat_power(M: Mat, m: int) -> Mat:
    if M.rows != M.cols:
        raise ShapeError("power of a non-square matrix")
    out = Mat.identity(M.rows, M.mode)
    for _ in range(m):
        out = out @ M
    return out


def commutator(A: Mat, B: Mat) -> Mat:
    return A @ B - B @ A


# -- exact elimination (fraction-free, full pivoting) ------------------


def _exact_forward(a, b=None, ncols=None):
    """Bareiss forward elimination with full pivoting, in place.

    ``a`` is a list of row lists of GaussianRational.  Row swaps and row
    operations are mirrored onto ``b`` when given; column swaps apply to
    ``a`` only and are recorded in the returned permutation.

    Returns (rank, colp) with colp[j] = original index of current col j.
    """
    m = len(a)
    n = ncols if ncols is not None else (len(a[0]) if m else 0)
    colp = list(range(n))
    prev = GR_ONE
    k = 0
    while k < m and k < n:
        best = None
        bi = bj = -1
        for i in range(k, m):
            row = a[i]
            for j in range(k, n):
                v = row[j]
                if not v.is_zero():
                    a2 = v.abs2()
                    if best is None or a2 > best:
                        best = a2
                        bi, bj = i, j
        if best is None:
            break
        if bi != k:
            a[k], a[bi] = a[bi], a[k]
            if b is not None:
                b[k], b[bi] = b[bi], b[k]
        if bj != k:
            for row in a:
                row[k], row[bj] = row[bj], row[k]
            colp[k], colp[bj] = colp[bj], colp[k]
        pk = a[k][k]
        krow = a[k]
        bk = b[k] if b is not None else None
        for i in range(k + 1, m):
            aik = a[i][k]
            arow = a[i]
            if aik.is_zero():
                for j in range(k + 1, n):
                    arow[j] = (pk * arow[j]) / prev
                if b is not None:
                    brow = b[i]
                    for j in range(len(brow)):
                        brow[j] = (pk * brow[j]) / prev
            else:
                for j in range(k + 1, n):
                    arow[j] = (pk * arow[j] - aik * krow[j]) / prev
                if b is not None:
                    brow = b[i]
                    for j in range(len(brow)):
                        brow[j] = (pk * brow[j] - aik * bk[j]) / prev
            arow[k] = GR_ZERO
        prev = pk
        k += 1
    return k, colp


def _exact_rank(M: Mat) -> int:
    a = M.row_lists()
    r, _ = _exact_forward(a)
    return r


def _exact_kernel(M: Mat) -> Mat:
    a = M.row_lists()
    n = M.cols
    r, colp = _exact_forward(a, ncols=n)
    vecs = []
    for f in range(r, n):
        x = [GR_ZERO] * n
        x[f] = GR_ONE
        for i in range(r - 1, -1, -1):
            s = a[i][f]
            for j in range(i + 1, r):
                xj = x[j]
                if not xj.is_zero():
                    s = s + a[i][j] * xj
            x[i] = -s / a[i][i]
        v = [GR_ZERO] * n
        for j in range(n):
            v[colp[j]] = x[j]
        vecs.append(v)
    ent = [vecs[c][i] for i in range(n) for c in range(len(vecs))]
    return Mat(n, len(vecs), ent, EXACT)


def _exact_solve(A: Mat, B: Mat):
    """Solve A X = B exactly; None if inconsistent.  Free variables are 0."""
    a = A.row_lists()
    b = B.row_lists()
    r, colp = _exact_forward(a, b, ncols=A.cols)
    for i in range(r, A.rows):
        if any(not v.is_zero() for v in b[i]):
            return None
    n, q = A.cols, B.cols
    cols = []
    for c in range(q):
        x = [GR_ZERO] * n
        for i in range(r - 1, -1, -1):
            s = b[i][c]
            for j in range(i + 1, r):
                xj = x[j]
                if not xj.is_zero():
                    s = s - a[i][j] * xj
            x[i] = s / a[i][i]
        v = [GR_ZERO] * n
        for j in range(n):
            v[colp[j]] = x[j]
        cols.append(v)
    ent = [cols[c][i] for i in range(n) for c in range(q)]
    return Mat(n, q, ent, EXACT)


# -- float (SVD) counterparts ------------------------------------------


def _float_svd(arr):
    if arr.size == 0:
        return np.zeros((arr.shape[0], 0)), np.zeros(0), np.zeros((0, arr.shape[1]))
    return np.linalg.svd(arr)


def _float_rank(arr, tol_rank) -> int:
    _, s, _ = _float_svd(arr)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol_rank * s[0]))


def _float_kernel(arr, tol_rank) -> np.ndarray:
    n = arr.shape[1]
    if arr.size == 0:
        return np.eye(n, dtype=complex)
    _, s, vh = np.linalg.svd(arr, full_matrices=True)
    if s.size == 0 or s[0] == 0.0:
        r = 0
    else:
        r = int(np.sum(s > tol_rank * s[0]))
    return vh[r:].conj().T


# -- public operations -------------------------------------------------


def rank(M: Mat, tol_rank: float | None = None) -> int:
    """Rank of M; in float mode, singular values above tol * largest."""
    if M.mode == EXACT:
        return _exact_rank(M)
    return _float_rank(M._fl, TOL_RANK if tol_rank is None else tol_rank)


def kernel_basis(M: Mat, tol_rank: float | None = None) -> Mat:
    """Matrix whose columns are a basis of ker M (cols - rank of them).

    Exact mode: each column satisfies M v = 0 with zero residual.
    Float mode: residuals are below tol * ||M||.
    """
    if M.mode == EXACT:
        return _exact_kernel(M)
    ns = _float_kernel(M._fl, TOL_RANK if tol_rank is None else tol_rank)
    return Mat.from_numpy(ns)


def solve(A: Mat, B: Mat, tol: float | None = None):
    """Solve A X = B; returns None when the system is inconsistent."""
    A._check_mode(B)
    if A.rows != B.rows:
        raise ShapeError("solve: row mismatch")
    if A.mode == EXACT:
        return _exact_solve(A, B)
    t = TOL_RANK if tol is None else tol
    x, *_ = np.linalg.lstsq(A._fl, B._fl, rcond=None)
    resid = A._fl @ x - B._fl
    scale = max(1.0, float(np.linalg.norm(A._fl)) * max(1.0, float(np.linalg.norm(x))))
    if float(np.linalg.norm(resid)) > 1e3 * t * scale:
        return None
    return Mat.from_numpy(x)


def column_space_basis(M: Mat, tol_rank: float | None = None) -> Mat:
    """Deterministic independent subset of M's columns spanning its range."""
    if M.cols == 0:
        return M
    if M.mode == EXACT:
        a = M.row_lists()
        r, colp = _exact_forward(a, ncols=M.cols)
        chosen = sorted(colp[:r])
        return mat_hstack([M.column(j) for j in chosen]) if chosen else Mat.zeros(M.rows, 0, EXACT)
    t = TOL_RANK if tol_rank is None else tol_rank
    r = _float_rank(M._fl, t)
    if r == 0:
        return Mat.zeros(M.rows, 0, FLOAT)
    chosen = []
    cur = np.zeros((M.rows, 0), dtype=complex)
    for j in range(M.cols):
        cand = np.hstack([cur, M._fl[:, j : j + 1]])
        if _float_rank(cand, t) > cur.shape[1]:
            chosen.append(j)
            cur = cand
        if len(chosen) == r:
            break
    return Mat.from_numpy(cur)


def spectral_radius(M: Mat) -> float:
    """Largest eigenvalue modulus of a square matrix (dimension <= 64).

    Exact inputs are converted to floats for this operation only.
    """
    if M.rows != M.cols:
        raise ShapeError("spectral_radius needs a square matrix")
    if M.rows > MAX_EIG_DIM:
        raise ShapeError(f"spectral_radius limited to dimension {MAX_EIG_DIM}")
    if M.rows == 0:
        return 0.0
    ev = np.linalg.eigvals(M.to_numpy())
    return float(np.abs(ev).max())


def char_poly(M: Mat) -> np.ndarray:
    """Characteristic polynomial coefficients (leading 1), complex."""
    if M.rows != M.cols:
        raise ShapeError("char_poly needs a square matrix")
    if M.rows == 0:
        return np.array([1.0 + 0j])
    return np.atleast_1d(np.poly(M.to_numpy())).astype(complex)


def intertwine_verify(A: Mat, X: Mat, Y: Mat, tol: float) -> bool:
    """True iff ||Y A - A X|| <= tol (exactly zero in exact mode)."""
    if A.mode != X.mode or A.mode != Y.mode:
        raise ModeMismatch("intertwine_verify: mixed modes")
    if Y.cols != A.rows or A.cols != X.rows or (Y.rows, X.cols) != (A.rows, A.cols):
        raise ShapeError("intertwine_verify: shapes do not compose")
    R = Y @ A - A @ X
    if A.mode == EXACT:
        return R.is_zero()
    return R.fro_norm() <= tol
