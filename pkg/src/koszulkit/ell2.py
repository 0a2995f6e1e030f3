"""Banded, eventually periodic operators on l2(N) with certified sections.

An operator is stored as finitely many diagonals, each given by a finite
prefix plus a repeating tail, together with an optional dense finite
block ("patch") supported on the top-left corner.  This class of
operators is closed under sums, products, adjoints and polynomials, and
every entry is stored exactly (Gaussian rationals), so operator algebra
carries no rounding error; only section computations (kernels, norms)
use floating point.

Kernel computations use rectangular truncations: a vector supported on
the first N coordinates that the (N + m*w) x N section of T^m kills is a
genuine kernel vector of the operator (every row that could be nonzero
was included).  Acceptance additionally requires the vector to die out
before the guard band, and the dimension to agree at window sizes N and
2N.  That certificate is a desk-scale stabilization check, not a proof:
operators whose kernel vectors have unbounded support (none of the
catalog instances) can stabilize to an undercount.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

from .errors import FormatError, NotStabilized, PreconditionError
from .linalg import Mat
from .scalars import EXACT, GR_ONE, GR_ZERO, GaussianRational, as_scalar

#: default window and hard cap for auto-doubling
DEFAULT_N = 64
DEFAULT_G = 16
MAX_SECTION = 1024

#: kernel certification tolerances
TOL_SECTION_RANK = 1e-10
TOL_GUARD = 1e-12
TOL_RESIDUAL = 1e-10

#: closeness to the unit circle at which a symbol root blocks Fredholmness
TOL_CIRCLE = 1e-8


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _as_gr(v) -> GaussianRational:
    return as_scalar(v, EXACT)


@dataclass(frozen=True)
class Diagonal:
    """One diagonal: values prefix[t] then period repeating, t = 0, 1, ...

    For offset o >= 0 the t-th entry sits at (t, t + o); for o < 0 at
    (t - o, t).
    """

    offset: int
    prefix: tuple
    period: tuple

    def value(self, t: int) -> GaussianRational:
        if t < len(self.prefix):
            return self.prefix[t]
        return self.period[(t - len(self.prefix)) % len(self.period)]

    def is_eventually_zero(self) -> bool:
        return all(v.is_zero() for v in self.period)

    def is_zero(self) -> bool:
        return self.is_eventually_zero() and all(v.is_zero() for v in self.prefix)


def _normalize_diagonal(offset, prefix, period) -> Diagonal:
    pre = [_as_gr(v) for v in prefix]
    per = [_as_gr(v) for v in period]
    if not per:
        raise FormatError("diagonal tail rule needs a period of length >= 1")
    # minimal tiling period
    n = len(per)
    for L in range(1, n + 1):
        if n % L == 0 and per == per[:L] * (n // L):
            per = per[:L]
            break
    # absorb prefix tail into a rotated period
    while pre and pre[-1] == per[-1]:
        pre.pop()
        per = [per[-1]] + per[:-1]
    return Diagonal(offset, tuple(pre), tuple(per))


ZERO_DIAG_TEMPLATE = ((), (GR_ZERO,))


@dataclass(frozen=True)
class BandedOperator:
    """Banded eventually periodic operator plus optional finite patch."""

    diagonals: tuple  # Diagonal, sorted by offset, zero diagonals dropped
    patch: Mat | None = None
    fredholm: bool | None = None

    @classmethod
    def build(cls, diagonals, patch=None, fredholm=None) -> "BandedOperator":
        by_offset = {}
        for d in diagonals:
            if d.offset in by_offset:
                raise FormatError(f"duplicate diagonal offset {d.offset}")
            nd = _normalize_diagonal(d.offset, d.prefix, d.period)
            if not nd.is_zero():
                by_offset[d.offset] = nd
        if patch is not None:
            if patch.mode != EXACT:
                raise FormatError("patch entries must be exact")
            if patch.rows != patch.cols:
                raise FormatError("patch must be square")
            if patch.is_zero():
                patch = None
        return cls(tuple(sorted(by_offset.values(), key=lambda d: d.offset)), patch, fredholm)

    # -- structure ----------------------------------------------------

    @property
    def bandwidth(self) -> int:
        return max((abs(d.offset) for d in self.diagonals), default=0)

    @property
    def patch_size(self) -> int:
        return self.patch.rows if self.patch is not None else 0

    def _diag(self, offset: int):
        for d in self.diagonals:
            if d.offset == offset:
                return d
        return None

    def band_entry(self, i: int, j: int) -> GaussianRational:
        d = self._diag(j - i)
        if d is None:
            return GR_ZERO
        return d.value(min(i, j))

    def entry(self, i: int, j: int) -> GaussianRational:
        v = self.band_entry(i, j)
        if self.patch is not None and i < self.patch.rows and j < self.patch.cols:
            v = v + self.patch.at(i, j)
        return v

    def is_zero(self) -> bool:
        return not self.diagonals and self.patch is None

    def is_finite_rank(self) -> bool:
        """All diagonals eventually zero: only finitely many entries."""
        return all(d.is_eventually_zero() for d in self.diagonals)

    def is_compact_candidate(self) -> bool:
        """Entries die out along every diagonal (decided by the tail rule)."""
        return self.is_finite_rank()

    def section(self, rows: int, cols: int) -> np.ndarray:
        """Complex truncation to the first ``rows`` x ``cols`` coordinates."""
        A = np.zeros((rows, cols), dtype=complex)
        for d in self.diagonals:
            o = d.offset
            if o >= 0:
                count = min(rows, cols - o)
                for t in range(max(count, 0)):
                    A[t, t + o] = d.value(t).to_complex()
            else:
                count = min(cols, rows + o)
                for t in range(max(count, 0)):
                    A[t - o, t] = d.value(t).to_complex()
        if self.patch is not None:
            pr = min(self.patch.rows, rows)
            pc = min(self.patch.cols, cols)
            for i in range(pr):
                for j in range(pc):
                    A[i, j] += self.patch.at(i, j).to_complex()
        return A

    def apply(self, vec: np.ndarray) -> np.ndarray:
        """Image of a finitely supported vector, support extended as needed."""
        n = vec.shape[0]
        rows = max(n + self.bandwidth, self.patch_size, 1)
        return self.section(rows, n) @ vec

    def norm_bound(self) -> float:
        """Upper bound on the operator norm (Schur row/column sum test)."""
        if self.is_zero():
            return 0.0
        pre = max((len(d.prefix) for d in self.diagonals), default=0)
        per = 1
        for d in self.diagonals:
            per = _lcm(per, len(d.period))
        w = self.bandwidth
        reach = pre + per + w + self.patch_size + 1
        sec = np.abs(self.section(reach + w, reach + w))
        row = float(sec.sum(axis=1).max()) if sec.size else 0.0
        col = float(sec.sum(axis=0).max()) if sec.size else 0.0
        return float(np.sqrt(max(row, 0.0) * max(col, 0.0))) if row and col else max(row, col)

    # -- algebra --------------------------------------------------------

    def _tail_params(self):
        pre = max((len(d.prefix) for d in self.diagonals), default=0)
        per = 1
        for d in self.diagonals:
            per = _lcm(per, len(d.period))
        return pre, per

    def __add__(self, other: "BandedOperator") -> "BandedOperator":
        offsets = sorted(
            {d.offset for d in self.diagonals} | {d.offset for d in other.diagonals}
        )
        diags = []
        for o in offsets:
            da = self._diag(o)
            db = other._diag(o)
            la = len(da.prefix) if da else 0
            lb = len(db.prefix) if db else 0
            pa = len(da.period) if da else 1
            pb = len(db.period) if db else 1
            L = max(la, lb)
            P = _lcm(pa, pb)
            vals = []
            for t in range(L + P):
                va = da.value(t) if da else GR_ZERO
                vb = db.value(t) if db else GR_ZERO
                vals.append(va + vb)
            diags.append(Diagonal(o, tuple(vals[:L]), tuple(vals[L:])))
        patch = _patch_add(self.patch, other.patch)
        fred = None
        if other.is_finite_rank() and self.fredholm is not None:
            fred = self.fredholm
        elif self.is_finite_rank() and other.fredholm is not None:
            fred = other.fredholm
        return BandedOperator.build(diags, patch, fred)

    def __sub__(self, other: "BandedOperator") -> "BandedOperator":
        return self + other.scale(-1)

    def scale(self, c) -> "BandedOperator":
        s = _as_gr(c)
        if s.is_zero():
            return zero_op()
        diags = [
            Diagonal(d.offset, tuple(s * v for v in d.prefix), tuple(s * v for v in d.period))
            for d in self.diagonals
        ]
        patch = self.patch.scale(s) if self.patch is not None else None
        return BandedOperator.build(diags, patch, self.fredholm)

    def adjoint(self) -> "BandedOperator":
        diags = [
            Diagonal(
                -d.offset,
                tuple(v.conjugate() for v in d.prefix),
                tuple(v.conjugate() for v in d.period),
            )
            for d in self.diagonals
        ]
        patch = self.patch.adjoint() if self.patch is not None else None
        return BandedOperator.build(diags, patch, self.fredholm)

    def __mul__(self, other: "BandedOperator") -> "BandedOperator":
        """Operator composition (matrix product)."""
        if self.is_zero() or other.is_zero():
            return zero_op()
        wa, wb = self.bandwidth, other.bandwidth
        wc = wa + wb
        la, pa = self._tail_params()
        lb, pb = other._tail_params()
        L = max(la, lb) + wc
        P = _lcm(pa, pb)
        diags = []
        for o in range(-wc, wc + 1):
            vals = []
            for t in range(L + P):
                if o >= 0:
                    i, j = t, t + o
                else:
                    i, j = t - o, t
                lo = max(0, i - wa, j - wb)
                hi = min(i + wa, j + wb)
                s = GR_ZERO
                for k in range(lo, hi + 1):
                    av = self.band_entry(i, k)
                    if av.is_zero():
                        continue
                    bv = other.band_entry(k, j)
                    if bv.is_zero():
                        continue
                    s = s + av * bv
                vals.append(s)
            diags.append(Diagonal(o, tuple(vals[:L]), tuple(vals[L:])))
        band = BandedOperator.build(diags)
        patch = None
        if self.patch is not None or other.patch is not None:
            Pa, Pb = self.patch_size, other.patch_size
            Pc = max(Pa, Pb, Pa + wb, Pb + wa)
            kmax = max(Pc + wa, Pa, Pb) + 1
            rows = []
            for i in range(Pc):
                row = []
                for j in range(Pc):
                    s = GR_ZERO
                    for k in range(kmax):
                        av = self.entry(i, k)
                        if av.is_zero():
                            continue
                        bv = other.entry(k, j)
                        if bv.is_zero():
                            continue
                        s = s + av * bv
                    row.append(s - band.band_entry(i, j))
                rows.append(row)
            patch = Mat.from_rows(rows, EXACT) if rows else None
        fred = True if (self.fredholm and other.fredholm) else None
        return BandedOperator.build(band.diagonals, patch, fred)

    def power(self, m: int) -> "BandedOperator":
        out = identity_op()
        for _ in range(m):
            out = out * self
        return out

    def poly(self, coeffs) -> "BandedOperator":
        """p(T) for p given by its coefficient list [c0, c1, ...]."""
        out = zero_op()
        pw = identity_op()
        for k, c in enumerate(coeffs):
            gc = _as_gr(c)
            if k > 0:
                pw = pw * self
            if not gc.is_zero():
                out = out + pw.scale(gc)
        return out

    def __eq__(self, other):
        """Structural equality of the stored operator (flags not compared)."""
        if not isinstance(other, BandedOperator):
            return NotImplemented
        if self.diagonals != other.diagonals:
            return False
        pa, pb = self.patch, other.patch
        if (pa is None) != (pb is None):
            return False
        return pa == pb

    def __hash__(self):
        return hash(self.diagonals)


def _patch_add(a: Mat | None, b: Mat | None):
    if a is None:
        return b
    if b is None:
        return a
    n = max(a.rows, b.rows)
    rows = [
        [
            (a.at(i, j) if i < a.rows and j < a.cols else GR_ZERO)
            + (b.at(i, j) if i < b.rows and j < b.cols else GR_ZERO)
            for j in range(n)
        ]
        for i in range(n)
    ]
    return Mat.from_rows(rows, EXACT)


def zero_op() -> BandedOperator:
    return BandedOperator.build([])


def identity_op() -> BandedOperator:
    return BandedOperator.build(
        [Diagonal(0, (), (GR_ONE,))], fredholm=True
    )


# -- catalog -----------------------------------------------------------


def _symbol_is_fredholm(symbol: dict) -> bool:
    """No root of the symbol on the unit circle (within TOL_CIRCLE)."""
    if not symbol:
        return False
    lo = min(symbol)
    coeffs = []
    hi = max(symbol)
    for k in range(hi, lo - 1, -1):  # numpy wants highest degree first
        c = symbol.get(k, GR_ZERO)
        coeffs.append(c.to_complex())
    arr = np.array(coeffs, dtype=complex)
    arr = np.trim_zeros(arr, "f")
    if arr.size <= 1:
        # monomial c*z^lo: invertible symbol iff c != 0
        return bool(arr.size and arr[0] != 0)
    roots = np.roots(arr)
    return bool(np.all(np.abs(np.abs(roots) - 1.0) > TOL_CIRCLE))


def make_catalog_operator(kind: str, **params) -> BandedOperator:
    """Named operators: shift, adjoint_shift, weighted_shift, toeplitz,
    diagonal.

    weighted_shift: weights given by ``prefix``/``period`` sequences,
    acting as e_k -> w_k e_(k+1).
    toeplitz: ``symbol`` maps exponent k to the coefficient of z^k; the
    matrix entry at (i, j) is the coefficient of z^(i-j).
    diagonal: ``values`` prefix plus ``period`` tail (default all-zero
    tail, i.e. a finite-rank compact candidate).
    """
    if kind == "shift":
        return BandedOperator.build([Diagonal(-1, (), (GR_ONE,))], fredholm=True)
    if kind == "adjoint_shift":
        return BandedOperator.build([Diagonal(1, (), (GR_ONE,))], fredholm=True)
    if kind == "weighted_shift":
        prefix = [_as_gr(v) for v in params.get("prefix", [])]
        period = [_as_gr(v) for v in params.get("period", [])]
        if not period:
            raise FormatError("weighted_shift needs a nonempty period")
        fred = all(not v.is_zero() for v in period)
        return BandedOperator.build(
            [Diagonal(-1, tuple(prefix), tuple(period))], fredholm=fred
        )
    if kind == "toeplitz":
        raw = params.get("symbol")
        if not raw:
            raise FormatError("toeplitz needs a nonempty symbol")
        symbol = {int(k): _as_gr(v) for k, v in dict(raw).items()}
        diags = [
            Diagonal(-k, (), (c,)) for k, c in sorted(symbol.items()) if not c.is_zero()
        ]
        return BandedOperator.build(diags, fredholm=_symbol_is_fredholm(symbol))
    if kind == "diagonal":
        values = [_as_gr(v) for v in params.get("values", [])]
        period = [_as_gr(v) for v in params.get("period", [GR_ZERO])]
        fred = all(not v.is_zero() for v in period)
        return BandedOperator.build(
            [Diagonal(0, tuple(values), tuple(period))], fredholm=fred
        )
    raise FormatError(f"unknown catalog kind {kind!r}")


def decay_diagonal(rule, length: int) -> BandedOperator:
    """Compact candidate: diagonal with values rule(0..length-1), zero tail."""
    return make_catalog_operator("diagonal", values=[rule(k) for k in range(length)])


# -- sections and certified kernels -------------------------------------


@dataclass(frozen=True)
class TruncationWindow:
    N: int = DEFAULT_N
    G: int = DEFAULT_G

    def __post_init__(self):
        if not (self.N > self.G >= 0):
            raise FormatError(f"window needs N > G >= 0, got N={self.N} G={self.G}")


@dataclass(frozen=True)
class StabilizedSubspace:
    """Orthonormal basis (columns) of a kernel, certified by two windows."""

    basis: np.ndarray  # (support, dim)
    dim: int
    certified: bool
    window: TruncationWindow


def _fix_phases(B: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest entry is real positive."""
    B = B.copy()
    for j in range(B.shape[1]):
        col = B[:, j]
        k = int(np.argmax(np.abs(col)))
        v = col[k]
        if abs(v) > 0:
            B[:, j] = col * (abs(v) / v)
    return B


def _orthonormalize(B: np.ndarray) -> np.ndarray:
    if B.shape[1] == 0:
        return B
    q, r = np.linalg.qr(B)
    d = np.diag(r).copy()
    d[np.abs(d) == 0] = 1.0
    return q * (d.conj() / np.abs(d))


def _section_kernel(Tm: BandedOperator, N: int, G: int):
    """(dim, basis restricted to [0, N-G)) for the window (N, G)."""
    rows = max(N + Tm.bandwidth, Tm.patch_size, 1)
    A = Tm.section(rows, N)
    if not A.any():
        ns = np.eye(N, dtype=complex)
        smax = 0.0
    else:
        _, s, vh = np.linalg.svd(A)
        smax = float(s[0])
        r = int(np.sum(s > TOL_SECTION_RANK * smax))
        ns = vh[r:].conj().T
    if ns.shape[1] == 0:
        return 0, np.zeros((N - G, 0), dtype=complex)
    guard = ns[N - G :, :]
    if guard.size == 0:
        combos = np.eye(ns.shape[1], dtype=complex)
    else:
        _, gs, gvh = np.linalg.svd(guard)
        keep = int(np.sum(gs > TOL_GUARD)) if gs.size else 0
        combos = gvh[keep:].conj().T
    vecs = ns @ combos
    if vecs.shape[1] == 0:
        return 0, np.zeros((N - G, 0), dtype=complex)
    # residual certificate against the untruncated rows
    resid = A @ vecs
    scale = max(1.0, smax)
    if float(np.abs(resid).max(initial=0.0)) > TOL_RESIDUAL * scale:
        return 0, np.zeros((N - G, 0), dtype=complex)
    cut = _orthonormalize(vecs[: N - G, :])
    return cut.shape[1], _fix_phases(cut)


def kernel_of_power(
    T: BandedOperator, m: int, win: TruncationWindow | None = None
) -> StabilizedSubspace:
    """Certified orthonormal basis of ker T^m via stabilized sections.

    When no window is given, the guard band is grown to m * bandwidth and
    the section auto-doubles up to MAX_SECTION before raising
    NotStabilized.
    """
    bw = T.bandwidth
    if win is None:
        G = max(DEFAULT_G, m * bw)
        N = max(DEFAULT_N, 2 * G)
        win = TruncationWindow(N, G)
    elif win.G < m * bw:
        raise FormatError(
            f"window guard {win.G} below m*bandwidth = {m * bw}; "
            "enlarge the guard band"
        )
    Tm = T.power(m)
    cache = {}

    def at(n):
        if n not in cache:
            cache[n] = _section_kernel(Tm, n, win.G)
        return cache[n]

    N = win.N
    cap = max(MAX_SECTION, win.N)
    while N <= cap:
        d1, basis = at(N)
        d2, _ = at(2 * N)
        if d1 == d2:
            return StabilizedSubspace(
                basis=basis, dim=d1, certified=True, window=TruncationWindow(N, win.G)
            )
        N *= 2
    raise NotStabilized(
        f"kernel dimension kept changing up to section size {cap} "
        f"(last dims {d1} vs {d2})"
    )


@dataclass(frozen=True)
class IndexCertificate:
    index: int
    dim_ker: int
    dim_coker: int
    ker: StabilizedSubspace
    coker: StabilizedSubspace

    @property
    def certified(self) -> bool:
        return self.ker.certified and self.coker.certified


def fredholm_index_banded(
    T: BandedOperator, win: TruncationWindow | None = None
) -> IndexCertificate:
    """dim ker T - dim ker T*, both sides certified by stabilized windows.

    The caller asserts Fredholmness via the operator's flag (catalog
    operators carry it); the cokernel is the kernel of the adjoint.
    """
    if not T.fredholm:
        raise PreconditionError(
            "operator is not marked Fredholm; index is only computed for "
            "asserted-Fredholm operators"
        )
    ker = kernel_of_power(T, 1, win)
    coker = kernel_of_power(T.adjoint(), 1, win)
    return IndexCertificate(
        index=ker.dim - coker.dim,
        dim_ker=ker.dim,
        dim_coker=coker.dim,
        ker=ker,
        coker=coker,
    )


def restricted_norm(K: BandedOperator, basis: np.ndarray) -> float:
    """Operator norm of K restricted to the span of orthonormal columns.

    The columns are finitely supported; the images are computed on a
    section tall enough to hold all of their mass, so this is the honest
    norm of K as a map into l2.
    """
    if basis.shape[1] == 0:
        return 0.0
    n = basis.shape[0]
    rows = max(n + K.bandwidth, K.patch_size, 1)
    images = K.section(rows, n) @ basis
    return float(np.linalg.svd(images, compute_uv=False)[0])
