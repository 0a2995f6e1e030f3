"""Koszul complexes of commuting matrix tuples.

For a commuting tuple T = (T_1, ..., T_n) on a d-dimensional space, the
complex lives on X (x) L^p where L^p is the space of p-forms in n
generators.  The differential sends x (x) w to sum_i T_i x (x) e_i ^ w;
in the lexicographic monomial basis its block at (e_i ^ w, w) is
sign * T_i with sign = (-1)^(number of indices in w smaller than i).

Cohomology dimensions, the alternating-sum index, augmentation by one
more commuting operator, and the induced action of a commuting operator
on cohomology are all computed here.  The degreewise dimension identity

    dim H^p = (cols D^p - rank D^p) - rank D^(p-1)

is taken with D^(-1) and D^n read as zero maps.  On finite-dimensional
spaces the index is always 0 (Euler characteristic); this is asserted on
every report.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

from .errors import DegreeError, ModeMismatch, NonCommuting, NotStabilized, ShapeError
from .linalg import (
    Mat,
    block_diag_copies,
    column_space_basis,
    commutator,
    kernel_basis,
    mat_block,
    mat_hstack,
    rank,
    solve,
)
from .scalars import EXACT

#: default relative commutator tolerance in float mode
TOL_COMM = 1e-10


@dataclass(frozen=True)
class CommutingTuple:
    """n commuting d x d matrices sharing one arithmetic mode."""

    n: int
    d: int
    matrices: tuple
    mode: str


@dataclass(frozen=True)
class FormBasis:
    """Lexicographically ordered strictly increasing p-subsets of 1..n."""

    n: int
    p: int
    members: tuple

    def index(self, member) -> int:
        return self.members.index(member)


@dataclass(frozen=True)
class KoszulComplex:
    tuple: CommutingTuple
    differentials: tuple  # D^0 ... D^(n-1)


@dataclass(frozen=True)
class CohomologyReport:
    dims: tuple
    index: int
    invertible: bool
    fredholm: bool

    def __post_init__(self):
        alt = sum((-1) ** p * dim for p, dim in enumerate(self.dims))
        assert alt == self.index
        assert self.index == 0, "finite-dimensional tuples always have index 0"


@dataclass(frozen=True)
class LESReport:
    """Dimensions of the augmented tuple computed two independent ways."""

    dims_direct: tuple
    dims_sequence: tuple
    agree: bool
    index: int
    base_dims: tuple
    induced_ranks: tuple
    iso_by_degree: tuple
    all_iso: bool


def form_basis(n: int, p: int) -> FormBasis:
    if not 0 <= p <= n:
        raise DegreeError(f"degree {p} outside 0..{n}")
    return FormBasis(n, p, tuple(combinations(range(1, n + 1), p)))


def validate_tuple(matrices, tol_comm: float | None = None) -> CommutingTuple:
    """Check shapes and pairwise commutation; returns the validated tuple.

    Exact mode requires exact commutation; float mode allows commutator
    Frobenius norm up to tol * max ||T_i||.
    """
    mats = tuple(matrices)
    if not mats:
        raise ShapeError("empty tuple")
    mode = mats[0].mode
    d = mats[0].rows
    for k, M in enumerate(mats):
        if M.mode != mode:
            raise ModeMismatch(f"operator {k} has mode {M.mode}, expected {mode}")
        if M.rows != M.cols or M.rows != d:
            raise ShapeError(f"operator {k} is {M.rows}x{M.cols}, expected {d}x{d}")
    scale = max((M.fro_norm() for M in mats), default=0.0)
    tol = (TOL_COMM if tol_comm is None else tol_comm) * max(scale, 1.0)
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            C = commutator(mats[i], mats[j])
            nrm = C.fro_norm()
            bad = not C.is_zero() if mode == EXACT else nrm > tol
            if bad:
                raise NonCommuting(
                    f"operators {i} and {j} do not commute "
                    f"(commutator norm {nrm:.3e})",
                    pair=(i, j),
                    norm=nrm,
                )
    return CommutingTuple(len(mats), d, mats, mode)


def _wedge_insert(omega: tuple, i: int):
    """(sign, e_i ^ omega) as a sorted tuple, or None when i already occurs."""
    if i in omega:
        return None
    smaller = sum(1 for j in omega if j < i)
    return (-1) ** smaller, tuple(sorted(omega + (i,)))


def koszul_differential(T: CommutingTuple, p: int) -> Mat:
    """Matrix of the degree-p differential, d*C(n,p+1) rows by d*C(n,p) cols."""
    if not 0 <= p <= T.n - 1:
        raise DegreeError(f"differential degree {p} outside 0..{T.n - 1}")
    src = form_basis(T.n, p)
    dst = form_basis(T.n, p + 1)
    dst_index = {m: i for i, m in enumerate(dst.members)}
    zero = Mat.zeros(T.d, T.d, T.mode)
    grid = [[zero for _ in src.members] for _ in dst.members]
    for c, omega in enumerate(src.members):
        for i in range(1, T.n + 1):
            ins = _wedge_insert(omega, i)
            if ins is None:
                continue
            sign, target = ins
            r = dst_index[target]
            block = T.matrices[i - 1]
            grid[r][c] = block if sign == 1 else -block
    return mat_block(grid)


def koszul_complex(T: CommutingTuple) -> KoszulComplex:
    diffs = tuple(koszul_differential(T, p) for p in range(T.n))
    if T.mode == EXACT:
        for p in range(T.n - 1):
            assert (diffs[p + 1] @ diffs[p]).is_zero(), "chain identity violated"
    return KoszulComplex(T, diffs)


def _boundary_maps(T: CommutingTuple, diffs):
    """D^p for p in -1..n with the zero conventions at both ends."""

    def D(p: int) -> Mat:
        if p < 0:
            return Mat.zeros(T.d * comb(T.n, 0), 0, T.mode)
        if p >= T.n:
            return Mat.zeros(0, T.d * comb(T.n, T.n), T.mode)
        return diffs[p]

    return D


def cohomology(T: CommutingTuple, tol_rank: float | None = None) -> CohomologyReport:
    """Cohomology dimensions, index, and the invertible/Fredholm flags."""
    diffs = koszul_complex(T).differentials
    D = _boundary_maps(T, diffs)
    dims = []
    prev_rank = 0
    for p in range(T.n + 1):
        Dp = D(p)
        rp = rank(Dp, tol_rank)
        dims.append(Dp.cols - rp - prev_rank)
        prev_rank = rp
    idx = sum((-1) ** p * dim for p, dim in enumerate(dims))
    if any(dim < 0 for dim in dims):
        # impossible in exact mode; in float mode it means the rank
        # tolerance made inconsistent calls on adjacent differentials
        raise NotStabilized(
            f"rank tolerance produced a negative dimension in {dims}"
        )
    return CohomologyReport(
        dims=tuple(dims),
        index=idx,
        invertible=all(dim == 0 for dim in dims),
        fredholm=True,
    )


def _check_commutes_with_tuple(S: Mat, T: CommutingTuple, tol_comm=None):
    if S.mode != T.mode:
        raise ModeMismatch("augmenting operator mode differs from tuple mode")
    if (S.rows, S.cols) != (T.d, T.d):
        raise ShapeError(f"augmenting operator is {S.rows}x{S.cols}, expected {T.d}x{T.d}")
    scale = max(max((M.fro_norm() for M in T.matrices), default=0.0), S.fro_norm())
    tol = (TOL_COMM if tol_comm is None else tol_comm) * max(scale, 1.0)
    for i, M in enumerate(T.matrices):
        C = commutator(S, M)
        bad = not C.is_zero() if T.mode == EXACT else C.fro_norm() > tol
        if bad:
            raise NonCommuting(
                f"operator does not commute with tuple entry {i} "
                f"(commutator norm {C.fro_norm():.3e})",
                pair=("S", i),
                norm=C.fro_norm(),
            )


def _quotient_representatives(ker: Mat, im: Mat, tol_rank=None):
    """Columns of ``ker`` extending col(im) to a basis of ker, greedily."""
    reps = []
    cur = im
    cur_rank = rank(im, tol_rank)
    for j in range(ker.cols):
        cand = mat_hstack([cur, ker.column(j)])
        r = rank(cand, tol_rank)
        if r > cur_rank:
            reps.append(ker.column(j))
            cur = cand
            cur_rank = r
    return reps


def induced_map(S: Mat, T: CommutingTuple, p: int, tol_rank: float | None = None) -> Mat:
    """Matrix of the action of S on H^p(T) in a deterministic basis.

    Representatives are kernel-basis columns completing the image of the
    previous differential; the action is re-expressed modulo that image.
    """
    if not 0 <= p <= T.n:
        raise DegreeError(f"degree {p} outside 0..{T.n}")
    _check_commutes_with_tuple(S, T)
    diffs = koszul_complex(T).differentials
    D = _boundary_maps(T, diffs)
    ker = kernel_basis(D(p), tol_rank)
    im = column_space_basis(D(p - 1), tol_rank)
    reps = _quotient_representatives(ker, im, tol_rank)
    h = len(reps)
    if h == 0:
        return Mat.zeros(0, 0, T.mode)
    R = mat_hstack(reps)
    basis = mat_hstack([im, R]) if im.cols else R
    Sblk = block_diag_copies(S, comb(T.n, p))
    X = solve(basis, Sblk @ R, tol_rank)
    if X is None:
        raise NonCommuting(
            "induced action did not preserve the cohomology representatives; "
            "operator fails to commute within tolerance"
        )
    rows = [[X.at(im.cols + i, j) for j in range(h)] for i in range(h)]
    return Mat.from_rows(rows, T.mode)


def augment_les(T: CommutingTuple, S: Mat, tol_rank: float | None = None) -> LESReport:
    """Dimensions of the augmented tuple (T, S), two independent ways.

    (a) direct cohomology of the (n+1)-tuple; (b) splicing the long exact
    sequence: dim H^p(T,S) = dim coker(S on H^(p-1)) + dim ker(S on H^p).
    Both must agree; the report also says in which degrees the induced
    action is an isomorphism.
    """
    _check_commutes_with_tuple(S, T)
    Tp = validate_tuple(list(T.matrices) + [S])
    direct = cohomology(Tp, tol_rank)
    base = cohomology(T, tol_rank)
    ranks = []
    for p in range(T.n + 1):
        Sp = induced_map(S, T, p, tol_rank)
        ranks.append(rank(Sp, tol_rank))
    dims_seq = []
    for p in range(T.n + 2):
        coker_prev = (base.dims[p - 1] - ranks[p - 1]) if 1 <= p <= T.n + 1 else 0
        ker_here = (base.dims[p] - ranks[p]) if p <= T.n else 0
        dims_seq.append(coker_prev + ker_here)
    iso = tuple(ranks[p] == base.dims[p] for p in range(T.n + 1))
    return LESReport(
        dims_direct=direct.dims,
        dims_sequence=tuple(dims_seq),
        agree=direct.dims == tuple(dims_seq),
        index=direct.index,
        base_dims=base.dims,
        induced_ranks=tuple(ranks),
        iso_by_degree=iso,
        all_iso=all(iso),
    )
