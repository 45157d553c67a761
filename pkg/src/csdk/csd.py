"""CS decomposition of a stacked matrix with orthonormal columns, or of a
rank-deficient partial isometry.

Given A = [A1; A2] with m1, m2 >= n columns-orthonormal (or a partial
isometry), the factorization A1 = U1 C V1*, A2 = U2 S V1* with shared V1
and diagonal C, S is computed from the polar decompositions A_i = W_i H_i
followed by one Hermitian eigendecomposition.  The eigenvector basis must
come from H2 - H1: the eigenvalues sin(theta) - cos(theta) of that
difference are spaced at least as far apart as those of either H alone, so
its computed eigenvectors nearly diagonalize both H1 and H2 even when the
principal angles cluster near 0 or pi/2, where diagonalizing H1 or H2
directly is hopeless.  For rank-deficient input the difference is shifted
by mu (I - A*A) with mu = 2, which moves the null space's eigenvalue to 2,
cleanly separated from the [-1, 1] band of the active angles.

Ill-conditioned blocks (smallest singular value below epsilon) go through
the fixed-interval polar variant; orthonormality of the resulting W is then
restored from the identity W = Q Q_H*, where Q and Q_H are the Q-factors
of A_i and of its Hermitian polar factor, which share one R-factor under
the nonnegative-diagonal QR convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    ConvergenceError,
    DimensionError,
    NotNearIsometryError,
    PreconditionError,
    RankInconsistencyError,
)
from .kernel import (
    DEFAULT_TOL_FACTOR,
    U_ROUNDOFF,
    hermitian_part,
    norm_2,
    norm_fro,
    qr_factor,
    svd_factor,
)
from .isometry import dist_to_partial_isometry
from .polar import PolarFactors, polar_iterative, polar_modified, polar_svd
from .symeig import symeig_direct, symeig_interval, symeig_sdc
from .zolotarev import SignApproxParams

# Inputs farther than this from any partial isometry are refused: the
# backward-error guarantees are asymptotic in that distance.
_DISTANCE_GATE = 0.1

_RANK_DETECT_EPS_FACTOR = 1e-8

_R_AGREEMENT_FACTOR = 1e3

# In the rank-deficient branch, a block whose smallest *active* singular
# value sits below this gets the QR fix: without it, backward errors rotate
# that singular direction into the null space by ~u/sigma, costing
# (u/sigma)**2 of U_i orthonormality, which crosses roundoff level near 1e-7.
_RANK_DEFICIENT_FIX_THRESHOLD = 1e-7


def nint(x: float) -> int:
    """Nearest integer, halves away from zero."""
    return int(np.floor(x + 0.5)) if x >= 0 else -int(np.floor(-x + 0.5))


@dataclass(frozen=True)
class CsdOptions:
    """Knobs for the decomposition.

    polar_method picks the route for the two polar decompositions; epsilon
    is the ill-conditioning threshold on a block's smallest singular value;
    rank_mode "auto" detects rank deficiency (Frobenius-norm count cross-
    checked against the eps-rank), "full"/"deficient" assert it.
    cs_extraction "diag_projection" reads C and S off the projected
    Hermitian factors; "from_lambda" solves sin(t) - cos(t) = lambda
    (cheaper, slightly less accurate).  b_matrix exists for diagnostics:
    "h1" rebuilds the known-unstable variant that eigendecomposes H1 alone.
    """

    polar_method: str = "qdwh"
    epsilon: float = 1e-15
    rank_mode: str = "auto"
    postprocess: bool = True
    cs_extraction: str = "diag_projection"
    b_matrix: str = "difference"

    def __post_init__(self):
        if self.polar_method not in ("svd", "qdwh", "zolo"):
            raise ValueError(f"unknown polar method {self.polar_method!r}")
        if not 0.0 < self.epsilon < 1e-8:
            raise ValueError(f"epsilon must lie in (0, 1e-8), got {self.epsilon}")
        if self.rank_mode not in ("full", "deficient", "auto"):
            raise ValueError(f"unknown rank mode {self.rank_mode!r}")
        if self.cs_extraction not in ("diag_projection", "from_lambda"):
            raise ValueError(f"unknown extraction {self.cs_extraction!r}")
        if self.b_matrix not in ("difference", "h1"):
            raise ValueError(f"unknown b_matrix {self.b_matrix!r}")


@dataclass(frozen=True)
class CsdResult:
    """Factors A1 ~= U1 diag(c) V1*, A2 ~= U2 diag(s) V1*.

    c and s hold the diagonals (cosines and sines of theta after
    post-processing); theta is ascending.  k = len(theta) equals n for the
    full-rank branches and the rank r for the economical rank-deficient
    output.  branch records the dispatch actually taken.
    """

    u1: np.ndarray
    u2: np.ndarray
    c: np.ndarray
    s: np.ndarray
    v1: np.ndarray
    theta: np.ndarray
    rank: int
    mu: float
    branch: str

    @property
    def k(self) -> int:
        return self.theta.shape[0]


def build_B(h1: np.ndarray, h2: np.ndarray, a: np.ndarray, mu: float) -> np.ndarray:
    """The Hermitian matrix H2 - H1 + mu (I - A*A) whose eigenvectors give V1."""
    if mu not in (0.0, 2.0):
        raise ValueError(f"mu must be 0 or 2, got {mu}")
    b = h2 - h1
    if mu != 0.0:
        n = a.shape[1]
        b = b + mu * (np.eye(n) - a.conj().T @ a)
    return hermitian_part(b)


def extract_cs(
    v1: np.ndarray, h1: np.ndarray, h2: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Diagonals of V1* H1 V1 and V1* H2 V1, clamped into [0, 1].

    The off-diagonal parts and the imaginary/negative round-off are
    discarded; true entries are cosines and sines, so the clamp only moves
    values by O(u).
    """
    c = np.real(np.sum(np.conj(v1) * (h1 @ v1), axis=0))
    s = np.real(np.sum(np.conj(v1) * (h2 @ v1), axis=0))
    return np.clip(c, 0.0, 1.0), np.clip(s, 0.0, 1.0)


def postprocess_trig(
    c: np.ndarray, s: np.ndarray, rank: int | None = None
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Snap diagonal pairs onto the unit circle through their angle.

    theta_i = atan2(s_i, c_i); active entries are replaced by cos(theta),
    sin(theta), shrinking c^2 + s^2 - 1 to a couple of ulp.  Pairs that are
    numerically (0, 0) are rank-deficiency padding and stay zero; rank, if
    given, is validated against the active count.
    """
    c = np.asarray(c, dtype=float)
    s = np.asarray(s, dtype=float)
    active = c * c + s * s >= 0.25
    theta = np.where(active, np.arctan2(s, c), 0.0)
    c_out = np.where(active, np.cos(theta), 0.0)
    s_out = np.where(active, np.sin(theta), 0.0)
    if rank is not None and int(np.count_nonzero(active)) != rank:
        raise RankInconsistencyError(
            f"{int(np.count_nonzero(active))} active diagonal pairs, expected {rank}"
        )
    return c_out, s_out, theta


def cs_from_lambda(lam: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Recover (c, s, theta) from eigenvalues lambda = sin(theta) - cos(theta)."""
    lam = np.clip(np.asarray(lam, dtype=float), -1.0, 1.0)
    theta = np.arcsin(lam / np.sqrt(2.0)) + np.pi / 4.0
    return np.cos(theta), np.sin(theta), theta


def _block_sigmas(block: np.ndarray) -> np.ndarray:
    """Singular values of a block via its (small) triangular QR factor."""
    return svd_factor(qr_factor(block).r).sigma


def polar_via_qr_fix(
    ai: np.ndarray,
    epsilon: float = 1e-15,
    params: Optional[SignApproxParams] = None,
    *,
    sigmas: np.ndarray | None = None,
) -> tuple[PolarFactors, float]:
    """Orthonormal polar factor for an ill-conditioned block.

    Runs the fixed-interval variant (whose W is not orthonormal), then
    replaces W by Q Q_H* from the QR factorizations A_i = Q R and
    H = Q_H R_H.  Under the nonnegative-diagonal convention those two
    R-factors agree up to O(u) exactly when the swap is legitimate; their
    relative difference is returned as r_agreement, and if it exceeds
    1e3*n*u the routine falls back to the SVD route.  Refuses blocks that
    are not ill conditioned: the gate sits at the rank-deficient danger
    threshold so that noisy near-singular blocks (smallest singular value
    at the noise floor rather than below epsilon) still qualify.
    """
    ai = np.asarray(ai, dtype=np.complex128)
    if sigmas is None:
        sigmas = _block_sigmas(ai)
    smax = float(sigmas[0]) if sigmas.size else 0.0
    smin = float(sigmas[-1]) if sigmas.size else 0.0
    gate = max(epsilon, _RANK_DEFICIENT_FIX_THRESHOLD)
    if smax == 0.0 or smin / smax >= gate:
        raise PreconditionError(
            "block is not ill conditioned; use the standard polar route"
        )
    modified = polar_modified(ai, epsilon, params)
    qa = qr_factor(ai)
    qh = qr_factor(modified.h)
    denom = max(norm_fro(qa.r), np.finfo(float).tiny)
    r_agreement = norm_fro(qh.r - qa.r) / denom
    n = ai.shape[1]
    if r_agreement > _R_AGREEMENT_FACTOR * n * U_ROUNDOFF:
        return polar_svd(ai), r_agreement
    w = qa.q @ qh.q.conj().T
    fixed = PolarFactors(
        w, modified.h, "exact", modified.method, smin, modified.iterations
    )
    return fixed, r_agreement


def _polar_for_block(
    block: np.ndarray, opts: CsdOptions, sigmas: np.ndarray
) -> tuple[PolarFactors, bool]:
    """Polar factors of one block plus whether the QR-fix route was taken."""
    if opts.polar_method == "svd":
        return polar_svd(block), False
    smax = float(sigmas[0])
    if smax == 0.0:
        # A zero block: any orthonormal W with H = 0 is fine.
        return polar_svd(block), False
    ill = sigmas[-1] / smax < opts.epsilon
    if ill:
        fixed, _ = polar_via_qr_fix(block, opts.epsilon, sigmas=sigmas)
        return fixed, True
    try:
        return polar_iterative(block, method=opts.polar_method), False
    except ConvergenceError:
        # Condition estimate was too optimistic; the SVD route is
        # unconditionally stable.
        return polar_svd(block), False


def _symeig_for(opts: CsdOptions):
    return symeig_direct if opts.polar_method == "svd" else symeig_sdc


def _detect_rank(a: np.ndarray, opts: CsdOptions) -> int:
    """Rank of the near partial isometry A.

    ||A||_F**2 counts the unit singular values; the eps-rank of the
    triangular QR factor counts them independently.  In auto mode both
    must agree.
    """
    n = a.shape[1]
    if opts.rank_mode == "full":
        return n
    sigmas = _block_sigmas(a)
    eps = _RANK_DETECT_EPS_FACTOR * (float(sigmas[0]) if sigmas.size else 1.0)
    rank_eps = int(np.count_nonzero(sigmas > eps))
    rank_fro = nint(norm_fro(a) ** 2)
    if opts.rank_mode == "deficient":
        return rank_eps
    if rank_fro != rank_eps:
        raise RankInconsistencyError(
            f"Frobenius rank estimate {rank_fro} disagrees with eps-rank {rank_eps}"
        )
    return rank_fro


def _finish(
    u1, u2, v1, lam, h1, h2, opts: CsdOptions, rank: int, mu: float, branch: str
) -> CsdResult:
    if opts.cs_extraction == "from_lambda":
        c, s, theta = cs_from_lambda(lam)
        if not opts.postprocess:
            # The angle route already yields exact cos/sin pairs.
            return CsdResult(u1, u2, c, s, v1, theta, rank, mu, branch)
    else:
        c, s = extract_cs(v1, h1, h2)
    # The active-pair count doubles as the detector for rank deficiency
    # smuggled past an asserted full-rank mode: null columns project to
    # (0, 0) pairs and the count comes up short of the claimed rank.
    check = rank if opts.cs_extraction == "diag_projection" else None
    c_post, s_post, theta = postprocess_trig(c, s, check)
    if opts.postprocess:
        c, s = c_post, s_post
    return CsdResult(u1, u2, c, s, v1, theta, rank, mu, branch)


def csd(a: np.ndarray, m1: int, opts: CsdOptions = CsdOptions()) -> CsdResult:
    """CS decomposition of A = [A1; A2], A1 of m1 rows, both blocks taller
    than square.

    Dispatch: full-rank input with both blocks' smallest singular value at
    least epsilon runs the plain two-polar route; a block below epsilon is
    rerouted through the fixed-interval polar plus QR fix; detected rank
    deficiency switches to the economical decomposition (k = rank columns).
    Inputs farther than 0.1 from every partial isometry are refused.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionError("input must be a matrix")
    m, n = a.shape
    if n == 0:
        raise DimensionError("input must have at least one column")
    m2 = m - m1
    if m1 < n or m2 < n:
        raise DimensionError(
            f"both blocks must have at least n={n} rows, got m1={m1}, m2={m2}"
        )
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains non-finite entries")
    d = dist_to_partial_isometry(a)
    if d > _DISTANCE_GATE:
        raise NotNearIsometryError(
            f"distance to the nearest partial isometry is {d:.3g} > {_DISTANCE_GATE}; "
            "the factorization contract does not cover such inputs"
        )
    rank = _detect_rank(a, opts)
    if rank < n:
        return csd_rank_deficient(a, m1, opts, _rank=rank, _distance=d)

    a1, a2 = a[:m1], a[m1:]
    sig1, sig2 = _block_sigmas(a1), _block_sigmas(a2)
    pf1, fix1 = _polar_for_block(a1, opts, sig1)
    pf2, fix2 = _polar_for_block(a2, opts, sig2)
    if opts.b_matrix == "h1":
        b = hermitian_part(pf1.h)
    else:
        b = build_B(pf1.h, pf2.h, a, 0.0)
    eig = _symeig_for(opts)(b)
    v1 = eig.v
    u1 = pf1.w @ v1
    u2 = pf2.w @ v1
    branch = "ill_conditioned" if (fix1 or fix2) else "full_rank"
    return _finish(u1, u2, v1, eig.lam, pf1.h, pf2.h, opts, n, 0.0, branch)


def csd_rank_deficient(
    a: np.ndarray,
    m1: int,
    opts: CsdOptions = CsdOptions(),
    *,
    _rank: int | None = None,
    _distance: float | None = None,
) -> CsdResult:
    """Economical CS decomposition of a rank-deficient partial isometry.

    Both blocks go through the fixed-interval polar variant; the null
    space is pushed to eigenvalue mu = 2 of B, the r eigenpairs in [-1, 1]
    are extracted by an interval-restricted eigensolve splitting at 1.1,
    and U_i = W_i V1r comes out orthonormal because the fixed-interval map
    sends every active singular value to 1 - O(u).  Output has k = r
    columns.  A block whose r-th singular value is itself below epsilon
    additionally gets the QR fix.
    """
    a = np.asarray(a, dtype=np.complex128)
    m, n = a.shape
    m2 = m - m1
    if m1 < n or m2 < n:
        raise DimensionError(
            f"both blocks must have at least n={n} rows, got m1={m1}, m2={m2}"
        )
    rank = _detect_rank(a, opts) if _rank is None else _rank
    d = dist_to_partial_isometry(a) if _distance is None else _distance
    a1, a2 = a[:m1], a[m1:]

    params = SignApproxParams(p=8, ell=opts.epsilon, iterations=2)
    factors = []
    any_fix = False
    for block in (a1, a2):
        sigmas = _block_sigmas(block)
        if opts.polar_method == "svd" or float(sigmas[0]) == 0.0:
            factors.append(polar_svd(block))
            continue
        active_min = float(sigmas[rank - 1]) if rank >= 1 else 0.0
        if active_min < max(opts.epsilon, _RANK_DEFICIENT_FIX_THRESHOLD):
            fixed, _ = polar_via_qr_fix(block, opts.epsilon, params, sigmas=sigmas)
            factors.append(fixed)
            any_fix = True
        else:
            factors.append(polar_modified(block, opts.epsilon, params))
    pf1, pf2 = factors

    b = build_B(pf1.h, pf2.h, a, 2.0)
    select_tol = max(
        DEFAULT_TOL_FACTOR * n * U_ROUNDOFF * norm_2(b),
        10.0 * d,
    )
    v1r, lam = symeig_interval(b, -1.0, 1.0, tol=select_tol)
    if lam.shape[0] != rank:
        raise RankInconsistencyError(
            f"{lam.shape[0]} eigenvalues found in [-1, 1] but the rank estimate is {rank}"
        )
    u1 = pf1.w @ v1r
    u2 = pf2.w @ v1r
    branch = (
        "rank_deficient_ill_conditioned"
        if (any_fix and opts.polar_method != "svd")
        else "rank_deficient"
    )
    return _finish(u1, u2, v1r, lam, pf1.h, pf2.h, opts, rank, 2.0, branch)


def csd_2x2(
    a: np.ndarray, opts: CsdOptions = CsdOptions()
) -> tuple[CsdResult, np.ndarray]:
    """Complete 2x2 CS decomposition of a unitary 2n x 2n matrix.

    Runs the one-sided decomposition on the left block column, then
    recovers the remaining right factor from X = -A3* U1 S + A4* U2 C,
    which equals V2 (C^2 + S^2) for exactly unitary input; the Q-factor of
    X is returned as V2.  Reconstruction of all four blocks is
    [[U1 C V1*, -U1 S V2*], [U2 S V1*, U2 C V2*]].
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] % 2 != 0:
        raise DimensionError(f"expected a square even-sized matrix, got {a.shape}")
    n = a.shape[0] // 2
    gate = norm_fro(a.conj().T @ a - np.eye(2 * n))
    if gate > 1e-6:
        raise PreconditionError(
            f"input is not numerically unitary (defect {gate:.3g} > 1e-6)"
        )
    result = csd(a[:, :n], n, opts)
    a3 = a[:n, n:]
    a4 = a[n:, n:]
    x = -a3.conj().T @ (result.u1 * result.s) + a4.conj().T @ (result.u2 * result.c)
    v2 = qr_factor(x).q
    return result, v2
