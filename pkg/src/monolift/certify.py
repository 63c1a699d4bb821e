"""Monotonicity and quasisymmetry certification.

Two notions of a monotonicity constant are estimated here and tied
together by an explicit algebraic bound:

* the two-point constant of a map F, the infimum of
  <F(a) - F(b), a - b> / (|F(a) - F(b)| |a - b|) over sampled pairs;
* the matrix constant of a single matrix A, the minimum over unit v of
  v^T A v / |A v| (directions with A v = 0 excluded), together with the
  companion constant gamma(A) = min_v v^T A v / (||A|| |v|^2).

For a matrix with constant delta the smallest singular value is bounded
below by c(delta) ||A|| with

    c(delta) = (1/delta + 1 - sqrt((1/delta + 1)^2 - 1))^2,

and ``claim_check`` brute-forces that bound over random matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    MapSpec,
    as_square_matrix,
    batch_map,
    compose_maps,
    evaluate_map,
    planar_rotation_map,
    rotation_matrix,
)
from .errors import (
    DegenerateMapError,
    DegenerateTripleError,
    DimensionMismatchError,
    InvalidParameterError,
    NoConvergenceError,
    NonpositiveDeterminantError,
    ZeroMatrixError,
)

__all__ = [
    "PairConfig",
    "DeltaCertificate",
    "sample_pairs",
    "trivial_extension_witness",
    "two_point_delta",
    "matrix_delta",
    "matrix_delta_many",
    "matrix_gamma",
    "claim_constant",
    "ClaimReport",
    "claim_check",
    "TripleConfig",
    "EtaProfile",
    "quasisymmetry_profile",
    "qc_distortion",
    "CompositionReport",
    "composition_monotonicity_demo",
]

_SWEEP_ANGLES = 4096       # dense half-circle sweep for 2x2 matrices
_PGD_RESTARTS = 64         # random restarts on the sphere for dim >= 3
_PGD_SEED = 20151204
_ROW_BUDGET = 1 << 19      # restart rows handled per vectorised chunk


# ---------------------------------------------------------------------------
# pair sampling and two-point certificates

@dataclass(frozen=True)
class PairConfig:
    """Sampling plan for two-point monotonicity ratios.

    Base points are uniform in [-box, box]^dim and the second point of a
    pair sits at a log-uniform separation 10^u, u in ``log_radius_range``.
    ``crossing_pairs`` adds pairs forced onto opposite sides of the last
    coordinate hyperplane; ``witness_radii`` adds the explicit adversarial
    family that refutes the naive (trivial) lift.
    """

    dim: int
    pairs: int = 20000
    seed: int = 0
    log_radius_range: tuple[float, float] = (-3.0, 3.0)
    box: float = 10.0
    crossing_pairs: int = 0
    witness_radii: tuple[float, ...] = ()


@dataclass(frozen=True, eq=False)
class DeltaCertificate:
    """Result of a two-point sweep: the minimum ratio and who achieved it."""

    delta_hat: float
    witness_a: np.ndarray
    witness_b: np.ndarray
    samples: int
    skipped: int
    seed: int

    def __post_init__(self):
        # Cauchy-Schwarz caps the ratio at 1; allow rounding noise only
        if not self.delta_hat <= 1.0 + 1e-9:
            raise InvalidParameterError(f"two-point ratio {self.delta_hat} exceeds 1")

    def json_dict(self) -> dict:
        return {
            "delta_hat": self.delta_hat,
            "witness": {"a": self.witness_a.tolist(), "b": self.witness_b.tolist()},
            "samples": self.samples,
            "seed": self.seed,
            "skipped": self.skipped,
        }


def trivial_extension_witness(R: float, dim: int = 3) -> tuple[np.ndarray, np.ndarray]:
    """Adversarial pair for the naive lift of a radially stretching map.

    Base points sit on a circle of radius R, separated tangentially by
    eps = 1/R, with a height gap sqrt(R) * eps; the two-point ratio of the
    naive lift along this family decays like 2/sqrt(R).
    """
    if dim < 3:
        raise DimensionMismatchError("witness pairs live in R^{n+1} with n >= 2")
    eps = 1.0 / R
    h = math.sqrt(R) * eps
    a = np.zeros(dim)
    b = np.zeros(dim)
    a[0] = b[0] = R
    a[1] = eps
    a[-1] = h
    return a, b


def _witness_family(radii, dim):
    pairs = []
    for R in radii:
        a, b = trivial_extension_witness(R, dim)
        for sign in (1.0, -1.0):
            aa = a.copy()
            aa[1] = sign * a[1]
            pairs.append((aa, b))
            pairs.append((b, aa))  # order swap; ratio is symmetric but keep both
    return pairs


def sample_pairs(cfg: PairConfig) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(cfg.seed)
    lo, hi = cfg.log_radius_range
    base = rng.uniform(-cfg.box, cfg.box, (cfg.pairs, cfg.dim))
    dirs = rng.standard_normal((cfg.pairs, cfg.dim))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    radii = 10.0 ** rng.uniform(lo, hi, cfg.pairs)
    A = base
    B = base + radii[:, None] * dirs
    if cfg.crossing_pairs:
        m = cfg.crossing_pairs
        cbase = rng.uniform(-cfg.box, cfg.box, (m, cfg.dim))
        cdirs = rng.standard_normal((m, cfg.dim))
        cdirs /= np.linalg.norm(cdirs, axis=1, keepdims=True)
        cradii = 10.0 ** rng.uniform(lo, hi, m)
        CA = cbase.copy()
        CB = cbase + cradii[:, None] * cdirs
        CA[:, -1] = 10.0 ** rng.uniform(-2.0, 0.3, m)    # strictly above
        CB[:, -1] = -(10.0 ** rng.uniform(-2.0, 0.3, m))  # strictly below
        A = np.concatenate([A, CA])
        B = np.concatenate([B, CB])
    if cfg.witness_radii:
        wa, wb = zip(*_witness_family(cfg.witness_radii, cfg.dim))
        A = np.concatenate([A, np.array(wa)])
        B = np.concatenate([B, np.array(wb)])
    return A, B


def two_point_delta(F, cfg: PairConfig) -> DeltaCertificate:
    """Minimum sampled two-point ratio of an arbitrary batch map ``F``.

    Pairs that F identifies (F(a) == F(b)) are skipped and counted; a run
    in which every pair collapses raises :class:`DegenerateMapError`.
    """
    A, B = sample_pairs(cfg)
    FA = np.asarray(F(A), dtype=float)
    FB = np.asarray(F(B), dtype=float)
    dX = A - B
    dF = FA - FB
    nx = np.linalg.norm(dX, axis=1)
    nf = np.linalg.norm(dF, axis=1)
    den = nf * nx
    keep = den > 1e-300
    skipped = int(A.shape[0] - keep.sum())
    if not np.any(keep):
        raise DegenerateMapError("every sampled pair was collapsed by the map")
    num = np.einsum("ki,ki->k", dF, dX)
    ratios = num[keep] / den[keep]
    pos = int(np.argmin(ratios))
    idx = int(np.flatnonzero(keep)[pos])
    return DeltaCertificate(
        delta_hat=float(ratios[pos]),
        witness_a=A[idx].copy(),
        witness_b=B[idx].copy(),
        samples=int(keep.sum()),
        skipped=skipped,
        seed=cfg.seed,
    )


# ---------------------------------------------------------------------------
# matrix constants

def _ratio_on_directions(mats, V):
    """Ratios v^T A v / |A v| for a stack of matrices on per-matrix directions.

    ``mats`` is (M, n, n), ``V`` is (M, K, n) with unit rows; directions
    with A v numerically zero are excluded by returning +inf there.
    """
    AV = np.einsum("mij,mkj->mki", mats, V)
    q = np.einsum("mki,mki->mk", AV, V)
    r = np.sqrt(np.einsum("mki,mki->mk", AV, AV))
    scale = np.max(np.abs(mats), axis=(1, 2))[:, None]
    bad = r <= 1e-14 * scale
    with np.errstate(divide="ignore", invalid="ignore"):
        h = np.where(bad, np.inf, q / np.where(bad, 1.0, r))
    return h


def _delta_sweep_2x2(mats: np.ndarray) -> np.ndarray:
    """Dense angular sweep plus three grid-zoom refinements (dim 2 only)."""
    M = mats.shape[0]
    out = np.empty(M)
    theta0 = np.pi * np.arange(_SWEEP_ANGLES) / _SWEEP_ANGLES  # v and -v agree
    chunk = max(1, (1 << 21) // _SWEEP_ANGLES)
    for s in range(0, M, chunk):
        sub = mats[s:s + chunk]
        angles = np.broadcast_to(theta0, (sub.shape[0], _SWEEP_ANGLES))
        V = np.stack([np.cos(angles), np.sin(angles)], axis=2)
        h = _ratio_on_directions(sub, V)
        best = np.min(h, axis=1)
        arg = theta0[np.argmin(h, axis=1)]
        width = np.pi / _SWEEP_ANGLES
        for _ in range(3):  # zoom: 65-point local grids, 32x finer each pass
            offs = np.linspace(-width, width, 65)
            angles = arg[:, None] + offs[None, :]
            V = np.stack([np.cos(angles), np.sin(angles)], axis=2)
            h = _ratio_on_directions(sub, V)
            best = np.minimum(best, np.min(h, axis=1))
            arg = angles[np.arange(sub.shape[0]), np.argmin(h, axis=1)]
            width /= 32.0
        out[s:s + chunk] = best
    return out


def _delta_pgd(mats: np.ndarray, restarts: int = _PGD_RESTARTS, iters: int = 100) -> np.ndarray:
    """Multi-start projected-gradient descent on the unit sphere (dim >= 3)."""
    M, n, _ = mats.shape
    rng = np.random.default_rng(_PGD_SEED)
    V0 = rng.standard_normal((restarts, n))
    V0 /= np.linalg.norm(V0, axis=1, keepdims=True)
    out = np.empty(M)
    chunk = max(1, _ROW_BUDGET // restarts)
    for s in range(0, M, chunk):
        A = mats[s:s + chunk]
        mc = A.shape[0]
        S = A + np.transpose(A, (0, 2, 1))
        V = np.broadcast_to(V0, (mc, restarts, n)).copy()
        step = np.full((mc, restarts), 0.25)
        h, AV, q, r = _pgd_state(A, V)
        for _ in range(iters):
            grad = np.einsum("mij,mkj->mki", S, V) / r[:, :, None]
            grad -= (q / r**3)[:, :, None] * np.einsum("mji,mkj->mki", A, AV)
            grad -= np.einsum("mki,mki->mk", grad, V)[:, :, None] * V
            Vt = V - step[:, :, None] * grad
            Vt /= np.linalg.norm(Vt, axis=2, keepdims=True)
            ht, AVt, qt, rt = _pgd_state(A, Vt)
            better = ht < h
            bexp = better[:, :, None]
            V = np.where(bexp, Vt, V)
            AV = np.where(bexp, AVt, AV)
            q = np.where(better, qt, q)
            r = np.where(better, rt, r)
            h = np.where(better, ht, h)
            step = np.where(better, np.minimum(step * 1.25, 1.0), step * 0.5)
            if float(step.max()) < 1e-10:
                break
        out[s:s + chunk] = h.min(axis=1)
    return out


def _pgd_state(A, V):
    AV = np.einsum("mij,mkj->mki", A, V)
    q = np.einsum("mki,mki->mk", AV, V)
    r = np.sqrt(np.einsum("mki,mki->mk", AV, AV))
    scale = np.max(np.abs(A), axis=(1, 2))[:, None]
    r = np.maximum(r, 1e-14 * scale)  # keeps the gradient finite near kernels
    h = q / r
    return h, AV, q, r


def matrix_delta(A) -> float:
    """min over unit v of v^T A v / |A v| (directions with Av = 0 excluded)."""
    return float(matrix_delta_many(as_square_matrix(A)[None, :, :])[0])


def matrix_delta_many(mats) -> np.ndarray:
    """Vectorised :func:`matrix_delta` over a stack of same-size matrices."""
    arr = np.asarray(mats, dtype=float)
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
        raise DimensionMismatchError(f"expected a stack of square matrices, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidParameterError("matrix entries must be finite")
    if np.any(np.max(np.abs(arr), axis=(1, 2)) == 0.0):
        raise ZeroMatrixError("matrix constant of the zero matrix is undefined")
    if arr.shape[1] == 1:
        return np.sign(arr[:, 0, 0])  # v^T A v / |A v| = sign(a) in dim 1
    if arr.shape[1] == 2:
        return _delta_sweep_2x2(arr)
    return _delta_pgd(arr)


def matrix_gamma(A) -> float:
    """min over unit v of v^T A v / ||A||, i.e. lambda_min(sym A) / ||A||.

    The quadratic-form minimum over the sphere is the smallest eigenvalue
    of the symmetric part, so this constant is computed exactly rather
    than by sampling.
    """
    A = as_square_matrix(A)
    if float(np.max(np.abs(A))) == 0.0:
        raise ZeroMatrixError("matrix constant of the zero matrix is undefined")
    lam = float(np.linalg.eigvalsh(0.5 * (A + A.T))[0])
    try:
        norm = operator_norm_of(A)
    except NoConvergenceError:
        norm = float(np.linalg.norm(A, 2))
    return lam / norm


def operator_norm_of(A) -> float:
    # local import: certify must not drag the extension machinery in
    from .differential import operator_norm

    return operator_norm(A)


def claim_constant(delta):
    """Lower bound factor c(delta): |A v| >= c(delta) ||A|| |v| whenever A
    has matrix constant delta.  Increasing on (0, 1]; c(1) = (2 - sqrt 3)^2.
    """
    arr = np.asarray(delta, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0) or np.any(arr > 1.0):
        raise InvalidParameterError("claim_constant is defined for delta in (0, 1]")
    s = 1.0 + 1.0 / arr
    lam = 1.0 / (s + np.sqrt(s * s - 1.0))  # stable form of s - sqrt(s^2 - 1)
    c = lam * lam
    return float(c) if np.ndim(delta) == 0 else c


@dataclass(frozen=True)
class ClaimDimStats:
    dim: int
    sampled: int
    qualified: int
    violations: int
    worst_gap: float  # min over qualified of (sigma_min - c * sigma_max) / sigma_max

    def json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "sampled": self.sampled,
            "qualified": self.qualified,
            "violations": self.violations,
            "worst_gap": self.worst_gap,
        }


@dataclass(frozen=True)
class ClaimReport:
    stats: tuple[ClaimDimStats, ...]
    count: int
    seed: int
    delta_floor: float

    @property
    def total_violations(self) -> int:
        return sum(s.violations for s in self.stats)

    def json_dict(self) -> dict:
        return {
            "count": self.count,
            "seed": self.seed,
            "delta_floor": self.delta_floor,
            "dims": [s.json_dict() for s in self.stats],
            "total_violations": self.total_violations,
        }


def _random_test_matrices(dim: int, count: int, rng) -> np.ndarray:
    # raw Gaussian matrices are rarely monotone; shift half of them by a
    # positive multiple of the identity so the qualified set is well fed
    mats = rng.standard_normal((count, dim, dim))
    bump = rng.uniform(0.5, 3.0, count)
    mats[::2] += bump[::2, None, None] * np.eye(dim)
    return mats


def claim_check(dims=(2, 3), count: int = 10000, seed: int = 7,
                delta_floor: float = 0.05) -> ClaimReport:
    """Brute-force the singular-value claim over random matrices.

    For every sampled matrix with matrix constant >= ``delta_floor`` the
    check asserts sigma_min >= c(delta) sigma_max (up to 1e-12 relative
    rounding slack) and reports the worst margin seen.
    """
    stats = []
    for dim in dims:
        rng = np.random.default_rng([seed, dim])
        mats = _random_test_matrices(dim, count, rng)
        deltas = matrix_delta_many(mats)
        qual = deltas >= delta_floor
        nqual = int(qual.sum())
        if nqual:
            sv = np.linalg.svd(mats[qual], compute_uv=False)
            smax, smin = sv[:, 0], sv[:, -1]
            c = claim_constant(np.minimum(deltas[qual], 1.0))
            gap = (smin - c * smax) / smax
            violations = int(np.sum(gap < -1e-12))
            worst = float(gap.min())
        else:
            violations, worst = 0, math.inf
        stats.append(ClaimDimStats(int(dim), count, nqual, violations, worst))
    return ClaimReport(tuple(stats), count, seed, delta_floor)


# ---------------------------------------------------------------------------
# quasisymmetry profile

@dataclass(frozen=True)
class TripleConfig:
    """Sampling plan for quasisymmetry triples (x, y, z)."""

    dim: int
    triples: int = 20000
    seed: int = 0
    box: float = 10.0
    s_range: tuple[float, float] = (1e-2, 1e2)
    buckets: int = 40


@dataclass(frozen=True, eq=False)
class EtaProfile:
    """Scatter of (s, q) ratio pairs with a bucketed upper envelope.

    ``envelope[k]`` is the running maximum of bucket maxima up to bucket
    k (the minimal nondecreasing majorant), nan until the first populated
    bucket.
    """

    s: np.ndarray
    q: np.ndarray
    bucket_edges: np.ndarray
    envelope: np.ndarray
    skipped: int

    def __post_init__(self):
        if np.any(self.s <= 0.0) or np.any(self.q <= 0.0):
            raise InvalidParameterError("profile ratios must be positive")
        env = self.envelope[np.isfinite(self.envelope)]
        if env.size and np.any(np.diff(env) < 0.0):
            raise InvalidParameterError("envelope must be nondecreasing")

    def csv_rows(self):
        return np.stack([self.s, self.q], axis=1)


def quasisymmetry_profile(spec: MapSpec, cfg: TripleConfig) -> EtaProfile:
    """Sample |f(x)-f(z)| / |f(y)-f(z)| against |x-z| / |y-z|.

    Triples whose denominators vanish are skipped; more than 1% of them
    degenerating raises :class:`DegenerateTripleError`.
    """
    if cfg.dim != spec.dim:
        raise DimensionMismatchError(f"config dim {cfg.dim} vs map dim {spec.dim}")
    rng = np.random.default_rng(cfg.seed)
    m = cfg.triples
    z = rng.uniform(-cfg.box, cfg.box, (m, cfg.dim))
    dx = rng.standard_normal((m, cfg.dim))
    dx /= np.linalg.norm(dx, axis=1, keepdims=True)
    dy = rng.standard_normal((m, cfg.dim))
    dy /= np.linalg.norm(dy, axis=1, keepdims=True)
    ry = 10.0 ** rng.uniform(-1.0, 1.0, m)
    s_target = 10.0 ** rng.uniform(math.log10(cfg.s_range[0]), math.log10(cfg.s_range[1]), m)
    rx = s_target * ry
    x = z + rx[:, None] * dx
    y = z + ry[:, None] * dy

    fx = evaluate_map(spec, x)
    fy = evaluate_map(spec, y)
    fz = evaluate_map(spec, z)
    ns = np.linalg.norm(x - z, axis=1)
    nd = np.linalg.norm(y - z, axis=1)
    qn = np.linalg.norm(fx - fz, axis=1)
    qd = np.linalg.norm(fy - fz, axis=1)
    keep = (nd > 1e-300) & (qd > 1e-300) & (ns > 1e-300) & (qn > 1e-300)
    skipped = int(m - keep.sum())
    if skipped > 0.01 * m:
        raise DegenerateTripleError(f"{skipped}/{m} sampled triples were degenerate")
    s = ns[keep] / nd[keep]
    q = qn[keep] / qd[keep]

    edges = np.geomspace(cfg.s_range[0], cfg.s_range[1], cfg.buckets + 1)
    idx = np.clip(np.digitize(s, edges) - 1, 0, cfg.buckets - 1)
    bucket_max = np.full(cfg.buckets, -np.inf)
    np.maximum.at(bucket_max, idx, q)
    envelope = np.maximum.accumulate(bucket_max)
    envelope = np.where(np.isfinite(envelope), envelope, np.nan)
    return EtaProfile(s, q, edges, envelope, skipped)


# ---------------------------------------------------------------------------
# distortion and the composition demo

def qc_distortion(A, n: int | None = None) -> float:
    """Outer distortion ||A||^n / det A; requires det A > 0."""
    A = as_square_matrix(A)
    if n is None:
        n = A.shape[0]
    det = float(np.linalg.det(A))
    if det <= 0.0:
        raise NonpositiveDeterminantError(f"distortion needs det > 0, got {det}")
    try:
        norm = operator_norm_of(A)
    except NoConvergenceError:
        norm = float(np.linalg.norm(A, 2))
    return norm**n / det


@dataclass(frozen=True, eq=False)
class CompositionReport:
    """Rotation composition demo: per-factor and composed constants."""

    theta1: float
    theta2: float
    delta1: float
    delta2: float
    delta_composed_matrix: float
    flagged: bool
    certificate: DeltaCertificate

    def json_dict(self) -> dict:
        return {
            "theta1": self.theta1,
            "theta2": self.theta2,
            "delta1": self.delta1,
            "delta2": self.delta2,
            "delta_composed_matrix": self.delta_composed_matrix,
            "flagged_non_monotone": self.flagged,
            "two_point": self.certificate.json_dict(),
        }


def composition_monotonicity_demo(theta1: float, theta2: float, pairs: int = 4000,
                                  seed: int = 0) -> CompositionReport:
    """Two monotone rotations whose composition may fail to be monotone.

    A planar rotation by |theta| < pi/2 has matrix constant cos(theta);
    composing two of them rotates by theta1 + theta2, so the composition
    is flagged as soon as |theta1 + theta2| >= pi/2.
    """
    for theta in (theta1, theta2):
        if not abs(theta) < math.pi / 2:
            raise InvalidParameterError("factors must be monotone rotations (|theta| < pi/2)")
    d1 = matrix_delta(rotation_matrix(theta1))
    d2 = matrix_delta(rotation_matrix(theta2))
    dc = matrix_delta(rotation_matrix(theta1 + theta2))
    composed = compose_maps(planar_rotation_map(theta1), planar_rotation_map(theta2))
    cert = two_point_delta(batch_map(composed), PairConfig(dim=2, pairs=pairs, seed=seed))
    flagged = abs(theta1 + theta2) >= math.pi / 2
    return CompositionReport(theta1, theta2, d1, d2, dc, flagged, cert)
