"""Upper-half-space hyperbolic geometry diagnostics.

d(p, q) = arccosh(1 + |p - q|^2 / (2 t_p t_q)) for points with positive
height.  ``vertical_comparison`` measures how far the lifted map is from
a hyperbolic isometry pointwise: the ratio ||DF(x, t)|| t / F_vert(x, t)
equals 1 exactly for the identity and for diagonal linear maps, and its
spread over a grid is the certified comparison constant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .differential import extension_jacobian, operator_norm
from .errors import (
    DimensionMismatchError,
    InvalidParameterError,
    NoConvergenceError,
    NonpositiveHeightError,
    VanishingVerticalError,
)
from .extension import ExtensionField, extend_points

__all__ = [
    "hyperbolic_distance",
    "hyperbolic_distances",
    "HyperbolicReport",
    "vertical_comparison",
    "sample_height_pairs",
    "BilipschitzReport",
    "bilipschitz_sample",
]


def hyperbolic_distance(p, q) -> float:
    """Distance in the upper half space between embedded points p, q."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape or p.ndim != 1:
        raise DimensionMismatchError(f"point shapes {p.shape} vs {q.shape}")
    return float(hyperbolic_distances(p[None, :], q[None, :])[0])


def hyperbolic_distances(P, Q) -> np.ndarray:
    """Batch distance on (m, n+1) arrays whose last column is the height."""
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    if P.shape != Q.shape or P.ndim != 2:
        raise DimensionMismatchError(f"batch shapes {P.shape} vs {Q.shape}")
    tp, tq = P[:, -1], Q[:, -1]
    if np.any(tp <= 0.0) or np.any(tq <= 0.0):
        raise NonpositiveHeightError("hyperbolic distance needs positive heights")
    d2 = np.sum((P - Q) ** 2, axis=1)
    # max(1, .) guards arccosh against rounding for nearly equal points
    arg = np.maximum(1.0, 1.0 + d2 / (2.0 * tp * tq))
    return np.arccosh(arg)


@dataclass(frozen=True, eq=False)
class HyperbolicReport:
    """Pointwise vertical-comparison ratios over a grid.

    ``spread`` = max ratio / min ratio; it equals 1 exactly when the lift
    scales the vertical direction the same way everywhere.
    """

    points: np.ndarray    # (m, n) bases
    heights: np.ndarray   # (m,)
    norms: np.ndarray     # ||DF|| per point
    verticals: np.ndarray  # F_vert per point
    descriptor: str

    def __post_init__(self):
        if np.any(self.verticals <= 0.0):
            raise VanishingVerticalError("vertical component must be positive off the boundary")

    @property
    def ratios(self) -> np.ndarray:
        return self.norms * self.heights / self.verticals

    @property
    def spread(self) -> float:
        r = self.ratios
        return float(r.max() / r.min())

    def columns(self):
        dim = self.points.shape[1]
        return [f"x{i + 1}" for i in range(dim)] + ["t", "norm_df", "fvert", "ratio"]

    def rows(self):
        return np.column_stack([self.points, self.heights, self.norms,
                                self.verticals, self.ratios])


def vertical_comparison(field: ExtensionField, X, T) -> HyperbolicReport:
    """Evaluate ||DF(x, t)|| t / F_vert(x, t) over the given points."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    T = np.atleast_1d(np.asarray(T, dtype=float))
    if X.shape[0] != T.shape[0]:
        raise DimensionMismatchError(f"{X.shape[0]} bases vs {T.shape[0]} heights")
    if np.any(T <= 0.0):
        raise NonpositiveHeightError("comparison ratios need strictly positive heights")
    out = extend_points(field, X, T)
    verticals = out[:, -1]
    if np.any(verticals <= 1e-12):
        raise VanishingVerticalError("lift has (numerically) vanishing vertical part")
    norms = np.empty(T.shape[0])
    for i in range(T.shape[0]):
        DF = extension_jacobian(field, (X[i], float(T[i])))
        try:
            norms[i] = operator_norm(DF)
        except NoConvergenceError:
            norms[i] = float(np.linalg.norm(DF, 2))
    return HyperbolicReport(points=X, heights=T, norms=norms, verticals=verticals,
                            descriptor=field.descriptor())


def sample_height_pairs(dim: int, count: int, seed: int = 0,
                        height_range: tuple[float, float] = (0.1, 10.0),
                        box: float = 5.0) -> tuple[np.ndarray, np.ndarray]:
    """Random embedded point pairs with log-uniform positive heights."""
    if height_range[0] <= 0.0 or height_range[1] <= height_range[0]:
        raise InvalidParameterError(f"bad height range {height_range}")
    rng = np.random.default_rng(seed)
    lo, hi = np.log10(height_range[0]), np.log10(height_range[1])

    def draw():
        base = rng.uniform(-box, box, (count, dim))
        t = 10.0 ** rng.uniform(lo, hi, count)
        return np.column_stack([base, t])

    return draw(), draw()


@dataclass(frozen=True, eq=False)
class BilipschitzReport:
    """Hyperbolic distance distortion of a lift over sampled pairs."""

    d_source: np.ndarray
    d_image: np.ndarray
    skipped: int

    @property
    def ratios(self) -> np.ndarray:
        return self.d_image / self.d_source

    @property
    def lower(self) -> float:
        return float(self.ratios.min())

    @property
    def upper(self) -> float:
        return float(self.ratios.max())

    def json_dict(self) -> dict:
        return {
            "pairs": int(self.d_source.shape[0]),
            "skipped": self.skipped,
            "lower": self.lower,
            "upper": self.upper,
        }


def bilipschitz_sample(field: ExtensionField, P, Q) -> BilipschitzReport:
    """Compare d(F(p), F(q)) with d(p, q) over embedded point pairs.

    Pairs at zero source distance are skipped and counted; image heights
    must stay positive, otherwise :class:`VanishingVerticalError`.
    """
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    FP = extend_points(field, P[:, :-1], P[:, -1])
    FQ = extend_points(field, Q[:, :-1], Q[:, -1])
    if np.any(FP[:, -1] <= 0.0) or np.any(FQ[:, -1] <= 0.0):
        raise VanishingVerticalError("lift left the upper half space")
    ds = hyperbolic_distances(P, Q)
    di = hyperbolic_distances(FP, FQ)
    keep = ds > 0.0
    skipped = int(P.shape[0] - keep.sum())
    return BilipschitzReport(d_source=ds[keep], d_image=di[keep], skipped=skipped)
