"""Doubling behaviour of pullback-style densities.

The density of interest is ||Df(x)|| (operator norm of the differential),
integrated over balls.  ``doubling_report`` tabulates mass(2B) / mass(B)
over a grid of centers and radii, ``gaussian_moment_ratio`` compares
moments of the measure against the mass of the unit ball, and
``box_ratio`` relates the average of ||Df|| on a ball to the diameter
of the image of that ball.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist

from .ballrules import BallRule, ball_integral, ball_rule, sphere_points
from .core import MapSpec, evaluate_map, evaluate_map_jacobian
from .differential import spectral_norms
from .errors import (
    DegenerateImageError,
    DimensionMismatchError,
    InvalidParameterError,
    ZeroMassError,
)
from .quadrature import QuadratureScheme, default_scheme, gaussian_expectation

__all__ = [
    "lebesgue_density",
    "jacobian_norm_density",
    "DoublingReport",
    "doubling_report",
    "MomentRatio",
    "gaussian_moment_ratio",
    "box_ratio",
]


def lebesgue_density(dim: int):
    """Constant density 1 on R^dim (so masses are plain volumes)."""

    def density(pts):
        pts = np.asarray(pts, dtype=float)
        return np.ones(pts.shape[:-1])

    density.dim = dim
    return density


def jacobian_norm_density(spec: MapSpec):
    """x -> ||Df(x)|| as a batch density."""

    def density(pts):
        return spectral_norms(evaluate_map_jacobian(spec, pts))

    density.dim = spec.dim
    return density


@dataclass(frozen=True, eq=False)
class DoublingReport:
    """Masses of B and 2B over a centers x radii grid.

    ``constant_hat`` is the largest observed ratio mass(2B)/mass(B); a
    nonpositive or non-finite ball mass aborts the report.
    """

    centers: np.ndarray   # (m, dim)
    radii: np.ndarray     # (k,)
    masses: np.ndarray    # (m, k)
    masses_doubled: np.ndarray
    ratios: np.ndarray

    def __post_init__(self):
        if not (np.all(np.isfinite(self.masses)) and np.all(self.masses > 0.0)):
            raise ZeroMassError("ball masses must be finite and positive")

    @property
    def constant_hat(self) -> float:
        return float(self.ratios.max())

    def columns(self):
        dim = self.centers.shape[1]
        head = ["cx", "cy"] if dim == 2 else [f"c{i + 1}" for i in range(dim)]
        return head + ["r", "mass", "mass2x", "ratio"]

    def rows(self):
        m, k = self.masses.shape
        out = []
        for i in range(m):
            for j in range(k):
                out.append(np.concatenate([
                    self.centers[i],
                    [self.radii[j], self.masses[i, j],
                     self.masses_doubled[i, j], self.ratios[i, j]],
                ]))
        return np.array(out)


def doubling_report(density, centers, radii, rule: BallRule | None = None) -> DoublingReport:
    """Tabulate mass(B(c, 2r)) / mass(B(c, r)) over all (c, r) pairs.

    Both balls reuse one set of scaled unit-ball nodes, so for the
    constant density the ratio is exactly 2^dim in floating point.
    """
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    if np.any(radii <= 0.0) or not np.all(np.isfinite(radii)):
        raise InvalidParameterError("radii must be positive and finite")
    dim = centers.shape[1]
    if rule is None:
        rule = ball_rule(dim)
    if rule.dim != dim:
        raise DimensionMismatchError(f"rule dim {rule.dim} vs centers dim {dim}")
    m, k = centers.shape[0], radii.shape[0]
    masses = np.empty((m, k))
    doubled = np.empty((m, k))
    for i in range(m):
        for j in range(k):
            masses[i, j] = ball_integral(rule, density, centers[i], radii[j])
            doubled[i, j] = ball_integral(rule, density, centers[i], 2.0 * radii[j])
    if not (np.all(np.isfinite(masses)) and np.all(masses > 0.0)):
        raise ZeroMassError("ball masses must be finite and positive")
    return DoublingReport(centers, radii, masses, doubled, doubled / masses)


@dataclass(frozen=True)
class MomentRatio:
    """integral of |y|^p (restricted to a half space if asked) against the
    density's Gaussian-weighted mass, divided by the density's unit-ball mass."""

    p: float
    integral: float
    ball_mass: float

    @property
    def ratio(self) -> float:
        return self.integral / self.ball_mass


def gaussian_moment_ratio(density, p: float, dim: int,
                          halfspace_normal=None,
                          scheme: QuadratureScheme | None = None,
                          rule: BallRule | None = None) -> MomentRatio:
    """E[|y|^p rho(y) (1_{<y, xi> >= 0} if xi given)] / mass_rho(B(0, 1)).

    The numerator is a Gaussian expectation; the denominator integrates
    the same density over the unit ball, so constants cancel for the
    Lebesgue density up to the normalising volume.
    """
    if p < 0.0:
        raise InvalidParameterError("moment exponent must be nonnegative")
    if scheme is None:
        scheme = default_scheme(dim)
    if scheme.dim != dim:
        raise DimensionMismatchError(f"scheme dim {scheme.dim} vs requested dim {dim}")
    if rule is None:
        rule = ball_rule(dim)
    y = scheme.nodes
    vals = np.linalg.norm(y, axis=1) ** p * np.asarray(density(y), dtype=float)
    if halfspace_normal is not None:
        xi = np.asarray(halfspace_normal, dtype=float)
        if xi.shape != (dim,):
            raise DimensionMismatchError(f"normal shape {xi.shape} vs dim {dim}")
        vals = np.where(y @ xi >= 0.0, vals, 0.0)
    integral = float(gaussian_expectation(scheme, vals))
    mass = float(ball_integral(rule, density, np.zeros(dim), 1.0))
    if not (np.isfinite(mass) and mass > 0.0):
        raise ZeroMassError("unit-ball mass must be finite and positive")
    return MomentRatio(p=float(p), integral=integral, ball_mass=mass)


def box_ratio(spec: MapSpec, center, radius: float,
              rule: BallRule | None = None, boundary_points: int = 2048,
              seed: int = 0) -> float:
    """Average of ||Df|| over B(c, r) divided by diam f(B(c, r)) / (2r).

    The diameter is estimated from boundary sphere points plus interior
    samples; a collapsed image raises :class:`DegenerateImageError`.
    """
    center = np.asarray(center, dtype=float)
    dim = spec.dim
    if center.shape != (dim,):
        raise DimensionMismatchError(f"center shape {center.shape} vs map dim {dim}")
    if not radius > 0.0:
        raise InvalidParameterError("radius must be positive")
    if rule is None:
        rule = ball_rule(dim)
    density = jacobian_norm_density(spec)
    mean_norm = ball_integral(rule, density, center, radius)
    volume = ball_integral(rule, lebesgue_density(dim), center, radius)
    mean_norm /= volume

    rng = np.random.default_rng(seed)
    shell = sphere_points(dim, boundary_points, seed=seed)
    interior = rng.uniform(-1.0, 1.0, (max(1024, boundary_points), dim))
    interior = interior[np.linalg.norm(interior, axis=1) <= 1.0]
    pts = center + radius * np.concatenate([shell, interior])
    img = evaluate_map(spec, pts)
    diam = float(pdist(img).max())
    if diam <= 0.0:
        raise DegenerateImageError("image of the ball has zero diameter")
    return float(mean_norm / (diam / (2.0 * radius)))
