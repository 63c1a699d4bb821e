"""Differential of the lifted map.

The Jacobian of the Gaussian lift is the Gaussian average of a block
integrand built from the base Jacobian A = Df(x + t y):

    B(A, y) = [[ A,      A y   ],
               [ y^T A,  y^T A y ]]        ((n+1) x (n+1)),

so DF(x, t) = E[ B(Df(x + t y), y) ].  This module assembles that average
with the same paired-node accumulation the lift itself uses, provides a
central-difference Jacobian as the independent cross-check, a power-
iteration operator norm, and the unit-ball norm average that controls the
size of DF.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ballrules import BallRule, ball_rule
from .core import HalfSpacePoint, as_square_matrix, evaluate_map_jacobian
from .errors import (
    DimensionMismatchError,
    InvalidParameterError,
    NoConvergenceError,
    NonFiniteIntegrandError,
    NonpositiveHeightError,
)
from .extension import ExtensionField
from .quadrature import gaussian_expectation

__all__ = [
    "block_matrix",
    "extension_jacobian",
    "finite_difference_jacobian",
    "operator_norm",
    "spectral_norms",
    "AlphaAverage",
    "unit_ball_norm_average",
]


def block_matrix(A, y) -> np.ndarray:
    """Assemble B(A, y); exactly symmetric whenever A is."""
    A = as_square_matrix(A)
    y = np.asarray(y, dtype=float)
    n = A.shape[0]
    if y.shape != (n,):
        raise DimensionMismatchError(f"vector of shape {y.shape} against a {n}x{n} matrix")
    B = np.empty((n + 1, n + 1))
    B[:n, :n] = A
    B[:n, n] = A @ y
    # materialised transpose runs through the same gemv kernel as A @ y,
    # so a symmetric A yields a bitwise symmetric block
    B[n, :n] = np.ascontiguousarray(A.T) @ y
    B[n, n] = float(y @ (A @ y))
    return B


def _split_point(p):
    if isinstance(p, HalfSpacePoint):
        return p.base.coords, p.height
    x, t = p
    return np.asarray(x, dtype=float), float(t)


def extension_jacobian(field: ExtensionField, p) -> np.ndarray:
    """DF(x, t) for t > 0, via the quadrature average of the block integrand."""
    x, t = _split_point(p)
    if t <= 0.0:
        raise NonpositiveHeightError(f"lifted Jacobian needs height > 0, got {t}")
    n = field.dim
    nodes = field.scheme.nodes
    A = evaluate_map_jacobian(field.spec, x[None, :] + t * nodes)
    if not np.all(np.isfinite(A)):
        raise NonFiniteIntegrandError("base Jacobian overflowed at a quadrature node")
    Ay = np.einsum("kij,kj->ki", A, nodes)
    yA = np.einsum("ki,kij->kj", nodes, A)
    yAy = np.einsum("ki,ki->k", nodes, Ay)
    DF = np.empty((n + 1, n + 1))
    DF[:n, :n] = gaussian_expectation(field.scheme, A)
    DF[:n, n] = gaussian_expectation(field.scheme, Ay)
    DF[n, :n] = gaussian_expectation(field.scheme, yA)
    DF[n, n] = gaussian_expectation(field.scheme, yAy)
    return DF


def finite_difference_jacobian(F, p, h: float | None = None) -> np.ndarray:
    """Central-difference Jacobian of an arbitrary vector map.

    ``F`` takes a single d-vector and returns a k-vector.  The default
    step is 1e-5 * max(1, |p|).
    """
    p = np.asarray(p, dtype=float)
    if p.ndim != 1:
        raise DimensionMismatchError(f"expected a single point, got shape {p.shape}")
    if h is None:
        h = 1e-5 * max(1.0, float(np.linalg.norm(p)))
    cols = []
    for j in range(p.size):
        e = np.zeros_like(p)
        e[j] = h
        cols.append((np.asarray(F(p + e), float) - np.asarray(F(p - e), float)) / (2.0 * h))
    J = np.stack(cols, axis=1)
    if not np.all(np.isfinite(J)):
        raise NonFiniteIntegrandError("finite differencing hit a non-finite evaluation")
    return J


def operator_norm(M, rel_tol: float = 1e-10, max_iter: int = 1000) -> float:
    """Largest singular value by power iteration on M^T M.

    Deterministic start vector; raises :class:`NoConvergenceError` if the
    Rayleigh quotient fails to stabilise within ``max_iter`` sweeps
    (callers may fall back to a full decomposition).
    """
    M = as_square_matrix(M)
    scale = float(np.max(np.abs(M)))
    if scale == 0.0:
        return 0.0
    A = M / scale                      # guard overflow in M^T M
    G = A.T @ A
    n = M.shape[0]
    rng = np.random.default_rng(271828)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    r_prev = float(v @ (G @ v))
    for _ in range(max_iter):
        w = G @ v
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            # v landed in the null space; restart from a fresh direction
            v = rng.standard_normal(n)
            v /= np.linalg.norm(v)
            r_prev = float(v @ (G @ v))
            continue
        v = w / nw
        r = float(v @ (G @ v))
        if abs(r - r_prev) <= rel_tol * max(r, 1e-300):
            return scale * math.sqrt(r)
        r_prev = r
    raise NoConvergenceError(f"power iteration did not stabilise in {max_iter} sweeps")


def spectral_norms(mats: np.ndarray) -> np.ndarray:
    """Largest singular value of a stack of matrices (full decomposition)."""
    return np.linalg.svd(np.asarray(mats, dtype=float), compute_uv=False)[..., 0]


@dataclass(frozen=True, eq=False)
class AlphaAverage:
    """Unit-ball integral of ||Df(x + t y)|| dy around one half-space point."""

    value: float
    center: HalfSpacePoint
    rule: str

    def __post_init__(self):
        if not (math.isfinite(self.value) and self.value >= 0.0):
            raise InvalidParameterError(f"norm average must be finite and >= 0, got {self.value}")


def unit_ball_norm_average(field: ExtensionField, p, rule: BallRule | None = None) -> AlphaAverage:
    """The local size functional alpha = integral over the unit y-ball of
    ||Df(x + t y)||; DF(x, t) is comparable to it above and below."""
    x, t = _split_point(p)
    if t <= 0.0:
        raise NonpositiveHeightError(f"norm average needs height > 0, got {t}")
    if rule is None:
        rule = ball_rule(field.dim)
    if rule.dim != field.dim:
        raise DimensionMismatchError(f"ball rule of dim {rule.dim} for a field of dim {field.dim}")
    jac = evaluate_map_jacobian(field.spec, x[None, :] + t * rule.nodes)
    norms = spectral_norms(jac)
    value = float(np.einsum("k,k->", rule.weights, norms))
    center = p if isinstance(p, HalfSpacePoint) else HalfSpacePoint(x, t)
    return AlphaAverage(value=value, center=center, rule=rule.descriptor())
