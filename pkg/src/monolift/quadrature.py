"""Integration against the standard Gaussian density on R^n.

Node sets are built once per scheme, are exactly symmetric under
``y -> -y`` (the second half of the node array is the bitwise negation of
the first half, reversed), and carry probability weights.  Expectations
are accumulated over (+y, -y) pairs, so odd integrands cancel exactly in
floating point, not just up to rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc

from .errors import (
    DimensionMismatchError,
    DimensionOverflowError,
    InvalidParameterError,
    NonFiniteIntegrandError,
    ResolutionError,
)

__all__ = [
    "TENSOR_HERMITE",
    "QUASI_RANDOM",
    "QuadratureScheme",
    "build_scheme",
    "default_scheme",
    "scheme_from_config",
    "gaussian_expectation",
    "integrate_gaussian",
]

TENSOR_HERMITE = "tensor_hermite"
QUASI_RANDOM = "quasi_random"

_MAX_TENSOR_NODES = 10**8


@dataclass(frozen=True, eq=False)
class QuadratureScheme:
    """Immutable node/weight set for the standard normal on R^dim.

    ``coarse`` holds a half-resolution sibling used for the spread
    diagnostic; it is one level deep (the coarse scheme has no coarse).
    """

    dim: int
    method: str
    resolution: int
    seed: int
    nodes: np.ndarray
    weights: np.ndarray
    coarse: "QuadratureScheme | None" = None

    def __post_init__(self):
        for name in ("nodes", "weights"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def size(self) -> int:
        return int(self.nodes.shape[0])

    def descriptor(self) -> str:
        return f"{self.method}:r{self.resolution}:seed{self.seed}:dim{self.dim}"

    def config_dict(self) -> dict:
        """The scheme is fully regenerable from these four values."""
        return {
            "dim": self.dim,
            "method": self.method,
            "resolution": self.resolution,
            "seed": self.seed,
        }


def _hermite_1d(order: int):
    # probabilists' Gauss-Hermite, then exact symmetrisation: antisymmetrise
    # the nodes and symmetrise the weights so reversal is a bitwise negation
    x, w = np.polynomial.hermite_e.hermegauss(order)
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    return x, w / w.sum()


def _tensor_arrays(dim: int, order: int):
    if order**dim > _MAX_TENSOR_NODES:
        raise DimensionOverflowError(
            f"tensor rule with {order}^{dim} nodes exceeds the {_MAX_TENSOR_NODES:.0e} node budget"
        )
    x, w = _hermite_1d(order)
    grids = np.meshgrid(*([x] * dim), indexing="ij")
    nodes = np.stack([g.reshape(-1) for g in grids], axis=1)
    weights = np.ones(order**dim)
    for wg in np.meshgrid(*([w] * dim), indexing="ij"):
        weights = weights * wg.reshape(-1)
    return nodes, weights / weights.sum()


def _quasi_arrays(dim: int, count: int, seed: int):
    half = count // 2
    engine = qmc.Sobol(d=dim, scramble=True, seed=seed)
    u = engine.random(half)
    u = np.clip(u, 1e-16, 1.0 - 1e-16)
    z = ndtri(u)
    nodes = np.concatenate([z, -z[::-1]], axis=0)
    weights = np.full(count, 1.0 / count)
    return nodes, weights


def build_scheme(dim: int, method: str, resolution: int, seed: int = 0) -> QuadratureScheme:
    """Build a deterministic Gaussian quadrature scheme.

    ``tensor_hermite`` uses a per-axis Gauss-Hermite rule of order
    ``resolution`` (>= 2); ``quasi_random`` uses ``resolution`` (>= 16,
    rounded up to even) scrambled-Sobol points pushed through the normal
    inverse CDF and symmetrised.
    """
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise InvalidParameterError(f"dim must be a positive integer, got {dim!r}")
    return _build(dim, method, int(resolution), int(seed), with_coarse=True)


def _build(dim, method, resolution, seed, with_coarse):
    if method == TENSOR_HERMITE:
        if resolution < 2:
            raise ResolutionError(f"tensor_hermite needs resolution >= 2, got {resolution}")
        nodes, weights = _tensor_arrays(dim, resolution)
        coarse_res = max(2, resolution // 2)
    elif method == QUASI_RANDOM:
        if resolution < 16:
            raise ResolutionError(f"quasi_random needs resolution >= 16, got {resolution}")
        resolution += resolution & 1  # node pairing requires an even count
        nodes, weights = _quasi_arrays(dim, resolution, seed)
        coarse_res = max(16, resolution // 2)
    else:
        raise InvalidParameterError(f"unknown quadrature method {method!r}")
    assert np.array_equal(nodes[::-1], -nodes), "node set lost reversal symmetry"
    coarse = _build(dim, method, coarse_res, seed, with_coarse=False) if with_coarse else None
    return QuadratureScheme(dim, method, resolution, seed, nodes, weights, coarse)


def default_scheme(dim: int, seed: int = 0) -> QuadratureScheme:
    """Tensor rule of order 20 up to dim 3, quasi-random 2^16 beyond."""
    if dim <= 3:
        return build_scheme(dim, TENSOR_HERMITE, 20, seed)
    return build_scheme(dim, QUASI_RANDOM, 2**16, seed)


def scheme_from_config(config: dict) -> QuadratureScheme:
    return build_scheme(config["dim"], config["method"], config["resolution"], config.get("seed", 0))


def gaussian_expectation(scheme: QuadratureScheme, values, axis: int = 0):
    """Weighted node sum, accumulated over (+y, -y) pairs.

    ``values`` holds per-node evaluations along ``axis``.  Because node
    ``i`` pairs with node ``N-1-i`` (its exact negation) and the pair sum
    is formed before weighting, any integrand with ``g(-y) == -g(y)``
    bitwise sums to exactly zero.
    """
    v = np.moveaxis(np.asarray(values, dtype=float), axis, 0)
    n = scheme.size
    if v.shape[0] != n:
        raise DimensionMismatchError(f"got {v.shape[0]} node values for a scheme of size {n}")
    half = n // 2
    paired = v[:half] + v[::-1][:half]
    out = np.einsum("n...,n->...", paired, scheme.weights[:half])
    if n % 2:
        out = out + scheme.weights[half] * v[half]
    return out


def integrate_gaussian(scheme: QuadratureScheme, g):
    """Integrate ``g`` against the standard Gaussian density.

    ``g`` must accept an ``(N, dim)`` array and return ``(N,)`` or
    ``(N, k)`` values.  Returns ``(value, spread)`` where ``spread`` is
    the max-abs difference between the full-resolution and half-resolution
    estimates (``nan`` if the scheme carries no coarse sibling).
    """
    value = _integrate(scheme, g)
    if scheme.coarse is None:
        spread = math.nan
    else:
        coarse_value = _integrate(scheme.coarse, g)
        spread = float(np.max(np.abs(np.asarray(value) - np.asarray(coarse_value))))
    if np.ndim(value) == 0:
        return float(value), spread
    return value, spread


def _integrate(scheme, g):
    vals = np.asarray(g(scheme.nodes), dtype=float)
    if vals.shape[:1] != (scheme.size,):
        raise InvalidParameterError(
            f"integrand returned shape {vals.shape}, expected leading axis of {scheme.size}"
        )
    if not np.all(np.isfinite(vals)):
        raise NonFiniteIntegrandError("integrand produced non-finite values")
    return gaussian_expectation(scheme, vals, axis=0)
