"""Shared fixtures: the map gallery, oracle helpers, acceptance summary."""

import math

import numpy as np
import pytest

from monolift import (
    compose_maps,
    convex_gradient_quartic_map,
    evaluate_map,
    identity_map,
    linear_map,
    planar_rotation_map,
    power_radial_map,
    translation_map,
)


def gallery_2d():
    """One representative per kind plus parameter variety (dim 2)."""
    return [
        identity_map(2),
        linear_map([[2.0, 0.0], [0.0, 3.0]]),
        linear_map([[1.0, -0.4], [0.6, 1.2]]),
        power_radial_map(2, 1.0),
        power_radial_map(2, 0.5),
        power_radial_map(2, -0.5),
        planar_rotation_map(math.pi / 4),
        planar_rotation_map(-math.pi / 8),
        convex_gradient_quartic_map(2, 1.0, 0.5),
        translation_map([0.7, -1.2]),
        compose_maps(planar_rotation_map(math.pi / 8), power_radial_map(2, 1.0)),
    ]


def gallery_3d():
    return [
        identity_map(3),
        linear_map([[2.0, 0.0, 0.0], [0.0, 3.0, 0.0], [0.0, 0.0, 1.5]]),
        power_radial_map(3, 1.0),
        convex_gradient_quartic_map(3, 1.0, 0.25),
        translation_map([1.0, 0.0, -1.0]),
    ]


def monotone_gallery_2d():
    """Gallery members whose two-point ratio is bounded well away from 0.

    Empirical minima over 2*10^4 log-scaled pairs (seed 11): nonsymmetric
    linear 0.856, rotation-after-stretch composition 0.743, |x|^{-1/2}x
    0.943, quartic gradient 0.868; the rest are classical.
    """
    return [
        identity_map(2),
        linear_map([[2.0, 0.0], [0.0, 3.0]]),
        linear_map([[1.0, -0.4], [0.6, 1.2]]),
        power_radial_map(2, 1.0),
        power_radial_map(2, 0.5),
        planar_rotation_map(math.pi / 4),
        convex_gradient_quartic_map(2, 1.0, 0.5),
        translation_map([0.7, -1.2]),
        compose_maps(planar_rotation_map(math.pi / 8), power_radial_map(2, 1.0)),
    ]


def spec_id(spec):
    return spec.label()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def batch_fd_jacobian(spec, X, h=None):
    """Central-difference Jacobian of a base map, vectorised over points.

    Independent of the package's analytic Jacobians and of its own
    finite-difference helper; used as the oracle for both.
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[1]
    if h is None:
        h = 1e-5 * np.maximum(1.0, np.linalg.norm(X, axis=1))
    out = np.empty((X.shape[0], n, n))
    for j in range(n):
        step = np.zeros_like(X)
        step[:, j] = h
        out[:, :, j] = (evaluate_map(spec, X + step) - evaluate_map(spec, X - step)) / (2.0 * h[:, None])
    return out


def riemann_gaussian_moment_1d(degree, half_width=12.0, points=800001):
    """Fine trapezoid integral of y^degree phi(y) on the line (oracle)."""
    y = np.linspace(-half_width, half_width, points)
    phi = np.exp(-0.5 * y * y) / math.sqrt(2.0 * math.pi)
    return float(np.trapezoid(y**degree * phi, y))


# --- acceptance criterion summary -----------------------------------------

_ACCEPTANCE = []


@pytest.hookimpl(wrapper=True)
def pytest_runtest_makereport(item, call):
    report = yield
    if report.when == "call" and "test_acceptance" in item.nodeid:
        _ACCEPTANCE.append((item.name, report.passed))
    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_line("")
    for name, passed in sorted(_ACCEPTANCE):
        label = name.removeprefix("test_criterion_").replace("_", " ")
        terminalreporter.write_line(f"ACCEPTANCE {label}: {'PASS' if passed else 'FAIL'}")
