"""Monotonicity constants, the singular-value claim, profiles, demos."""

import math

import numpy as np
import pytest

from monolift import (
    DeltaCertificate,
    PairConfig,
    TripleConfig,
    batch_map,
    claim_check,
    claim_constant,
    composition_monotonicity_demo,
    full_space_map,
    gaussian_extension,
    identity_map,
    linear_map,
    matrix_delta,
    matrix_delta_many,
    matrix_gamma,
    planar_rotation_map,
    power_radial_map,
    qc_distortion,
    quasisymmetry_profile,
    rotation_matrix,
    sample_pairs,
    trivial_extension_witness,
    trivial_lift_map,
    two_point_delta,
)
from monolift.errors import (
    DegenerateMapError,
    DegenerateTripleError,
    DimensionMismatchError,
    InvalidParameterError,
    NonpositiveDeterminantError,
    ZeroMatrixError,
)

C1 = (2.0 - math.sqrt(3.0)) ** 2
# frozen two-point ratio of the naive lift along the adversarial pair at
# R = 400, computed once from the closed form (see trivial_extension_witness)
WITNESS_RATIO_400 = 0.09975062343994139


def pair_ratio(G, a, b):
    """Two-point ratio of a full-space map on one explicit pair."""
    fa, fb = G(np.asarray(a, float)), G(np.asarray(b, float))
    d, df = np.asarray(a, float) - b, fa - fb
    return float(np.dot(df, d) / (np.linalg.norm(df) * np.linalg.norm(d)))


# ---------------------------------------------------------------------------
# matrix constants

@pytest.mark.parametrize("theta", [0.0, math.pi / 8, math.pi / 4, 3 * math.pi / 8])
def test_matrix_delta_rotations(theta):
    assert matrix_delta(rotation_matrix(theta)) == pytest.approx(math.cos(theta), abs=1e-9)


def test_matrix_delta_special_cases():
    assert matrix_delta(np.eye(2)) == pytest.approx(1.0, abs=1e-12)
    # reflection: v along the flipped axis gives v^T A v / |Av| = -1
    assert matrix_delta(np.diag([1.0, -1.0])) == pytest.approx(-1.0, abs=1e-9)
    assert matrix_delta(np.array([[5.0]])) == 1.0
    assert matrix_delta(np.array([[-2.0]])) == -1.0


def test_matrix_delta_dim3_embedded_rotation():
    # block rotation in a 3x3 frame exercises the projected-gradient path
    theta = math.pi / 5
    A = np.eye(3)
    A[:2, :2] = rotation_matrix(theta)
    assert matrix_delta(A) == pytest.approx(math.cos(theta), abs=1e-9)


def test_matrix_delta_dim3_diagonal():
    assert matrix_delta(np.diag([1.0, 2.0, 3.0])) == pytest.approx(
        matrix_delta_many(np.diag([1.0, 2.0, 3.0])[None])[0], abs=0.0)
    assert matrix_delta(np.eye(3)) == pytest.approx(1.0, abs=1e-9)


def test_matrix_delta_many_consistency(rng):
    mats = rng.standard_normal((40, 2, 2)) + 1.5 * np.eye(2)
    many = matrix_delta_many(mats)
    singles = np.array([matrix_delta(m) for m in mats])
    assert np.allclose(many, singles, atol=1e-12)


def test_matrix_delta_errors():
    with pytest.raises(ZeroMatrixError):
        matrix_delta(np.zeros((2, 2)))
    with pytest.raises(InvalidParameterError):
        matrix_delta(np.array([[1.0, np.nan], [0.0, 1.0]]))
    with pytest.raises(DimensionMismatchError):
        matrix_delta_many(np.zeros((3, 2)))
    with pytest.raises(DimensionMismatchError):
        matrix_delta(np.zeros((2, 3)))


def test_matrix_gamma_closed_forms():
    assert matrix_gamma(np.diag([1.0, 3.0])) == pytest.approx(1.0 / 3.0, abs=1e-10)
    assert matrix_gamma(np.eye(4)) == pytest.approx(1.0, abs=1e-10)
    theta = 0.3
    assert matrix_gamma(rotation_matrix(theta)) == pytest.approx(math.cos(theta), abs=1e-10)
    with pytest.raises(ZeroMatrixError):
        matrix_gamma(np.zeros((2, 2)))


def test_delta_gamma_claim_chain(rng):
    # for delta > 0: gamma <= delta and gamma >= delta * c(delta)
    mats = rng.standard_normal((300, 2, 2)) + rng.uniform(0.5, 2.5, 300)[:, None, None] * np.eye(2)
    deltas = matrix_delta_many(mats)
    for A, d in zip(mats, deltas):
        if d <= 0.0:
            continue
        g = matrix_gamma(A)
        assert d >= g - 1e-9
        assert g >= d * claim_constant(min(d, 1.0)) - 1e-9


# ---------------------------------------------------------------------------
# the claim constant and the brute-force check

def test_claim_constant_values():
    assert claim_constant(1.0) == pytest.approx(C1, abs=1e-10)
    grid = np.geomspace(1e-8, 1.0, 50)
    vals = claim_constant(grid)
    assert vals.shape == (50,)
    assert np.all(np.diff(vals) > 0.0)
    assert vals[0] > 0.0
    assert isinstance(claim_constant(0.5), float)


@pytest.mark.parametrize("bad", [0.0, -0.5, 1.0000001, math.nan, math.inf])
def test_claim_constant_domain(bad):
    with pytest.raises(InvalidParameterError):
        claim_constant(bad)


def test_claim_check_small_run():
    report = claim_check(dims=(2, 3), count=400, seed=3)
    assert report.total_violations == 0
    d = report.json_dict()
    assert set(d) == {"count", "seed", "delta_floor", "dims", "total_violations"}
    for stats in report.stats:
        assert stats.qualified > 0
        assert stats.worst_gap > 0.0  # strict margin, not just non-violation
        assert stats.sampled == 400


# ---------------------------------------------------------------------------
# two-point certificates

def test_two_point_identity():
    cert = two_point_delta(batch_map(identity_map(2)), PairConfig(dim=2, pairs=2000, seed=1))
    assert cert.delta_hat == pytest.approx(1.0, abs=1e-12)
    assert cert.samples == 2000 and cert.skipped == 0


def test_two_point_rotation_matches_matrix_constant():
    theta = math.pi / 4
    cert = two_point_delta(batch_map(planar_rotation_map(theta)),
                           PairConfig(dim=2, pairs=5000, seed=2))
    assert cert.delta_hat == pytest.approx(math.cos(theta), abs=1e-9)


def test_two_point_witness_recompute():
    spec = power_radial_map(2, 1.0)
    cert = two_point_delta(batch_map(spec), PairConfig(dim=2, pairs=3000, seed=4))
    recomputed = pair_ratio(lambda p: np.asarray(batch_map(spec)(p[None, :]))[0],
                            cert.witness_a, cert.witness_b)
    assert recomputed == pytest.approx(cert.delta_hat, abs=1e-12)


def test_two_point_skips_collapsed_pairs():
    cfg = PairConfig(dim=2, pairs=4000, seed=5, log_radius_range=(-3.0, 0.0), box=2.0)
    cert = two_point_delta(lambda X: np.round(X), cfg)
    assert cert.skipped > 0
    assert cert.samples + cert.skipped == 4000
    with pytest.raises(DegenerateMapError):
        two_point_delta(lambda X: np.zeros_like(X), PairConfig(dim=2, pairs=50, seed=0))


def test_delta_certificate_validation():
    with pytest.raises(InvalidParameterError):
        DeltaCertificate(1.5, np.zeros(2), np.ones(2), 1, 0, 0)


def test_sample_pairs_structure():
    cfg = PairConfig(dim=3, pairs=100, seed=6, crossing_pairs=40, witness_radii=(25.0, 400.0))
    A, B = sample_pairs(cfg)
    assert A.shape == B.shape == (100 + 40 + 8, 3)
    assert np.all(A[100:140, -1] > 0.0)
    assert np.all(B[100:140, -1] < 0.0)
    # witness block: base points at distance ~R from the origin
    assert np.allclose(np.abs(A[140:, 0]), [25.0] * 4 + [400.0] * 4)


def test_trivial_witness_frozen_ratio():
    a, b = trivial_extension_witness(400.0)
    G = trivial_lift_map(power_radial_map(2, 1.0))
    assert pair_ratio(lambda p: G(p), a, b) == pytest.approx(WITNESS_RATIO_400, abs=1e-12)
    assert pair_ratio(lambda p: G(p), b, a) == pytest.approx(WITNESS_RATIO_400, abs=1e-12)
    with pytest.raises(DimensionMismatchError):
        trivial_extension_witness(100.0, dim=2)


def test_trivial_lift_refuted_by_witness_family():
    G = trivial_lift_map(power_radial_map(2, 1.0))
    cfg = PairConfig(dim=3, pairs=200, seed=7, witness_radii=(400.0,))
    cert = two_point_delta(G, cfg)
    assert cert.delta_hat <= 0.1


def test_gaussian_lift_of_rotation_stays_positive():
    # same adversarial family that breaks the naive lift, plus crossing
    # pairs; the Gaussian lift keeps every sampled ratio positive
    G = full_space_map(gaussian_extension(planar_rotation_map(math.pi / 4)))
    cfg = PairConfig(dim=3, pairs=400, seed=8, crossing_pairs=100, witness_radii=(25.0, 400.0))
    cert = two_point_delta(G, cfg)
    assert cert.delta_hat > 0.0


# ---------------------------------------------------------------------------
# quasisymmetry profile

def test_profile_identity_is_diagonal():
    prof = quasisymmetry_profile(identity_map(2), TripleConfig(dim=2, triples=2000, seed=1))
    assert np.array_equal(prof.q, prof.s)
    env = prof.envelope[np.isfinite(prof.envelope)]
    assert env.size > 0 and np.all(np.diff(env) >= 0.0)


def test_profile_rotation_is_diagonal():
    prof = quasisymmetry_profile(planar_rotation_map(0.9), TripleConfig(dim=2, triples=2000, seed=2))
    assert np.allclose(prof.q, prof.s, rtol=1e-12)


def test_profile_power_map():
    prof = quasisymmetry_profile(power_radial_map(2, 1.0), TripleConfig(dim=2, triples=5000, seed=3))
    assert prof.skipped <= 50
    assert prof.s.size + prof.skipped == 5000
    env = prof.envelope[np.isfinite(prof.envelope)]
    assert np.all(env > 0.0)
    # ratios of a quasisymmetric map are controlled by a function of s:
    # small s never produces huge q on this smooth example
    small = prof.s < 0.1
    assert prof.q[small].max() < 1.0


def test_profile_errors():
    with pytest.raises(DegenerateTripleError):
        quasisymmetry_profile(linear_map([[0.0, 0.0], [0.0, 0.0]]),
                              TripleConfig(dim=2, triples=500, seed=0))
    with pytest.raises(DimensionMismatchError):
        quasisymmetry_profile(identity_map(3), TripleConfig(dim=2, triples=100))


def test_profile_csv_rows():
    prof = quasisymmetry_profile(identity_map(2), TripleConfig(dim=2, triples=100, seed=4))
    rows = prof.csv_rows()
    assert rows.shape == (prof.s.size, 2)
    assert np.array_equal(rows[:, 0], prof.s)


# ---------------------------------------------------------------------------
# distortion and the composition demo

def test_qc_distortion():
    assert qc_distortion(np.eye(2)) == pytest.approx(1.0, abs=1e-12)
    assert qc_distortion(np.diag([2.0, 1.0])) == pytest.approx(2.0, abs=1e-10)
    assert qc_distortion(np.diag([2.0, 2.0]), n=3) == pytest.approx(2.0, abs=1e-10)
    with pytest.raises(NonpositiveDeterminantError):
        qc_distortion(np.diag([1.0, -1.0]))
    with pytest.raises(NonpositiveDeterminantError):
        qc_distortion(np.diag([1.0, 0.0]))


def test_composition_demo_flags_lost_monotonicity():
    report = composition_monotonicity_demo(math.pi / 3, math.pi / 3, pairs=2000, seed=1)
    assert report.delta1 == pytest.approx(0.5, abs=1e-6)
    assert report.delta2 == pytest.approx(0.5, abs=1e-6)
    assert report.delta_composed_matrix == pytest.approx(-0.5, abs=1e-6)
    assert report.flagged
    assert report.certificate.delta_hat <= -0.5 + 1e-6
    d = report.json_dict()
    assert d["flagged_non_monotone"] is True
    assert d["two_point"]["delta_hat"] == report.certificate.delta_hat


def test_composition_demo_benign_angles():
    report = composition_monotonicity_demo(math.pi / 8, math.pi / 8, pairs=1000, seed=2)
    assert not report.flagged
    assert report.delta_composed_matrix == pytest.approx(math.cos(math.pi / 4), abs=1e-6)
    report = composition_monotonicity_demo(0.0, 0.0, pairs=500, seed=3)
    assert report.delta1 == pytest.approx(1.0, abs=1e-12)
    assert report.delta_composed_matrix == pytest.approx(1.0, abs=1e-12)
    assert report.certificate.delta_hat == pytest.approx(1.0, abs=1e-12)


def test_composition_demo_rejects_non_monotone_factors():
    with pytest.raises(InvalidParameterError):
        composition_monotonicity_demo(math.pi / 2, 0.1)
    with pytest.raises(InvalidParameterError):
        composition_monotonicity_demo(0.1, -math.pi / 2)
