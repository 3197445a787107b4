import math

import numpy as np
import pytest

import momentous as mm
from momentous.model import moment_order, exponents_to_indices, indices_to_exponents

RNG = np.random.default_rng(20260808)


def random_cov(dim=4):
    a = RNG.normal(size=(dim, dim))
    return a @ a.T + dim * np.eye(dim)


# ---------------------------------------------------------------------------
# parameters

def test_omega0_derived_from_big_omega():
    p = mm.ModelParams(big_omega=1.5, lambda_damp=0.04)
    assert p.omega0 == math.hypot(1.5, 0.04)


def test_big_omega_derived_from_omega0():
    p = mm.ModelParams(big_omega=None, omega0=1.7, lambda_damp=0.8)
    assert p.big_omega**2 + 0.8**2 == pytest.approx(1.7**2, rel=1e-15)


def test_inconsistent_frequencies_rejected():
    with pytest.raises(ValueError, match="inconsistent"):
        mm.ModelParams(big_omega=1.5, omega0=1.6, lambda_damp=0.04)


def test_overdamped_rejected():
    with pytest.raises(ValueError, match="overdamped"):
        mm.ModelParams(big_omega=None, omega0=1.0, lambda_damp=1.2)


@pytest.mark.parametrize("field,value", [
    ("m", 0.0), ("hbar", -1.0), ("gamma", -0.1), ("lambda_damp", -0.1),
    ("nbar", -0.5), ("omega", 0.0), ("n_level", -1),
])
def test_invalid_parameter_values(field, value):
    with pytest.raises(ValueError):
        mm.ModelParams(**{field: value})


def test_equivalence_mode_flag():
    assert mm.ModelParams().equivalence_mode
    assert not mm.ModelParams(gamma=0.1).equivalence_mode
    assert not mm.ModelParams(omega_prime=1.4).equivalence_mode
    # gamma = 2*lambda must hold exactly
    assert mm.ModelParams(gamma=0.08, lambda_damp=0.04).equivalence_mode


# ---------------------------------------------------------------------------
# frames and moment indexing

def test_frame_signatures():
    assert mm.BT1.pair_signatures == (1, -1)
    assert mm.XY.pair_signatures == (1, 1)
    assert mm.L1.pair_signatures == (1,)
    assert mm.BT1.dim == 4 and mm.L1.dim == 2


def test_moment_order_canonical():
    order = moment_order(4)
    assert len(order) == 10
    assert order[0] == (2, 0, 0, 0)
    assert order[1] == (1, 1, 0, 0)
    assert order[-1] == (0, 0, 0, 2)
    for exps in order:
        i, j = exponents_to_indices(exps)
        assert indices_to_exponents(i, j, 4) == exps


def test_exponent_validation():
    with pytest.raises(ValueError):
        exponents_to_indices((1, 0, 0, 0))


# ---------------------------------------------------------------------------
# containers

def test_mean_vector_rejects_nonfinite():
    with pytest.raises(ValueError):
        mm.MeanVector(mm.L1, [1.0, math.nan])


def test_covariance_requires_symmetry():
    bad = np.array([[1.0, 0.5], [0.2, 1.0]])
    with pytest.raises(ValueError, match="symmetric"):
        mm.CovarianceMatrix(mm.L1, bad)


def test_covariance_rejects_negative_diagonal():
    with pytest.raises(ValueError, match="diagonal"):
        mm.CovarianceMatrix(mm.L1, np.diag([-1.0, 1.0]))


def test_covariance_moment_accessor():
    cov = mm.CovarianceMatrix(mm.BT1, random_cov())
    assert cov.moment(1, 1, 0, 0) == cov.entries[0, 1]
    assert cov.moment(0, 0, 1, 1) == cov.entries[2, 3]
    with pytest.raises(ValueError):
        cov.moment(1, 1)


def test_pair_determinant_uses_frame_pairs():
    cov = mm.CovarianceMatrix(mm.BT1, random_cov())
    e = cov.entries
    assert cov.pair_determinant(0) == pytest.approx(e[0, 0] * e[1, 1] - e[0, 1] ** 2)
    # second BT1 pair is (x2, p2) = indices (3, 2)
    assert cov.pair_determinant(1) == pytest.approx(e[3, 3] * e[2, 2] - e[3, 2] ** 2)


def test_trajectory_validation():
    with pytest.raises(ValueError, match="increasing"):
        mm.Trajectory(mm.L1, [0.0, 0.0], np.zeros((2, 2)), np.zeros((2, 2, 2)), 0.1)
    with pytest.raises(ValueError, match="shapes"):
        mm.Trajectory(mm.L1, [0.0, 1.0], np.zeros((2, 3)), np.zeros((2, 2, 2)), 0.1)


# ---------------------------------------------------------------------------
# transforms

def test_transform_means_example():
    t = mm.build_transform(mm.BT1, mm.XY)
    means = mm.MeanVector(mm.BT1, [2.0 * math.sqrt(2.0), 0.0, 0.0, 0.0])
    cov = mm.CovarianceMatrix(mm.BT1, np.eye(4))
    out, _ = mm.transform_state(means, cov, t)
    assert out.values == pytest.approx([2.0, 0.0, 2.0, 0.0], abs=1e-15)


def test_transform_zero_vector():
    t = mm.build_transform(mm.BT1, mm.XY)
    assert np.all(t.matrix @ np.zeros(4) == 0.0)


def test_transform_round_trip():
    fwd = mm.build_transform(mm.BT1, mm.XY)
    back = mm.build_transform(mm.XY, mm.BT1)
    for _ in range(20):
        v = RNG.normal(size=4)
        c = random_cov()
        m1, c1 = mm.transform_state(
            mm.MeanVector(mm.BT1, v), mm.CovarianceMatrix(mm.BT1, c), fwd
        )
        m2, c2 = mm.transform_state(m1, c1, back)
        assert np.abs(m2.values - v).max() <= 1e-14 * max(1.0, np.abs(v).max())
        assert np.abs(c2.entries - 0.5 * (c + c.T)).max() <= 1e-14 * np.abs(c).max()


def test_identity_transform_unchanged():
    t = mm.build_transform(mm.BT1, mm.BT1)
    v = RNG.normal(size=4)
    c = random_cov()
    m1, c1 = mm.transform_state(mm.MeanVector(mm.BT1, v), mm.CovarianceMatrix(mm.BT1, c), t)
    assert np.array_equal(m1.values, v)
    assert np.abs(c1.entries - 0.5 * (c + c.T)).max() == 0.0


def test_unsupported_frame_pair():
    with pytest.raises(mm.FrameError):
        mm.build_transform(mm.L1, mm.XY)


def test_frame_mismatch_rejected():
    t = mm.build_transform(mm.BT1, mm.XY)
    means = mm.MeanVector(mm.XY, np.zeros(4))
    cov = mm.CovarianceMatrix(mm.XY, np.eye(4))
    with pytest.raises(mm.FrameError):
        mm.transform_state(means, cov, t)


def test_explicit_variance_combinations():
    """The three written-out moment relations against the congruence map."""
    t = mm.build_transform(mm.BT1, mm.XY)
    zero_means = mm.MeanVector(mm.BT1, np.zeros(4))

    # x-variance: only G1_2000=a, G1_0002=b, G1_1001=c set
    a, b, c = 1.3, 0.7, 0.25
    s = np.zeros((4, 4))
    s[0, 0], s[3, 3] = a, b
    s[0, 3] = s[3, 0] = c
    _, out = mm.transform_state(zero_means, mm.CovarianceMatrix(mm.BT1, s), t)
    assert out.moment(2, 0, 0, 0) == pytest.approx((a + b + 2 * c) / 2, rel=1e-15)

    # p_x-variance: only G1_0200=a, G1_0020=b, G1_0110=c set
    s = np.zeros((4, 4))
    s[1, 1], s[2, 2] = a, b
    s[1, 2] = s[2, 1] = c
    _, out = mm.transform_state(zero_means, mm.CovarianceMatrix(mm.BT1, s), t)
    assert out.moment(0, 2, 0, 0) == pytest.approx((a + b - 2 * c) / 2, rel=1e-15)


def test_explicit_formulas_match_congruence_on_random_covariances():
    t = mm.build_transform(mm.BT1, mm.XY)
    zero_means = mm.MeanVector(mm.BT1, np.zeros(4))
    for _ in range(100):
        s = random_cov()
        _, out = mm.transform_state(zero_means, mm.CovarianceMatrix(mm.BT1, s), t)
        scale = np.abs(s).max()
        g20 = 0.5 * (s[0, 0] + s[3, 3] + 2 * s[0, 3])
        g02 = 0.5 * (s[1, 1] + s[2, 2] - 2 * s[1, 2])
        g11 = 0.5 * (s[0, 1] - s[2, 3] - s[0, 2] + s[1, 3])
        assert abs(out.moment(2, 0, 0, 0) - g20) <= 1e-14 * scale
        assert abs(out.moment(0, 2, 0, 0) - g02) <= 1e-14 * scale
        assert abs(out.moment(1, 1, 0, 0) - g11) <= 1e-14 * scale


def test_congruence_preserves_pair_determinants_on_coherent_state(params):
    """Block-diagonal (coherent) input: both frames saturate hbar^2/4."""
    means, cov = mm.coherent_initial_state(params)
    assert cov.pair_determinant(0) == 0.25
    _, cov_xy = mm.transform_state(means, cov, mm.build_transform(mm.BT1, mm.XY))
    assert abs(cov_xy.pair_determinant(0) - 0.25) <= 1e-15
    assert abs(cov_xy.pair_determinant(1) - 0.25) <= 1e-15
