import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chanlearn.gaussian_channel import (
    apply_lossy_first_mode,
    check_physical,
    choi_covariance,
    feature_sigma11,
    invert_feature,
    lossy_channel_matrices,
    tmsv_covariance,
)

# reference values from 30-digit arbitrary-precision evaluation
COSH2 = 3.76219569108363145956
SINH2 = 3.62686040784701876767
HALF_MIX = 2.38109784554181572978  # 0.5 cosh 2 + 0.5
HALF_CORR = 2.56457758880563441168  # sqrt(0.5) sinh 2

etas = st.floats(0.0, 1.0, allow_nan=False)
squeezings = st.floats(0.0, 3.0, allow_nan=False)


def test_tmsv_vacuum_at_zero_squeezing():
    np.testing.assert_array_equal(tmsv_covariance(0.0), np.eye(4))


def test_tmsv_values_at_r1():
    s = tmsv_covariance(1.0)
    np.testing.assert_allclose(np.diag(s), COSH2, rtol=1e-14)
    np.testing.assert_allclose(abs(s[0, 2]), SINH2, rtol=1e-14)
    np.testing.assert_allclose(abs(s[1, 3]), SINH2, rtol=1e-14)
    assert s[0, 2] == -s[1, 3]


@given(squeezings)
def test_tmsv_symmetric_and_physical(r):
    s = tmsv_covariance(r)
    np.testing.assert_array_equal(s, s.T)
    assert check_physical(s)


@pytest.mark.parametrize(
    "eta, x, y",
    [(1.0, 1.0, 0.0), (0.0, 0.0, 1.0), (0.25, 0.5, 0.75)],
)
def test_channel_matrices(eta, x, y):
    m = lossy_channel_matrices(eta)
    np.testing.assert_allclose(m.x, x * np.eye(2), atol=0)
    np.testing.assert_allclose(m.y, y * np.eye(2), atol=0)


def test_channel_rejects_bad_eta():
    with pytest.raises(ValueError):
        lossy_channel_matrices(1.5)
    with pytest.raises(ValueError):
        choi_covariance(-0.1, 1.0)


def test_identity_channel_and_vacuum_fixed_point():
    s = tmsv_covariance(0.7)
    np.testing.assert_allclose(apply_lossy_first_mode(s, 1.0), s, atol=1e-15)
    np.testing.assert_allclose(apply_lossy_first_mode(np.eye(4), 0.3), np.eye(4), atol=1e-15)


def test_apply_rejects_unphysical_input():
    with pytest.raises(ValueError):
        apply_lossy_first_mode(0.5 * np.eye(4), 0.5)


def test_choi_reference_values():
    np.testing.assert_allclose(choi_covariance(1.0, 0.8), tmsv_covariance(0.8), atol=1e-15)
    erased = choi_covariance(0.0, 1.0)
    np.testing.assert_allclose(erased, np.diag([1.0, 1.0, COSH2, COSH2]), rtol=1e-14, atol=0)
    half = choi_covariance(0.5, 1.0)
    assert half[0, 0] == pytest.approx(HALF_MIX, rel=1e-14)
    assert half[0, 2] == pytest.approx(HALF_CORR, rel=1e-14)
    np.testing.assert_allclose(apply_lossy_first_mode(tmsv_covariance(1.0), 0.5), half, atol=1e-12)


def test_closed_form_matches_channel_action_on_random_grid():
    rng = np.random.default_rng(11)
    for eta, r in zip(rng.uniform(0, 1, 1000), rng.uniform(0, 2.5, 1000)):
        direct = apply_lossy_first_mode(tmsv_covariance(r), eta)
        np.testing.assert_allclose(choi_covariance(eta, r), direct, atol=1e-12, rtol=0)


@given(etas, squeezings)
def test_choi_is_physical(eta, r):
    s = choi_covariance(eta, r)
    np.testing.assert_array_equal(s, s.T)
    assert check_physical(s)


def test_check_physical_examples():
    assert check_physical(np.eye(4))
    assert check_physical(tmsv_covariance(1.0))
    assert not check_physical(0.5 * np.eye(4))
    # sigma + i*Omega for the squeezed-below-vacuum state has eigenvalue 0.5 - 1 = -0.5
    herm = 0.5 * np.eye(4) + 1j * np.kron(np.eye(2), np.array([[0, 1], [-1, 0]]))
    assert np.linalg.eigvalsh(herm).min() == pytest.approx(-0.5)


def test_feature_reference_values():
    assert feature_sigma11(0.0, 1.3) == 1.0
    assert feature_sigma11(1.0, 1.0) == pytest.approx(COSH2, rel=1e-14)
    assert feature_sigma11(0.5, 1.0) == pytest.approx(HALF_MIX, rel=1e-14)
    assert invert_feature(1.0, 0.4) == 0.0
    assert invert_feature(np.cosh(0.8), 0.4) == pytest.approx(1.0, abs=1e-15)
    assert invert_feature(HALF_MIX, 1.0) == pytest.approx(0.5, abs=1e-14)


def test_feature_is_vectorised():
    eta = np.linspace(0, 1, 7)
    f = feature_sigma11(eta, 1.0)
    assert f.shape == (7,)
    np.testing.assert_allclose(invert_feature(f, 1.0), eta, atol=1e-12)


def test_invert_feature_errors():
    with pytest.raises(ValueError):
        invert_feature(1.5, 0.0)
    with pytest.raises(ValueError):
        invert_feature(0.5, 1.0)
    with pytest.raises(ValueError):
        invert_feature(COSH2 + 1e-3, 1.0)


@settings(max_examples=300)
@given(etas, st.floats(0.05, 3.0))
def test_feature_round_trip(eta, r):
    assert abs(invert_feature(feature_sigma11(eta, r), r) - eta) <= 1e-12


@given(etas, etas, st.floats(0.05, 3.0))
def test_feature_monotone_in_eta(a, b, r):
    lo, hi = min(a, b), max(a, b)
    assert feature_sigma11(lo, r) <= feature_sigma11(hi, r)
    assert 1.0 <= feature_sigma11(lo, r) and feature_sigma11(hi, r) <= np.cosh(2 * r) * (1 + 1e-15)
