"""Tests for the concentration predictors and Monte Carlo estimators.

Each predictor is pinned to hand-derived closed forms; the estimators
are exercised on degenerate inputs where the sampled statistic is
exact (all-ones spectra, reflections, single sphere steps), which
turns the Monte Carlo layer into a deterministic oracle check.
"""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from supercon import (
    PredictionReport,
    RngStream,
    fit_scaling,
    mc_action_norm,
    mc_gram_identity,
    mc_rotation_product,
    mc_sphere_displacement,
    mc_sum_norm,
    predict_action_norm,
    predict_distortion_variance,
    predict_rotation,
    predict_sphere_displacement_sq,
    predict_sum_norm,
)

RNG = RngStream(70502031)


def test_predict_sum_norm_pythagorean_triple():
    assert predict_sum_norm((3.0, 4.0, 12.0)) == 13.0
    assert predict_sum_norm((5.0,)) == 5.0


def test_predict_sphere_displacement_hand_values():
    got = predict_sphere_displacement_sq([0.1] * 20)
    assert got == pytest.approx(2.0 * (1.0 - 0.995**20), rel=1e-14)
    assert got == pytest.approx(0.190779, abs=1e-6)
    # single step: exactly d^2, also beyond the sqrt(2) chord
    assert predict_sphere_displacement_sq([0.3]) == pytest.approx(0.09, rel=1e-15)
    assert predict_sphere_displacement_sq([1.5]) == pytest.approx(2.25, rel=1e-15)
    with pytest.raises(ValueError):
        predict_sphere_displacement_sq([2.5])


def test_predict_action_norm_hand_values():
    assert predict_action_norm(np.ones(7)) == 1.0
    assert predict_action_norm([1.0, 2.0, 2.0]) == pytest.approx(math.sqrt(3.0), rel=1e-14)
    assert predict_distortion_variance(np.ones(9)) == pytest.approx(0.0, abs=1e-15)


def test_predict_distortion_variance_two_level():
    # s = (a, b): prediction (1/N)(|s/pred|_4^4 - 1) with pred = rms
    s = np.array([2.0, 0.0])
    rms4 = (s / predict_action_norm(s)) ** 4
    want = (np.mean(rms4) - 1.0) / 2.0
    assert predict_distortion_variance(s) == pytest.approx(want, rel=1e-14)


def test_predict_rotation_rank_one_projector():
    spec = np.zeros(100)
    spec[0] = 1.0
    # mean 1/100, rms 1/10 -> 2 (1 - 0.1) = 1.8
    assert predict_rotation([spec]) == pytest.approx(1.8, abs=1e-12)


def test_predict_rotation_psd_bound_and_reflection():
    g = RNG.substream("psd")
    for _ in range(25):
        spec = 3.0 * g.generator.random(40)
        assert predict_rotation([spec]) <= 2.0 + 1e-12
    refl = -np.ones(30)
    assert predict_rotation([refl], psd=False) == pytest.approx(4.0, abs=1e-12)
    with pytest.raises(ValueError):
        predict_rotation([refl], psd=True)
    with pytest.raises(ValueError):
        predict_rotation([np.zeros(10)])


def test_prediction_report_from_samples():
    rep = PredictionReport.from_samples([1.0, 3.0], 2.0, 50)
    assert rep.empirical_mean == 2.0
    assert rep.empirical_std == pytest.approx(math.sqrt(2.0), rel=1e-14)
    assert rep.relative_error == 0.0
    assert rep.trials == 2 and rep.N == 50
    single = PredictionReport.from_samples([4.0], 2.0, 10)
    assert single.empirical_std == 0.0
    assert single.relative_error == pytest.approx(1.0)
    with pytest.raises(ValueError):
        PredictionReport.from_samples([], 1.0, 10)


def test_mc_sum_norm_concentrates():
    rep = mc_sum_norm((3.0, 4.0, 12.0), N=400, trials=300, rng=RNG.substream("sum"))
    assert rep.predicted == 13.0
    assert rep.relative_error < 0.02
    assert rep.empirical_std / rep.empirical_mean < 0.1


def test_mc_sum_norm_thread_invariance():
    a = mc_sum_norm((1.0, 2.0), N=50, trials=40, rng=RNG.substream("thr"), threads=1)
    b = mc_sum_norm((1.0, 2.0), N=50, trials=40, rng=RNG.substream("thr"), threads=4)
    assert a.empirical_mean == b.empirical_mean
    assert a.empirical_std == b.empirical_std


def test_mc_sphere_displacement_single_step_exact():
    rep = mc_sphere_displacement([0.25], N=60, trials=50, rng=RNG.substream("one"))
    assert rep.empirical_mean == pytest.approx(0.0625, abs=1e-13)
    assert rep.empirical_std < 1e-13


def test_mc_sphere_displacement_chain():
    rep = mc_sphere_displacement(
        [0.1] * 10, N=200, trials=400, rng=RNG.substream("chain")
    )
    assert rep.relative_error < 0.1


def test_mc_action_norm_identity_spectrum_exact():
    """All-ones spectrum makes T orthogonal: norms and inner products
    are preserved exactly, so both reports are deterministic."""
    rep, dist = mc_action_norm(np.ones(30), trials=25, rng=RNG.substream("id"))
    assert rep.predicted == 1.0
    assert abs(rep.empirical_mean - 1.0) < 1e-12
    assert rep.empirical_std < 1e-12
    assert abs(dist.empirical_mean) < 1e-12
    assert dist.empirical_std < 1e-12


def test_mc_action_norm_random_spectrum():
    g = RNG.substream("act")
    spec = 2.0 * g.generator.random(80)
    rep, dist = mc_action_norm(spec, trials=200, rng=g.substream("run"))
    assert rep.relative_error < 3.0 * rep.empirical_std / rep.empirical_mean + 0.05
    # the distortion variance tracks its closed-form prediction loosely
    want = predict_distortion_variance(spec)
    assert dist.empirical_std**2 == pytest.approx(want, rel=0.5)


def test_mc_rotation_reflection_exact():
    """Reflection -I maps v to -v: squared normalized shift exactly 4."""
    refl = -np.ones(25)
    rep, discarded = mc_rotation_product(
        [refl], trials=30, rng=RNG.substream("refl"), psd=False
    )
    assert discarded == 0
    assert rep.predicted == pytest.approx(4.0, abs=1e-12)
    assert abs(rep.empirical_mean - 4.0) < 1e-12
    assert rep.empirical_std < 1e-12


def test_mc_rotation_identity_exact():
    rep, discarded = mc_rotation_product([np.ones(25)], trials=20, rng=RNG.substream("ident"))
    assert discarded == 0
    assert abs(rep.empirical_mean) < 1e-12 and rep.predicted == pytest.approx(0.0, abs=1e-15)


def test_mc_rotation_rank_one():
    spec = np.zeros(64)
    spec[0] = 1.0
    rep, discarded = mc_rotation_product([spec], trials=400, rng=RNG.substream("rank1"))
    assert discarded == 0
    # prediction 2 (1 - 1/8) = 1.75 at N=64; generous band for the
    # small-N bias of the normalized-shift statistic
    assert rep.relative_error < 0.1


def test_mc_gram_identity_smoke():
    rep = mc_gram_identity(N=60, trials=60, rng=RNG.substream("gram"))
    assert rep.diag.empirical_mean == pytest.approx(1.0, abs=0.1)
    assert rep.offdiag.empirical_mean == pytest.approx(1.0 / math.sqrt(60), rel=0.2)
    assert abs(rep.quadform.empirical_mean) < 0.1
    assert np.isfinite(rep.rms_dev) and rep.rms_dev > 0.0


def test_fit_scaling_recovers_synthetic_slope():
    fit = fit_scaling([16, 64, 256, 1024], lambda n: 3.0 * n**-0.5)
    assert fit.slope == pytest.approx(-0.5, abs=1e-12)
    assert math.exp(fit.intercept) == pytest.approx(3.0, rel=1e-12)
    assert fit.dims == (16, 64, 256, 1024)


def test_fit_scaling_filters_nonpositive():
    devs = {16: 1.0, 32: -1.0, 64: 0.5, 128: 0.25}
    fit = fit_scaling([16, 32, 64, 128], lambda n: devs[n])
    assert fit.dims == (16, 64, 128)


@pytest.mark.parametrize(
    "dims,err",
    [([16, 32], "at least 3"), ([8, 16, 32], ">= 16")],
)
def test_fit_scaling_validation(dims, err):
    with pytest.raises(ValueError, match=err):
        fit_scaling(dims, lambda n: 1.0 / n)


@given(
    st.lists(st.floats(min_value=0.1, max_value=20.0), min_size=1, max_size=8)
)
def test_sum_norm_prediction_is_l2(norms):
    want = math.sqrt(math.fsum(v * v for v in norms))
    assert predict_sum_norm(norms) == pytest.approx(want, rel=1e-12)


@given(
    st.lists(st.floats(min_value=0.01, max_value=1.4), min_size=1, max_size=30)
)
def test_sphere_prediction_bounds_small_chords(steps):
    """With every chord below sqrt(2) all factors stay positive: the
    prediction sits in [0, 2] and grows with extra steps."""
    val = predict_sphere_displacement_sq(steps)
    assert 0.0 <= val <= 2.0
    more = predict_sphere_displacement_sq(list(steps) + [0.5])
    assert more >= val - 1e-15


@given(
    st.lists(st.floats(min_value=0.01, max_value=2.0), min_size=1, max_size=30)
)
def test_sphere_prediction_never_exceeds_diameter(steps):
    val = predict_sphere_displacement_sq(steps)
    assert 0.0 <= val <= 4.0
