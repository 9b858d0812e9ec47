"""Tests for the basic and perturbed feasibility iterations.

The plane cases are chosen so every fixed point is known in closed
form; the perturbed run is checked against a hand-executed sweep and
against its beta0=0 equivalence with the basic run.
"""

import numpy as np
import pytest

from supercon import (
    Ball,
    HalfSpace,
    LinearTarget,
    OperatorSequence,
    PerturbationSchedule,
    RngStream,
    StoppingRule,
    apply_operator,
    gaussian_vector,
    nonascent_rule,
    residual,
    run_basic,
    run_superiorized,
    uniform_sphere,
)
from supercon.feasibility import nonascent_direction

RNG = RngStream(881100)

H_X = HalfSpace(normal=np.array([1.0, 0.0]), offset=0.0)  # x1 <= 0
H_Y = HalfSpace(normal=np.array([0.0, 1.0]), offset=0.0)  # x2 <= 0
QUADRANT = OperatorSequence(constraints=(H_X, H_Y))


def test_operator_sequence_validation():
    with pytest.raises(ValueError):
        OperatorSequence(constraints=())
    with pytest.raises(ValueError):
        OperatorSequence(constraints=(H_X,), mode="parallel")
    with pytest.raises(ValueError):
        OperatorSequence(constraints=(H_X,), relaxation=0.0)
    with pytest.raises(ValueError):
        OperatorSequence(constraints=(H_X, H_Y), weights=(0.5, 0.5))


def test_cyclic_indexing_wraps():
    x = np.array([3.0, 4.0])
    assert np.array_equal(apply_operator(QUADRANT, 0, x), apply_operator(QUADRANT, 2, x))
    assert np.array_equal(apply_operator(QUADRANT, 1, x), apply_operator(QUADRANT, 3, x))
    assert np.allclose(apply_operator(QUADRANT, 0, x), [0.0, 4.0])
    assert np.allclose(apply_operator(QUADRANT, 1, x), [3.0, 0.0])


def test_residual_is_max_constraint_distance():
    x = np.array([3.0, 4.0])
    assert residual(QUADRANT, x) == pytest.approx(4.0)
    assert residual(QUADRANT, np.array([-1.0, -1.0])) == 0.0


def test_simultaneous_mode_averages_projections():
    seq = OperatorSequence(constraints=(H_X, H_Y), mode="simultaneous")
    x = np.array([2.0, 4.0])
    # average of (0,4) and (2,0)
    assert np.allclose(apply_operator(seq, 0, x), [1.0, 2.0])
    assert seq.applications_per_sweep == 1


def test_run_basic_quadrant_one_sweep():
    out = run_basic(QUADRANT, np.array([3.0, 4.0]), StoppingRule(tol=1e-12, max_sweeps=50))
    assert out.converged
    assert out.sweeps == 1
    assert out.applications == 2
    assert np.array_equal(out.final_point, np.array([0.0, 0.0]))
    assert out.residual == 0.0
    assert out.residual_history[0] == pytest.approx(4.0)


def test_run_basic_feasible_start_returns_immediately():
    out = run_basic(QUADRANT, np.array([-1.0, -2.0]))
    assert out.converged
    assert out.sweeps == 0
    assert out.applications == 0
    assert np.array_equal(out.final_point, np.array([-1.0, -2.0]))


def test_run_basic_records_trajectory():
    out = run_basic(
        QUADRANT, np.array([3.0, 4.0]), StoppingRule(tol=1e-12, max_sweeps=50),
        record_trajectory=True,
    )
    assert len(out.trajectory) == out.applications + 1
    assert np.array_equal(out.trajectory[0], np.array([3.0, 4.0]))
    assert np.array_equal(out.trajectory[-1], out.final_point)


def test_superiorized_hand_sweep():
    """One sweep with a single half-space, worked by hand.

    x0=(2,3), v = -e2, beta=0.5: y = (2, 2.5) then P{x1<=0} gives
    (0, 2.5).
    """
    seq = OperatorSequence(constraints=(H_X,))
    target = LinearTarget(c=np.array([0.0, 1.0]), a=0.0)
    sched = PerturbationSchedule(beta0=0.5, decay=0.5)
    out = run_superiorized(
        seq, np.array([2.0, 3.0]), sched, nonascent_rule(target),
        StoppingRule(tol=1e-12, max_sweeps=1), target=target,
    )
    assert np.array_equal(out.final_point, np.array([0.0, 2.5]))
    assert out.phi_history[0] == pytest.approx(3.0)
    assert out.phi_history[-1] == pytest.approx(2.5)


def test_superiorized_beta_zero_matches_basic_bitwise():
    g = RNG.substream("beta0")
    cons = []
    for k in range(5):
        u = uniform_sphere(6, g)
        cons.append(HalfSpace(normal=u, offset=float(0.1 * k - 0.2)))
    seq = OperatorSequence(constraints=tuple(cons))
    x0 = 3.0 * gaussian_vector(6, g)
    target = LinearTarget(c=uniform_sphere(6, g), a=1.0)
    stop = StoppingRule(tol=1e-10, max_sweeps=200)
    basic = run_basic(seq, x0, stop)
    sup = run_superiorized(
        seq, x0, PerturbationSchedule(beta0=0.0, decay=0.9),
        nonascent_rule(target), stop,
    )
    assert np.array_equal(basic.final_point, sup.final_point)
    assert basic.sweeps == sup.sweeps
    assert np.array_equal(basic.residual_history, sup.residual_history)


def test_superiorized_moves_from_feasible_start():
    """A feasible start must not freeze the perturbed iteration."""
    seq = OperatorSequence(constraints=(H_X, H_Y))
    target = LinearTarget(c=np.array([0.0, 1.0]), a=0.0)
    x0 = np.array([-1.0, -1.0])
    out = run_superiorized(
        seq, x0, PerturbationSchedule(beta0=0.5, decay=0.5),
        nonascent_rule(target), StoppingRule(tol=1e-9, max_sweeps=3), target=target,
    )
    assert out.applications > 0
    assert target.value(out.final_point) < target.value(x0)


def test_superiorized_reduces_target_on_ball():
    g = RNG.substream("ball")
    seq = OperatorSequence(constraints=(Ball(center=np.zeros(4), radius=1.0),))
    target = LinearTarget(c=uniform_sphere(4, g), a=0.0)
    x0 = 5.0 * uniform_sphere(4, g)
    stop = StoppingRule(tol=1e-10, max_sweeps=500)
    basic = run_basic(seq, x0, stop)
    sup = run_superiorized(
        seq, x0, PerturbationSchedule(beta0=1.0, decay=0.9),
        nonascent_rule(target), stop, target=target,
    )
    assert basic.converged and sup.converged
    assert target.value(sup.final_point) <= target.value(basic.final_point) + 1e-9


def test_schedule_geometry_and_total():
    s = PerturbationSchedule(beta0=2.0, decay=0.5)
    assert s.beta(0) == 2.0
    assert s.beta(3) == pytest.approx(0.25)
    assert s.total() == pytest.approx(4.0)
    with pytest.raises(ValueError):
        PerturbationSchedule(beta0=-1.0, decay=0.5)
    with pytest.raises(ValueError):
        PerturbationSchedule(beta0=1.0, decay=1.0)


def test_stopping_rule_validation():
    with pytest.raises(ValueError):
        StoppingRule(tol=-1.0)
    with pytest.raises(ValueError):
        StoppingRule(tol=1e-6, max_sweeps=-1)
    assert StoppingRule(tol=0.0, max_sweeps=3).tol == 0.0


def test_linear_target_value_gradient():
    t = LinearTarget(c=np.array([1.0, -2.0]), a=3.0)
    x = np.array([4.0, 5.0])
    assert t.value(x) == pytest.approx(4.0 - 10.0 + 3.0)
    assert np.array_equal(t.gradient(x), np.array([1.0, -2.0]))


def test_nonascent_direction_unit_or_zero():
    t = LinearTarget(c=np.array([3.0, 4.0]), a=0.0)
    v = nonascent_direction(t, np.zeros(2))
    assert np.allclose(v, [-0.6, -0.8])
    assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-15)

    class FlatTarget:
        def gradient(self, x):
            return np.zeros_like(x)

    z = nonascent_direction(FlatTarget(), np.ones(3))
    assert np.array_equal(z, np.zeros(3))
