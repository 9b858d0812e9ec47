"""Tests for the linear-objective superiorization benchmark.

Problem generation invariants (feasible witness, exact slack), the
paired run contract, gap bookkeeping, and the batch/drift experiment
plumbing at desk sizes.
"""

import numpy as np
import pytest

from supercon import (
    LinSupConfig,
    LinSupProblem,
    PairedOutcome,
    PerturbationSchedule,
    RngStream,
    batch_experiment,
    drift_experiment,
    gen_problem,
    run_pair,
)
from supercon.linsup import shift_target_offset

RNG = RngStream(44601234)


def test_gen_problem_geometry():
    g = RNG.substream("gen")
    p = gen_problem(N=30, I=12, margin=0.1, rng=g)
    assert p.dim == 30
    assert p.n_constraints == 12
    assert np.linalg.norm(p.witness) <= 1.0 + 1e-12
    # every half-space holds the witness with slack equal to the margin
    # up to the float rounding of storing <u, w> + margin
    for h in p.halfspaces:
        slack = h.offset - float(np.dot(h.normal, p.witness))
        assert slack == pytest.approx(0.1, abs=1e-12)
    assert p.min_slack() == pytest.approx(0.1, abs=1e-12)
    assert np.linalg.norm(p.target.c) == pytest.approx(1.0, abs=1e-12)


def test_gen_problem_validation():
    g = RNG.substream("genv")
    with pytest.raises(ValueError):
        gen_problem(N=1, I=5, margin=0.1, rng=g)
    with pytest.raises(ValueError):
        gen_problem(N=5, I=0, margin=0.1, rng=g)
    with pytest.raises(ValueError):
        gen_problem(N=5, I=5, margin=0.0, rng=g)


def test_run_pair_converges_and_superiorizes():
    g = RNG.substream("pair")
    p = gen_problem(N=40, I=20, margin=0.1, rng=g)
    out = run_pair(p)
    assert out.valid
    assert out.residual_basic < 1e-6
    assert out.residual_sup < 1e-6
    assert out.success
    assert out.gap == out.phi_basic - out.phi_sup


def test_run_pair_beta_zero_gap_is_zero():
    g = RNG.substream("pair0")
    p = gen_problem(N=25, I=10, margin=0.1, rng=g)
    out = run_pair(p, schedule=PerturbationSchedule(beta0=0.0, decay=0.9))
    assert out.valid
    assert out.gap == 0.0
    assert out.phi_basic == out.phi_sup


def test_paired_outcome_properties():
    base = dict(
        phi_basic=10.0, phi_sup=4.0, residual_basic=1e-9, residual_sup=1e-9,
        iterations=(3, 5), valid=True,
    )
    ok = PairedOutcome(**base)
    assert ok.gap == 6.0
    assert ok.tol_phi == pytest.approx(1e-9 * 11.0)
    assert ok.success
    worse = PairedOutcome(**{**base, "phi_sup": 10.0 + 1e-3})
    assert not worse.success
    invalid = PairedOutcome(**{**base, "valid": False})
    assert not invalid.success


def test_shift_target_offset_leaves_gap_invariant():
    g = RNG.substream("shift")
    p = gen_problem(N=30, I=15, margin=0.1, rng=g)
    a = run_pair(p)
    b = run_pair(shift_target_offset(p, 17.5))
    assert b.phi_basic == pytest.approx(a.phi_basic + 17.5, abs=1e-9)
    assert b.gap == pytest.approx(a.gap, abs=1e-9)
    assert b.success == a.success


def test_batch_experiment_small():
    cfg = LinSupConfig(N=40, I=20, trials=8)
    summary = batch_experiment(cfg, rng=RNG.substream("batch"))
    assert len(summary.outcomes) == 8
    assert 0.0 <= summary.success_rate <= 1.0
    assert all(o.valid for o in summary.outcomes)
    assert summary.mean_gap > 0.0


def test_batch_experiment_all_invalid_raises():
    # tol=0 can never be reached, so every pair is invalid
    cfg = LinSupConfig(N=10, I=4, trials=3, tol=0.0, max_sweeps=3)
    with pytest.raises(ValueError):
        batch_experiment(cfg, rng=RNG.substream("invalid"))


def test_linsup_config_dict_round_trip():
    cfg = LinSupConfig.from_dict({"N": 50, "I": 25, "trials": 4})
    assert (cfg.N, cfg.I, cfg.trials) == (50, 25, 4)
    assert cfg.margin == 0.1
    with pytest.raises(ValueError):
        LinSupConfig.from_dict({"N": 50, "wrong_key": 1})
    with pytest.raises(ValueError):
        LinSupConfig(N=1, I=5, trials=5)


def test_drift_experiment_smoke():
    out = drift_experiment(
        N=80, I=30, ks=(2, 4, 8), trials=12, rng=RNG.substream("drift")
    )
    assert out.ks == (2, 4, 8)
    assert len(out.rms_angles) == 3
    assert all(a > 0 for a in out.rms_angles)
    # growth with window length, at a loose exponent at this tiny size
    assert out.rms_angles[0] < out.rms_angles[-1]
    assert 0.1 < out.slope < 0.9


def test_drift_experiment_validation():
    with pytest.raises(ValueError):
        drift_experiment(N=20, I=5, ks=(3,), trials=2, rng=RNG.substream("dv"))
    with pytest.raises(ValueError):
        drift_experiment(N=20, I=5, ks=(2, 4), trials=2, rng=None)


def test_problem_rejects_inconsistent_dimensions():
    g = RNG.substream("baddim")
    p = gen_problem(N=6, I=3, margin=0.1, rng=g)
    with pytest.raises(ValueError):
        LinSupProblem(
            halfspaces=p.halfspaces,
            target=p.target,
            witness=np.zeros(5),
        )
