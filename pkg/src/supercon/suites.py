"""Verification suites behind the command-line runner.

Each suite runs a fixed battery of checks against its module's
predictions, returns structured per-check verdicts plus the tables the
reporting layer writes out, and never touches the filesystem itself.
All numeric work runs with the BLAS pinned to one thread so results
are identical no matter how many worker threads carry the trials.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from ._parallel import single_thread_blas
from .concentration import (
    fit_scaling,
    mc_action_norm,
    mc_gram_identity,
    mc_rotation_product,
    mc_sphere_displacement,
    mc_sum_norm,
    predict_rotation,
)
from .feasibility import PerturbationSchedule, StoppingRule, nonascent_rule, run_basic, run_superiorized
from .geometry import Ball, Ellipsoid
from .linsup import LinSupConfig, batch_experiment, drift_experiment, gen_problem
from .projderiv import (
    CascadePath,
    CascadeStep,
    cascade_rotation_prediction,
    dp_apply,
    mc_cascade,
    mean_value_check,
    projection_derivative,
)
from .randgen import RngStream, gaussian_vector, uniform_sphere
from .supermatrix import build, column_limit, telescoping_residuals

__all__ = [
    "DEFAULT_SEED",
    "SUITE_NAMES",
    "ConfigError",
    "CriterionResult",
    "SuiteResult",
    "SupmatrixParams",
    "ComVerifyParams",
    "ScalingParams",
    "ProjderParams",
    "LinsupParams",
    "run_supmatrix_trace",
    "run_com_verify",
    "run_scaling",
    "run_projder_check",
    "run_linsup",
    "run_suite",
    "params_class",
]

DEFAULT_SEED = 104729

SUITE_NAMES = ("supmatrix-trace", "com-verify", "scaling", "projder-check", "linsup")


class ConfigError(ValueError):
    """Invalid suite configuration (unknown key or bad value)."""


@dataclass
class CriterionResult:
    criterion: str
    description: str
    passed: bool
    detail: str


@dataclass
class SuiteResult:
    suite: str
    seed: int
    criteria: list
    tables: dict  # name -> (header tuple, list of row tuples)
    elapsed_s: float
    timings: dict  # section name -> seconds; manifest-only, kept out of CSVs

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.criteria)

    def criterion(self, cid: str) -> CriterionResult:
        for c in self.criteria:
            if c.criterion == cid:
                return c
        raise KeyError(cid)


def _from_dict(cls, d: dict):
    names = {f.name for f in fields(cls)}
    unknown = sorted(set(d) - names)
    if unknown:
        raise ConfigError(f"unknown config keys for {cls.__name__}: {', '.join(unknown)}")
    try:
        return cls(**d)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _require(cond: bool, msg: str):
    if not cond:
        raise ValueError(msg)


@dataclass(frozen=True)
class SupmatrixParams:
    N: int = 50
    n_max: int = 60
    instances: int = 20
    bitwise_instances: int = 10
    I: int = 8
    margin: float = 0.3
    beta0: float = 1.0
    decay: float = 0.9
    seed: Optional[int] = None

    TRIALS_FIELD = "instances"
    DIM_FIELD = "N"

    def __post_init__(self):
        _require(self.N >= 2 and self.I >= 1, "need N >= 2 and I >= 1")
        _require(self.n_max >= 1, "need n_max >= 1")
        _require(self.instances >= 1, "need at least one instance")
        _require(0 <= self.bitwise_instances <= self.instances, "bitwise_instances out of range")
        _require(self.margin > 0, "margin must be positive")
        PerturbationSchedule(beta0=self.beta0, decay=self.decay)

    @classmethod
    def from_dict(cls, d):
        return _from_dict(cls, d)


@dataclass(frozen=True)
class ComVerifyParams:
    trials: int = 10000
    N_sum: int = 1000
    norms: tuple = (3.0, 4.0, 12.0)
    sphere_N: int = 500
    sphere_steps: int = 20
    sphere_d: float = 0.1
    single_trials: int = 200
    action_N: int = 400
    action_trials: int = 1000
    ones_trials: int = 50
    gram_N: int = 400
    gram_trials: int = 300
    rank1_N: int = 100
    rank1_trials: int = 1000
    chain_N: int = 400
    chain_ops: int = 5
    chain_trials: int = 200
    seed: Optional[int] = None

    TRIALS_FIELD = "trials"
    DIM_FIELD = "N_sum"

    def __post_init__(self):
        counts = (
            self.trials, self.single_trials, self.action_trials, self.ones_trials,
            self.gram_trials, self.rank1_trials, self.chain_trials,
        )
        _require(all(t >= 2 for t in counts), "trial counts must be >= 2")
        dims = (self.N_sum, self.sphere_N, self.action_N, self.gram_N, self.rank1_N, self.chain_N)
        _require(all(n >= 4 for n in dims), "dimensions must be >= 4")
        _require(self.sphere_steps >= 1 and self.chain_ops >= 1, "step counts must be >= 1")
        _require(0 < self.sphere_d <= 2.0, "sphere_d must lie in (0, 2]")
        ns = tuple(float(v) for v in self.norms)
        _require(len(ns) >= 1 and all(v > 0 for v in ns), "norms must be positive")
        object.__setattr__(self, "norms", ns)

    @classmethod
    def from_dict(cls, d):
        return _from_dict(cls, d)


@dataclass(frozen=True)
class ScalingParams:
    dims: tuple = (64, 256, 1024)
    action_trials: tuple = (400, 250, 120)
    sphere_trials: int = 2000
    sphere_steps: int = 20
    sphere_d: float = 0.1
    seed: Optional[int] = None

    TRIALS_FIELD = "sphere_trials"
    DIM_FIELD = None

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        at = tuple(int(t) for t in self.action_trials)
        _require(len(dims) >= 3, "need at least 3 dimensions for a slope fit")
        _require(all(n >= 16 for n in dims), "dimensions must be >= 16")
        _require(len(at) == len(dims), "action_trials must match dims")
        _require(all(t >= 2 for t in at) and self.sphere_trials >= 2, "trial counts must be >= 2")
        _require(self.sphere_steps >= 1 and 0 < self.sphere_d <= 2.0, "bad sphere walk settings")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "action_trials", at)

    @classmethod
    def from_dict(cls, d):
        return _from_dict(cls, d)


@dataclass(frozen=True)
class ProjderParams:
    fd_triples: int = 100
    fd_dims: tuple = (5, 12)
    meanvalue_instances: int = 20
    meanvalue_nodes: int = 64
    prop_trials: int = 100000
    prop_dims: tuple = (3, 50, 500)
    rotation_paths: int = 10000
    cascade_M: int = 5
    cascade_N: int = 200
    cascade_d: float = 0.5
    cascade_r: float = 1.0
    cascade_trials: int = 400
    seed: Optional[int] = None

    TRIALS_FIELD = "cascade_trials"
    DIM_FIELD = "cascade_N"

    def __post_init__(self):
        _require(self.fd_triples >= 1 and self.meanvalue_instances >= 1, "instance counts must be >= 1")
        fd = tuple(int(n) for n in self.fd_dims)
        _require(len(fd) >= 1 and all(n >= 3 for n in fd), "fd_dims must be >= 3")
        pd = tuple(int(n) for n in self.prop_dims)
        _require(len(pd) >= 1 and all(n >= 2 for n in pd), "prop_dims must be >= 2")
        _require(self.meanvalue_nodes >= 2, "need at least 2 quadrature nodes")
        _require(self.prop_trials >= 1 and self.rotation_paths >= 1, "trial counts must be >= 1")
        _require(self.cascade_M >= 1 and self.cascade_N >= 3, "cascade sizes too small")
        _require(self.cascade_d > 0 and self.cascade_r > 0, "cascade geometry must be positive")
        _require(self.cascade_trials >= 2, "cascade_trials must be >= 2")
        object.__setattr__(self, "fd_dims", fd)
        object.__setattr__(self, "prop_dims", pd)

    @classmethod
    def from_dict(cls, d):
        return _from_dict(cls, d)


@dataclass(frozen=True)
class LinsupParams:
    N: int = 200
    I: int = 100
    trials: int = 100
    margin: float = 0.1
    beta0: float = 1.0
    decay: float = 0.99
    tol: float = 1e-8
    max_sweeps: int = 100000
    drift_N: int = 500
    drift_I: int = 100
    drift_ks: tuple = (4, 16, 64)
    drift_trials: int = 100
    drift_beta0: float = 1e-3
    drift_radius: float = 50.0
    seed: Optional[int] = None

    TRIALS_FIELD = "trials"
    DIM_FIELD = "N"

    def __post_init__(self):
        LinSupConfig(
            N=self.N, I=self.I, trials=self.trials, margin=self.margin,
            beta0=self.beta0, decay=self.decay, tol=self.tol, max_sweeps=self.max_sweeps,
        )
        _require(self.drift_N >= 2 and self.drift_I >= 1, "drift problem sizes too small")
        ks = tuple(int(k) for k in self.drift_ks)
        _require(len(ks) >= 2 and all(k >= 1 for k in ks), "need >= 2 positive drift step counts")
        _require(self.drift_trials >= 1, "drift_trials must be >= 1")
        _require(self.drift_beta0 > 0 and self.drift_radius > 0, "drift scale must be positive")
        object.__setattr__(self, "drift_ks", ks)

    @classmethod
    def from_dict(cls, d):
        return _from_dict(cls, d)

    def config(self) -> LinSupConfig:
        return LinSupConfig(
            N=self.N, I=self.I, trials=self.trials, margin=self.margin,
            beta0=self.beta0, decay=self.decay, tol=self.tol, max_sweeps=self.max_sweeps,
        )


def _crit(cid, description, passed, detail) -> CriterionResult:
    return CriterionResult(criterion=cid, description=description, passed=bool(passed), detail=detail)


def run_supmatrix_trace(params: SupmatrixParams, master_seed: int, threads: int = 1) -> SuiteResult:
    """Iterate-matrix diagnostics: telescoping, bitwise paths, gap bounds."""
    t_start = time.perf_counter()
    rng = RngStream(master_seed, 0)
    schedule = PerturbationSchedule(beta0=params.beta0, decay=params.decay)
    x0 = np.zeros(params.N)

    with single_thread_blas():
        built = []
        tele = []
        t0 = time.perf_counter()
        for j in range(params.instances):
            g = rng.substream("instance", j)
            problem = gen_problem(params.N, params.I, params.margin, g)
            seq = problem.operator_sequence()
            direction = nonascent_rule(problem.target)
            m = build(seq, x0, schedule, direction, params.n_max)
            resids = telescoping_residuals(m, problem.target.value)
            built.append((problem, seq, direction, m))
            tele.append(float(np.max(resids)))
        tele_elapsed = time.perf_counter() - t0

        entry_excess = []
        limit_excess = []
        settled_counts = []
        for problem, seq, direction, m in built:
            worst_entry = -math.inf
            for n in range(m.n_max + 1):
                for s in range(n + 1):
                    gap = float(np.linalg.norm(m.entry(n, s + 1) - m.entry(n, s)))
                    worst_entry = max(worst_entry, gap - schedule.beta(s))
            entry_excess.append(worst_entry)
            worst_limit = -math.inf
            settled = 0
            limits = [column_limit(m, k) for k in range(m.n_max + 2)]
            for k in range(m.n_max + 2):
                if limits[k].settled:
                    settled += 1
            for s in range(m.n_max + 1):
                if limits[s].settled and limits[s + 1].settled:
                    gap = float(np.linalg.norm(limits[s + 1].point - limits[s].point))
                    worst_limit = max(worst_limit, gap - schedule.beta(s))
            limit_excess.append(worst_limit)
            settled_counts.append(settled)

        bitwise_basic = []
        bitwise_sup = []
        sweeps_needed = -(-params.n_max // built[0][1].applications_per_sweep)
        exhaust = StoppingRule(tol=0.0, max_sweeps=sweeps_needed)
        for problem, seq, direction, m in built[: params.bitwise_instances]:
            basic = run_basic(seq, x0, exhaust, record_trajectory=True)
            sup = run_superiorized(seq, x0, schedule, direction, exhaust,
                                   target=problem.target, record_trajectory=True)
            col0 = m.basic_trajectory()
            diag = m.superiorized_trajectory()
            ok_b = all(
                basic.trajectory[n].tobytes() == col0[n].tobytes()
                for n in range(params.n_max + 1)
            )
            ok_s = all(
                sup.trajectory[n].tobytes() == diag[n].tobytes()
                for n in range(params.n_max + 1)
            )
            bitwise_basic.append(ok_b)
            bitwise_sup.append(ok_s)

    rows = []
    for j in range(params.instances):
        bb = bitwise_basic[j] if j < len(bitwise_basic) else None
        bs = bitwise_sup[j] if j < len(bitwise_sup) else None
        rows.append((j, tele[j], entry_excess[j], limit_excess[j], settled_counts[j], bb, bs))

    max_tele = max(tele)
    max_entry = max(entry_excess)
    finite_limit = [v for v in limit_excess if math.isfinite(v)]
    max_limit = max(finite_limit) if finite_limit else -math.inf
    all_bitwise = all(bitwise_basic) and all(bitwise_sup)

    criteria = [
        _crit(
            "C1",
            "row telescoping residual below 1e-9 on every random instance, within 10 s",
            max_tele < 1e-9 and tele_elapsed < 10.0,
            f"max residual {max_tele:.3e}",
        ),
        _crit(
            "C2",
            "matrix column 0 and diagonal reproduce standalone basic/superiorized runs bitwise",
            all_bitwise,
            f"basic matches {sum(bitwise_basic)}/{len(bitwise_basic)}, "
            f"superiorized matches {sum(bitwise_sup)}/{len(bitwise_sup)}",
        ),
        _crit(
            "C3",
            "adjacent-column gaps bounded by beta_s (entries +1e-12, settled limits +1e-9)",
            max_entry <= 1e-12 and max_limit <= 1e-9,
            f"worst entry excess {max_entry:.3e}, worst settled-limit excess {max_limit:.3e}, "
            f"settled columns min {min(settled_counts)}",
        ),
    ]

    tables = {
        "instances": (
            ("instance", "max_telescope_residual", "entry_bound_excess",
             "limit_bound_excess", "settled_columns", "bitwise_basic", "bitwise_sup"),
            rows,
        ),
    }
    return SuiteResult(
        suite="supmatrix-trace", seed=master_seed, criteria=criteria,
        tables=tables, elapsed_s=time.perf_counter() - t_start,
        timings={"telescoping_s": tele_elapsed},
    )


def run_com_verify(params: ComVerifyParams, master_seed: int, threads: int = 1) -> SuiteResult:
    """Monte Carlo battery for the high-dimensional concentration predictions."""
    t_start = time.perf_counter()
    rng = RngStream(master_seed, 0)
    pred_rows = []

    def add_row(cid, N, M, trials, rep):
        pred_rows.append(
            (cid, N, M, trials, rep.predicted, rep.empirical_mean,
             rep.empirical_std, rep.relative_error, master_seed)
        )

    with single_thread_blas():
        t0 = time.perf_counter()
        rep_sum = mc_sum_norm(params.norms, params.N_sum, params.trials,
                              rng.substream("sum"), threads)
        sum_elapsed = time.perf_counter() - t0
        add_row("sum-norm", params.N_sum, len(params.norms), params.trials, rep_sum)

        chain = (params.sphere_d,) * params.sphere_steps
        t0 = time.perf_counter()
        rep_chain = mc_sphere_displacement(chain, params.sphere_N, params.trials,
                                           rng.substream("sphere-chain"), threads)
        sphere_elapsed = time.perf_counter() - t0
        add_row("sphere-chain", params.sphere_N, params.sphere_steps, params.trials, rep_chain)
        rep_single = mc_sphere_displacement((params.sphere_d,), params.sphere_N,
                                            params.single_trials,
                                            rng.substream("sphere-single"), threads)
        add_row("sphere-single", params.sphere_N, 1, params.single_trials, rep_single)

        spec = rng.substream("action-spec").generator.uniform(0.0, 2.0, params.action_N)
        rep_action, rep_dist = mc_action_norm(spec, params.action_trials,
                                              rng.substream("action"), threads)
        add_row("action-norm", params.action_N, 1, params.action_trials, rep_action)
        add_row("action-distortion", params.action_N, 1, params.action_trials, rep_dist)
        rep_ones, _ = mc_action_norm(np.ones(params.action_N), params.ones_trials,
                                     rng.substream("action-ones"), threads)
        add_row("action-ones", params.action_N, 1, params.ones_trials, rep_ones)

        gram = mc_gram_identity(params.gram_N, params.gram_trials,
                                rng.substream("gram"), threads)
        add_row("gram-diag", params.gram_N, 1, params.gram_trials, gram.diag)
        add_row("gram-offdiag", params.gram_N, 1, params.gram_trials, gram.offdiag)
        add_row("gram-quadform", params.gram_N, 1, params.gram_trials, gram.quadform)

        rank1 = np.zeros(params.rank1_N)
        rank1[0] = 1.0
        rep_rank1, disc_rank1 = mc_rotation_product([rank1], params.rank1_trials,
                                                    rng.substream("rank1"), threads)
        add_row("rotation-rank1", params.rank1_N, 1, params.rank1_trials, rep_rank1)

        spec_g = rng.substream("chain-spec").generator
        chain_spectra = [spec_g.uniform(0.5, 1.5, params.chain_N)
                         for _ in range(params.chain_ops)]
        rep_chain_rot, disc_chain = mc_rotation_product(chain_spectra, params.chain_trials,
                                                        rng.substream("chain"), threads)
        add_row("rotation-chain", params.chain_N, params.chain_ops,
                params.chain_trials, rep_chain_rot)

        bound_g = rng.substream("psd-bound").generator
        psd_preds = [rep_rank1.predicted, rep_chain_rot.predicted]
        for _ in range(50):
            s = bound_g.uniform(0.0, 3.0, 40)
            psd_preds.append(predict_rotation([s]))
        for _ in range(20):
            specs = [bound_g.uniform(0.0, 3.0, 40) for _ in range(3)]
            psd_preds.append(predict_rotation(specs))
        max_psd_pred = max(psd_preds)

    c4_ok = (rep_sum.relative_error < 0.01
             and rep_sum.empirical_std / rep_sum.empirical_mean < 0.05
             and sum_elapsed < 30.0)
    c5_single_ok = (abs(rep_single.empirical_mean - rep_single.predicted) < 1e-12
                    and rep_single.empirical_std < 1e-12)
    c5_ok = rep_chain.relative_error < 0.02 and c5_single_ok and sphere_elapsed < 60.0
    sigma_ratio = rep_action.empirical_std / rep_action.empirical_mean
    c6_ok = (rep_action.relative_error < 3.0 * sigma_ratio
             and abs(rep_ones.empirical_mean - 1.0) < 1e-10)
    m_chain = params.chain_ops
    chain_tol = 3.0 * math.sqrt(m_chain) / math.sqrt(params.chain_N)
    c7_ok = (rep_rank1.relative_error < 0.05
             and rep_chain_rot.relative_error < chain_tol
             and max_psd_pred <= 2.0 + 1e-12
             and disc_rank1 == 0 and disc_chain == 0)

    criteria = [
        _crit(
            "C4",
            "norm of a sum of scaled uniform unit vectors concentrates at the root-sum-square",
            c4_ok,
            f"predicted {rep_sum.predicted:g}, mean {rep_sum.empirical_mean:.6g} "
            f"(rel err {rep_sum.relative_error:.2%}), rel std "
            f"{rep_sum.empirical_std / rep_sum.empirical_mean:.4f}",
        ),
        _crit(
            "C5",
            "fixed-chord sphere walk displacement matches its product formula; one step is exact",
            c5_ok,
            f"chain rel err {rep_chain.relative_error:.2%}; single-step "
            f"|mean-pred| {abs(rep_single.empirical_mean - rep_single.predicted):.2e}, "
            f"std {rep_single.empirical_std:.2e}",
        ),
        _crit(
            "C6",
            "random-operator action norm matches the spectrum quadratic mean; identity spectrum exact",
            c6_ok,
            f"rel err {rep_action.relative_error:.4%} vs 3*(std/mean) {3 * sigma_ratio:.4%}; "
            f"ones |mean-1| {abs(rep_ones.empirical_mean - 1.0):.2e}",
        ),
        _crit(
            "C7",
            "direction-shift predictions: rank-1 within 5%, PSD chain within 3 sqrt(M/N), bounds <= 2",
            c7_ok,
            f"rank-1 mean {rep_rank1.empirical_mean:.4f} vs {rep_rank1.predicted:g} "
            f"(rel {rep_rank1.relative_error:.2%}); chain rel {rep_chain_rot.relative_error:.2%} "
            f"vs {chain_tol:.2%}; max PSD prediction {max_psd_pred:.6f}",
        ),
    ]

    tables = {
        "predictions": (
            ("conclusion_id", "N", "M", "trials", "predicted", "mean", "std", "rel_err", "seed"),
            pred_rows,
        ),
    }
    return SuiteResult(
        suite="com-verify", seed=master_seed, criteria=criteria,
        tables=tables, elapsed_s=time.perf_counter() - t_start,
        timings={"sum_s": sum_elapsed, "sphere_s": sphere_elapsed},
    )


def run_scaling(params: ScalingParams, master_seed: int, threads: int = 1) -> SuiteResult:
    """Deviation-vs-dimension slopes for the 1/sqrt(N) concentration rate."""
    t_start = time.perf_counter()
    rng = RngStream(master_seed, 0)
    dev_rows = []
    action_devs = {}
    sphere_devs = {}

    with single_thread_blas():
        for N, n_trials in zip(params.dims, params.action_trials):
            spec = rng.substream("spec", N).generator.uniform(0.0, 2.0, N)
            rep, _ = mc_action_norm(spec, n_trials, rng.substream("action", N), threads)
            action_devs[N] = rep.empirical_std / rep.empirical_mean
            dev_rows.append(("action-rel-std", N, n_trials, action_devs[N]))
        chain = (params.sphere_d,) * params.sphere_steps
        for N in params.dims:
            rep = mc_sphere_displacement(chain, N, params.sphere_trials,
                                         rng.substream("sphere", N), threads)
            sphere_devs[N] = rep.empirical_std
            dev_rows.append(("sphere-std", N, params.sphere_trials, sphere_devs[N]))

    fit_action = fit_scaling(params.dims, lambda n: action_devs[n])
    fit_sphere = fit_scaling(params.dims, lambda n: sphere_devs[n])
    elapsed = time.perf_counter() - t_start

    def in_band(s: float) -> bool:
        return -0.65 <= s <= -0.35

    c8_ok = in_band(fit_action.slope) and in_band(fit_sphere.slope) and elapsed < 300.0
    criteria = [
        _crit(
            "C8",
            "log-log deviation-vs-dimension slopes in [-0.65, -0.35] for action and sphere walks",
            c8_ok,
            f"action slope {fit_action.slope:.3f}, sphere slope {fit_sphere.slope:.3f}",
        ),
    ]
    tables = {
        "deviations": (("family", "N", "trials", "deviation"), dev_rows),
        "fits": (
            ("family", "slope", "intercept"),
            [
                ("action-rel-std", fit_action.slope, fit_action.intercept),
                ("sphere-std", fit_sphere.slope, fit_sphere.intercept),
            ],
        ),
    }
    return SuiteResult(
        suite="scaling", seed=master_seed, criteria=criteria,
        tables=tables, elapsed_s=elapsed, timings={"total_s": elapsed},
    )


def _random_body(kind: str, dim: int, g: RngStream):
    gen = g.generator
    center = 0.5 * gaussian_vector(dim, g)
    if kind == "ball":
        return Ball(center=center, radius=0.5 + 1.5 * gen.random())
    return Ellipsoid(center=center, semi_axes=0.6 + 1.6 * gen.random(dim))


def _outside_point(body, g: RngStream) -> np.ndarray:
    gen = g.generator
    direction = uniform_sphere(body.dim, g)
    t = 0.2 + 1.8 * gen.random()
    if isinstance(body, Ball):
        return body.center + (body.radius + t) * direction
    y = body.boundary_point(direction)
    return y + t * body.unit_normal(y)


def run_projder_check(params: ProjderParams, master_seed: int, threads: int = 1) -> SuiteResult:
    """Projection-derivative oracle agreement, identities, and cascades."""
    t_start = time.perf_counter()
    rng = RngStream(master_seed, 0)

    with single_thread_blas():
        # finite-difference battery with radial annihilation and contraction
        fd_rows = []
        max_rel = 0.0
        max_radial = 0.0
        max_contract = -math.inf
        for j in range(params.fd_triples):
            g = rng.substream("fd", j)
            kind = "ball" if j % 2 == 0 else "ellipsoid"
            dim = params.fd_dims[j % len(params.fd_dims)]
            body = _random_body(kind, dim, g)
            x = _outside_point(body, g)
            w = uniform_sphere(dim, g)
            pd = projection_derivative(body, x)
            dpw = dp_apply(pd, w)
            h = 1e-5
            fd = (body.project(x + h * w) - body.project(x - h * w)) / (2.0 * h)
            rel = float(np.linalg.norm(dpw - fd) / max(np.linalg.norm(fd), 1e-30))
            radial = float(np.linalg.norm(dp_apply(pd, pd.radial)))
            contract = float(np.linalg.norm(dpw)) - float(np.linalg.norm(w))
            max_rel = max(max_rel, rel)
            max_radial = max(max_radial, radial)
            max_contract = max(max_contract, contract)
            fd_rows.append((j, kind, dim, rel, radial, contract))

        # mean-value identity on segments strictly outside the body
        mv_rows = []
        mv_ok = True
        for j in range(params.meanvalue_instances):
            g = rng.substream("meanvalue", j)
            gen = g.generator
            kind = "ball" if j % 2 == 0 else "ellipsoid"
            body = _random_body(kind, 6, g)
            direction = uniform_sphere(6, g)
            if isinstance(body, Ball):
                base = body.center + body.radius * direction
                normal = direction
            else:
                base = body.boundary_point(direction)
                normal = body.unit_normal(base)
            t0_dist = 0.4 + 0.8 * gen.random()
            x0 = base + t0_dist * normal
            w = (0.25 + 0.35 * gen.random()) * t0_dist * uniform_sphere(6, g)
            resid = mean_value_check(body, x0, x0 + w, params.meanvalue_nodes)
            thresh = 1e-8 * float(np.linalg.norm(w))
            mv_ok = mv_ok and resid < thresh
            mv_rows.append((j, kind, resid, thresh))

        # balancing-effect proposition, vectorized in chunks
        prop_rows = []
        prop_violations = 0
        for N in params.prop_dims:
            g = rng.substream("prop", N).generator
            remaining = params.prop_trials
            worst = 0.0
            viol = 0
            while remaining > 0:
                batch = min(remaining, 10000)
                v = 1.0 - g.random((batch, N - 1))
                l1 = v.mean(axis=1)
                l2sq = (v * v).mean(axis=1)
                lower_gap = l2sq - l1
                upper_gap = l1 - 0.5 * (l2sq + 1.0)
                worst = max(worst, float(lower_gap.max()), float(upper_gap.max()))
                viol += int(np.count_nonzero(lower_gap > 1e-12))
                viol += int(np.count_nonzero(upper_gap > 1e-12))
                remaining -= batch
            prop_violations += viol
            prop_rows.append((N, params.prop_trials, viol, worst))

        # rotation prediction never exceeds sqrt(2)
        path_g = rng.substream("paths").generator
        max_rot_pred = 0.0
        for j in range(params.rotation_paths):
            n_steps = 1 + (j % 4)
            steps = tuple(
                CascadeStep(float(path_g.uniform(0.0, 2.0)), path_g.uniform(0.0, 5.0, 7))
                for _ in range(n_steps)
            )
            max_rot_pred = max(max_rot_pred, cascade_rotation_prediction(CascadePath(steps)))
        rot_bound_ok = max_rot_pred <= math.sqrt(2.0) + 1e-12

        # spherical cascade Monte Carlo
        ball = Ball(center=np.zeros(params.cascade_N), radius=params.cascade_r)
        chain = [(ball, params.cascade_d)] * params.cascade_M
        w0 = uniform_sphere(params.cascade_N, rng.substream("w0"))
        cascade = mc_cascade(chain, w0, params.cascade_trials,
                             rng.substream("cascade"), threads)

    c9_ok = max_rel < 1e-5 and max_radial < 1e-12 and max_contract <= 1e-12
    c11_ok = prop_violations == 0 and rot_bound_ok
    cascade_tol = 5.0 * math.sqrt(params.cascade_M) / math.sqrt(params.cascade_N)
    c12_ok = (cascade.norm.relative_error < cascade_tol
              and cascade.rotation.empirical_mean < 0.05
              and cascade.discarded == 0)

    criteria = [
        _crit(
            "C9",
            "projection derivative matches central finite differences at 1e-5; radial kill; contraction",
            c9_ok,
            f"max FD rel err {max_rel:.2e}, max radial output {max_radial:.2e}, "
            f"max norm growth {max_contract:.2e}",
        ),
        _crit(
            "C10",
            "segment mean-value identity residual below 1e-8 |w| at 64 quadrature nodes",
            mv_ok,
            f"max residual {max(r[2] for r in mv_rows):.2e}, "
            f"min threshold {min(r[3] for r in mv_rows):.2e}",
        ),
        _crit(
            "C11",
            "norm-ratio balancing bounds never violated; rotation prediction <= sqrt(2)",
            c11_ok,
            f"violations {prop_violations}, max rotation prediction {max_rot_pred:.6f}",
        ),
        _crit(
            "C12",
            "spherical cascade: norm ratio near (1+d/r)^-M, curvature-induced rotation below 0.05",
            c12_ok,
            f"norm mean {cascade.norm.empirical_mean:.5f} vs {cascade.norm.predicted:.5f} "
            f"(rel {cascade.norm.relative_error:.2%}, tol {cascade_tol:.2%}); "
            f"rotation mean {cascade.rotation.empirical_mean:.2e}; discarded {cascade.discarded}",
        ),
    ]

    tables = {
        "fd_checks": (
            ("triple", "body", "dim", "fd_rel_err", "radial_norm", "norm_growth"),
            fd_rows,
        ),
        "meanvalue": (("instance", "body", "residual", "threshold"), mv_rows),
        "proposition": (("N", "trials", "violations", "worst_gap"), prop_rows),
        "cascade": (
            ("quantity", "N", "M", "trials", "predicted", "mean", "std", "rel_err", "seed"),
            [
                ("cascade-norm", params.cascade_N, params.cascade_M, params.cascade_trials,
                 cascade.norm.predicted, cascade.norm.empirical_mean,
                 cascade.norm.empirical_std, cascade.norm.relative_error, master_seed),
                ("cascade-rotation", params.cascade_N, params.cascade_M, params.cascade_trials,
                 cascade.rotation.predicted, cascade.rotation.empirical_mean,
                 cascade.rotation.empirical_std, cascade.rotation.relative_error, master_seed),
            ],
        ),
    }
    return SuiteResult(
        suite="projder-check", seed=master_seed, criteria=criteria,
        tables=tables, elapsed_s=time.perf_counter() - t_start, timings={},
    )


def run_linsup(params: LinsupParams, master_seed: int, threads: int = 1) -> SuiteResult:
    """Paired basic/superiorized experiments plus the drift statistic."""
    t_start = time.perf_counter()
    rng = RngStream(master_seed, 0)
    config = params.config()

    with single_thread_blas():
        t0 = time.perf_counter()
        summary = batch_experiment(config, rng.substream("batch"), threads)
        batch_elapsed = time.perf_counter() - t0
        drift = drift_experiment(
            N=params.drift_N, I=params.drift_I, ks=params.drift_ks,
            trials=params.drift_trials, margin=params.margin,
            beta0=params.drift_beta0, decay=params.decay,
            x0_radius=params.drift_radius,
            rng=rng.substream("drift-exp"), threads=threads,
        )

    outcome_rows = [
        (t, o.phi_basic, o.phi_sup, o.gap, o.residual_basic, o.residual_sup,
         o.iterations[0], o.iterations[1], o.valid)
        for t, o in enumerate(summary.outcomes)
    ]
    max_resid = max(max(o.residual_basic, o.residual_sup) for o in summary.outcomes)
    c13_ok = (summary.n_valid == config.trials
              and max_resid < 1e-6
              and summary.success_rate >= 0.95
              and summary.mean_gap > 0.0
              and batch_elapsed < 300.0)
    c14_ok = 0.35 <= drift.slope <= 0.65

    criteria = [
        _crit(
            "C13",
            "paired runs all converge below 1e-6; success rate >= 0.95; positive mean gap; within 5 min",
            c13_ok,
            f"valid {summary.n_valid}/{config.trials}, max residual {max_resid:.2e}, "
            f"success {summary.success_rate:.3f}, mean gap {summary.mean_gap:.4f}",
        ),
        _crit(
            "C14",
            "RMS drift of the propagated perturbation direction grows with exponent in [0.35, 0.65]",
            c14_ok,
            f"slope {drift.slope:.3f} over k={drift.ks}, RMS "
            + ", ".join(f"{r:.4f}" for r in drift.rms_angles),
        ),
    ]

    tables = {
        "outcomes": (
            ("trial", "phi_basic", "phi_sup", "gap", "residual_basic", "residual_sup",
             "iters_basic", "iters_sup", "valid"),
            outcome_rows,
        ),
        "summary": (
            ("trials", "n_valid", "success_rate", "mean_gap", "drift_slope", "drift_intercept"),
            [(config.trials, summary.n_valid, summary.success_rate, summary.mean_gap,
              drift.slope, drift.intercept)],
        ),
        "drift": (
            ("k", "rms_angle", "trials"),
            [(k, r, drift.trials) for k, r in zip(drift.ks, drift.rms_angles)],
        ),
        "batch_drift": (
            ("k", "rms_angle", "trials"),
            [tuple(row) for row in summary.drift_table],
        ),
    }
    return SuiteResult(
        suite="linsup", seed=master_seed, criteria=criteria,
        tables=tables, elapsed_s=time.perf_counter() - t_start,
        timings={"batch_s": batch_elapsed},
    )


_SUITE_TABLE = {
    "supmatrix-trace": (SupmatrixParams, run_supmatrix_trace),
    "com-verify": (ComVerifyParams, run_com_verify),
    "scaling": (ScalingParams, run_scaling),
    "projder-check": (ProjderParams, run_projder_check),
    "linsup": (LinsupParams, run_linsup),
}


def params_class(suite: str):
    try:
        return _SUITE_TABLE[suite][0]
    except KeyError:
        raise ConfigError(f"unknown suite: {suite}") from None


def run_suite(suite: str, params, master_seed: int, threads: int = 1) -> SuiteResult:
    try:
        _, fn = _SUITE_TABLE[suite]
    except KeyError:
        raise ConfigError(f"unknown suite: {suite}") from None
    return fn(params, master_seed, threads)
