"""Randomized linear-target experiments over half-space systems.

Generates consistent systems of half-spaces with Haar-uniform normals,
runs the basic and the superiorized iteration from a shared start, and
aggregates whether the superiorized limit achieves a target value no
worse than the basic one. The claim being tested is statistical, so
the headline numbers are a success rate and a mean gap, not a
per-instance guarantee.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ._parallel import map_trials
from .feasibility import (
    LinearTarget,
    OperatorSequence,
    PerturbationSchedule,
    StoppingRule,
    nonascent_rule,
    run_basic,
    run_superiorized,
)
from .geometry import HalfSpace
from .randgen import RngStream, uniform_sphere
from .supermatrix import streaming_drift

__all__ = [
    "LinSupProblem",
    "PairedOutcome",
    "LinSupConfig",
    "BatchSummary",
    "DriftResult",
    "gen_problem",
    "run_pair",
    "batch_experiment",
    "drift_experiment",
    "shift_target_offset",
]


@dataclass(frozen=True)
class LinSupProblem:
    """A consistent half-space system with an affine target function."""

    halfspaces: tuple
    target: LinearTarget
    witness: np.ndarray

    def __post_init__(self):
        hs = tuple(self.halfspaces)
        if not hs or not all(isinstance(h, HalfSpace) for h in hs):
            raise TypeError("halfspaces must be a nonempty tuple of HalfSpace")
        w = np.asarray(self.witness, dtype=float)
        dims = {h.dim for h in hs} | {self.target.c.size, w.size}
        if len(dims) != 1:
            raise ValueError("halfspaces, target, and witness disagree on dimension")
        object.__setattr__(self, "halfspaces", hs)
        object.__setattr__(self, "witness", w)

    @property
    def dim(self) -> int:
        return self.witness.size

    @property
    def n_constraints(self) -> int:
        return len(self.halfspaces)

    def min_slack(self) -> float:
        """Smallest witness slack across constraints (> 0 by construction)."""
        return min(-h.margin(self.witness) for h in self.halfspaces)

    def operator_sequence(self) -> OperatorSequence:
        return OperatorSequence(constraints=self.halfspaces, mode="cyclic")


@dataclass(frozen=True)
class PairedOutcome:
    """Result of one basic/superiorized paired run."""

    phi_basic: float
    phi_sup: float
    residual_basic: float
    residual_sup: float
    iterations: tuple
    valid: bool

    @property
    def gap(self) -> float:
        """Target improvement of the superiorized run (positive is better)."""
        return self.phi_basic - self.phi_sup

    @property
    def tol_phi(self) -> float:
        """Comparison tolerance absorbing floating error in the target."""
        return 1e-9 * (1.0 + abs(self.phi_basic))

    @property
    def success(self) -> bool:
        return self.valid and self.gap >= -self.tol_phi


def gen_problem(N: int, I: int, margin: float, rng: RngStream) -> LinSupProblem:
    """Draw a consistent random problem.

    A witness point is drawn uniformly in the unit ball; every
    half-space gets a Haar-uniform unit normal and an offset placing
    the witness strictly inside with slack exactly `margin`. The target
    is phi(x) = <c, x> with c uniform on the sphere.
    """
    if N < 2:
        raise ValueError("need dimension N >= 2")
    if I < 1:
        raise ValueError("need at least one half-space")
    if not (margin > 0):
        raise ValueError("margin must be positive")
    g = rng.generator
    witness = float(g.random() ** (1.0 / N)) * uniform_sphere(N, rng)
    halfspaces = []
    for _ in range(I):
        u = uniform_sphere(N, rng)
        b = float(np.dot(u, witness)) + margin
        halfspaces.append(HalfSpace(normal=u, offset=b))
    c = uniform_sphere(N, rng)
    return LinSupProblem(
        halfspaces=tuple(halfspaces),
        target=LinearTarget(c=c, a=0.0),
        witness=witness,
    )


def run_pair(
    problem: LinSupProblem,
    schedule: PerturbationSchedule | None = None,
    stop: StoppingRule | None = None,
    x0=None,
) -> PairedOutcome:
    """Run the basic and the superiorized iteration from the same start.

    Everything except the perturbations is identical; the perturbation
    direction is the normalized negative target gradient. The outcome
    is flagged invalid unless both runs converge.
    """
    schedule = schedule or PerturbationSchedule(beta0=1.0, decay=0.99)
    stop = stop or StoppingRule()
    x0 = np.zeros(problem.dim) if x0 is None else np.asarray(x0, dtype=float)
    seq = problem.operator_sequence()
    basic = run_basic(seq, x0, stop)
    sup = run_superiorized(
        seq, x0, schedule, nonascent_rule(problem.target), stop, target=problem.target
    )
    return PairedOutcome(
        phi_basic=problem.target.value(basic.final_point),
        phi_sup=problem.target.value(sup.final_point),
        residual_basic=basic.residual,
        residual_sup=sup.residual,
        iterations=(basic.sweeps, sup.sweeps),
        valid=bool(basic.converged and sup.converged),
    )


@dataclass(frozen=True)
class LinSupConfig:
    """Batch experiment parameters (JSON-mappable)."""

    N: int = 200
    I: int = 100
    trials: int = 100
    seed: int | None = None
    margin: float = 0.1
    beta0: float = 1.0
    decay: float = 0.99
    tol: float = 1e-8
    max_sweeps: int = 100000

    _KEYS = ("N", "I", "trials", "seed", "margin", "beta0", "decay", "tol", "max_sweeps")

    def __post_init__(self):
        if self.N < 2 or self.I < 1 or self.trials < 1:
            raise ValueError("need N >= 2, I >= 1, trials >= 1")
        if not (self.margin > 0):
            raise ValueError("margin must be positive")
        # schedule/stop validity is checked by the owning dataclasses
        PerturbationSchedule(beta0=self.beta0, decay=self.decay)
        StoppingRule(tol=self.tol, max_sweeps=self.max_sweeps)

    @classmethod
    def from_dict(cls, d: dict) -> "LinSupConfig":
        unknown = sorted(set(d) - set(cls._KEYS))
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**d)

    def schedule(self) -> PerturbationSchedule:
        return PerturbationSchedule(beta0=self.beta0, decay=self.decay)

    def stopping(self) -> StoppingRule:
        return StoppingRule(tol=self.tol, max_sweeps=self.max_sweeps)


@dataclass
class BatchSummary:
    outcomes: list
    success_rate: float
    mean_gap: float
    n_valid: int
    drift_table: list  # rows (k, rms_angle, trials_used)


def batch_experiment(
    config: LinSupConfig,
    rng: RngStream,
    threads: int = 1,
    drift_subsample: int = 3,
    drift_ks: tuple = (4, 8, 16),
) -> BatchSummary:
    """Run paired experiments over seeded random problems.

    Each trial draws its own problem from a per-trial substream and
    runs the pair from the origin. Success means the superiorized
    target value does not exceed the basic one beyond tol_phi. A small
    subsample is rerun through the superiorization-matrix diagnostic to
    report how fast the propagated perturbation direction drifts.
    """
    schedule = config.schedule()
    stop = config.stopping()

    def one(t: int) -> PairedOutcome:
        g = rng.substream("linsup", t)
        problem = gen_problem(config.N, config.I, config.margin, g)
        return run_pair(problem, schedule, stop)

    outcomes = map_trials(one, config.trials, threads)
    valid = [o for o in outcomes if o.valid]
    if not valid:
        raise ValueError("every paired run failed to converge")
    success_rate = sum(1 for o in valid if o.success) / len(valid)
    mean_gap = math.fsum(o.gap for o in valid) / len(valid)

    drift_rows = []
    n_sub = min(drift_subsample, config.trials)
    if n_sub > 0 and drift_ks:
        n_max = max(drift_ks)
        sums = {k: [] for k in drift_ks}
        for t in range(n_sub):
            g = rng.substream("linsup", t)
            problem = gen_problem(config.N, config.I, config.margin, g)
            rows = streaming_drift(
                problem.operator_sequence(),
                np.zeros(config.N),
                schedule,
                nonascent_rule(problem.target),
                i=0,
                n_max=n_max,
            )
            angles = {n: ang for n, ang, _ in rows}
            for k in drift_ks:
                a = angles.get(k)
                if a is not None and math.isfinite(a):
                    sums[k].append(a * a)
        for k in drift_ks:
            vals = sums[k]
            rms = math.sqrt(math.fsum(vals) / len(vals)) if vals else float("nan")
            drift_rows.append((k, rms, len(vals)))

    return BatchSummary(
        outcomes=list(outcomes),
        success_rate=success_rate,
        mean_gap=mean_gap,
        n_valid=len(valid),
        drift_table=drift_rows,
    )


@dataclass
class DriftResult:
    ks: tuple
    rms_angles: tuple
    slope: float
    intercept: float
    trials: int


def drift_experiment(
    N: int = 500,
    I: int = 100,
    ks: tuple = (4, 16, 64),
    trials: int = 100,
    margin: float = 0.1,
    beta0: float = 1e-3,
    decay: float = 0.99,
    x0_radius: float = 50.0,
    rng: RngStream | None = None,
    threads: int = 1,
) -> DriftResult:
    """Measure how the propagated perturbation direction drifts.

    Seeds a single small perturbation at step 0 from a far-out random
    start (so the projections actually act), tracks the angle between
    the propagated increment and the original direction after k
    operator applications, and fits a log-log slope of the RMS angle
    against k. Square-root growth in k shows up as a slope near 0.5.
    """
    if rng is None:
        raise ValueError("an RngStream is required")
    ks = tuple(sorted(set(int(k) for k in ks)))
    if len(ks) < 2 or ks[0] < 1:
        raise ValueError("need at least two positive step counts")
    schedule = PerturbationSchedule(beta0=beta0, decay=decay)
    n_max = max(ks)

    def one(t: int):
        g = rng.substream("drift", t)
        problem = gen_problem(N, I, margin, g)
        x0 = x0_radius * uniform_sphere(N, g)
        rows = streaming_drift(
            problem.operator_sequence(),
            x0,
            schedule,
            nonascent_rule(problem.target),
            i=0,
            n_max=n_max,
        )
        angles = {n: ang for n, ang, _ in rows}
        return [angles.get(k, float("nan")) for k in ks]

    per_trial = map_trials(one, trials, threads)
    rms = []
    for j, k in enumerate(ks):
        vals = [row[j] ** 2 for row in per_trial if math.isfinite(row[j])]
        if not vals:
            raise ValueError(f"no finite drift angles at k={k}")
        rms.append(math.sqrt(math.fsum(vals) / len(vals)))
    logk = np.log(np.asarray(ks, dtype=float))
    logr = np.log(np.asarray(rms))
    lk = logk - logk.mean()
    slope = float(np.dot(lk, logr - logr.mean()) / np.dot(lk, lk))
    intercept = float(logr.mean() - slope * logk.mean())
    return DriftResult(
        ks=ks, rms_angles=tuple(rms), slope=slope, intercept=intercept, trials=trials
    )


def shift_target_offset(problem: LinSupProblem, delta: float) -> LinSupProblem:
    """Return the same problem with the target's constant term shifted."""
    new_target = LinearTarget(c=problem.target.c, a=problem.target.a + delta)
    return replace(problem, target=new_target)
