"""Feasibility-seeking iteration and its perturbed (superiorized) version.

The basic driver iterates x_{n+1} = A_{n+1}(x_n) where the operators
cycle through relaxed projections onto the constraint sets (or take a
weighted simultaneous step). The superiorized driver applies the same
operators to x_n + beta_n v_n, with summable beta_n and bounded
perturbation directions v_n, one perturbation per operator application.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from .geometry import HalfSpace, distance as body_distance

__all__ = [
    "OperatorSequence",
    "PerturbationSchedule",
    "StoppingRule",
    "RunResult",
    "LinearTarget",
    "apply_operator",
    "residual",
    "run_basic",
    "run_superiorized",
    "nonascent_direction",
    "nonascent_rule",
]

# gradients below this norm are treated as a stationary point
_GRAD_FLOOR = 1e-14

DirectionRule = Callable[[int, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class OperatorSequence:
    """Family of feasibility operators over a list of constraint sets.

    mode "cyclic": operator t is the relaxed projection onto constraint
    t mod I. mode "simultaneous": every operator is the relaxed step
    toward the weights-combination of all projections.
    """

    constraints: tuple
    mode: str = "cyclic"
    weights: Optional[tuple] = None
    relaxation: float = 1.0

    def __post_init__(self):
        cons = tuple(self.constraints)
        if not cons:
            raise ValueError("at least one constraint is required")
        object.__setattr__(self, "constraints", cons)
        if self.mode not in ("cyclic", "simultaneous"):
            raise ValueError("mode must be 'cyclic' or 'simultaneous'")
        if not (0.0 < self.relaxation <= 2.0):
            raise ValueError("relaxation must lie in (0, 2]")
        if self.mode == "cyclic":
            if self.weights is not None:
                raise ValueError("weights are only meaningful in simultaneous mode")
        else:
            w = self.weights
            if w is None:
                w = tuple(1.0 / len(cons) for _ in cons)
            else:
                w = tuple(float(v) for v in w)
                if len(w) != len(cons):
                    raise ValueError("need one weight per constraint")
                if any(v <= 0 for v in w):
                    raise ValueError("weights must be positive")
                if abs(math.fsum(w) - 1.0) > 1e-12:
                    raise ValueError("weights must sum to 1 (1e-12)")
            object.__setattr__(self, "weights", w)

    @property
    def n_constraints(self) -> int:
        return len(self.constraints)

    @property
    def applications_per_sweep(self) -> int:
        return len(self.constraints) if self.mode == "cyclic" else 1

    @cached_property
    def _halfspace_stack(self):
        """(normals matrix, offsets) when every constraint is a half-space."""
        if all(isinstance(c, HalfSpace) for c in self.constraints):
            u = np.stack([c.normal for c in self.constraints])
            b = np.array([c.offset for c in self.constraints])
            return u, b
        return None


@dataclass(frozen=True)
class PerturbationSchedule:
    """Summable geometric perturbation sizes beta_n = beta0 * decay**n.

    beta0 = 0 is the degenerate no-perturbation schedule (the perturbed
    run then reproduces the basic run bitwise).
    """

    beta0: float = 1.0
    decay: float = 0.995

    def __post_init__(self):
        if not (np.isfinite(self.beta0) and self.beta0 >= 0):
            raise ValueError("beta0 must be >= 0 and finite")
        if not (0.0 < self.decay < 1.0):
            raise ValueError("decay must lie in (0, 1)")

    def beta(self, n: int) -> float:
        if n < 0:
            raise ValueError("n must be >= 0")
        return self.beta0 * self.decay**n

    def total(self) -> float:
        """Sum of the whole series, beta0 / (1 - decay)."""
        return self.beta0 / (1.0 - self.decay)


@dataclass(frozen=True)
class StoppingRule:
    """Stop when the feasibility residual drops below tol, checked once
    per sweep, or after max_sweeps sweeps (flagged, not an error)."""

    tol: float = 1e-8
    max_sweeps: int = 100_000

    def __post_init__(self):
        if not (np.isfinite(self.tol) and self.tol >= 0):
            raise ValueError("tol must be >= 0")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be >= 1")


@dataclass
class RunResult:
    final_point: np.ndarray
    converged: bool
    sweeps: int
    applications: int
    residual_history: np.ndarray
    phi_history: Optional[np.ndarray] = None
    trajectory: Optional[list] = None

    @property
    def residual(self) -> float:
        return float(self.residual_history[-1])


@dataclass(frozen=True)
class LinearTarget:
    """Affine target phi(x) = <c, x> + a."""

    c: np.ndarray
    a: float = 0.0

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        if c.ndim != 1 or not np.all(np.isfinite(c)):
            raise ValueError("c must be a finite vector")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "a", float(self.a))

    def value(self, x) -> float:
        return float(np.dot(self.c, x)) + self.a

    def gradient(self, x) -> np.ndarray:
        return self.c


def apply_operator(seq: OperatorSequence, t: int, x: np.ndarray) -> np.ndarray:
    """Apply operator t (0-based) of the sequence to x."""
    if t < 0:
        raise ValueError("operator index must be >= 0")
    lam = seq.relaxation
    if seq.mode == "cyclic":
        body = seq.constraints[t % seq.n_constraints]
        p = body.project(x)
        if lam == 1.0:
            return p
        return x + lam * (p - x)
    acc = None
    for w, body in zip(seq.weights, seq.constraints):
        term = w * body.project(x)
        acc = term if acc is None else acc + term
    if lam == 1.0:
        return acc
    return x + lam * (acc - x)


def residual(seq: OperatorSequence, x: np.ndarray) -> float:
    """Feasibility residual: max distance from x to any constraint set."""
    stack = seq._halfspace_stack
    if stack is not None:
        u, b = stack
        m = float(np.max(u @ x - b))
        return max(m, 0.0)
    return max(body_distance(x, c) for c in seq.constraints)


def _prepare(x0) -> np.ndarray:
    x = np.asarray(x0, dtype=float)
    if x.ndim != 1 or not np.all(np.isfinite(x)):
        raise ValueError("x0 must be a finite vector")
    return x.copy()


def run_basic(
    seq: OperatorSequence,
    x0,
    stop: StoppingRule | None = None,
    record_trajectory: bool = False,
) -> RunResult:
    """Run the unperturbed iteration until the residual drops below tol."""
    stop = stop or StoppingRule()
    x = _prepare(x0)
    traj = [x.copy()] if record_trajectory else None
    res = residual(seq, x)
    history = [res]
    apps = 0
    sweeps = 0
    converged = res < stop.tol
    while not converged and sweeps < stop.max_sweeps:
        for _ in range(seq.applications_per_sweep):
            x = apply_operator(seq, apps, x)
            apps += 1
            if traj is not None:
                traj.append(x.copy())
        sweeps += 1
        res = residual(seq, x)
        history.append(res)
        converged = res < stop.tol
    return RunResult(
        final_point=x,
        converged=converged,
        sweeps=sweeps,
        applications=apps,
        residual_history=np.array(history),
        trajectory=traj,
    )


def run_superiorized(
    seq: OperatorSequence,
    x0,
    schedule: PerturbationSchedule,
    direction: DirectionRule,
    stop: StoppingRule | None = None,
    target=None,
    record_trajectory: bool = False,
) -> RunResult:
    """Run the perturbed iteration x_{n+1} = A_{n+1}(x_n + beta_n v_n).

    One perturbation per operator application; v_n = direction(n, x_n)
    is queried at the pre-perturbation iterate. With beta0 = 0 the
    output is bitwise identical to run_basic.
    """
    stop = stop or StoppingRule()
    x = _prepare(x0)
    traj = [x.copy()] if record_trajectory else None
    res = residual(seq, x)
    history = [res]
    phis = [target.value(x)] if target is not None else None
    apps = 0
    sweeps = 0
    # unlike the basic run, a feasible start does not end the perturbed
    # iteration: the perturbation itself can (and should) still move x
    converged = False
    while not converged and sweeps < stop.max_sweeps:
        for _ in range(seq.applications_per_sweep):
            beta = schedule.beta(apps)
            if beta != 0.0:
                v = direction(apps, x)
                y = x + beta * v
            else:
                y = x
            x = apply_operator(seq, apps, y)
            apps += 1
            if traj is not None:
                traj.append(x.copy())
        sweeps += 1
        res = residual(seq, x)
        history.append(res)
        if phis is not None:
            phis.append(target.value(x))
        converged = res < stop.tol
    return RunResult(
        final_point=x,
        converged=converged,
        sweeps=sweeps,
        applications=apps,
        residual_history=np.array(history),
        phi_history=None if phis is None else np.array(phis),
        trajectory=traj,
    )


def nonascent_direction(target, x) -> np.ndarray:
    """Unit nonascent direction -grad/|grad| of the target at x (zero
    vector when the gradient norm is below 1e-14)."""
    g = np.asarray(target.gradient(x), dtype=float)
    nrm = float(np.linalg.norm(g))
    if nrm < _GRAD_FLOOR:
        return np.zeros_like(g)
    return -g / nrm


def nonascent_rule(target) -> DirectionRule:
    """Direction rule that always follows the target's nonascent direction."""

    def rule(n: int, x: np.ndarray) -> np.ndarray:
        return nonascent_direction(target, x)

    return rule
