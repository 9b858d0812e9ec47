"""Concentration predictors and the Monte Carlo estimators that verify them.

Each prediction is a closed-form high-dimensional limit; each estimator
reproduces the corresponding random experiment literally (same sampling
construction) and reports mean, spread and relative error against the
prediction. Estimators are deterministic given (stream, trials, N) and
invariant to the worker-thread count: trial t draws from substream t
and the reductions are order-exact sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ._parallel import map_trials
from .geometry import prob_lp_norm
from .randgen import (
    RngStream,
    matrix_with_singular_values,
    random_orthogonal,
    sphere_markov_step,
    uniform_sphere,
)

__all__ = [
    "PredictionReport",
    "GramIdentityReport",
    "ScalingFit",
    "predict_sum_norm",
    "mc_sum_norm",
    "predict_sphere_displacement_sq",
    "mc_sphere_displacement",
    "mc_gram_identity",
    "predict_action_norm",
    "predict_distortion_variance",
    "mc_action_norm",
    "predict_rotation",
    "mc_rotation_product",
    "fit_scaling",
]


@dataclass(frozen=True)
class PredictionReport:
    """Predicted value vs the empirical distribution of a statistic."""

    predicted: float
    empirical_mean: float
    empirical_std: float
    trials: int
    N: int
    relative_error: float

    @classmethod
    def from_samples(cls, values: Sequence[float], predicted: float, N: int) -> "PredictionReport":
        n = len(values)
        if n < 1:
            raise ValueError("need at least one sample")
        mean = math.fsum(values) / n
        if n > 1:
            var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
            std = math.sqrt(var)
        else:
            std = 0.0
        rel = abs(mean - predicted) / max(abs(predicted), 1e-30)
        return cls(
            predicted=float(predicted),
            empirical_mean=mean,
            empirical_std=std,
            trials=n,
            N=int(N),
            relative_error=rel,
        )


@dataclass(frozen=True)
class GramIdentityReport:
    """Deviation of (1/N) Y^T Y from the identity for Gaussian Y.

    diag: per-trial mean of the diagonal entries (predicted 1).
    offdiag: per-trial RMS of the off-diagonal entries (predicted
    1/sqrt(N), the exact entrywise std).
    quadform: <(A - I)u, v> for independent random unit u, v (predicted
    0; its spread is reported, not asserted against a rate).
    """

    diag: PredictionReport
    offdiag: PredictionReport
    quadform: PredictionReport
    max_abs_dev: float
    rms_dev: float


@dataclass(frozen=True)
class ScalingFit:
    dims: tuple
    deviations: tuple
    slope: float
    intercept: float


def _check_steps(steps) -> np.ndarray:
    d = np.asarray(steps, dtype=float)
    if d.ndim != 1 or d.size < 1:
        raise ValueError("need a nonempty list of step sizes")
    if not np.all(np.isfinite(d)) or np.any(d < 0):
        raise ValueError("step sizes must be finite and >= 0")
    return d


def predict_sum_norm(norms) -> float:
    """Norm of a sum of independent uniformly-oriented vectors with the
    given norms: sqrt(sum d_i^2)."""
    d = _check_steps(norms)
    return math.sqrt(math.fsum(float(v) ** 2 for v in d))


def mc_sum_norm(
    norms, N: int, trials: int, rng: RngStream, threads: int = 1
) -> PredictionReport:
    """Sample |sum_i d_i u_i| with u_i independent uniform unit vectors."""
    d = _check_steps(norms)
    if N < 2:
        raise ValueError("N must be >= 2")

    def one(t: int) -> float:
        g = rng.substream(t)
        total = np.zeros(N)
        for di in d:
            total = total + di * uniform_sphere(N, g)
        return float(np.linalg.norm(total))

    values = map_trials(one, trials, threads)
    return PredictionReport.from_samples(values, predict_sum_norm(d), N)


def predict_sphere_displacement_sq(steps) -> float:
    """Expected squared displacement of the fixed-chord sphere walk:
    2 (1 - prod_i (1 - d_i^2 / 2))."""
    d = _check_steps(steps)
    if np.any(d > 2.0):
        raise ValueError("chord lengths cannot exceed 2 on the unit sphere")
    prod = 1.0
    for di in d:
        prod *= 1.0 - di * di / 2.0
    return 2.0 * (1.0 - prod)


def mc_sphere_displacement(
    steps, N: int, trials: int, rng: RngStream, threads: int = 1
) -> PredictionReport:
    """Sample |u_M - u_0|^2 along the fixed-chord sphere walk."""
    d = _check_steps(steps)
    if np.any(d > 2.0):
        raise ValueError("chord lengths cannot exceed 2 on the unit sphere")
    if N < 3:
        raise ValueError("N must be >= 3")

    def one(t: int) -> float:
        g = rng.substream(t)
        u0 = uniform_sphere(N, g)
        u = u0
        for di in d:
            u = sphere_markov_step(u, di, g)
        diff = u - u0
        return float(np.dot(diff, diff))

    values = map_trials(one, trials, threads)
    return PredictionReport.from_samples(values, predict_sphere_displacement_sq(d), N)


def mc_gram_identity(
    N: int, trials: int, rng: RngStream, threads: int = 1
) -> GramIdentityReport:
    """Measure how far (1/N) Y^T Y sits from the identity, Y Gaussian NxN."""
    if N < 2:
        raise ValueError("N must be >= 2")

    def one(t: int):
        g = rng.substream(t)
        y = g.generator.standard_normal((N, N))
        a = (y.T @ y) / N
        e = a - np.eye(N)
        dg = np.diagonal(a)
        off = e[~np.eye(N, dtype=bool)]
        u = uniform_sphere(N, g)
        v = uniform_sphere(N, g)
        return (
            float(np.mean(dg)),
            float(np.sqrt(np.mean(off * off))),
            float(u @ (e @ v)),
            float(np.max(np.abs(e))),
            float(np.sqrt(np.mean(e * e))),
        )

    rowsets = map_trials(one, trials, threads)
    diag = PredictionReport.from_samples([r[0] for r in rowsets], 1.0, N)
    offd = PredictionReport.from_samples([r[1] for r in rowsets], 1.0 / math.sqrt(N), N)
    quad = PredictionReport.from_samples([r[2] for r in rowsets], 0.0, N)
    return GramIdentityReport(
        diag=diag,
        offdiag=offd,
        quadform=quad,
        max_abs_dev=math.fsum(r[3] for r in rowsets) / len(rowsets),
        rms_dev=math.fsum(r[4] for r in rowsets) / len(rowsets),
    )


def predict_action_norm(s) -> float:
    """Norm multiplier of a random matrix with singular values s acting
    on a unit vector: the probability-normalized l2 norm of s."""
    return prob_lp_norm(np.asarray(s, dtype=float), 2.0)


def predict_distortion_variance(s) -> float:
    """Variance of the normalized inner-product distortion
    <Tu, Tv>/pred^2 - <u, v>: (1/N) ((|s~|_4)^4 - 1) for s~ = s/pred,
    with probability-normalized norms."""
    s = np.asarray(s, dtype=float)
    pred = predict_action_norm(s)
    if pred <= 0:
        raise ValueError("spectrum must be nonzero")
    s_t = s / pred
    return (prob_lp_norm(s_t, 4.0) ** 4 - 1.0) / s.size


def mc_action_norm(
    s, trials: int, rng: RngStream, threads: int = 1
) -> tuple[PredictionReport, PredictionReport]:
    """Sample |T v| for T with prescribed singular values and Haar
    factors, plus the inner-product distortion <Tu,Tv>/pred^2 - <u,v>.

    Returns (norm report, distortion report); the distortion's predicted
    value is 0 and its variance is compared against
    predict_distortion_variance by the callers that assert on it.
    """
    s = np.asarray(s, dtype=float)
    n = s.size
    if n < 2:
        raise ValueError("spectrum dimension must be >= 2")
    pred = predict_action_norm(s)
    if pred <= 0:
        raise ValueError("spectrum must be nonzero")

    def one(t: int):
        g = rng.substream(t)
        mat = matrix_with_singular_values(s, g)
        v = uniform_sphere(n, g)
        u = uniform_sphere(n, g)
        tv = mat @ v
        tu = mat @ u
        val = float(np.linalg.norm(tv))
        dist = float(np.dot(tu, tv)) / (pred * pred) - float(np.dot(u, v))
        return val, dist

    pairs = map_trials(one, trials, threads)
    norm_report = PredictionReport.from_samples([p[0] for p in pairs], pred, n)
    dist_report = PredictionReport.from_samples([p[1] for p in pairs], 0.0, n)
    return norm_report, dist_report


def _spectra_list(spectra) -> list:
    out = [np.asarray(s, dtype=float) for s in spectra]
    if not out:
        raise ValueError("need at least one spectrum")
    n = out[0].size
    for s in out:
        if s.ndim != 1 or s.size != n:
            raise ValueError("spectra must be vectors of one common dimension")
        if not np.all(np.isfinite(s)):
            raise ValueError("spectra must be finite")
    return out


def predict_rotation(spectra, psd: bool = True) -> float:
    """Expected squared normalized-direction displacement caused by a
    product of independent random symmetric operators.

    2 (1 - prod_i mean(s_i) / |s_i|_2) with probability-normalized
    norms and the signed eigenvalue mean; for psd=True the spectra must
    be nonnegative (mean(s) is then |s|_1) and the value lies in [0, 2].
    """
    specs = _spectra_list(spectra)
    prod = 1.0
    for s in specs:
        if psd and np.any(s < 0):
            raise ValueError("psd=True requires nonnegative spectra")
        rms = prob_lp_norm(s, 2.0)
        if rms <= 0:
            raise ValueError("spectra must be nonzero")
        prod *= float(np.mean(s)) / rms
    return 2.0 * (1.0 - prod)


def mc_rotation_product(
    spectra, trials: int, rng: RngStream, threads: int = 1, psd: bool = True
) -> tuple[PredictionReport, int]:
    """Sample |y/|y| - v|^2 for y = A_M ... A_1 v, each A_i an
    independently conjugated symmetric operator with the given spectrum.

    Trials whose output collapses to zero are discarded and counted;
    returns (report, discarded).
    """
    specs = _spectra_list(spectra)
    n = specs[0].size
    if n < 2:
        raise ValueError("spectrum dimension must be >= 2")
    pred = predict_rotation(specs, psd=psd)

    def one(t: int):
        g = rng.substream(t)
        v = uniform_sphere(n, g)
        y = v
        for s in specs:
            u = random_orthogonal(n, g)
            y = u.T @ (s * (u @ y))
        nrm = float(np.linalg.norm(y))
        if nrm < 1e-300:
            return None
        diff = y / nrm - v
        return float(np.dot(diff, diff))

    raw = map_trials(one, trials, threads)
    values = [r for r in raw if r is not None]
    discarded = len(raw) - len(values)
    if not values:
        raise ValueError("every trial collapsed to zero output")
    return PredictionReport.from_samples(values, pred, n), discarded


def fit_scaling(dims: Sequence[int], measure: Callable[[int], float]) -> ScalingFit:
    """Least-squares slope of log(deviation) against log(N).

    Needs at least 3 dimensions, each >= 16; nonpositive deviations are
    excluded, and fewer than 3 surviving points is an error.
    """
    dims = [int(n) for n in dims]
    if len(dims) < 3:
        raise ValueError("need at least 3 dimensions")
    if any(n < 16 for n in dims):
        raise ValueError("dimensions must be >= 16")
    pts = []
    for n in dims:
        dev = float(measure(n))
        if dev > 0 and np.isfinite(dev):
            pts.append((n, dev))
    if len(pts) < 3:
        raise ValueError("fewer than 3 positive deviations; cannot fit")
    lx = np.log([p[0] for p in pts])
    ly = np.log([p[1] for p in pts])
    lx_c = lx - lx.mean()
    slope = float(np.dot(lx_c, ly - ly.mean()) / np.dot(lx_c, lx_c))
    intercept = float(ly.mean() - slope * lx.mean())
    return ScalingFit(
        dims=tuple(p[0] for p in pts),
        deviations=tuple(p[1] for p in pts),
        slope=slope,
        intercept=intercept,
    )
