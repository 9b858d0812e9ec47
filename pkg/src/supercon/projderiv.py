"""Derivative of the metric projection onto smooth bodies, and cascades.

For x strictly outside a smooth convex body at distance d, the
projection's derivative annihilates the radial direction and acts as
(I + d K)^{-1} on the tangent hyperplane at the projected point, K
being the boundary's shape operator there. Cascading such derivatives
multiplies norms by predictable spectral factors and tilts directions
by a predictable amount; both predictions are implemented here next to
the estimator that checks them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._parallel import map_trials
from .concentration import PredictionReport
from .geometry import Ball, Ellipsoid, curvature_operator, prob_lp_norm
from .randgen import RngStream, uniform_sphere

__all__ = [
    "ProjectionDerivative",
    "projection_derivative",
    "dp_apply",
    "mean_value_check",
    "CascadeStep",
    "CascadePath",
    "cascade_norm_prediction",
    "cascade_rotation_prediction",
    "norm_ratio_bounds",
    "CascadeResult",
    "mc_cascade",
]


@dataclass
class ProjectionDerivative:
    """Projection derivative data at a point strictly outside a body."""

    body: object
    x: np.ndarray
    projected: np.ndarray
    dist: float
    radial: np.ndarray  # unit vector from projected point to x


def projection_derivative(body, x) -> ProjectionDerivative:
    """Evaluate the projection and its derivative frame at x.

    x must be strictly outside the body (Ball or Ellipsoid).
    """
    if not isinstance(body, (Ball, Ellipsoid)):
        raise TypeError("projection derivative needs a smooth body (Ball, Ellipsoid)")
    x = np.asarray(x, dtype=float)
    p = body.project(x)
    diff = x - p
    d = float(np.linalg.norm(diff))
    scale = 1.0 + float(np.linalg.norm(x))
    if d <= 1e-12 * scale:
        raise ValueError("x must lie strictly outside the body")
    return ProjectionDerivative(body=body, x=x.copy(), projected=p, dist=d, radial=diff / d)


def dp_apply(pd: ProjectionDerivative, w) -> np.ndarray:
    """Apply the projection derivative at pd.x to a vector w.

    The radial component of w is annihilated; the tangential component
    gets (I + d K)^{-1} with K the shape operator at the projected
    point. Balls reduce to the scalar factor r/(r+d); ellipsoids solve
    the tangential linear system directly.
    """
    w = np.asarray(w, dtype=float)
    r_hat = pd.radial
    w_tan = w - np.dot(w, r_hat) * r_hat
    body = pd.body
    if isinstance(body, Ball):
        return (body.radius / (body.radius + pd.dist)) * w_tan
    # ellipsoid: solve (I + (d/|g|) P D P) z = w_tan, P the tangential
    # projector and D the diagonal level-gradient factor; the system is
    # block diagonal so the solution stays tangential
    a2 = body.semi_axes * body.semi_axes
    dvec = 1.0 / a2
    g = dvec * (pd.projected - body.center)
    gn = float(np.linalg.norm(g))
    n = w.size
    p = np.eye(n) - np.outer(r_hat, r_hat)
    m = np.eye(n) + (pd.dist / gn) * (p @ (dvec[:, None] * p))
    z = np.linalg.solve(m, w_tan)
    return z - np.dot(z, r_hat) * r_hat


def _fd_projection(body, x, w, h: float = 1e-5) -> np.ndarray:
    """Central finite difference of the projection map (test oracle)."""
    return (body.project(x + h * w) - body.project(x - h * w)) / (2.0 * h)


def mean_value_check(body, x0, x1, nodes: int = 64) -> float:
    """Residual of the segment mean-value identity for the projection.

    |P(x1) - P(x0) - int_0^1 DP(x0 + t w) w dt| with Gauss-Legendre
    quadrature; the whole segment must stay strictly outside the body.
    """
    x0 = np.asarray(x0, dtype=float)
    x1 = np.asarray(x1, dtype=float)
    w = x1 - x0
    if nodes < 2:
        raise ValueError("need at least 2 quadrature nodes")
    # verify the segment stays outside on a fine grid (plus endpoints)
    for t in np.linspace(0.0, 1.0, 257):
        if body.distance(x0 + t * w) <= 0.0:
            raise ValueError("segment touches the body; identity undefined")
    gl_x, gl_w = np.polynomial.legendre.leggauss(nodes)
    ts = 0.5 * (gl_x + 1.0)
    weights = 0.5 * gl_w
    integral = np.zeros_like(w)
    for t, wt in zip(ts, weights):
        pd = projection_derivative(body, x0 + t * w)
        integral = integral + wt * dp_apply(pd, w)
    resid = body.project(x1) - body.project(x0) - integral
    return float(np.linalg.norm(resid))


@dataclass(frozen=True)
class CascadeStep:
    """One cascade stage: projection distance and the principal
    curvatures at the projected point."""

    distance: float
    curvature_eigs: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.curvature_eigs, dtype=float)
        if k.ndim != 1 or k.size < 1:
            raise ValueError("curvature_eigs must be a nonempty vector")
        if not np.all(np.isfinite(k)) or np.any(k < 0):
            raise ValueError("curvatures must be finite and >= 0")
        if not (np.isfinite(self.distance) and self.distance >= 0):
            raise ValueError("distance must be >= 0")
        object.__setattr__(self, "curvature_eigs", k.copy())

    def factors(self) -> np.ndarray:
        """Spectral factors (1 + d k_l)^{-1} in (0, 1]."""
        return 1.0 / (1.0 + self.distance * self.curvature_eigs)


@dataclass(frozen=True)
class CascadePath:
    steps: tuple

    def __post_init__(self):
        st = tuple(self.steps)
        if not st:
            raise ValueError("a cascade needs at least one step")
        if not all(isinstance(s, CascadeStep) for s in st):
            raise TypeError("steps must be CascadeStep instances")
        object.__setattr__(self, "steps", st)


def cascade_norm_prediction(path: CascadePath) -> float:
    """Expected norm multiplier of the cascade: the product over steps
    of the probability-normalized l2 norm of the spectral factors."""
    prod = 1.0
    for s in path.steps:
        prod *= prob_lp_norm(s.factors(), 2.0)
    return prod


def cascade_rotation_prediction(path: CascadePath) -> float:
    """Expected direction tilt caused by the spectral factors:
    sqrt(2 (1 - prod_k |v_k|_1 / |v_k|_2)), always < sqrt(2)."""
    prod = 1.0
    for s in path.steps:
        v = s.factors()
        prod *= prob_lp_norm(v, 1.0) / prob_lp_norm(v, 2.0)
    return math.sqrt(2.0 * (1.0 - prod))


def norm_ratio_bounds(v) -> tuple[float, float, float]:
    """Balancing-effect interval for |v|_1/|v|_2 over v in (0, 1]^m.

    Returns (lower, upper, ratio) with lower = |v|_2 and
    upper = (|v|_2 + 1/|v|_2)/2, probability-normalized norms.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size < 1:
        raise ValueError("v must be a nonempty vector")
    if np.any(v <= 0) or np.any(v > 1):
        raise ValueError("entries must lie in (0, 1]")
    l2 = prob_lp_norm(v, 2.0)
    ratio = prob_lp_norm(v, 1.0) / l2
    return l2, 0.5 * (l2 + 1.0 / l2), ratio


@dataclass
class CascadeResult:
    norm: PredictionReport
    rotation: PredictionReport
    discarded: int


def _sample_stance(body, dstep: float, g: RngStream):
    """Random placement at distance dstep outside the body: boundary
    point along a uniform ray from the center, stepped out along the
    outward normal."""
    if isinstance(body, Ball):
        rho = uniform_sphere(body.dim, g)
        y = body.center + body.radius * rho
        return y, rho
    rho = uniform_sphere(body.dim, g)
    y = body.boundary_point(rho)
    return y, body.unit_normal(y)


def mc_cascade(
    body_chain, w0, trials: int, rng: RngStream, threads: int = 1
) -> CascadeResult:
    """Run projection-derivative cascades at random placements.

    body_chain is a sequence of (body, distance) stages; each trial
    places every stage at an independent random orientation, pushes w0
    through the actual dp_apply chain, and compares (a) the raw norm
    ratio |w_M|/|w_0| against cascade_norm_prediction and (b) the
    direction tilt attributable to the curvature factors against
    cascade_rotation_prediction. The tilt is isolated by running a
    reference chain that applies the same sampled tangential projections
    with the curvature factor switched off; for spheres the two chains
    stay parallel and the measured tilt is zero. Trials that collapse
    to a zero vector are discarded and counted.
    """
    chain = list(body_chain)
    if not chain:
        raise ValueError("body chain must be nonempty")
    w0 = np.asarray(w0, dtype=float)
    nw0 = float(np.linalg.norm(w0))
    if nw0 < 1e-300:
        raise ValueError("w0 must be nonzero")

    def one(t: int):
        g = rng.substream(t)
        w = w0.copy()
        ref = w0.copy()
        steps = []
        for body, dstep in chain:
            y, normal = _sample_stance(body, float(dstep), g)
            x = y + float(dstep) * normal
            pd = projection_derivative(body, x)
            w = dp_apply(pd, w)
            ref = ref - np.dot(ref, pd.radial) * pd.radial
            if isinstance(body, Ball):
                eigs = np.full(body.dim - 1, 1.0 / body.radius)
            else:
                eigs = curvature_operator(body, y).eigenvalues()
            steps.append(CascadeStep(float(dstep), eigs))
        nw = float(np.linalg.norm(w))
        nref = float(np.linalg.norm(ref))
        if nw < 1e-300 or nref < 1e-300:
            return None
        path = CascadePath(tuple(steps))
        tilt = float(np.linalg.norm(w / nw - ref / nref))
        return (
            nw / nw0,
            cascade_norm_prediction(path),
            tilt,
            cascade_rotation_prediction(path),
        )

    raw = map_trials(one, trials, threads)
    kept = [r for r in raw if r is not None]
    discarded = len(raw) - len(kept)
    if not kept:
        raise ValueError("every cascade trial collapsed to zero")
    n_dim = chain[0][0].dim
    pred_norm = math.fsum(r[1] for r in kept) / len(kept)
    pred_rot = math.fsum(r[3] for r in kept) / len(kept)
    norm_rep = PredictionReport.from_samples([r[0] for r in kept], pred_norm, n_dim)
    rot_rep = PredictionReport.from_samples([r[2] for r in kept], pred_rot, n_dim)
    return CascadeResult(norm=norm_rep, rotation=rot_rep, discarded=discarded)
