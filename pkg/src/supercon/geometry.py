"""Convex constraint sets: projections, distances, curvature.

Vectors are 1-D float64 numpy arrays. All norms written ``prob_lp_norm``
are probability-normalized: the p-th mean of the absolute entries, i.e.
((1/N) sum |x_j|^p)^(1/p), nondecreasing in p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "prob_lp_norm",
    "HalfSpace",
    "Ball",
    "Ellipsoid",
    "HalfSpaceSet",
    "CurvatureOperator",
    "project",
    "distance",
    "curvature_operator",
    "body_to_dict",
    "body_from_dict",
]

BOUNDARY_TOL = 1e-9


def _vec(x, name: str = "x") -> np.ndarray:
    a = np.asarray(x, dtype=float)
    if a.ndim != 1 or a.size < 1:
        raise ValueError(f"{name} must be a 1-D vector")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} must have finite entries")
    return a


def _frozen(a: np.ndarray) -> np.ndarray:
    a = a.copy()
    a.setflags(write=False)
    return a


def prob_lp_norm(x, p: float) -> float:
    """Probability-normalized L^p norm ((1/N) sum |x_j|^p)^(1/p), p >= 1."""
    x = _vec(x)
    p = float(p)
    if p < 1.0:
        raise ValueError("p must be >= 1")
    m = float(np.max(np.abs(x)))
    if m == 0.0:
        return 0.0
    scaled = np.abs(x) / m
    return m * float(np.mean(scaled**p)) ** (1.0 / p)


@dataclass(frozen=True)
class HalfSpace:
    """Closed half-space {y : <normal, y> <= offset} with unit normal."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = _vec(self.normal, "normal")
        if abs(np.linalg.norm(n) - 1.0) > 1e-12:
            raise ValueError("normal must be a unit vector (1e-12)")
        if not np.isfinite(self.offset):
            raise ValueError("offset must be finite")
        object.__setattr__(self, "normal", _frozen(n))
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def dim(self) -> int:
        return self.normal.size

    def margin(self, x) -> float:
        """Signed constraint value <normal, x> - offset (<= 0 means feasible)."""
        return float(np.dot(self.normal, _vec(x))) - self.offset

    def contains(self, x, tol: float = BOUNDARY_TOL) -> bool:
        return self.margin(x) <= tol

    def distance(self, x) -> float:
        return max(0.0, self.margin(x))

    def project(self, x) -> np.ndarray:
        x = _vec(x)
        m = float(np.dot(self.normal, x)) - self.offset
        if m <= 0.0:
            return x.copy()
        return x - m * self.normal


@dataclass(frozen=True)
class Ball:
    """Closed Euclidean ball with positive radius."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = _vec(self.center, "center")
        if not (np.isfinite(self.radius) and self.radius > 0):
            raise ValueError("radius must be positive and finite")
        object.__setattr__(self, "center", _frozen(c))
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self) -> int:
        return self.center.size

    def contains(self, x, tol: float = BOUNDARY_TOL) -> bool:
        return self.distance(x) <= tol

    def distance(self, x) -> float:
        return max(0.0, float(np.linalg.norm(_vec(x) - self.center)) - self.radius)

    def project(self, x) -> np.ndarray:
        x = _vec(x)
        z = x - self.center
        nrm = float(np.linalg.norm(z))
        if nrm <= self.radius:
            return x.copy()
        return self.center + (self.radius / nrm) * z

    def unit_normal(self, y) -> np.ndarray:
        """Outward unit normal at a boundary point."""
        z = _vec(y) - self.center
        nrm = float(np.linalg.norm(z))
        if nrm < _tiny(self.radius):
            raise ValueError("normal undefined at the center")
        return z / nrm


def _tiny(scale: float) -> float:
    return 1e-14 * max(1.0, scale)


@dataclass(frozen=True)
class Ellipsoid:
    """Axis-aligned solid ellipsoid {y : sum ((y_i-c_i)/a_i)^2 <= 1}."""

    center: np.ndarray
    semi_axes: np.ndarray

    def __post_init__(self):
        c = _vec(self.center, "center")
        a = _vec(self.semi_axes, "semi_axes")
        if a.size != c.size:
            raise ValueError("semi_axes and center must have the same dimension")
        if np.any(a <= 0):
            raise ValueError("semi-axes must be positive")
        object.__setattr__(self, "center", _frozen(c))
        object.__setattr__(self, "semi_axes", _frozen(a))

    @property
    def dim(self) -> int:
        return self.center.size

    def level(self, x) -> float:
        """sum ((x_i-c_i)/a_i)^2; 1 on the boundary."""
        z = (_vec(x) - self.center) / self.semi_axes
        return float(np.dot(z, z))

    def contains(self, x, tol: float = BOUNDARY_TOL) -> bool:
        if self.level(x) <= 1.0:
            return True
        return self.distance(x) <= tol

    def project(self, x) -> np.ndarray:
        """Metric projection via the scalar multiplier equation.

        For x outside, the projection is c + a_i^2 z_i / (a_i^2 + lam)
        with lam > 0 the unique root of
        f(lam) = sum a_i^2 z_i^2 / (a_i^2 + lam)^2 - 1; solved by
        safeguarded Newton with a bisection fallback to |f| <= 1e-12.
        """
        x = _vec(x)
        z = x - self.center
        a2 = self.semi_axes * self.semi_axes
        if self.level(x) <= 1.0:
            return x.copy()
        w2 = a2 * z * z  # a_i^2 z_i^2

        def f_df(lam: float):
            den = a2 + lam
            r = w2 / (den * den)
            return float(np.sum(r)) - 1.0, float(-2.0 * np.sum(r / den))

        lo, hi = 0.0, float(np.sqrt(np.sum(w2)))
        # f(lo) > 0 (x outside), f(hi) < 0: bracket is valid from the start
        lam = 0.0
        fval, dval = f_df(lam)
        for _ in range(200):
            if abs(fval) <= 1e-12:
                break
            if fval > 0.0:
                lo = lam
            else:
                hi = lam
            step_ok = dval < 0.0
            if step_ok:
                cand = lam - fval / dval
                step_ok = lo < cand < hi
            lam = cand if step_ok else 0.5 * (lo + hi)
            fval, dval = f_df(lam)
            if hi - lo <= 1e-17 * max(1.0, hi):
                break
        return self.center + (a2 * z) / (a2 + lam)

    def distance(self, x) -> float:
        x = _vec(x)
        if self.level(x) <= 1.0:
            return 0.0
        return float(np.linalg.norm(x - self.project(x)))

    def unit_normal(self, y) -> np.ndarray:
        """Outward unit normal of the boundary, from the level gradient."""
        g = (_vec(y) - self.center) / (self.semi_axes * self.semi_axes)
        nrm = float(np.linalg.norm(g))
        if nrm < 1e-300:
            raise ValueError("normal undefined at the center")
        return g / nrm

    def boundary_point(self, direction) -> np.ndarray:
        """Boundary point along a ray from the center."""
        d = _vec(direction, "direction")
        q = d / self.semi_axes
        s = float(np.dot(q, q))
        if s < 1e-300:
            raise ValueError("direction must be nonzero")
        return self.center + d / math.sqrt(s)


@dataclass(frozen=True)
class HalfSpaceSet:
    """Intersection of finitely many half-spaces, treated as one body."""

    halfspaces: tuple

    def __post_init__(self):
        hs = tuple(self.halfspaces)
        if not hs:
            raise ValueError("at least one half-space is required")
        if not all(isinstance(h, HalfSpace) for h in hs):
            raise TypeError("halfspaces must be HalfSpace instances")
        dims = {h.dim for h in hs}
        if len(dims) != 1:
            raise ValueError("half-spaces must share one dimension")
        object.__setattr__(self, "halfspaces", hs)

    @property
    def dim(self) -> int:
        return self.halfspaces[0].dim

    def contains(self, x, tol: float = BOUNDARY_TOL) -> bool:
        return all(h.contains(x, tol) for h in self.halfspaces)

    def project(self, x, tol: float = 1e-12, max_cycles: int = 20000) -> np.ndarray:
        """Metric projection via Dykstra's alternating projections.

        Converges to the exact projection onto the intersection; stops
        once a full cycle moves the iterate by less than tol relative to
        its scale. Raises RuntimeError if the cap is hit first.
        """
        x = _vec(x)
        if self.contains(x, 0.0):
            return x.copy()
        y = x.copy()
        incs = [np.zeros_like(x) for _ in self.halfspaces]
        scale = 1.0 + float(np.linalg.norm(x))
        for _ in range(max_cycles):
            start = y.copy()
            for j, h in enumerate(self.halfspaces):
                w = y + incs[j]
                y = h.project(w)
                incs[j] = w - y
            if float(np.linalg.norm(y - start)) <= tol * scale:
                return y
        raise RuntimeError("Dykstra projection did not converge")

    def distance(self, x) -> float:
        x = _vec(x)
        if self.contains(x, 0.0):
            return 0.0
        return float(np.linalg.norm(x - self.project(x)))


def project(x, body) -> np.ndarray:
    """Metric projection of x onto the body."""
    return body.project(x)


def distance(x, body) -> float:
    """Euclidean distance from x to the body (0 inside)."""
    return body.distance(x)


@dataclass
class CurvatureOperator:
    """Shape operator of a smooth boundary at a point, acting on its
    tangent hyperplane.

    Symmetric and positive semidefinite for the convex bodies here; the
    application is implicit (O(N) for balls, O(N^2) per apply for
    ellipsoids) and eigenvalues are computed on demand.
    """

    body: object
    base_point: np.ndarray
    normal: np.ndarray
    _eigs: np.ndarray | None = field(default=None, repr=False)

    def _tangent(self, w: np.ndarray) -> np.ndarray:
        return w - np.dot(w, self.normal) * self.normal

    def apply(self, w) -> np.ndarray:
        """Apply the operator to a tangent vector (inputs are projected
        onto the tangent hyperplane first)."""
        w = self._tangent(_vec(w, "w"))
        b = self.body
        if isinstance(b, Ball):
            return w / b.radius
        # ellipsoid: derivative of the unit normal field n(y) = g/|g|,
        # g = D(y-c), restricted to the tangent hyperplane
        d = 1.0 / (b.semi_axes * b.semi_axes)
        g = d * (self.base_point - b.center)
        gn = float(np.linalg.norm(g))
        out = (d * w) / gn
        return self._tangent(out)

    def eigenvalues(self) -> np.ndarray:
        """Principal curvatures (N-1 values, ascending)."""
        if self._eigs is None:
            b = self.body
            n = self.normal.size
            if isinstance(b, Ball):
                self._eigs = np.full(n - 1, 1.0 / b.radius)
            else:
                basis = _tangent_basis(self.normal)
                d = 1.0 / (b.semi_axes * b.semi_axes)
                g = d * (self.base_point - b.center)
                gn = float(np.linalg.norm(g))
                red = (basis.T * d) @ basis / gn
                self._eigs = np.linalg.eigvalsh(red)
        return self._eigs


def _tangent_basis(normal: np.ndarray) -> np.ndarray:
    """Orthonormal basis (columns) of the hyperplane orthogonal to normal."""
    n = normal.size
    # Householder reflector mapping e1 -> normal: its remaining columns
    # span the tangent hyperplane
    v = normal.copy()
    v[0] += math.copysign(1.0, normal[0] if normal[0] != 0 else 1.0)
    v /= np.linalg.norm(v)
    h = np.eye(n) - 2.0 * np.outer(v, v)
    return h[:, 1:]


def curvature_operator(body, boundary_point) -> CurvatureOperator:
    """Shape operator of the body's boundary at the given point.

    The point must lie on the boundary within 1e-9 (relative to the
    body's scale); only smooth bodies (Ball, Ellipsoid) are supported.
    """
    y = _vec(boundary_point, "boundary_point")
    if isinstance(body, Ball):
        err = abs(float(np.linalg.norm(y - body.center)) - body.radius)
        if err > BOUNDARY_TOL * max(1.0, body.radius):
            raise ValueError("point is not on the boundary (1e-9)")
        return CurvatureOperator(body, y.copy(), body.unit_normal(y))
    if isinstance(body, Ellipsoid):
        if abs(body.level(y) - 1.0) > BOUNDARY_TOL * 4.0:
            raise ValueError("point is not on the boundary (1e-9)")
        return CurvatureOperator(body, y.copy(), body.unit_normal(y))
    raise TypeError("curvature is defined for smooth bodies (Ball, Ellipsoid)")


def body_to_dict(body) -> dict:
    """JSON-ready description of a body (inverse of body_from_dict)."""
    if isinstance(body, HalfSpace):
        return {"kind": "halfspace", "normal": body.normal.tolist(), "offset": body.offset}
    if isinstance(body, Ball):
        return {"kind": "ball", "center": body.center.tolist(), "radius": body.radius}
    if isinstance(body, Ellipsoid):
        return {
            "kind": "ellipsoid",
            "center": body.center.tolist(),
            "semi_axes": body.semi_axes.tolist(),
        }
    if isinstance(body, HalfSpaceSet):
        return {
            "kind": "halfspace_set",
            "halfspaces": [body_to_dict(h) for h in body.halfspaces],
        }
    raise TypeError(f"unknown body type {type(body).__name__}")


def body_from_dict(d: dict):
    """Rebuild a body from its dict description."""
    if not isinstance(d, dict) or "kind" not in d:
        raise ValueError("body description must be a dict with a 'kind'")
    kind = d["kind"]
    try:
        if kind == "halfspace":
            return HalfSpace(np.asarray(d["normal"], dtype=float), float(d["offset"]))
        if kind == "ball":
            return Ball(np.asarray(d["center"], dtype=float), float(d["radius"]))
        if kind == "ellipsoid":
            return Ellipsoid(
                np.asarray(d["center"], dtype=float),
                np.asarray(d["semi_axes"], dtype=float),
            )
        if kind == "halfspace_set":
            return HalfSpaceSet(tuple(body_from_dict(h) for h in d["halfspaces"]))
    except KeyError as e:
        raise ValueError(f"missing field {e} for body kind {kind!r}") from None
    raise ValueError(f"unknown body kind {kind!r}")
