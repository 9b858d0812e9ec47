"""Counter-based random streams and the samplers built on them.

A stream is addressed by (master_seed, stream_index); that pair fully
determines the sequence it produces, so any experiment laid out as
"trial t draws from substream t" is reproducible independently of
thread scheduling.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = [
    "RngStream",
    "gaussian_vector",
    "uniform_sphere",
    "random_orthogonal",
    "matrix_with_singular_values",
    "sphere_markov_step",
]

_U64 = 1 << 64

# norms this small cannot be normalized reliably; redraw instead
_TINY_NORM = 1e-300


def _mix(*parts) -> int:
    """Stable 64-bit hash of the given labels (ints/strings)."""
    h = hashlib.blake2b(digest_size=8)
    for p in parts:
        h.update(str(p).encode())
        h.update(b"\x1f")
    return int.from_bytes(h.digest(), "little")


class RngStream:
    """One independent random stream of the (master_seed, stream_index) family.

    Two instances constructed with the same pair reproduce the same
    sequence bit for bit; a single instance is stateful and advances as
    samplers draw from it.
    """

    __slots__ = ("master_seed", "stream_index", "_gen")

    def __init__(self, master_seed: int, stream_index: int = 0):
        if not (0 <= int(master_seed) < _U64):
            raise ValueError("master_seed must be an unsigned 64-bit integer")
        if not (0 <= int(stream_index) < _U64):
            raise ValueError("stream_index must be an unsigned 64-bit integer")
        self.master_seed = int(master_seed)
        self.stream_index = int(stream_index)
        self._gen = None

    @property
    def generator(self) -> np.random.Generator:
        if self._gen is None:
            key = np.array([self.master_seed, self.stream_index], dtype=np.uint64)
            self._gen = np.random.Generator(np.random.Philox(key=key))
        return self._gen

    def substream(self, *labels) -> "RngStream":
        """Derive an independent child stream; used as one stream per trial."""
        if not labels:
            raise ValueError("substream needs at least one label")
        return RngStream(self.master_seed, _mix(self.stream_index, *labels))

    def __repr__(self) -> str:
        return f"RngStream(master_seed={self.master_seed}, stream_index={self.stream_index})"


def trial_stream(master_seed: int, experiment: str, trial: int) -> RngStream:
    """Stream for trial `trial` of the named experiment."""
    return RngStream(master_seed, _mix(experiment, trial))


def gaussian_vector(n: int, rng: RngStream) -> np.ndarray:
    """Standard normal vector of length n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return rng.generator.standard_normal(n)


def uniform_sphere(n: int, rng: RngStream) -> np.ndarray:
    """Uniform draw from the unit sphere of E^n (n >= 2), unit to 1e-12."""
    if n < 2:
        raise ValueError("uniform_sphere needs n >= 2")
    g = rng.generator
    while True:
        x = g.standard_normal(n)
        nrm = np.linalg.norm(x)
        if nrm >= _TINY_NORM:
            return x / nrm


def random_orthogonal(n: int, rng: RngStream, method: str = "qr") -> np.ndarray:
    """Haar-distributed orthogonal matrix.

    method="qr" (default): QR of a Gaussian matrix with the R-diagonal
    sign fixed, which realizes the same law as the orthogonal polar
    factor at lower cost. method="polar": the polar factor itself via
    SVD. Numerically singular draws are redrawn.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    g = rng.generator
    while True:
        a = g.standard_normal((n, n))
        if method == "qr":
            q, r = np.linalg.qr(a)
            d = np.diagonal(r)
            if np.min(np.abs(d)) < 1e-12 * max(1.0, np.max(np.abs(d))):
                continue
            s = np.sign(d)
            return q * s
        if method == "polar":
            u, sv, vt = np.linalg.svd(a)
            if sv[-1] < 1e-12 * max(1.0, sv[0]):
                continue
            return u @ vt
        raise ValueError(f"unknown method {method!r}")


def matrix_with_singular_values(s, rng: RngStream) -> np.ndarray:
    """Square matrix with prescribed singular values and Haar factors.

    Returns U1 @ diag(s) @ U2 with independent Haar orthogonal U1, U2.
    """
    s = np.asarray(s, dtype=float)
    if s.ndim != 1 or s.size < 1:
        raise ValueError("singular value list must be a nonempty vector")
    if not np.all(np.isfinite(s)) or np.any(s < 0):
        raise ValueError("singular values must be finite and nonnegative")
    n = s.size
    u1 = random_orthogonal(n, rng)
    u2 = random_orthogonal(n, rng)
    return u1 @ (s[:, None] * u2)


def sphere_markov_step(u: np.ndarray, d: float, rng: RngStream) -> np.ndarray:
    """One step of the fixed-chord walk on the unit sphere.

    Returns (1 - d^2/2) u + d sqrt(1 - d^2/4) w with w uniform on the
    unit sphere of the hyperplane orthogonal to u; the result has norm 1
    and distance d from u to 1e-10 by construction.
    """
    u = np.asarray(u, dtype=float)
    if u.ndim != 1 or u.size < 2:
        raise ValueError("u must be a vector of dimension >= 2")
    if abs(np.linalg.norm(u) - 1.0) > 1e-10:
        raise ValueError("u must be a unit vector (1e-10)")
    d = float(d)
    if not (0.0 <= d <= 2.0):
        raise ValueError("step size d must lie in [0, 2]")
    g = rng.generator
    while True:
        w = g.standard_normal(u.size)
        w = w - np.dot(w, u) * u
        nrm = np.linalg.norm(w)
        if nrm > 1e-13:
            break
    w = w / nrm
    return (1.0 - d * d / 2.0) * u + (d * np.sqrt(1.0 - d * d / 4.0)) * w
