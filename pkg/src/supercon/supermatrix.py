"""The lower-triangular iterate matrix that interleaves the basic and
perturbed trajectories.

Entry (0,0) is the start; each row n applies operator n-1 (0-based) to
every entry of row n-1, and then appends one perturbed entry
entry(n,n) + beta_n v_n. Column 0 is then the unperturbed trajectory,
the diagonal is the superiorized one, and the per-row differences of a
target along a row telescope between the two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .feasibility import (
    DirectionRule,
    OperatorSequence,
    PerturbationSchedule,
    apply_operator,
)

__all__ = [
    "CapacityError",
    "SupMatrix",
    "ColumnLimit",
    "build",
    "telescoping_check",
    "column_limit",
    "increment",
    "angle_drift",
    "streaming_drift",
]

DEFAULT_MEMORY_BUDGET = 2 * 2**30  # bytes
SETTLE_TOL = 1e-10


class CapacityError(ValueError):
    """Raised when a requested matrix would exceed the memory budget."""


@dataclass
class SupMatrix:
    """Materialized iterate matrix up to row n_max.

    rows[n] holds entries (n, 0..n+1); betas[n] and directions[n] are
    the perturbation size and direction used to create entry (n, n+1).
    """

    rows: list
    betas: np.ndarray
    directions: list

    @property
    def n_max(self) -> int:
        return len(self.rows) - 1

    @property
    def dim(self) -> int:
        return self.rows[0][0].size

    def entry(self, n: int, k: int) -> np.ndarray:
        if not (0 <= n <= self.n_max):
            raise IndexError(f"row {n} out of range 0..{self.n_max}")
        if not (0 <= k <= n + 1):
            raise IndexError(f"column {k} out of range 0..{n + 1} in row {n}")
        return self.rows[n][k]

    def basic_trajectory(self) -> list:
        """Column 0: the unperturbed trajectory."""
        return [self.rows[n][0] for n in range(self.n_max + 1)]

    def superiorized_trajectory(self) -> list:
        """Diagonal: the perturbed trajectory."""
        return [self.rows[n][n] for n in range(self.n_max + 1)]


@dataclass
class ColumnLimit:
    point: np.ndarray
    settled: bool
    row: int


def _perturbed(x: np.ndarray, beta: float, v: np.ndarray) -> np.ndarray:
    # beta = 0 must reproduce x bitwise (signed zeros included)
    if beta == 0.0:
        return x.copy()
    return x + beta * v


def build(
    seq: OperatorSequence,
    x0,
    schedule: PerturbationSchedule,
    direction: DirectionRule,
    n_max: int,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
) -> SupMatrix:
    """Materialize the iterate matrix up to row n_max."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    x0 = np.asarray(x0, dtype=float)
    if x0.ndim != 1 or not np.all(np.isfinite(x0)):
        raise ValueError("x0 must be a finite vector")
    entries = (n_max + 1) * (n_max + 4) // 2
    need = entries * x0.size * 8
    if need > memory_budget:
        raise CapacityError(
            f"matrix needs {entries} vectors ({need} bytes) "
            f"but the budget is {memory_budget} bytes"
        )
    betas = np.empty(n_max + 1)
    directions = []
    rows = []
    row = [x0.copy()]
    for n in range(n_max + 1):
        if n > 0:
            row = [apply_operator(seq, n - 1, e) for e in rows[n - 1]]
        diag = row[n]
        v = direction(n, diag)
        beta = schedule.beta(n)
        row.append(_perturbed(diag, beta, v))
        betas[n] = beta
        directions.append(np.asarray(v, dtype=float))
        rows.append(row)
    return SupMatrix(rows=rows, betas=betas, directions=directions)


def telescoping_check(m: SupMatrix, phi, n: int) -> float:
    """Residual of the row-n telescoping identity.

    |phi(entry(n,0)) - phi(entry(n,n)) - sum_k [phi(entry(n,k-1)) -
    phi(entry(n,k))]| , which is zero up to float roundoff.
    """
    lhs = phi(m.entry(n, 0)) - phi(m.entry(n, n))
    terms = [phi(m.entry(n, k - 1)) - phi(m.entry(n, k)) for k in range(1, n + 1)]
    return abs(lhs - math.fsum(terms))


def telescoping_residuals(m: SupMatrix, phi) -> np.ndarray:
    return np.array([telescoping_check(m, phi, n) for n in range(m.n_max + 1)])


def column_limit(m: SupMatrix, k: int, tol: float = SETTLE_TOL) -> ColumnLimit:
    """Deepest entry of column k with a settlement flag.

    The column is settled when its last two entries agree within tol
    relative to scale; unsettled columns are returned flagged, not
    rejected.
    """
    if not (0 <= k <= m.n_max + 1):
        raise IndexError(f"column {k} out of range")
    first_row = max(k - 1, 0)
    last = m.entry(m.n_max, k)
    if first_row >= m.n_max:
        return ColumnLimit(point=last, settled=False, row=m.n_max)
    prev = m.entry(m.n_max - 1, k)
    gap = float(np.linalg.norm(last - prev))
    settled = gap <= tol * (1.0 + float(np.linalg.norm(last)))
    return ColumnLimit(point=last, settled=settled, row=m.n_max)


def increment(m: SupMatrix, k: int, i: int) -> np.ndarray:
    """Horizontal increment entry(k, i+1) - entry(k, i)."""
    return m.entry(k, i + 1) - m.entry(k, i)


def _angle(delta: np.ndarray, v: np.ndarray) -> float:
    nd = float(np.linalg.norm(delta))
    nv = float(np.linalg.norm(v))
    if nd == 0.0 or nv == 0.0:
        return float("nan")
    c = float(np.dot(delta, v)) / (nd * nv)
    return float(np.arccos(np.clip(c, -1.0, 1.0)))


def angle_drift(m: SupMatrix, i: int, n: int) -> float:
    """Angle in [0, pi] between the increment at (n, i) and its original
    perturbation direction v_i; NaN flags a zero increment."""
    return _angle(increment(m, n, i), m.directions[i])


def streaming_drift(
    seq: OperatorSequence,
    x0,
    schedule: PerturbationSchedule,
    direction: DirectionRule,
    i: int,
    n_max: int,
):
    """Drift angles of column-i increments without materializing the matrix.

    Tracks only the diagonal and the two columns i, i+1; reproduces the
    build()-based angles bit for bit. Returns rows (n, angle, |delta|)
    for n = i..n_max.
    """
    if i < 0 or n_max < i:
        raise ValueError("need 0 <= i <= n_max")
    x0 = np.asarray(x0, dtype=float).copy()
    diag = x0
    for n in range(i):
        v = direction(n, diag)
        diag = apply_operator(seq, n, _perturbed(diag, schedule.beta(n), v))
    v_i = np.asarray(direction(i, diag), dtype=float)
    a = diag  # column i at row i (the diagonal)
    b = _perturbed(diag, schedule.beta(i), v_i)  # column i+1 at row i
    out = []
    delta = b - a
    out.append((i, _angle(delta, v_i), float(np.linalg.norm(delta))))
    for n in range(i + 1, n_max + 1):
        a = apply_operator(seq, n - 1, a)
        b = apply_operator(seq, n - 1, b)
        delta = b - a
        out.append((n, _angle(delta, v_i), float(np.linalg.norm(delta))))
    return out
