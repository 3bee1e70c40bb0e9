"""Shared numerical kernels.

Log-domain accumulation keeps the dynamics stable when the temperature
constant is small, the cyclic Jacobi eigensolver is the self-contained
oracle used to certify stationary states, and the fixed-step RK4 update
drives both continuous-time evolutions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

JACOBI_MAX_DIMENSION = 2048
_JACOBI_MAX_SWEEPS = 100


class JacobiConvergenceError(RuntimeError):
    """Sweep budget exhausted before the off-diagonal norm target."""

    def __init__(self, residual: float, sweeps: int):
        super().__init__(
            f"jacobi rotations did not converge after {sweeps} sweeps "
            f"(off-diagonal residual {residual:.3e})"
        )
        self.residual = residual
        self.sweeps = sweeps


@dataclass(frozen=True)
class Diagonal:
    """Operator with the given real diagonal and zeros elsewhere."""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.atleast_1d(np.asarray(self.entries, dtype=float))
        if entries.ndim != 1 or entries.size < 1:
            raise ValueError("diagonal operator needs a nonempty 1-D entry vector")
        object.__setattr__(self, "entries", entries)

    @property
    def dimension(self) -> int:
        return self.entries.size

    def matvec(self, v: np.ndarray) -> np.ndarray:
        return self.entries * v

    def diagonal(self) -> np.ndarray:
        return self.entries

    def to_dense(self) -> np.ndarray:
        return np.diag(self.entries)

    def scale(self) -> float:
        """Spectral-radius estimate used for default step sizing (exact here)."""
        return float(np.abs(self.entries).max())


@dataclass(frozen=True)
class DenseSymmetric:
    """Dense real symmetric operator; asymmetry beyond 1e-12 is rejected."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise ValueError("dense operator must be a square matrix")
        if not np.isfinite(m).all():
            raise ValueError("dense operator entries must be finite")
        if np.abs(m - m.T).max() > 1e-12:
            raise ValueError("matrix is not symmetric within 1e-12")
        object.__setattr__(self, "matrix", m)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def matvec(self, v: np.ndarray) -> np.ndarray:
        return self.matrix @ v

    def diagonal(self) -> np.ndarray:
        return np.diag(self.matrix)

    def to_dense(self) -> np.ndarray:
        return self.matrix

    def scale(self) -> float:
        """Max absolute row sum, an upper bound on the spectral radius."""
        return float(np.abs(self.matrix).sum(axis=1).max())


HermitianOperator = Diagonal | DenseSymmetric


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues ascending; eigenvectors are the matching orthonormal columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def log_sum_exp(values) -> float:
    """ln(sum(exp(values))), shift-stabilized; -inf entries are allowed."""
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise ValueError("log_sum_exp of an empty vector is undefined")
    m = float(v.max())
    if m == -math.inf:
        return -math.inf
    return m + math.log(float(np.exp(v - m).sum()))


def log_sum_exp_along(values: np.ndarray, axis: int) -> np.ndarray:
    """Axis-wise log_sum_exp; rows of all -inf map to -inf, never NaN."""
    v = np.asarray(values, dtype=float)
    m = v.max(axis=axis, keepdims=True)
    safe = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore"):
        out = np.log(np.exp(v - safe).sum(axis=axis)) + np.squeeze(safe, axis=axis)
    return np.where(np.isfinite(np.squeeze(m, axis=axis)), out, np.squeeze(m, axis=axis))


def _rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    # Two-sided rotation zeroing a[p, q]; accumulates the rotation into v.
    phi = 0.5 * math.atan2(2.0 * a[p, q], a[q, q] - a[p, p])
    c, s = math.cos(phi), math.sin(phi)
    row_p = a[p, :].copy()
    row_q = a[q, :].copy()
    a[p, :] = c * row_p - s * row_q
    a[q, :] = s * row_p + c * row_q
    col_p = a[:, p].copy()
    col_q = a[:, q].copy()
    a[:, p] = c * col_p - s * col_q
    a[:, q] = s * col_p + c * col_q
    a[p, q] = 0.0
    a[q, p] = 0.0
    vec_p = v[:, p].copy()
    vec_q = v[:, q].copy()
    v[:, p] = c * vec_p - s * vec_q
    v[:, q] = s * vec_p + c * vec_q


def _off_diagonal_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt((off * off).sum()))


def jacobi_eigen(operator: HermitianOperator) -> EigenDecomposition:
    """Full eigendecomposition by cyclic Jacobi rotations.

    Sweeps run until the off-diagonal Frobenius norm drops below
    1e-12 times the Frobenius norm of the input.  Intended as a
    trustworthy reference at modest dimension, not as a fast solver.
    """
    n = operator.dimension
    if n > JACOBI_MAX_DIMENSION:
        raise ValueError(f"dimension {n} exceeds the eigensolver cap {JACOBI_MAX_DIMENSION}")

    if isinstance(operator, Diagonal):
        order = np.argsort(operator.entries, kind="stable")
        vecs = np.eye(n)[:, order]
        return EigenDecomposition(operator.entries[order].copy(), vecs)

    a = 0.5 * (operator.matrix + operator.matrix.T)
    v = np.eye(n)
    if n == 1:
        return EigenDecomposition(np.diag(a).copy(), v)

    target = 1e-12 * float(np.sqrt((a * a).sum()))
    skip = target / n  # entries below this cannot push the total above target
    off = _off_diagonal_norm(a)
    sweeps = 0
    while off > target:
        if sweeps >= _JACOBI_MAX_SWEEPS:
            raise JacobiConvergenceError(off, sweeps)
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) > skip:
                    _rotate(a, v, p, q)
        sweeps += 1
        off = _off_diagonal_norm(a)

    eigenvalues = np.diag(a).copy()
    order = np.argsort(eigenvalues, kind="stable")
    return EigenDecomposition(eigenvalues[order], v[:, order])


def rk4_step(derivative, state: np.ndarray, dt: float) -> np.ndarray:
    """One classical fourth-order Runge-Kutta step of size dt."""
    if dt <= 0.0:
        raise ValueError("rk4_step requires dt > 0")
    y = np.asarray(state, dtype=float)
    k1 = np.asarray(derivative(y), dtype=float)
    k2 = np.asarray(derivative(y + (0.5 * dt) * k1), dtype=float)
    k3 = np.asarray(derivative(y + (0.5 * dt) * k2), dtype=float)
    k4 = np.asarray(derivative(y + dt * k3), dtype=float)
    if not (np.isfinite(k1).all() and np.isfinite(k2).all()
            and np.isfinite(k3).all() and np.isfinite(k4).all()):
        raise ValueError("derivative returned a non-finite value")
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
