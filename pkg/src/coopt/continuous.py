"""Continuous-time dissipative dynamics.

A unit wavefunction per agent evolves under d(psi)/dt = -(H psi)/hbar with
renormalization after every step, so the effective flow damps components
above the current Rayleigh quotient and its fixed points are exactly the
eigenvectors of H.  The coupled variant rebuilds each agent's diagonal
operator from the other agents' squared amplitudes at every step; the
linear variant evolves one vector under a fixed symmetric operator and,
with deflation, climbs the spectrum one state at a time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import DenseEnergy, GameModel, PairwiseEnergy
from .numerics import DenseSymmetric, Diagonal, EigenDecomposition, HermitianOperator, rk4_step
from .rng import random_unit_vector

DEFAULT_T_MAX = 1000.0
DEFAULT_STATIONARY_TOL = 1e-8
_DT_SAFETY = 0.01
_TRAJECTORY_POINTS = 1000


class EvolutionError(RuntimeError):
    """Non-finite state encountered during evolution."""


@dataclass(frozen=True)
class WaveState:
    """Per-agent real amplitude vectors, each of unit Euclidean norm."""

    amplitudes: tuple[np.ndarray, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "amplitudes", tuple(np.asarray(a, dtype=float) for a in self.amplitudes)
        )

    @classmethod
    def uniform(cls, model: GameModel) -> "WaveState":
        return cls(
            tuple(np.full(c, 1.0 / math.sqrt(c)) for c in model.agent_cardinalities())
        )


@dataclass(frozen=True)
class StationaryState:
    rayleigh: float
    residual: float
    matched_index: int | None = None


@dataclass(frozen=True)
class StationaryReport:
    states: tuple[StationaryState, ...]
    time: float
    converged: bool


@dataclass(frozen=True)
class TrajectoryPoint:
    time: float
    amplitudes: tuple[np.ndarray, ...]
    rayleigh: tuple[float, ...]
    residual: tuple[float, ...]


def _unit(v: np.ndarray, what: str) -> np.ndarray:
    norm = float(np.linalg.norm(v))
    if not np.isfinite(norm) or abs(norm - 1.0) > 1e-9:
        raise ValueError(f"{what} must have unit norm (got {norm})")
    return v / norm


def _decay(operator: HermitianOperator, hbar: float):
    factor = -1.0 / hbar
    return lambda y: operator.matvec(y) * factor


def _renormalized(v: np.ndarray, step: int) -> np.ndarray:
    norm = float(np.linalg.norm(v))
    if not np.isfinite(norm) or norm == 0.0 or not np.isfinite(v).all():
        raise EvolutionError(f"non-finite state after step {step}")
    return v / norm


def _default_dt(scale: float, hbar: float) -> float:
    return _DT_SAFETY * hbar / scale if scale > 0 else _DT_SAFETY * hbar


def default_step(operator: HermitianOperator, hbar: float = 1.0) -> float:
    """Default integrator step: one percent of the characteristic time."""
    return _default_dt(operator.scale(), hbar)


def _check_dt(dt: float, scale: float, hbar: float) -> None:
    if dt <= 0:
        raise ValueError("dt must be positive")
    if dt * scale / hbar > 1.0:
        raise ValueError(
            f"dt={dt} exceeds the characteristic time {hbar / scale if scale else math.inf}"
        )


def _orthonormalize(vectors) -> np.ndarray | None:
    basis: list[np.ndarray] = []
    for v in vectors:
        w = np.asarray(v, dtype=float).copy()
        for b in basis:
            w -= (b @ w) * b
        norm = float(np.linalg.norm(w))
        if norm > 1e-10:
            basis.append(w / norm)
    return np.column_stack(basis) if basis else None


def effective_hamiltonian(model: GameModel, state: WaveState, index: int) -> Diagonal:
    """Diagonal operator of per-action energy expectations for one agent,
    taken over the other agents' squared amplitudes."""
    if model.mode != "energy":
        raise ValueError("effective Hamiltonians are defined for energy-mode models")
    agent = model.agents[index]
    obj = agent.objective
    by_variable = {a.acts_on: i for i, a in enumerate(model.agents)}
    weights = [np.abs(a) ** 2 for a in state.amplitudes]

    if isinstance(obj, PairwiseEnergy):
        entries = np.zeros(model.cardinality(agent.acts_on))
        for other, table in obj.terms:
            entries = entries + table @ weights[by_variable[other]]
        return Diagonal(entries)

    assert isinstance(obj, DenseEnergy)
    arr = obj.values.reshape(model.shape_of(obj.order))
    own_axis = obj.order.index(agent.acts_on)
    arr = np.moveaxis(arr, own_axis, 0)
    others = [v for a, v in enumerate(obj.order) if a != own_axis]
    for other in reversed(others):
        arr = arr @ weights[by_variable[other]]
    return Diagonal(arr)


def stationarity_check(operator: HermitianOperator, psi: np.ndarray) -> tuple[float, float]:
    """Rayleigh quotient and eigen-residual norm ||H psi - lambda psi||."""
    psi = np.asarray(psi, dtype=float)
    if psi.shape != (operator.dimension,):
        raise ValueError(
            f"state of length {psi.size} does not match operator dimension {operator.dimension}"
        )
    psi = _unit(psi, "psi")
    h_psi = operator.matvec(psi)
    rayleigh = float(psi @ h_psi)
    residual = float(np.linalg.norm(h_psi - rayleigh * psi))
    return rayleigh, residual


def evolve_linear(
    operator: HermitianOperator,
    psi0: np.ndarray,
    dt: float | None = None,
    t_max: float = DEFAULT_T_MAX,
    tol: float = DEFAULT_STATIONARY_TOL,
    hbar: float = 1.0,
    deflate: tuple[np.ndarray, ...] = (),
    record_every: int | None = None,
) -> tuple[list[TrajectoryPoint], StationaryReport]:
    """Evolve one unit vector under a fixed operator until stationary.

    Stops when ||H psi - lambda psi|| <= tol (projected out of the deflated
    subspace when `deflate` vectors are given) or when t_max is reached.
    The default step is 0.01 * hbar / scale(H); steps past the characteristic
    time hbar / scale(H) are rejected.
    """
    if not (hbar > 0 and tol > 0 and t_max > 0):
        raise ValueError("hbar, tol and t_max must be positive")
    psi = np.asarray(psi0, dtype=float)
    if psi.shape != (operator.dimension,):
        raise ValueError("initial state does not match the operator dimension")
    psi = _unit(psi, "psi0")

    basis = _orthonormalize(deflate)
    if basis is not None:
        psi = psi - basis @ (basis.T @ psi)
        norm = float(np.linalg.norm(psi))
        if norm < 1e-8:
            raise ValueError("initial state lies in the deflated subspace")
        psi = psi / norm

    scale = operator.scale()
    if dt is None:
        dt = _default_dt(scale, hbar)
    _check_dt(dt, scale, hbar)
    max_steps = max(1, math.ceil(t_max / dt))
    if record_every is None:
        record_every = max(1, max_steps // _TRAJECTORY_POINTS)

    derivative = _decay(operator, hbar)
    points: list[TrajectoryPoint] = []
    step = 0
    converged = False
    while True:
        t = step * dt
        h_psi = operator.matvec(psi)
        rayleigh = float(psi @ h_psi)
        r = h_psi - rayleigh * psi
        if basis is not None:
            r = r - basis @ (basis.T @ r)
        residual = float(np.linalg.norm(r))
        recorded = step % record_every == 0
        if recorded:
            points.append(TrajectoryPoint(t, (psi.copy(),), (rayleigh,), (residual,)))
        if residual <= tol:
            converged = True
            break
        if step >= max_steps:
            break
        psi = rk4_step(derivative, psi, dt)
        if basis is not None:
            psi = psi - basis @ (basis.T @ psi)
        psi = _renormalized(psi, step + 1)
        step += 1
    if not recorded:
        points.append(TrajectoryPoint(t, (psi.copy(),), (rayleigh,), (residual,)))

    report = StationaryReport(
        states=(StationaryState(rayleigh, residual),), time=t, converged=converged
    )
    return points, report


def lowest_states(
    operator: HermitianOperator,
    count: int,
    psi0: np.ndarray,
    dt: float | None = None,
    t_max: float = DEFAULT_T_MAX,
    tol: float = DEFAULT_STATIONARY_TOL,
    hbar: float = 1.0,
    seed: int = 0,
    record_every: int | None = None,
) -> list[tuple[list[TrajectoryPoint], StationaryReport, np.ndarray]]:
    """Ground state plus the next count-1 states via repeated deflation.

    Each later run starts from psi0 projected out of the states found so
    far, falling back to a seeded random direction when psi0 lies inside
    their span.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    if count > operator.dimension:
        raise ValueError(
            f"cannot extract {count} states from a dimension-{operator.dimension} operator"
        )
    found: list[np.ndarray] = []
    results = []
    for k in range(count):
        start = np.asarray(psi0, dtype=float)
        basis = _orthonormalize(found)
        if basis is not None:
            projected = start - basis @ (basis.T @ start)
            if float(np.linalg.norm(projected)) < 1e-8:
                start = random_unit_vector(operator.dimension, seed + k)
        start = start / float(np.linalg.norm(start))
        points, report = evolve_linear(
            operator, start, dt=dt, t_max=t_max, tol=tol, hbar=hbar,
            deflate=tuple(found), record_every=record_every,
        )
        psi = points[-1].amplitudes[0]
        found.append(psi)
        results.append((points, report, psi))
    return results


def evolve_coupled(
    model: GameModel,
    state0: WaveState | None = None,
    dt: float | None = None,
    t_max: float = DEFAULT_T_MAX,
    tol: float = DEFAULT_STATIONARY_TOL,
    record_every: int | None = None,
) -> tuple[list[TrajectoryPoint], StationaryReport]:
    """Evolve all agents together, rebuilding every effective operator from
    the same state snapshot each step.

    Stops when every agent's residual against its current effective
    operator is <= tol, or at t_max.  Reduces exactly to evolve_linear
    when the model has a single agent.
    """
    if not (tol > 0 and t_max > 0):
        raise ValueError("tol and t_max must be positive")
    hbar = model.hbar
    state = WaveState.uniform(model) if state0 is None else state0
    amplitudes = [_unit(a, f"psi[{i}]") for i, a in enumerate(state.amplitudes)]
    n = len(model.agents)

    operators = [effective_hamiltonian(model, WaveState(tuple(amplitudes)), i) for i in range(n)]
    scale = max(op.scale() for op in operators)
    if dt is None:
        dt = _default_dt(scale, hbar)
    _check_dt(dt, scale, hbar)
    max_steps = max(1, math.ceil(t_max / dt))
    if record_every is None:
        record_every = max(1, max_steps // _TRAJECTORY_POINTS)

    points: list[TrajectoryPoint] = []
    step = 0
    converged = False
    while True:
        t = step * dt
        snapshot = WaveState(tuple(amplitudes))
        operators = [effective_hamiltonian(model, snapshot, i) for i in range(n)]
        rayleighs = []
        residuals = []
        for op, psi in zip(operators, amplitudes):
            h_psi = op.matvec(psi)
            rayleigh = float(psi @ h_psi)
            rayleighs.append(rayleigh)
            residuals.append(float(np.linalg.norm(h_psi - rayleigh * psi)))
        recorded = step % record_every == 0
        if recorded:
            points.append(
                TrajectoryPoint(
                    t, tuple(a.copy() for a in amplitudes), tuple(rayleighs), tuple(residuals)
                )
            )
        if max(residuals) <= tol:
            converged = True
            break
        if step >= max_steps:
            break
        amplitudes = [
            _renormalized(rk4_step(_decay(op, hbar), psi, dt), step + 1)
            for op, psi in zip(operators, amplitudes)
        ]
        step += 1
    if not recorded:
        points.append(
            TrajectoryPoint(
                t, tuple(a.copy() for a in amplitudes), tuple(rayleighs), tuple(residuals)
            )
        )

    report = StationaryReport(
        states=tuple(StationaryState(l, r) for l, r in zip(rayleighs, residuals)),
        time=t,
        converged=converged,
    )
    return points, report


def build_grid_hamiltonian(
    xmin: float, xmax: float, n_points: int, potential
) -> DenseSymmetric:
    """Second-order central-difference kinetic term -(1/2) d2/dx2 with
    Dirichlet boundaries, plus the given potential on the diagonal."""
    if n_points < 3:
        raise ValueError("grid needs at least 3 points")
    if not xmax > xmin:
        raise ValueError("xmax must exceed xmin")
    v = np.asarray(potential, dtype=float).ravel()
    if v.size != n_points:
        raise ValueError(f"potential has {v.size} values for {n_points} grid points")
    h = (xmax - xmin) / (n_points - 1)
    matrix = np.zeros((n_points, n_points))
    np.fill_diagonal(matrix, 1.0 / h**2 + v)
    off = -1.0 / (2.0 * h**2)
    idx = np.arange(n_points - 1)
    matrix[idx, idx + 1] = off
    matrix[idx + 1, idx] = off
    return DenseSymmetric(matrix)


def match_eigenvalue(
    value: float, decomposition: EigenDecomposition, tol: float = 1e-6
) -> int | None:
    """Index of the eigenvalue within tol of value, or None."""
    diffs = np.abs(decomposition.eigenvalues - value)
    index = int(np.argmin(diffs))
    return index if diffs[index] <= tol else None


TRAJECTORY_HEADER = "t,agent,action,psi,lambda,residual"


def trajectory_rows(points: list[TrajectoryPoint], labels: list[str]):
    for point in points:
        for label, psi, lam, resid in zip(
            labels, point.amplitudes, point.rayleigh, point.residual
        ):
            for action in range(psi.size):
                yield (
                    f"{float(point.time)!r},{label},{action},"
                    f"{float(psi[action])!r},{float(lam)!r},{float(resid)!r}"
                )


def write_trajectory_csv(path, sections) -> None:
    """Long-format trajectory CSV; sections is an iterable of
    (points, labels) pairs written under one header."""
    with open(path, "w") as f:
        f.write(TRAJECTORY_HEADER + "\n")
        for points, labels in sections:
            for row in trajectory_rows(points, labels):
                f.write(row + "\n")
