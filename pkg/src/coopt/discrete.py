"""Discrete-time compromise dynamics.

Each step computes every agent's expected return per own action, as the
expectation of exp(-E/hbar) (energy mode) or of the utility (utility mode)
over the other agents' current action distributions, then maps returns to
a new profile through the alpha-power normalization.  All accumulation
runs in the log domain so small hbar and large alpha stay finite.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .model import (
    DenseEnergy,
    DenseUtility,
    GameModel,
    PairwiseEnergy,
    StrategyProfile,
    validate_profile,
)
from .numerics import log_sum_exp, log_sum_exp_along
from .rng import SplitMix64, random_simplex

ALPHA_CAP = 1e6
DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 10000


class DivergenceError(RuntimeError):
    """Iteration produced a non-finite quantity."""

    def __init__(self, step: int, detail: str):
        super().__init__(f"diverged at step {step}: {detail}")
        self.step = step


class AllZeroReturnsError(RuntimeError):
    """Every action of some agent has zero expected return."""


@dataclass(frozen=True)
class ExpectedReturnField:
    """Per-agent expected returns, kept as natural logs (-inf encodes zero)."""

    log_values: tuple[np.ndarray, ...]

    @property
    def values(self) -> tuple[np.ndarray, ...]:
        return tuple(np.exp(lv) for lv in self.log_values)


@dataclass(frozen=True)
class TraceStep:
    step: int
    max_change: float
    profile: StrategyProfile
    field: ExpectedReturnField


@dataclass(frozen=True)
class IterationTrace:
    steps: tuple[TraceStep, ...]

    def write_csv(self, path) -> None:
        with open(path, "w") as f:
            f.write("step,max_change\n")
            for s in self.steps:
                f.write(f"{s.step},{float(s.max_change)!r}\n")

    def write_detail_csv(self, path, model: GameModel) -> None:
        with open(path, "w") as f:
            f.write("step,agent,action,p,psi\n")
            for s in self.steps:
                values = s.field.values
                for agent, dist, psi in zip(model.agents, s.profile.dists, values):
                    for action in range(dist.size):
                        f.write(
                            f"{s.step},{agent.name},{action},"
                            f"{float(dist[action])!r},{float(psi[action])!r}\n"
                        )


@dataclass(frozen=True)
class FixedPointResult:
    profile: StrategyProfile
    converged: bool
    iterations: int
    max_change: float
    field: ExpectedReturnField
    trace: IterationTrace | None = None


def random_profile(model: GameModel, seed: int) -> StrategyProfile:
    """Seeded strictly-positive profile for sweep restarts."""
    stream = SplitMix64(seed)
    return StrategyProfile(
        tuple(random_simplex(c, stream) for c in model.agent_cardinalities())
    )


def _log_probability(dist: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(dist)


def _agent_of_variable(model: GameModel) -> dict[str, int]:
    return {agent.acts_on: i for i, agent in enumerate(model.agents)}


def _log_returns_dense(model: GameModel, profile: StrategyProfile, index: int) -> np.ndarray:
    agent = model.agents[index]
    obj = agent.objective
    shape = model.shape_of(obj.order)
    if isinstance(obj, DenseEnergy):
        log_weight = (-obj.values / model.hbar).reshape(shape)
    else:
        with np.errstate(divide="ignore"):
            log_weight = np.log(obj.values).reshape(shape)
    own_axis = obj.order.index(agent.acts_on)
    log_weight = np.moveaxis(log_weight, own_axis, 0)
    others = [v for a, v in enumerate(obj.order) if a != own_axis]
    if not others:
        return log_weight  # single agent: the weight itself
    by_variable = _agent_of_variable(model)
    log_ps = [_log_probability(profile.dists[by_variable[v]]) for v in others]
    joint_log_p = functools.reduce(np.add.outer, log_ps) if len(log_ps) > 1 else log_ps[0]
    combined = log_weight + joint_log_p[np.newaxis, ...]
    return log_sum_exp_along(combined.reshape(combined.shape[0], -1), axis=1)


def _log_returns_pairwise(model: GameModel, profile: StrategyProfile, index: int) -> np.ndarray:
    agent = model.agents[index]
    by_variable = _agent_of_variable(model)
    total = np.zeros(model.cardinality(agent.acts_on))
    for other, table in agent.objective.terms:
        log_p = _log_probability(profile.dists[by_variable[other]])
        total = total + log_sum_exp_along(-table / model.hbar + log_p[np.newaxis, :], axis=1)
    return total


def _log_returns(model: GameModel, profile: StrategyProfile, index: int) -> np.ndarray:
    if isinstance(model.agents[index].objective, PairwiseEnergy):
        return _log_returns_pairwise(model, profile, index)
    return _log_returns_dense(model, profile, index)


def expected_return_update(model: GameModel, profile: StrategyProfile) -> ExpectedReturnField:
    """Exact-enumeration update; every objective must be a dense table."""
    for agent in model.agents:
        if isinstance(agent.objective, PairwiseEnergy):
            raise ValueError(
                f"agent {agent.name!r} has a pairwise objective; use the factorized update"
            )
    validate_profile(model, profile)
    return ExpectedReturnField(
        tuple(_log_returns_dense(model, profile, i) for i in range(len(model.agents)))
    )


def expected_return_update_factorized(
    model: GameModel, profile: StrategyProfile
) -> ExpectedReturnField:
    """Per-term update for pairwise energies.

    The expectation of exp(-sum of pairwise terms / hbar) splits into a
    product of per-neighbor expectations because each neighbor appears in
    exactly one table; cost is linear in the number of terms.
    """
    for agent in model.agents:
        if not isinstance(agent.objective, PairwiseEnergy):
            raise ValueError(f"agent {agent.name!r} does not have a pairwise objective")
    validate_profile(model, profile)
    return ExpectedReturnField(
        tuple(_log_returns_pairwise(model, profile, i) for i in range(len(model.agents)))
    )


def normalize_policy(field: ExpectedReturnField, alpha: float) -> StrategyProfile:
    """Profile with p proportional to (expected return)**alpha, per agent.

    Computed as exp(alpha * log psi - log Z) so large alpha cannot
    overflow; alpha is capped at 1e6 (the practical best-response limit).
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    alpha = min(alpha, ALPHA_CAP)
    dists = []
    for i, log_v in enumerate(field.log_values):
        scaled = alpha * log_v
        z = log_sum_exp(scaled)
        if z == -np.inf:
            raise AllZeroReturnsError(
                f"agent index {i}: all expected returns are zero, distribution undefined"
            )
        p = np.exp(scaled - z)
        dists.append(p / p.sum())
    return StrategyProfile(tuple(dists))


def iterate_to_fixed_point(
    model: GameModel,
    alpha: float,
    init: StrategyProfile | None = None,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    keep_trace: bool = False,
) -> FixedPointResult:
    """Run the synchronous update-and-normalize map until the profile stops
    moving (infinity norm <= tol) or the iteration budget runs out.

    Every agent's return is computed from the previous step's profile.
    Non-convergence is reported in the result, not raised.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    profile = StrategyProfile.uniform(model) if init is None else init
    validate_profile(model, profile)

    n = len(model.agents)
    steps: list[TraceStep] = []
    converged = False
    change = np.inf
    field = ExpectedReturnField(tuple(np.zeros(c) for c in model.agent_cardinalities()))
    iterations = 0
    for t in range(1, max_iter + 1):
        field = ExpectedReturnField(tuple(_log_returns(model, profile, i) for i in range(n)))
        for lv in field.log_values:
            if np.isnan(lv).any() or (lv == np.inf).any():
                raise DivergenceError(t, "non-finite expected return")
        new_profile = normalize_policy(field, alpha)
        change = new_profile.max_change(profile)
        profile = new_profile
        iterations = t
        if keep_trace:
            steps.append(TraceStep(t, change, profile, field))
        if change <= tol:
            converged = True
            break

    return FixedPointResult(
        profile=profile,
        converged=converged,
        iterations=iterations,
        max_change=float(change),
        field=field,
        trace=IterationTrace(tuple(steps)) if keep_trace else None,
    )
