"""Certification and experiment layer.

The epsilon certificate measures, by exact enumeration, how much any agent
could gain by a unilateral pure deviation; pure equilibria are enumerated
exhaustively as an independent check of the zero-epsilon endpoint.  The
sweep driver runs the discrete iteration across a grid of alpha values and
seeded restarts and records convergence, epsilon, welfare and whether the
decoded assignment attains the global energy minimum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .discrete import (
    AllZeroReturnsError,
    DivergenceError,
    iterate_to_fixed_point,
    random_profile,
)
from .model import (
    GameModel,
    PairwiseEnergy,
    StrategyProfile,
    densify,
    to_utility_model,
    validate,
    validate_profile,
)
from .rng import derive_seed

MAX_ENUMERATION_SIZE = 1_000_000
_TIE_REL = 1e-15


class EnumerationTooLargeError(ValueError):
    pass


@dataclass(frozen=True)
class EpsilonCertificate:
    """Best-response gains per agent; epsilon is the largest gain."""

    epsilon: float
    gains: tuple[float, ...]
    best_deviation: tuple[int, ...]
    payoffs: tuple[float, ...]


@dataclass(frozen=True)
class SweepRow:
    alpha: float
    seed: int
    converged: bool
    iterations: int
    epsilon: float | None
    welfare: float | None
    global_hit: bool | None


@dataclass(frozen=True)
class SweepReport:
    rows: tuple[SweepRow, ...]

    def write_csv(self, path) -> None:
        with open(path, "w") as f:
            f.write(self.to_csv())

    def to_csv(self) -> str:
        def fmt(x):
            if x is None:
                return ""
            if isinstance(x, bool):
                return "true" if x else "false"
            if isinstance(x, float):
                return repr(x)
            return str(x)

        lines = ["alpha,seed,converged,iterations,epsilon,welfare,global_hit"]
        for r in self.rows:
            lines.append(
                ",".join(
                    fmt(v)
                    for v in (
                        r.alpha, r.seed, r.converged, r.iterations,
                        r.epsilon, r.welfare, r.global_hit,
                    )
                )
            )
        return "\n".join(lines) + "\n"


def _require_utility(model: GameModel, what: str) -> None:
    if model.mode != "utility":
        raise ValueError(f"{what} needs a utility-mode model; convert energies first")


def _payoff_vector(model: GameModel, profile: StrategyProfile, index: int) -> np.ndarray:
    """Expected utility of each own pure action against the others' marginals."""
    agent = model.agents[index]
    obj = agent.objective
    arr = obj.values.reshape(model.shape_of(obj.order))
    own_axis = obj.order.index(agent.acts_on)
    arr = np.moveaxis(arr, own_axis, 0)
    by_variable = {a.acts_on: i for i, a in enumerate(model.agents)}
    others = [v for a, v in enumerate(obj.order) if a != own_axis]
    for other in reversed(others):
        arr = arr @ profile.dists[by_variable[other]]
    return arr


def expected_payoff(model: GameModel, profile: StrategyProfile, index: int) -> float:
    """Exact expected utility of one agent under the profile."""
    _require_utility(model, "expected_payoff")
    validate_profile(model, profile)
    return float(profile.dists[index] @ _payoff_vector(model, profile, index))


def social_welfare(model: GameModel, profile: StrategyProfile) -> float:
    """Unweighted mean of the agents' expected payoffs."""
    _require_utility(model, "social_welfare")
    validate_profile(model, profile)
    payoffs = [
        float(profile.dists[i] @ _payoff_vector(model, profile, i))
        for i in range(len(model.agents))
    ]
    return float(np.mean(payoffs))


def epsilon_of_profile(model: GameModel, profile: StrategyProfile) -> EpsilonCertificate:
    """Largest unilateral pure-deviation gain over all agents.

    Pure deviations suffice: against fixed opponents the best response is
    attained at a pure action.  Tiny negative gains are clamped to zero.
    """
    _require_utility(model, "epsilon_of_profile")
    validate_profile(model, profile)
    gains = []
    deviations = []
    payoffs = []
    for i in range(len(model.agents)):
        vec = _payoff_vector(model, profile, i)
        current = float(profile.dists[i] @ vec)
        gain = float(vec.max()) - current
        gains.append(max(gain, 0.0))
        deviations.append(int(np.argmax(vec)))
        payoffs.append(current)
    return EpsilonCertificate(
        epsilon=max(gains),
        gains=tuple(gains),
        best_deviation=tuple(deviations),
        payoffs=tuple(payoffs),
    )


def _tensor_on_full_domain(model: GameModel, order, values) -> np.ndarray:
    """Reshape a dense table onto the full variable domain, broadcast shape."""
    names = model.variable_names()
    arr = np.asarray(values, dtype=float).reshape(model.shape_of(order))
    targets = [names.index(v) for v in order]
    arr = np.transpose(arr, np.argsort(targets))
    shape = [1] * len(names)
    for axis in targets:
        shape[axis] = model.cardinality(names[axis])
    return arr.reshape(shape)


def enumerate_pure_nash(model: GameModel) -> list[tuple[int, ...]]:
    """All pure profiles with no strictly improving unilateral deviation.

    Exhaustive over the joint domain; ties count as equilibria.  Profiles
    come back as per-agent action tuples in the model's agent order.
    """
    _require_utility(model, "enumerate_pure_nash")
    names = model.variable_names()
    full_shape = model.shape_of(names)
    if int(np.prod(full_shape)) > MAX_ENUMERATION_SIZE:
        raise EnumerationTooLargeError(
            f"joint domain of size {int(np.prod(full_shape))} exceeds "
            f"{MAX_ENUMERATION_SIZE}"
        )
    mask = np.ones(full_shape, dtype=bool)
    for agent in model.agents:
        obj = agent.objective
        tensor = _tensor_on_full_domain(model, obj.order, obj.values)
        own_axis = names.index(agent.acts_on)
        best = tensor.max(axis=own_axis, keepdims=True)
        mask &= np.broadcast_to(tensor >= best, full_shape)
    agent_axes = [names.index(a.acts_on) for a in model.agents]
    return [
        tuple(int(joint[axis]) for axis in agent_axes) for joint in np.argwhere(mask)
    ]


def decode_assignment(profile: StrategyProfile) -> tuple[int, ...]:
    """Per-agent argmax with lowest-index tie-breaking (1e-15 relative)."""
    out = []
    for dist in profile.dists:
        top = float(dist.max())
        ties = np.nonzero(dist >= top - _TIE_REL * max(1.0, abs(top)))[0]
        out.append(int(ties[0]))
    return tuple(out)


def _total_energy_tensor(model: GameModel) -> np.ndarray:
    total = np.zeros(model.shape_of(model.variable_names()))
    for agent in model.agents:
        obj = agent.objective
        if isinstance(obj, PairwiseEnergy):
            obj = densify(obj, model, agent.acts_on)
        total = total + _tensor_on_full_domain(model, obj.order, obj.values)
    return total


def alpha_sweep(
    model: GameModel,
    alpha_grid,
    restarts: int = 1,
    base_seed: int = 0,
    tol: float = 1e-10,
    max_iter: int = 10000,
) -> SweepReport:
    """Run the iteration over every (alpha, restart) cell and summarize.

    The first restart of each alpha starts uniform; later restarts start
    from seeded random profiles.  Epsilon is recorded for utility models,
    the global-minimum hit flag for energy models (against the exhaustive
    minimum of the summed energies); welfare always, using the Boltzmann
    utilities for energy models.  Cell failures are recorded, not raised.
    """
    validate(model)
    alphas = [float(a) for a in alpha_grid]
    if not alphas:
        raise ValueError("alpha grid must be nonempty")
    if restarts < 1:
        raise ValueError("restarts must be at least 1")

    utility_model = to_utility_model(model)
    energy_mode = model.mode == "energy"
    if energy_mode:
        total = _total_energy_tensor(model)
        global_min = float(total.min())
        variable_axis = [model.variable_names().index(a.acts_on) for a in model.agents]

    rows = []
    for ai, alpha in enumerate(alphas):
        for r in range(restarts):
            seed = derive_seed(base_seed, ai, r)
            init = None if r == 0 else random_profile(model, seed)
            try:
                result = iterate_to_fixed_point(model, alpha, init, tol=tol, max_iter=max_iter)
            except (DivergenceError, AllZeroReturnsError):
                rows.append(SweepRow(alpha, seed, False, 0, None, None, None))
                continue
            epsilon = (
                epsilon_of_profile(utility_model, result.profile).epsilon
                if model.mode == "utility"
                else None
            )
            welfare = social_welfare(utility_model, result.profile)
            hit = None
            if energy_mode:
                decoded = decode_assignment(result.profile)
                joint = [0] * len(model.variables)
                for axis, action in zip(variable_axis, decoded):
                    joint[axis] = action
                value = float(total[tuple(joint)])
                hit = value <= global_min + 1e-12 * (1.0 + abs(global_min))
            rows.append(
                SweepRow(alpha, seed, result.converged, result.iterations, epsilon, welfare, hit)
            )
    return SweepReport(tuple(rows))
