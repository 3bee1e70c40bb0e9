"""Problem representation: one discrete action variable per agent, with
per-agent objectives given either as energies to minimize or nonnegative
utilities to maximize.

Dense objectives are flat row-major tables over a stated variable order
(last variable varies fastest).  Pairwise energy objectives hold one table
per neighboring variable, indexed (own action, other action), and stand
for the sum of those tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

PROBABILITY_TOL = 1e-12


class ValidationError(ValueError):
    """Carries every violation found, not just the first."""

    def __init__(self, problems: Sequence[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass(frozen=True)
class DomainSpec:
    name: str
    cardinality: int


@dataclass(frozen=True)
class DenseEnergy:
    order: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(self.order))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float).ravel())


@dataclass(frozen=True)
class DenseUtility:
    order: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(self.order))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float).ravel())


@dataclass(frozen=True)
class PairwiseEnergy:
    """Sum of two-variable energy tables, each indexed (own, other)."""

    terms: tuple[tuple[str, np.ndarray], ...]

    def __post_init__(self):
        terms = tuple((name, np.asarray(table, dtype=float)) for name, table in self.terms)
        object.__setattr__(self, "terms", terms)


Objective = DenseEnergy | DenseUtility | PairwiseEnergy


@dataclass(frozen=True)
class Agent:
    name: str
    acts_on: str
    objective: Objective


@dataclass(frozen=True)
class GameModel:
    variables: tuple[DomainSpec, ...]
    agents: tuple[Agent, ...]
    hbar: float = 1.0
    mode: str = "energy"  # "energy" or "utility"

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "agents", tuple(self.agents))

    def cardinality(self, variable: str) -> int:
        for spec in self.variables:
            if spec.name == variable:
                return spec.cardinality
        raise KeyError(f"unknown variable {variable!r}")

    def variable_names(self) -> list[str]:
        return [spec.name for spec in self.variables]

    def agent_cardinalities(self) -> list[int]:
        return [self.cardinality(agent.acts_on) for agent in self.agents]

    def shape_of(self, order: Sequence[str]) -> tuple[int, ...]:
        return tuple(self.cardinality(name) for name in order)


@dataclass(frozen=True)
class StrategyProfile:
    """One probability vector per agent, aligned with the model's agent order."""

    dists: tuple[np.ndarray, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "dists", tuple(np.asarray(d, dtype=float) for d in self.dists)
        )

    @classmethod
    def uniform(cls, model: GameModel) -> "StrategyProfile":
        return cls(tuple(np.full(c, 1.0 / c) for c in model.agent_cardinalities()))

    @classmethod
    def point_mass(cls, model: GameModel, assignment: Sequence[int]) -> "StrategyProfile":
        dists = []
        for c, a in zip(model.agent_cardinalities(), assignment):
            d = np.zeros(c)
            d[a] = 1.0
            dists.append(d)
        return cls(tuple(dists))

    def max_change(self, other: "StrategyProfile") -> float:
        return max(
            float(np.abs(a - b).max()) for a, b in zip(self.dists, other.dists)
        )


def validate_profile(model: GameModel, profile: StrategyProfile) -> StrategyProfile:
    problems = []
    if len(profile.dists) != len(model.agents):
        raise ValidationError(
            [f"profile has {len(profile.dists)} distributions for {len(model.agents)} agents"]
        )
    for agent, dist, card in zip(model.agents, profile.dists, model.agent_cardinalities()):
        if dist.shape != (card,):
            problems.append(f"agent {agent.name!r}: distribution length {dist.size} != {card}")
            continue
        if not np.isfinite(dist).all():
            problems.append(f"agent {agent.name!r}: non-finite probability")
        elif (dist < 0).any():
            problems.append(f"agent {agent.name!r}: negative probability")
        elif abs(float(dist.sum()) - 1.0) > PROBABILITY_TOL:
            problems.append(
                f"agent {agent.name!r}: probabilities sum to {float(dist.sum()):.17g}, not 1"
            )
    if problems:
        raise ValidationError(problems)
    return profile


def _check_dense(agent: Agent, obj, model: GameModel, problems: list[str]) -> None:
    names = set(model.variable_names())
    if agent.acts_on not in obj.order:
        problems.append(f"agent {agent.name!r}: variable order omits its own variable")
    if len(set(obj.order)) != len(obj.order):
        problems.append(f"agent {agent.name!r}: duplicate variable in order")
    unknown = [v for v in obj.order if v not in names]
    if unknown:
        problems.append(f"agent {agent.name!r}: unknown variable {unknown[0]!r} in order")
        return
    expected = int(np.prod(model.shape_of(obj.order)))
    if obj.values.size != expected:
        problems.append(
            f"agent {agent.name!r}: {obj.values.size} values for a domain of size {expected}"
        )
    if not np.isfinite(obj.values).all():
        problems.append(f"agent {agent.name!r}: non-finite objective value")


def _check_pairwise(agent: Agent, obj: PairwiseEnergy, model: GameModel, problems: list[str]) -> None:
    names = set(model.variable_names())
    seen = set()
    own_card = None
    if agent.acts_on in names:
        own_card = model.cardinality(agent.acts_on)
    for other, table in obj.terms:
        if other not in names:
            problems.append(f"agent {agent.name!r}: pairwise term with unknown variable {other!r}")
            continue
        if other == agent.acts_on:
            problems.append(f"agent {agent.name!r}: pairwise term with its own variable")
            continue
        if other in seen:
            problems.append(f"agent {agent.name!r}: variable {other!r} listed twice in pairwise terms")
        seen.add(other)
        shape = (own_card, model.cardinality(other))
        if own_card is not None and table.shape != shape:
            problems.append(
                f"agent {agent.name!r}: pairwise table for {other!r} has shape "
                f"{table.shape}, expected {shape}"
            )
        if not np.isfinite(table).all():
            problems.append(f"agent {agent.name!r}: non-finite pairwise energy")


def validate(model: GameModel) -> GameModel:
    """Check every structural invariant; raise ValidationError listing all
    violations, or return the model unchanged."""
    problems: list[str] = []

    names = [spec.name for spec in model.variables]
    if len(set(names)) != len(names):
        problems.append("duplicate variable names")
    for spec in model.variables:
        if spec.cardinality < 2:
            problems.append(f"variable {spec.name!r}: cardinality {spec.cardinality} < 2")

    if not (math.isfinite(model.hbar) and model.hbar > 0):
        problems.append(f"hbar must be a positive finite real, got {model.hbar}")
    if model.mode not in ("energy", "utility"):
        problems.append(f"mode must be 'energy' or 'utility', got {model.mode!r}")

    agent_names = [a.name for a in model.agents]
    if len(set(agent_names)) != len(agent_names):
        problems.append("duplicate agent names")
    acted = [a.acts_on for a in model.agents]
    if sorted(acted) != sorted(names):
        problems.append("agents and variables must be in one-to-one correspondence")

    for agent in model.agents:
        obj = agent.objective
        if isinstance(obj, DenseUtility):
            if model.mode != "utility":
                problems.append(f"agent {agent.name!r}: utility objective in energy mode")
            if (np.asarray(obj.values) < 0).any():
                problems.append(f"agent {agent.name!r}: negative utility value")
            _check_dense(agent, obj, model, problems)
        elif isinstance(obj, DenseEnergy):
            if model.mode != "energy":
                problems.append(f"agent {agent.name!r}: energy objective in utility mode")
            _check_dense(agent, obj, model, problems)
        elif isinstance(obj, PairwiseEnergy):
            if model.mode != "energy":
                problems.append(f"agent {agent.name!r}: pairwise energies require energy mode")
            _check_pairwise(agent, obj, model, problems)
        else:
            problems.append(f"agent {agent.name!r}: unrecognized objective type")

    if problems:
        raise ValidationError(problems)
    return model


def energy_to_utility(objective: DenseEnergy, hbar: float) -> DenseUtility:
    """Boltzmann map u = exp(-E / hbar); strictly positive, order-reversing."""
    if not (hbar > 0):
        raise ValueError("hbar must be positive")
    return DenseUtility(objective.order, np.exp(-objective.values / hbar))


def densify(objective: PairwiseEnergy, model: GameModel, own: str) -> DenseEnergy:
    """Expand a pairwise objective into the equivalent dense energy table.

    The output order is the model's variable order restricted to the own
    variable plus every referenced neighbor; each entry is the sum of the
    pairwise tables at that joint assignment.
    """
    referenced = {other for other, _ in objective.terms}
    for other in referenced:
        model.cardinality(other)  # raises KeyError for unknown references
    order = [v for v in model.variable_names() if v == own or v in referenced]
    shape = model.shape_of(order)
    total = np.zeros(shape)
    own_axis = order.index(own)
    for other, table in objective.terms:
        other_axis = order.index(other)
        expand = [None] * len(order)
        expand[own_axis] = slice(None)
        expand[other_axis] = slice(None)
        view = table if own_axis < other_axis else table.T
        total = total + view[tuple(expand)]
    return DenseEnergy(tuple(order), total.ravel())


def to_utility_model(model: GameModel) -> GameModel:
    """Equivalent utility-maximizing model, u_i = exp(-E_i / hbar)."""
    if model.mode == "utility":
        return model
    agents = []
    for agent in model.agents:
        obj = agent.objective
        if isinstance(obj, PairwiseEnergy):
            obj = densify(obj, model, agent.acts_on)
        agents.append(replace(agent, objective=energy_to_utility(obj, model.hbar)))
    return replace(model, agents=tuple(agents), mode="utility")
