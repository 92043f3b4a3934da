"""Seeded construction of planning instances.

Demand follows one of five trajectory shapes over the horizon.  Catalogs
are built on a skill lattice: each technology requires one unique skill,
and one employee type exists for every subset of skills.  Sampled costs are
sorted so that bigger machines and broader skill sets never get cheaper,
and the no-skill type works for free but cannot operate anything.  Initial
resources are bootstrapped by letting each planning approach solve a
single-period problem from scratch.
"""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .domain import (
    EmployeeType,
    Instance,
    TechnologyType,
    derive_qualified_pairs,
    derive_training_pairs,
)

SCENARIO_KINDS = (
    "Cycle1UpDown",
    "Cycle2DownUp",
    "RandomDecrease",
    "RandomIncrease",
    "RandomFluctuation",
)

DEFAULT_COST_RANGES: dict[str, tuple[float, float]] = {
    "purchasing": (100.0, 600.0),
    "maintenance": (10.0, 10.0),
    "discarding": (10.0, 20.0),
    "hiring": (500.0, 2000.0),
    "salary": (200.0, 300.0),
    "firing": (200.0, 500.0),
    "training": (10.0, 500.0),
    "assignment": (50.0, 60.0),
}

MAX_TECH_TYPES = 16  # the employee lattice doubles per technology type


@dataclass(frozen=True)
class DemandScenario:
    """Shape, anchor, and clamp bounds of a demand trajectory."""

    kind: str = "RandomIncrease"
    start_level: int = 1000
    lower: int = 0
    upper: int = 2000

    def __post_init__(self) -> None:
        if self.kind not in SCENARIO_KINDS:
            raise ValueError(f"unknown demand scenario kind: {self.kind!r}")
        if not 0 <= self.lower <= self.start_level <= self.upper:
            raise ValueError("demand levels must satisfy 0 <= lower <= start <= upper")


@dataclass(frozen=True)
class GeneratorConfig:
    n_tech: int
    seed: int
    horizon: int = 10
    scenario: DemandScenario = field(default_factory=DemandScenario)
    cost_ranges: Mapping[str, tuple[float, float]] = field(
        default_factory=lambda: dict(DEFAULT_COST_RANGES)
    )
    training_time_range: tuple[int, int] = (0, 2)
    capacity_range: tuple[int, int] = (200, 1000)
    discount: float = 0.93

    def __post_init__(self) -> None:
        ranges = dict(DEFAULT_COST_RANGES)
        ranges.update(self.cost_ranges)
        object.__setattr__(self, "cost_ranges", ranges)
        for name, (lo, hi) in ranges.items():
            if lo > hi:
                raise ValueError(f"cost range {name} has min > max")
        for lo, hi in (self.training_time_range, self.capacity_range):
            if lo > hi:
                raise ValueError("range has min > max")


def config_to_dict(config: GeneratorConfig) -> dict:
    return {
        "n_tech": config.n_tech,
        "seed": config.seed,
        "horizon": config.horizon,
        "scenario": dataclasses.asdict(config.scenario),
        "cost_ranges": {k: list(v) for k, v in sorted(config.cost_ranges.items())},
        "training_time_range": list(config.training_time_range),
        "capacity_range": list(config.capacity_range),
        "discount": config.discount,
    }


def config_from_dict(data: Mapping) -> GeneratorConfig:
    kwargs = dict(data)
    if "scenario" in kwargs:
        kwargs["scenario"] = DemandScenario(**kwargs["scenario"])
    if "cost_ranges" in kwargs:
        kwargs["cost_ranges"] = {
            k: (float(lo), float(hi)) for k, (lo, hi) in kwargs["cost_ranges"].items()
        }
    for key in ("training_time_range", "capacity_range"):
        if key in kwargs:
            kwargs[key] = tuple(kwargs[key])
    return GeneratorConfig(**kwargs)


def config_from_json(text: str) -> GeneratorConfig:
    return config_from_dict(json.loads(text))


def generate_demand(
    scenario: DemandScenario, horizon: int, rng: np.random.Generator
) -> tuple[int, ...]:
    """One demand trajectory, clamped to the scenario bounds and rounded.

    Random walks step by U(0, step) with step sized so the walk can span
    the start-to-upper band within the horizon.  Cycle shapes climb (or
    descend) on freshly drawn increments and come back on the same
    increments reversed, so the final level equals the first exactly.
    """
    if horizon < 2:
        raise ValueError("demand trajectories need at least two periods")
    step = 2.0 * (scenario.upper - scenario.start_level) / horizon
    start = float(scenario.start_level)
    kind = scenario.kind
    if kind in ("RandomIncrease", "RandomDecrease", "RandomFluctuation"):
        if kind == "RandomIncrease":
            moves = rng.uniform(0.0, step, horizon) if step else np.zeros(horizon)
        elif kind == "RandomDecrease":
            moves = -rng.uniform(0.0, step, horizon) if step else np.zeros(horizon)
        else:
            moves = rng.uniform(-step, step, horizon) if step else np.zeros(horizon)
        raw = start + np.cumsum(moves)
    else:
        # climb for half the horizon, return on the mirrored increments;
        # even horizons hold the peak for one extra period
        legs = (horizon - 1) // 2
        rise = rng.uniform(0.0, step, legs) if step else np.zeros(legs)
        if kind == "Cycle2DownUp":
            rise = -rise
        path = [start]
        for inc in rise:
            path.append(path[-1] + inc)
        if horizon % 2 == 0:
            path.append(path[-1])
        for inc in rise[::-1]:
            path.append(path[-1] - inc)
        raw = np.array(path)
    clamped = np.clip(raw, scenario.lower, scenario.upper)
    return tuple(int(round(v)) for v in clamped)


def generate_instance(config: GeneratorConfig) -> Instance:
    """A full instance with empty initial resources.

    Everything is drawn from one seeded stream in a fixed order (demand,
    capacities, technology costs, workforce costs, training, assignment),
    which is what makes identical configs bit-identical.
    """
    n = config.n_tech
    if n < 1:
        raise ValueError("need at least one technology type")
    if n > MAX_TECH_TYPES:
        raise ValueError(f"refusing n_tech > {MAX_TECH_TYPES}: employee lattice explodes")
    rng = np.random.default_rng(config.seed)
    ranges = config.cost_ranges
    demand = generate_demand(config.scenario, config.horizon, rng)

    cap_lo, cap_hi = config.capacity_range
    capacities = np.sort(rng.integers(cap_lo, cap_hi + 1, n))
    purchasing = np.sort(rng.uniform(*ranges["purchasing"], n))
    maintenance = np.sort(rng.uniform(*ranges["maintenance"], n))
    discarding = np.sort(rng.uniform(*ranges["discarding"], n))
    technologies = tuple(
        TechnologyType(
            required_skills=frozenset({k + 1}),
            capacity=int(capacities[k]),
            purchase_cost=float(purchasing[k]),
            maintenance_cost=float(maintenance[k]),
            discard_cost=float(discarding[k]),
        )
        for k in range(n)
    )

    n_emp = 2**n
    masks = sorted(range(n_emp), key=lambda m: (bin(m).count("1"), m))
    hiring = np.sort(rng.uniform(*ranges["hiring"], n_emp))
    salary = np.sort(rng.uniform(*ranges["salary"], n_emp))
    salary[0] = 0.0  # the no-skill type draws no base salary
    firing = np.sort(rng.uniform(*ranges["firing"], n_emp))
    employees = tuple(
        EmployeeType(
            skills=frozenset(k + 1 for k in range(n) if mask >> k & 1),
            hiring_cost=float(hiring[rank]),
            salary=float(salary[rank]),
            firing_cost=float(firing[rank]),
        )
        for rank, mask in enumerate(masks)
    )

    skill_time = {k + 1: int(rng.integers(config.training_time_range[0], config.training_time_range[1] + 1)) for k in range(n)}
    skill_cost = {k + 1: float(rng.uniform(*ranges["training"])) for k in range(n)}

    def compose(src: frozenset, dst: frozenset) -> tuple[int, float]:
        added = dst - src
        return sum(skill_time[s] for s in added), sum(skill_cost[s] for s in added)

    trainings = derive_training_pairs(employees, compose)
    assignment = {
        pair: float(rng.uniform(*ranges["assignment"]))
        for pair in derive_qualified_pairs(technologies, employees)
    }
    return Instance(
        technologies=technologies,
        employees=employees,
        trainings=trainings,
        horizon=config.horizon,
        discount=config.discount,
        demand=demand,
        initial_tech=(0,) * n,
        initial_workforce=(0,) * n_emp,
        assignment_cost=assignment,
    )


def generate_batch(config: GeneratorConfig, count: int) -> tuple[Instance, ...]:
    """count instances under per-instance derived seeds (seed + index)."""
    return tuple(
        generate_instance(dataclasses.replace(config, seed=config.seed + k))
        for k in range(count)
    )


def apply_initial_resources(
    instance: Instance, initial_tech: tuple[int, ...], initial_workforce: tuple[int, ...]
) -> Instance:
    return dataclasses.replace(
        instance, initial_tech=tuple(initial_tech), initial_workforce=tuple(initial_workforce)
    )


def bootstrap_initial_resources(
    instance: Instance, approach: str, target_level: int
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Initial resources as the named approach's own single-period plan.

    Solves a one-period problem with demand target_level and nothing owned,
    using the same models the approach applies over a full horizon, and
    reads off the technology purchased and the workforce standing at the end
    of that period.  The two totals always balance: every operated unit
    needs exactly one employee, and neither side buys idle resources.
    """
    from . import approaches  # deferred: approaches builds on this module's output

    if target_level < 0:
        raise ValueError("target level must be nonnegative")
    if any(instance.initial_tech) or any(instance.initial_workforce):
        raise ValueError("bootstrap expects an instance with empty initial resources")
    if target_level == 0:
        return (0,) * instance.n_tech, (0,) * instance.n_emp
    one_period = dataclasses.replace(
        instance, horizon=1, demand=(int(target_level),)
    )
    solvers = {
        "hierarchical": approaches.solve_hierarchical,
        "joint": approaches.solve_joint,
        "integrated": approaches.solve_integrated,
    }
    if approach not in solvers:
        raise ValueError(f"unknown approach: {approach!r}")
    report = solvers[approach](one_period)
    plan = report.plan
    bx = tuple(int(q) for q in np.asarray(plan.x)[:, 0])
    by = tuple(int(q) for q in np.asarray(plan.Y)[:, 0])
    if sum(bx) != sum(by):
        raise RuntimeError("bootstrap produced unbalanced initial resources")
    return bx, by
