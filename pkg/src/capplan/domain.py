"""Core data model for multi-period technology and workforce planning.

A planning instance couples a catalog of technology types (each requiring a
set of skills to operate) with a catalog of employee types (each holding a
set of skills), a qualification relation between them, feasible training
moves between employee types, a demand trajectory, and initial resource
endowments.  All money amounts are plain floats compared at absolute
tolerance 1e-6; capacities, demands, and resource counts are exact integers.

Periods are indexed 0..T-1 internally.  A decision taken in period t is
discounted by discount**t.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

MONEY_TOL = 1e-6


@dataclass(frozen=True)
class TechnologyType:
    """One purchasable technology type.

    required_skills is the set of skills an employee must hold to operate a
    unit.  capacity is service units per period per unit held.  The purchase
    cost is one-time; maintenance recurs every period the unit is held; the
    discard cost is one-time (discarding also stops the maintenance stream,
    which can make the effective discard cost negative).
    """

    required_skills: frozenset[int]
    capacity: int
    purchase_cost: float
    maintenance_cost: float
    discard_cost: float

    def __post_init__(self) -> None:
        if self.capacity < 1:
            raise ValueError("technology capacity must be a positive integer")


@dataclass(frozen=True)
class EmployeeType:
    """One hirable employee type, identified by the skills it holds."""

    skills: frozenset[int]
    hiring_cost: float
    salary: float
    firing_cost: float


@dataclass(frozen=True)
class TrainingOption:
    """A feasible skill upgrade from one employee type to a strictly more
    skilled one.  duration is in whole periods (0 means the upgrade completes
    within its start period); base_cost is the one-time tuition component,
    the salary differential is added per period when cost tables are built.
    """

    from_type: int
    to_type: int
    duration: int
    base_cost: float


@dataclass(frozen=True)
class Instance:
    """A complete planning problem.

    demand, initial_tech, and initial_workforce are tuples (length horizon,
    n technologies, and n employee types respectively).  assignment_cost maps
    qualified (tech index, employee index) pairs to the per-period cost of
    keeping that pair assigned.
    """

    technologies: tuple[TechnologyType, ...]
    employees: tuple[EmployeeType, ...]
    trainings: tuple[TrainingOption, ...]
    horizon: int
    discount: float
    demand: tuple[int, ...]
    initial_tech: tuple[int, ...]
    initial_workforce: tuple[int, ...]
    assignment_cost: dict[tuple[int, int], float] = field(default_factory=dict)

    @property
    def n_tech(self) -> int:
        return len(self.technologies)

    @property
    def n_emp(self) -> int:
        return len(self.employees)

    def training_map(self) -> dict[tuple[int, int], TrainingOption]:
        return {(opt.from_type, opt.to_type): opt for opt in self.trainings}


@dataclass(frozen=True, eq=False)
class CostTables:
    """Time-dependent unit costs, one row per type, one column per period.

    tech_purchase[i, t] folds the purchase price and the discounted
    maintenance stream from t to the end of the horizon into a single
    purchase-now cost; tech_discard[i, t] nets the discard fee against the
    maintenance stream saved (and may be negative).  wf_hire / wf_fire do the
    same with the salary stream.  wf_train[(j, jp)][t] is the tuition plus
    the discounted salary differential stream.  assign costs are
    period-constant.  weight[t] = discount**t; tail[t] = sum of
    discount**(k-t) for k = t..T-1.
    """

    tech_purchase: np.ndarray
    tech_discard: np.ndarray
    wf_hire: np.ndarray
    wf_fire: np.ndarray
    wf_train: dict[tuple[int, int], np.ndarray]
    assign: dict[tuple[int, int], float]
    weight: np.ndarray
    tail: np.ndarray


def tail_sums(discount: float, horizon: int) -> np.ndarray:
    """tail[t] = 1 + discount + ... + discount**(T-1-t)."""
    tail = np.empty(horizon, dtype=float)
    acc = 0.0
    for t in range(horizon - 1, -1, -1):
        acc = 1.0 + discount * acc
        tail[t] = acc
    return tail


def derive_qualified_pairs(
    technologies: Iterable[TechnologyType], employees: Iterable[EmployeeType]
) -> tuple[tuple[int, int], ...]:
    """All (tech index, employee index) pairs where the employee holds every
    skill the technology requires."""
    pairs = []
    for i, tech in enumerate(technologies):
        for j, emp in enumerate(employees):
            if tech.required_skills <= emp.skills:
                pairs.append((i, j))
    return tuple(pairs)


def derive_training_pairs(
    employees: Iterable[EmployeeType],
    rule: Callable[[frozenset[int], frozenset[int]], tuple[int, float]],
) -> tuple[TrainingOption, ...]:
    """All ordered type pairs with strictly increasing skill sets.

    rule(from_skills, to_skills) supplies (duration, base_cost) for each
    edge; generators typically price the added skills additively.
    """
    emps = list(employees)
    options = []
    for j, src in enumerate(emps):
        for jp, dst in enumerate(emps):
            if src.skills < dst.skills:
                duration, cost = rule(src.skills, dst.skills)
                options.append(TrainingOption(j, jp, int(duration), float(cost)))
    return tuple(options)


def build_cost_tables(instance: Instance) -> CostTables:
    """Fold one-time fees and discounted recurring streams into per-period
    unit costs.

    For a purchase in period t the maintenance stream runs from t to the end
    of the horizon, so tech_purchase[i, t] = PC + MS * tail[t]; a discard in
    period t stops that same stream, so tech_discard[i, t] = DC - MS * tail[t].
    Hiring and firing treat the salary stream identically.  Training charges
    tuition plus the salary difference stream from the start period.
    """
    if not (0.0 < instance.discount < 1.0):
        raise ValueError("discount factor must lie strictly between 0 and 1")
    T = instance.horizon
    tail = tail_sums(instance.discount, T)
    weight = instance.discount ** np.arange(T, dtype=float)

    n_i, n_j = instance.n_tech, instance.n_emp
    tech_purchase = np.empty((n_i, T))
    tech_discard = np.empty((n_i, T))
    for i, tech in enumerate(instance.technologies):
        tech_purchase[i] = tech.purchase_cost + tech.maintenance_cost * tail
        tech_discard[i] = tech.discard_cost - tech.maintenance_cost * tail

    wf_hire = np.empty((n_j, T))
    wf_fire = np.empty((n_j, T))
    for j, emp in enumerate(instance.employees):
        wf_hire[j] = emp.hiring_cost + emp.salary * tail
        wf_fire[j] = emp.firing_cost - emp.salary * tail

    wf_train: dict[tuple[int, int], np.ndarray] = {}
    for opt in instance.trainings:
        diff = (
            instance.employees[opt.to_type].salary
            - instance.employees[opt.from_type].salary
        )
        wf_train[(opt.from_type, opt.to_type)] = opt.base_cost + diff * tail

    return CostTables(
        tech_purchase=tech_purchase,
        tech_discard=tech_discard,
        wf_hire=wf_hire,
        wf_fire=wf_fire,
        wf_train=wf_train,
        assign=dict(instance.assignment_cost),
        weight=weight,
        tail=tail,
    )


def _max_bipartite_units(
    supply: list[int], capacity: list[int], edges: set[tuple[int, int]]
) -> int:
    """Max units of supply routable to capacity across the allowed edges.

    Small Ford-Fulkerson on the type graph; sizes here are a handful of
    types with unit counts in the tens, so BFS augmentation is plenty.
    """
    n, m = len(supply), len(capacity)
    # residual[u][v] over nodes: 0 source, 1..n tech, n+1..n+m emp, n+m+1 sink
    size = n + m + 2
    src, sink = 0, n + m + 1
    residual = [dict() for _ in range(size)]

    def add(u: int, v: int, cap: int) -> None:
        residual[u][v] = residual[u].get(v, 0) + cap
        residual[v].setdefault(u, 0)

    for i, s in enumerate(supply):
        if s > 0:
            add(src, 1 + i, s)
    for j, c in enumerate(capacity):
        if c > 0:
            add(1 + n + j, sink, c)
    for (i, j) in edges:
        add(1 + i, 1 + n + j, 10**9)

    flow = 0
    while True:
        parent = {src: None}
        queue = [src]
        while queue and sink not in parent:
            u = queue.pop(0)
            for v, cap in residual[u].items():
                if cap > 0 and v not in parent:
                    parent[v] = u
                    queue.append(v)
        if sink not in parent:
            return flow
        # bottleneck along the found path
        path = []
        v = sink
        while parent[v] is not None:
            u = parent[v]
            path.append((u, v))
            v = u
        push = min(residual[u][v] for u, v in path)
        for u, v in path:
            residual[u][v] -= push
            residual[v][u] += push
        flow += push


def validate_instance(instance: Instance) -> list[str]:
    """Structural validation; returns a list of violations (empty = valid)."""
    problems: list[str] = []
    if instance.horizon < 1:
        problems.append("horizon must be at least 1")
    if not (0.0 < instance.discount < 1.0):
        problems.append("discount factor must lie strictly in (0, 1)")
    if not instance.technologies:
        problems.append("at least one technology type is required")
    if not instance.employees:
        problems.append("at least one employee type is required")

    if len(instance.demand) != instance.horizon:
        problems.append("demand vector length must equal the horizon")
    for t, d in enumerate(instance.demand):
        if int(d) != d or d < 0:
            problems.append(f"demand in period {t} must be a non-negative integer")

    if len(instance.initial_tech) != instance.n_tech:
        problems.append("initial_tech length must match the technology catalog")
    if len(instance.initial_workforce) != instance.n_emp:
        problems.append("initial_workforce length must match the employee catalog")
    for label, counts in (
        ("initial_tech", instance.initial_tech),
        ("initial_workforce", instance.initial_workforce),
    ):
        for k, c in enumerate(counts):
            if int(c) != c or c < 0:
                problems.append(f"{label}[{k}] must be a non-negative integer")

    for i, tech in enumerate(instance.technologies):
        if tech.purchase_cost < 0 or tech.maintenance_cost < 0 or tech.discard_cost < 0:
            problems.append(f"technology {i} has a negative base cost")
    for j, emp in enumerate(instance.employees):
        if emp.hiring_cost < 0 or emp.salary < 0 or emp.firing_cost < 0:
            problems.append(f"employee type {j} has a negative base cost")

    seen_edges: set[tuple[int, int]] = set()
    for opt in instance.trainings:
        if not (0 <= opt.from_type < instance.n_emp and 0 <= opt.to_type < instance.n_emp):
            problems.append(f"training edge {opt.from_type}->{opt.to_type} has an unknown type")
            continue
        if (opt.from_type, opt.to_type) in seen_edges:
            problems.append(f"duplicate training edge {opt.from_type}->{opt.to_type}")
        seen_edges.add((opt.from_type, opt.to_type))
        src = instance.employees[opt.from_type].skills
        dst = instance.employees[opt.to_type].skills
        if not src < dst:
            problems.append(
                f"training edge {opt.from_type}->{opt.to_type} does not strictly add skills"
            )
        if opt.duration < 0 or int(opt.duration) != opt.duration:
            problems.append(
                f"training edge {opt.from_type}->{opt.to_type} has an invalid duration"
            )
        if opt.base_cost < 0:
            problems.append(
                f"training edge {opt.from_type}->{opt.to_type} has a negative cost"
            )

    qualified = set(derive_qualified_pairs(instance.technologies, instance.employees))
    for pair in instance.assignment_cost:
        if pair not in qualified:
            problems.append(f"assignment cost given for unqualified pair {pair}")
    for pair in sorted(qualified):
        if pair not in instance.assignment_cost:
            problems.append(f"assignment cost missing for qualified pair {pair}")

    total_tech = int(sum(instance.initial_tech))
    total_wf = int(sum(instance.initial_workforce))
    if total_tech != total_wf:
        problems.append(
            f"unbalanced initial resources: {total_tech} technology units vs "
            f"{total_wf} employees"
        )
    elif total_tech > 0 and not problems:
        matched = _max_bipartite_units(
            list(instance.initial_tech), list(instance.initial_workforce), qualified
        )
        if matched < total_tech:
            problems.append("no qualified employee for held technology")

    return problems


# ---------------------------------------------------------------------------
# JSON schema


def instance_to_dict(instance: Instance) -> dict:
    return {
        "horizon": instance.horizon,
        "discount": instance.discount,
        "demand": list(instance.demand),
        "initial_tech": list(instance.initial_tech),
        "initial_workforce": list(instance.initial_workforce),
        "technologies": [
            {
                "required_skills": sorted(t.required_skills),
                "capacity": t.capacity,
                "purchase_cost": t.purchase_cost,
                "maintenance_cost": t.maintenance_cost,
                "discard_cost": t.discard_cost,
            }
            for t in instance.technologies
        ],
        "employees": [
            {
                "skills": sorted(e.skills),
                "hiring_cost": e.hiring_cost,
                "salary": e.salary,
                "firing_cost": e.firing_cost,
            }
            for e in instance.employees
        ],
        "trainings": [
            {
                "from_type": o.from_type,
                "to_type": o.to_type,
                "duration": o.duration,
                "base_cost": o.base_cost,
            }
            for o in instance.trainings
        ],
        "assignment_costs": [
            [i, j, cost] for (i, j), cost in sorted(instance.assignment_cost.items())
        ],
    }


def instance_from_dict(data: dict) -> Instance:
    technologies = tuple(
        TechnologyType(
            required_skills=frozenset(t["required_skills"]),
            capacity=int(t["capacity"]),
            purchase_cost=float(t["purchase_cost"]),
            maintenance_cost=float(t["maintenance_cost"]),
            discard_cost=float(t["discard_cost"]),
        )
        for t in data["technologies"]
    )
    employees = tuple(
        EmployeeType(
            skills=frozenset(e["skills"]),
            hiring_cost=float(e["hiring_cost"]),
            salary=float(e["salary"]),
            firing_cost=float(e["firing_cost"]),
        )
        for e in data["employees"]
    )
    trainings = tuple(
        TrainingOption(
            from_type=int(o["from_type"]),
            to_type=int(o["to_type"]),
            duration=int(o["duration"]),
            base_cost=float(o["base_cost"]),
        )
        for o in data["trainings"]
    )
    return Instance(
        technologies=technologies,
        employees=employees,
        trainings=trainings,
        horizon=int(data["horizon"]),
        discount=float(data["discount"]),
        demand=tuple(int(d) for d in data["demand"]),
        initial_tech=tuple(int(c) for c in data["initial_tech"]),
        initial_workforce=tuple(int(c) for c in data["initial_workforce"]),
        assignment_cost={
            (int(i), int(j)): float(c) for i, j, c in data["assignment_costs"]
        },
    )


def instance_to_json(instance: Instance) -> str:
    return json.dumps(instance_to_dict(instance), indent=2, sort_keys=True) + "\n"


def instance_from_json(text: str) -> Instance:
    return instance_from_dict(json.loads(text))
