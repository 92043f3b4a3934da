"""End-to-end planning pipelines and their shared reporting surface.

Three solvers cover the same decision space at different levels of
coordination.  The hierarchical pipeline fixes technology purchases first,
then staffs them, then assigns operators to demand.  The joint pipeline
prices every candidate purchase together with its cheapest qualified
operator and schedules the composite items.  The integrated solver
optimizes everything at once as one mixed-integer model.  All three emit
the same Plan shape, so a single verifier, statistics routine, and cost
accounting serve every approach.
"""
from __future__ import annotations

import itertools
import json
import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .domain import (
    MONEY_TOL,
    CostTables,
    Instance,
    build_cost_tables,
    derive_qualified_pairs,
)
from .kernels import (
    CoveringItem,
    Infeasible,
    SizeGuard,
    TdkpInstance,
    price_acquisitions,
    solve_covering_knapsack,
    solve_tdkp,
)
from .milp import (
    IntegratedIndex,
    LinearModel,
    build_integrated_model,
    build_tech_plan_model,
    solve_milp,
)

BREAKDOWN_KEYS = (
    "tech_purchase",
    "tech_discard",
    "wf_hire",
    "wf_fire",
    "wf_train",
    "assignment",
)


@dataclass(eq=False)
class Plan:
    """Integer decision trajectories, one row per type, one column per period.

    x and v are technology purchases and discards, y and w hires and fires,
    u[j, jp, t] counts trainings from type j to type jp starting in period t,
    z[i, j, t] units of technology i operated by employees of type j, and
    Y[j, t] the workforce standing as type j after period t's moves.
    Q[i, j, t] is the staffing match the hierarchical workforce step commits
    to; the other pipelines leave it None.
    """

    x: np.ndarray
    v: np.ndarray
    y: np.ndarray
    w: np.ndarray
    u: np.ndarray
    z: np.ndarray
    Y: np.ndarray
    Q: np.ndarray | None = None


@dataclass(eq=False)
class SolveReport:
    """What one pipeline run cost and how it got there.

    breakdown maps the six spend families to discounted totals and always
    sums to total_cost.  stats holds decision volumes and utilizations,
    diagnostics the solver route, bound gap, and runtime.
    """

    approach: str
    total_cost: float
    breakdown: dict[str, float]
    stats: dict[str, float]
    diagnostics: dict[str, object]


@dataclass(frozen=True)
class VerificationReport:
    feasible: bool
    violations: tuple[str, ...]
    recomputed_cost: float


def empty_plan(instance: Instance) -> Plan:
    n_i, n_j, T = instance.n_tech, instance.n_emp, instance.horizon
    return Plan(
        x=np.zeros((n_i, T), dtype=int),
        v=np.zeros((n_i, T), dtype=int),
        y=np.zeros((n_j, T), dtype=int),
        w=np.zeros((n_j, T), dtype=int),
        u=np.zeros((n_j, n_j, T), dtype=int),
        z=np.zeros((n_i, n_j, T), dtype=int),
        Y=np.zeros((n_j, T), dtype=int),
    )


def held_stock(instance: Instance, plan: Plan) -> np.ndarray:
    """stock[i, t]: units of technology i held through period t."""
    return np.asarray(instance.initial_tech, dtype=int)[:, None] + np.cumsum(
        plan.x - plan.v, axis=1
    )


def _standing_workforce(
    instance: Instance, y: np.ndarray, w: np.ndarray, u: np.ndarray
) -> np.ndarray:
    """Y[j, t] implied by the hire, fire, and training flows.

    A training leaves its source type in its start period and reaches the
    target type after its duration; the trainee stands nowhere in between.
    """
    T = instance.horizon
    Y = np.zeros((instance.n_emp, T), dtype=int)
    run = np.asarray(instance.initial_workforce, dtype=int).copy()
    for t in range(T):
        run = run + y[:, t] - w[:, t]
        for opt in instance.trainings:
            run[opt.from_type] -= u[opt.from_type, opt.to_type, t]
            start = t - opt.duration
            if start >= 0:
                run[opt.to_type] += u[opt.from_type, opt.to_type, start]
        Y[:, t] = run
    return Y


# ---------------------------------------------------------------------------
# cost accounting and statistics


def cost_breakdown(
    instance: Instance,
    tables: CostTables,
    plan: Plan,
    train_as_hiring: bool = False,
) -> dict[str, float]:
    """Discounted spend per decision family.

    The sequential pipelines only ever train while standing up a new hire,
    and report that spend as part of hiring (train_as_hiring); a separate
    training line is meaningful only for the integrated solver, which can
    retrain people it already employs.
    """
    w8 = tables.weight
    out = {
        "tech_purchase": float(np.sum(w8 * tables.tech_purchase * plan.x)),
        "tech_discard": float(np.sum(w8 * tables.tech_discard * plan.v)),
        "wf_hire": float(np.sum(w8 * tables.wf_hire * plan.y)),
        "wf_fire": float(np.sum(w8 * tables.wf_fire * plan.w)),
    }
    train = 0.0
    for (j, jp), costs in tables.wf_train.items():
        train += float(np.sum(w8 * costs * plan.u[j, jp]))
    assign = 0.0
    for (i, j), cost in tables.assign.items():
        assign += float(cost * np.sum(w8 * plan.z[i, j]))
    if train_as_hiring:
        out["wf_hire"] += train
        train = 0.0
    out["wf_train"] = train
    out["assignment"] = assign
    return out


def compute_statistics(instance: Instance, plan: Plan) -> dict[str, float]:
    """Decision volumes and unit-count utilizations.

    Utilization divides assigned unit-periods by held technology
    unit-periods or by standing employee-periods; an empty denominator
    reports zero.
    """
    T = instance.horizon
    stock = held_stock(instance, plan)
    assigned = float(plan.z.sum())
    held = float(stock.sum())
    standing = float(plan.Y.sum())
    return {
        "amount_purchased": float(plan.x.sum()),
        "amount_discarded": float(plan.v.sum()),
        "hired": float(plan.y.sum()),
        "fired": float(plan.w.sum()),
        "mean_tech_inventory": held / T,
        "mean_workforce": standing / T,
        "tech_utilization": assigned / held if held > 0 else 0.0,
        "wf_utilization": assigned / standing if standing > 0 else 0.0,
    }


# ---------------------------------------------------------------------------
# JSON surfaces


def plan_to_dict(plan: Plan) -> dict:
    """Sparse nonzero entries keyed by type and period."""

    def two(arr: np.ndarray) -> list[list[int]]:
        return [[int(a), int(t), int(arr[a, t])] for a, t in zip(*np.nonzero(arr))]

    def three(arr: np.ndarray) -> list[list[int]]:
        return [
            [int(a), int(b), int(t), int(arr[a, b, t])]
            for a, b, t in zip(*np.nonzero(arr))
        ]

    n_i, n_j, T = plan.z.shape
    out = {
        "n_tech": int(n_i),
        "n_emp": int(n_j),
        "horizon": int(T),
        "x": two(plan.x),
        "v": two(plan.v),
        "y": two(plan.y),
        "w": two(plan.w),
        "u": three(plan.u),
        "z": three(plan.z),
        "Y": two(plan.Y),
    }
    if plan.Q is not None:
        out["Q"] = three(plan.Q)
    return out


def plan_from_dict(data: dict) -> Plan:
    n_i, n_j, T = int(data["n_tech"]), int(data["n_emp"]), int(data["horizon"])

    def two(entries, rows):
        arr = np.zeros((rows, T), dtype=int)
        for a, t, val in entries:
            arr[a, t] = val
        return arr

    def three(entries, rows, cols):
        arr = np.zeros((rows, cols, T), dtype=int)
        for a, b, t, val in entries:
            arr[a, b, t] = val
        return arr

    return Plan(
        x=two(data["x"], n_i),
        v=two(data["v"], n_i),
        y=two(data["y"], n_j),
        w=two(data["w"], n_j),
        u=three(data["u"], n_j, n_j),
        z=three(data["z"], n_i, n_j),
        Y=two(data["Y"], n_j),
        Q=three(data["Q"], n_i, n_j) if "Q" in data else None,
    )


def report_to_dict(report: SolveReport) -> dict:
    return {
        "approach": report.approach,
        "total_cost": report.total_cost,
        "breakdown": dict(report.breakdown),
        "stats": dict(report.stats),
        "diagnostics": dict(report.diagnostics),
    }


def report_to_json(report: SolveReport) -> str:
    return json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# shared pipeline pieces


def _staff_units(
    instance: Instance, tech_units: np.ndarray, worker_units: np.ndarray
) -> np.ndarray:
    """counts[i, j]: a qualified dedication of workers to held units.

    Greedy in technology index order taking the cheapest qualified salary
    still in supply; greed can strand a unit even when a full matching
    exists, in which case an optimal unit-level assignment is solved
    instead.
    """
    n_i, n_j = instance.n_tech, instance.n_emp
    counts = np.zeros((n_i, n_j), dtype=int)
    tech_units = np.asarray(tech_units, dtype=int)
    worker_units = np.asarray(worker_units, dtype=int)
    if tech_units.sum() == 0:
        return counts
    qualified = derive_qualified_pairs(instance.technologies, instance.employees)
    by_tech: dict[int, list[int]] = {i: [] for i in range(n_i)}
    for i, j in qualified:
        by_tech[i].append(j)
    for i in range(n_i):
        by_tech[i].sort(key=lambda j: (instance.employees[j].salary, j))

    supply = worker_units.copy()
    stranded = False
    for i in range(n_i):
        for _ in range(int(tech_units[i])):
            for j in by_tech[i]:
                if supply[j] > 0:
                    supply[j] -= 1
                    counts[i, j] += 1
                    break
            else:
                stranded = True
        if stranded:
            break
    if not stranded:
        return counts

    rows = [i for i in range(n_i) for _ in range(int(tech_units[i]))]
    cols = [j for j in range(n_j) for _ in range(int(worker_units[j]))]
    if len(cols) < len(rows):
        raise Infeasible("not enough workers to staff the held technology")
    blocked = 1e12
    qual = set(qualified)
    cost = np.array(
        [
            [instance.employees[j].salary if (i, j) in qual else blocked for j in cols]
            for i in rows
        ]
    )
    r, c = linear_sum_assignment(cost)
    if len(r) and float(cost[r, c].max()) >= blocked:
        raise Infeasible("no qualified staffing of the held technology exists")
    counts[:] = 0
    for a, b in zip(r, c):
        counts[rows[a], cols[b]] += 1
    return counts


def _realize_acquisition(pricing, tech: int, deadline: int, count: int, plan: Plan) -> int:
    """Stand up `count` employees qualified for `tech` by `deadline` along
    the cheapest hire-then-train path; returns the standing type."""
    j, _ = pricing.cheapest_qualified(tech, deadline)
    (hired, t0), moves = pricing.path(j, deadline)
    plan.y[hired, t0] += count
    for src, dst, start, _arrival in moves:
        plan.u[src, dst, start] += count
    return j


def _cheapest_assignments(
    instance: Instance,
    demand: np.ndarray,
    bounds_by_period: list[dict[tuple[int, int], int]],
) -> np.ndarray:
    """z[i, j, t] covering each period's demand at minimum assignment cost
    within per-pair unit bounds; periods are independent."""
    n_i, n_j, T = instance.n_tech, instance.n_emp, instance.horizon
    caps = [tech.capacity for tech in instance.technologies]
    z = np.zeros((n_i, n_j, T), dtype=int)
    for t in range(T):
        items: list[CoveringItem] = []
        keys: list[tuple[int, int]] = []
        for (i, j), bound in sorted(bounds_by_period[t].items()):
            if bound > 0:
                items.append(
                    CoveringItem(
                        capacity=int(caps[i]),
                        cost=float(instance.assignment_cost[(i, j)]),
                        bound=int(bound),
                    )
                )
                keys.append((i, j))
        counts, _ = solve_covering_knapsack(items, int(demand[t]))
        for (i, j), q in zip(keys, counts):
            z[i, j, t] = q
    return z


_STATUS_RANK = {"Optimal": 0, "FeasibleGapLimited": 1, "TimeLimit": 2}


def _worse_status(a: str, b: str) -> str:
    return a if _STATUS_RANK.get(a, 3) >= _STATUS_RANK.get(b, 3) else b


def _finish_report(
    approach: str,
    instance: Instance,
    tables: CostTables,
    plan: Plan,
    diagnostics: dict[str, object],
    train_as_hiring: bool,
) -> tuple[Plan, SolveReport]:
    breakdown = cost_breakdown(instance, tables, plan, train_as_hiring=train_as_hiring)
    report = SolveReport(
        approach=approach,
        total_cost=float(sum(breakdown.values())),
        breakdown=breakdown,
        stats=compute_statistics(instance, plan),
        diagnostics=diagnostics,
    )
    return plan, report


# ---------------------------------------------------------------------------
# hierarchical pipeline


def _solve_workforce_model(
    instance: Instance,
    tables: CostTables,
    stock: np.ndarray,
    time_limit: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, object]:
    """Cheapest hire/fire/training flows staffing every held unit.

    Staffing is an equality: each held unit keeps a dedicated qualified
    employee in every period, so a discarded unit releases its operator for
    firing or retraining.  Only used when the technology step discards;
    otherwise the per-acquisition path reduction is exact and faster.
    """
    T = instance.horizon
    n_j = instance.n_emp
    pairs = derive_qualified_pairs(instance.technologies, instance.employees)
    edge_opts = sorted(instance.trainings, key=lambda o: (o.from_type, o.to_type))
    peak = int(stock.sum(axis=0).max(initial=0))
    pool = peak + int(sum(instance.initial_workforce))

    m = LinearModel("workforce_plan")
    y = np.empty((n_j, T), dtype=int)
    w = np.empty((n_j, T), dtype=int)
    Y = np.empty((n_j, T), dtype=int)
    for j in range(n_j):
        for t in range(T):
            y[j, t] = m.add_var(
                f"y_{j}_{t}", 0, peak, tables.weight[t] * tables.wf_hire[j, t]
            )
    for j in range(n_j):
        for t in range(T):
            w[j, t] = m.add_var(
                f"w_{j}_{t}", 0, pool, tables.weight[t] * tables.wf_fire[j, t]
            )
    for j in range(n_j):
        for t in range(T):
            # integral whenever the flows are
            Y[j, t] = m.add_var(f"wf_{j}_{t}", 0, pool, 0.0, integer=False)
    u = np.empty((len(edge_opts), T), dtype=int)
    for e, opt in enumerate(edge_opts):
        key = (opt.from_type, opt.to_type)
        for t in range(T):
            usable = t + opt.duration <= T - 1
            u[e, t] = m.add_var(
                f"u_{key[0]}_{key[1]}_{t}",
                0,
                pool if usable else 0,
                tables.weight[t] * tables.wf_train[key][t],
            )
    q = np.empty((len(pairs), T), dtype=int)
    for k, (i, j) in enumerate(pairs):
        for t in range(T):
            # the staffing split is a transportation pattern over integral
            # stocks and workforce, so it needs no branching of its own
            q[k, t] = m.add_var(
                f"q_{i}_{j}_{t}", 0, int(stock[i].max(initial=0)), 0.0, integer=False
            )

    for j in range(n_j):
        for t in range(T):
            row: dict[int, float] = {int(Y[j, t]): 1.0, int(y[j, t]): -1.0, int(w[j, t]): 1.0}
            if t > 0:
                row[int(Y[j, t - 1])] = -1.0
            for e, opt in enumerate(edge_opts):
                if opt.from_type == j:
                    row[int(u[e, t])] = row.get(int(u[e, t]), 0.0) + 1.0
                if opt.to_type == j:
                    start = t - opt.duration
                    if start >= 0:
                        row[int(u[e, start])] = row.get(int(u[e, start]), 0.0) - 1.0
            m.add_row(row, "=", float(instance.initial_workforce[j]) if t == 0 else 0.0)
    for i in range(instance.n_tech):
        for t in range(T):
            row = {int(q[k, t]): 1.0 for k, (ii, _) in enumerate(pairs) if ii == i}
            m.add_row(row, "=", float(stock[i, t]))
    for j in range(n_j):
        for t in range(T):
            row = {int(q[k, t]): 1.0 for k, (_, jj) in enumerate(pairs) if jj == j}
            if row:
                row[int(Y[j, t])] = -1.0
                m.add_row(row, "<=", 0.0)

    sol = solve_milp(m, time_limit=time_limit)
    if sol.values is None:
        raise Infeasible("held technology cannot be staffed")
    take = lambda idx: np.rint(sol.values[idx]).astype(int)
    return take(y), take(w), take(u), take(Y), sol


def solve_hierarchical(
    instance: Instance,
    tables: CostTables | None = None,
    time_limit: float = 60.0,
) -> tuple[Plan, SolveReport]:
    """Technology first, workforce second, assignment last.

    The purchase schedule covers demand by capacity alone; when every
    per-period discard cost is nonnegative an optimal schedule never
    discards and the covering-schedule kernel applies, otherwise a small
    purchase/discard model is solved.  Staffing then matches every held
    unit with a dedicated qualified employee: without discards, initial
    workers keep their initial units and each acquisition independently
    stands up the single cheapest qualified type reachable by its purchase
    period; with discards the workforce flow model is solved instead.  The
    final step picks the cheapest qualified operator counts period by
    period within the staffing bounds.
    """
    t0 = time.perf_counter()
    if tables is None:
        tables = build_cost_tables(instance)
    T = instance.horizon
    caps = np.array([tech.capacity for tech in instance.technologies], dtype=int)
    demand = np.asarray(instance.demand, dtype=int)
    plan = empty_plan(instance)
    steps: dict[str, str] = {}
    gap = 0.0
    status = "Optimal"

    # step 1: cover demand with purchased capacity
    if float(tables.tech_discard.min(initial=0.0)) >= 0.0:
        base = int(np.dot(caps, np.asarray(instance.initial_tech, dtype=int)))
        x, _ = solve_tdkp(
            TdkpInstance(
                capacities=caps,
                costs=tables.tech_purchase,
                demand=np.maximum(demand - base, 0),
                discount=instance.discount,
            )
        )
        plan.x[:] = x
        steps["technology"] = "kernel"
    else:
        model, idx = build_tech_plan_model(
            caps,
            tables.tech_purchase,
            tables.tech_discard,
            demand,
            instance.discount,
            np.asarray(instance.initial_tech, dtype=int),
        )
        sol = solve_milp(model, time_limit=time_limit)
        if sol.values is None:
            raise Infeasible("demand cannot be covered by any purchase schedule")
        plan.x[:] = np.rint(sol.values[idx.x]).astype(int)
        plan.v[:] = np.rint(sol.values[idx.v]).astype(int)
        steps["technology"] = "milp"
        gap = max(gap, sol.gap)
        status = _worse_status(status, sol.status)

    # step 2: staff every held unit
    stock = held_stock(instance, plan)
    if int(plan.v.sum()) == 0:
        base_match = _staff_units(
            instance, instance.initial_tech, instance.initial_workforce
        )
        plan.Q = np.repeat(base_match[:, :, None], T, axis=2)
        pricing = price_acquisitions(instance, tables)
        for i in range(instance.n_tech):
            for t in range(T):
                n = int(plan.x[i, t])
                if n:
                    j = _realize_acquisition(pricing, i, t, n, plan)
                    plan.Q[i, j, t:] += n
        steps["workforce"] = "kernel"
    else:
        y, w, u_flat, _, sol = _solve_workforce_model(instance, tables, stock, time_limit)
        plan.y[:] = y
        plan.w[:] = w
        edge_opts = sorted(instance.trainings, key=lambda o: (o.from_type, o.to_type))
        for e, opt in enumerate(edge_opts):
            plan.u[opt.from_type, opt.to_type] = u_flat[e]
        Y = _standing_workforce(instance, plan.y, plan.w, plan.u)
        plan.Q = np.zeros((instance.n_tech, instance.n_emp, T), dtype=int)
        for t in range(T):
            plan.Q[:, :, t] = _staff_units(instance, stock[:, t], Y[:, t])
        steps["workforce"] = "milp"
        gap = max(gap, sol.gap)
        status = _worse_status(status, sol.status)
    plan.Y[:] = _standing_workforce(instance, plan.y, plan.w, plan.u)

    # step 3: cheapest qualified operation within the staffing commitments
    bounds = [
        {
            (i, j): int(plan.Q[i, j, t])
            for i in range(instance.n_tech)
            for j in range(instance.n_emp)
            if plan.Q[i, j, t] > 0
        }
        for t in range(T)
    ]
    plan.z[:] = _cheapest_assignments(instance, demand, bounds)
    steps["assignment"] = "kernel"

    diagnostics = {
        "route": "kernel" if "milp" not in steps.values() else "kernel+milp",
        "steps": steps,
        "status": status,
        "gap": float(gap),
        "runtime": time.perf_counter() - t0,
    }
    return _finish_report(
        "hierarchical", instance, tables, plan, diagnostics, train_as_hiring=True
    )


# ---------------------------------------------------------------------------
# joint pipeline


def solve_joint(
    instance: Instance,
    tables: CostTables | None = None,
    time_limit: float = 60.0,
) -> tuple[Plan, SolveReport]:
    """Technology and its operator decided as one composite item.

    Every candidate purchase is priced with the cheapest qualified operator
    standing by its period, and every candidate discard with a nominal
    firing refund, the cheapest over the operator types selected for that
    technology so far.  The composite schedule covers demand, hires then
    realize the operator paths one per purchased unit, and each discard
    fires the employee actually paired with the oldest unit on the books,
    which replaces the nominal refund with the real one.
    """
    t0 = time.perf_counter()
    if tables is None:
        tables = build_cost_tables(instance)
    T = instance.horizon
    n_i, n_j = instance.n_tech, instance.n_emp
    caps = np.array([tech.capacity for tech in instance.technologies], dtype=int)
    demand = np.asarray(instance.demand, dtype=int)
    plan = empty_plan(instance)
    steps: dict[str, str] = {}
    gap = 0.0
    status = "Optimal"

    pricing = price_acquisitions(instance, tables)
    pick = np.zeros((n_i, T), dtype=int)
    acq = np.zeros((n_i, T))
    for i in range(n_i):
        for t in range(T):
            pick[i, t], acq[i, t] = pricing.cheapest_qualified(i, t)
    fire_nominal = np.zeros((n_i, T))
    for i in range(n_i):
        seen: list[int] = []
        for t in range(T):
            if int(pick[i, t]) not in seen:
                seen.append(int(pick[i, t]))
            fire_nominal[i, t] = min(tables.wf_fire[j, t] for j in seen)
    composite_purchase = tables.tech_purchase + acq
    composite_discard = tables.tech_discard + fire_nominal

    if float(composite_discard.min(initial=0.0)) >= 0.0:
        base = int(np.dot(caps, np.asarray(instance.initial_tech, dtype=int)))
        x, _ = solve_tdkp(
            TdkpInstance(
                capacities=caps,
                costs=composite_purchase,
                demand=np.maximum(demand - base, 0),
                discount=instance.discount,
            )
        )
        plan.x[:] = x
        steps["technology"] = "kernel"
    else:
        model, idx = build_tech_plan_model(
            caps,
            composite_purchase,
            composite_discard,
            demand,
            instance.discount,
            np.asarray(instance.initial_tech, dtype=int),
        )
        sol = solve_milp(model, time_limit=time_limit)
        if sol.values is None:
            raise Infeasible("demand cannot be covered by any purchase schedule")
        plan.x[:] = np.rint(sol.values[idx.x]).astype(int)
        plan.v[:] = np.rint(sol.values[idx.v]).astype(int)
        steps["technology"] = "milp"
        gap = max(gap, sol.gap)
        status = _worse_status(status, sol.status)

    # pair ledger per technology, oldest unit first; initial workers enter
    # before anything bought so discards release them first
    init_match = _staff_units(instance, instance.initial_tech, instance.initial_workforce)
    ledger: list[list[list[int]]] = [[] for _ in range(n_i)]
    for i in range(n_i):
        for j in range(n_j):
            if init_match[i, j]:
                ledger[i].append([-1, j, int(init_match[i, j])])
    pair_bounds: list[dict[tuple[int, int], int]] = []
    for t in range(T):
        for i in range(n_i):
            n = int(plan.x[i, t])
            if n:
                j = _realize_acquisition(pricing, i, t, n, plan)
                ledger[i].append([t, j, n])
            k = int(plan.v[i, t])
            while k:
                entry = ledger[i][0]
                take = min(k, entry[2])
                entry[2] -= take
                k -= take
                plan.w[entry[1], t] += take
                if entry[2] == 0:
                    ledger[i].pop(0)
        alive: dict[tuple[int, int], int] = {}
        for i in range(n_i):
            for _, j, count in ledger[i]:
                alive[(i, j)] = alive.get((i, j), 0) + count
        pair_bounds.append(alive)
    steps["workforce"] = "kernel"

    plan.z[:] = _cheapest_assignments(instance, demand, pair_bounds)
    steps["assignment"] = "kernel"
    plan.Y[:] = _standing_workforce(instance, plan.y, plan.w, plan.u)

    diagnostics = {
        "route": "kernel" if "milp" not in steps.values() else "kernel+milp",
        "steps": steps,
        "status": status,
        "gap": float(gap),
        "runtime": time.perf_counter() - t0,
    }
    return _finish_report(
        "joint", instance, tables, plan, diagnostics, train_as_hiring=True
    )


# ---------------------------------------------------------------------------
# integrated pipeline


def integrated_vector(
    model: LinearModel, index: IntegratedIndex, plan: Plan
) -> np.ndarray:
    """A plan as a variable vector of the integrated model."""
    vec = np.zeros(model.n_vars)
    vec[index.x] = plan.x
    vec[index.v] = plan.v
    vec[index.y] = plan.y
    vec[index.w] = plan.w
    vec[index.stock_wf] = plan.Y
    for k, (i, j) in enumerate(index.pairs):
        vec[index.z[k]] = plan.z[i, j]
    for e, (j, jp) in enumerate(index.edges):
        vec[index.u[e]] = plan.u[j, jp]
    return vec


def _plan_from_values(
    instance: Instance, index: IntegratedIndex, values: np.ndarray
) -> Plan:
    plan = empty_plan(instance)
    take = lambda idx: np.rint(values[idx]).astype(int)
    plan.x[:] = take(index.x)
    plan.v[:] = take(index.v)
    plan.y[:] = take(index.y)
    plan.w[:] = take(index.w)
    plan.Y[:] = take(index.stock_wf)
    for k, (i, j) in enumerate(index.pairs):
        plan.z[i, j] = take(index.z[k])
    for e, (j, jp) in enumerate(index.edges):
        plan.u[j, jp] = take(index.u[e])
    return plan


def solve_integrated(
    instance: Instance,
    tables: CostTables | None = None,
    time_limit: float = 60.0,
    gap_tolerance: float = 1e-6,
    warm_plans: list[Plan] | None = None,
) -> tuple[Plan, SolveReport]:
    """Every decision family in one exact model.

    The search starts from the best feasible plan among those supplied (or
    from the sequential pipelines' plans when none are), so its incumbent
    never costs more than what the split approaches settle for; a run that
    stops on the gap or time limit is flagged in the diagnostics.
    """
    t0 = time.perf_counter()
    if tables is None:
        tables = build_cost_tables(instance)
    model, index = build_integrated_model(instance, tables)

    candidates = list(warm_plans) if warm_plans is not None else []
    if not candidates:
        candidates.append(solve_hierarchical(instance, tables, time_limit=time_limit)[0])
        candidates.append(solve_joint(instance, tables, time_limit=time_limit)[0])
    warm = None
    warm_obj = math.inf
    for cand in candidates:
        vec = integrated_vector(model, index, cand)
        if model.is_feasible(vec):
            obj = model.objective_value(vec)
            if obj < warm_obj:
                warm, warm_obj = vec, obj

    sol = solve_milp(
        model,
        time_limit=time_limit,
        gap_tolerance=gap_tolerance,
        warm_start=warm,
        branch_priority=index.branch_priority,
    )
    if sol.values is None:
        raise Infeasible("no feasible plan covers the demand trajectory")
    plan = _plan_from_values(instance, index, sol.values)
    diagnostics = {
        "route": "milp",
        "status": sol.status,
        "gap": float(sol.gap),
        "nodes": int(sol.nodes),
        "warm_started": warm is not None,
        "runtime": time.perf_counter() - t0,
    }
    return _finish_report(
        "integrated", instance, tables, plan, diagnostics, train_as_hiring=False
    )


# ---------------------------------------------------------------------------
# verification


def verify_plan(
    instance: Instance, tables: CostTables, plan: Plan
) -> VerificationReport:
    """Independent feasibility check and from-scratch cost recomputation.

    Constraints are evaluated straight from the instance, never through the
    solver's model objects.  The cost is rebuilt from raw fees and streams:
    one-time fees at their decision periods, maintenance on the in-horizon
    net technology additions, salary on the in-horizon net workforce
    additions (a trainee earns the target salary from the training's start),
    each discounted period by period.  The cost tables are accepted only so
    every checker shares one signature; the recomputation does not read
    them.
    """
    T, n_i, n_j = instance.horizon, instance.n_tech, instance.n_emp
    violations: list[str] = []
    caps = np.array([tech.capacity for tech in instance.technologies], dtype=int)
    demand = np.asarray(instance.demand, dtype=int)

    shapes = {
        "x": (plan.x, (n_i, T)),
        "v": (plan.v, (n_i, T)),
        "y": (plan.y, (n_j, T)),
        "w": (plan.w, (n_j, T)),
        "u": (plan.u, (n_j, n_j, T)),
        "z": (plan.z, (n_i, n_j, T)),
        "Y": (plan.Y, (n_j, T)),
    }
    for name, (arr, want) in shapes.items():
        if arr.shape != want:
            violations.append(f"decision family {name} has shape {arr.shape}, expected {want}")
    if violations:
        return VerificationReport(False, tuple(violations), math.nan)
    for name, (arr, _) in shapes.items():
        if (np.asarray(arr) < 0).any():
            violations.append(f"negative entries in decision family {name}")
        if not np.issubdtype(np.asarray(arr).dtype, np.integer):
            if np.abs(arr - np.rint(arr)).max(initial=0.0) > 1e-9:
                violations.append(f"fractional entries in decision family {name}")

    qualified = set(derive_qualified_pairs(instance.technologies, instance.employees))
    for i in range(n_i):
        for j in range(n_j):
            if plan.z[i, j].any() and (i, j) not in qualified:
                violations.append(
                    f"unqualified assignment: employee type {j} on technology {i}"
                )
    edges = instance.training_map()
    for j in range(n_j):
        for jp in range(n_j):
            if not plan.u[j, jp].any():
                continue
            if (j, jp) not in edges:
                violations.append(f"training start on nonexistent option {j}->{jp}")
                continue
            dur = edges[(j, jp)].duration
            for t in range(T):
                if plan.u[j, jp, t] and t + dur > T - 1:
                    violations.append(
                        f"training {j}->{jp} started in period {t} cannot finish in the horizon"
                    )

    stock = held_stock(instance, plan)
    for t in range(T):
        lhs = float(np.sum(caps[:, None] * plan.z[:, :, t].sum(axis=1)[:, None]))
        lhs = float(np.dot(caps, plan.z[:, :, t].sum(axis=1)))
        if lhs < demand[t] - MONEY_TOL:
            violations.append(
                f"period {t}: assigned capacity {lhs:g} below demand {int(demand[t])}"
            )
    for i in range(n_i):
        for t in range(T):
            if stock[i, t] < 0:
                violations.append(f"period {t}: negative stock of technology {i}")
            if plan.z[i, :, t].sum() > stock[i, t]:
                violations.append(
                    f"period {t}: technology {i} operates more units than it holds"
                )
    expected_Y = _standing_workforce(instance, plan.y, plan.w, plan.u)
    for j in range(n_j):
        for t in range(T):
            if plan.Y[j, t] != expected_Y[j, t]:
                violations.append(
                    f"period {t}: workforce flow mismatch for type {j} "
                    f"(recorded {int(plan.Y[j, t])}, flows give {int(expected_Y[j, t])})"
                )
            if expected_Y[j, t] < 0:
                violations.append(f"period {t}: negative workforce of type {j}")
            if plan.z[:, j, t].sum() > plan.Y[j, t]:
                violations.append(
                    f"period {t}: employee type {j} assigned beyond its standing count"
                )

    weight = instance.discount ** np.arange(T, dtype=float)
    pc = np.array([tech.purchase_cost for tech in instance.technologies])
    ms = np.array([tech.maintenance_cost for tech in instance.technologies])
    dc = np.array([tech.discard_cost for tech in instance.technologies])
    hc = np.array([emp.hiring_cost for emp in instance.employees])
    sal = np.array([emp.salary for emp in instance.employees])
    fc = np.array([emp.firing_cost for emp in instance.employees])
    init_tech = np.asarray(instance.initial_tech, dtype=int)
    init_wf = np.asarray(instance.initial_workforce, dtype=int)

    # a trainee is carried at the target salary from the training's start,
    # even for the periods it stands in neither type
    salaried = plan.Y.astype(float).copy()
    for opt in instance.trainings:
        if opt.duration == 0:
            continue
        for s in range(T):
            n = plan.u[opt.from_type, opt.to_type, s]
            if n:
                salaried[opt.to_type, s : min(s + opt.duration, T)] += n

    total = 0.0
    for t in range(T):
        total += weight[t] * float(
            np.dot(pc, plan.x[:, t])
            + np.dot(dc, plan.v[:, t])
            + np.dot(ms, stock[:, t] - init_tech)
            + np.dot(hc, plan.y[:, t])
            + np.dot(fc, plan.w[:, t])
            + np.dot(sal, salaried[:, t] - init_wf)
        )
    for opt in instance.trainings:
        total += opt.base_cost * float(
            np.dot(weight, plan.u[opt.from_type, opt.to_type])
        )
    for (i, j), cost in instance.assignment_cost.items():
        total += cost * float(np.dot(weight, plan.z[i, j]))

    return VerificationReport(not violations, tuple(violations), float(total))


# ---------------------------------------------------------------------------
# exhaustive oracle


def brute_force_integrated(
    instance: Instance,
    tables: CostTables | None = None,
    bounds: int = 3,
) -> float:
    """Exact minimum total cost by exhaustive period recursion.

    Period decisions are enumerated outright with every variable capped at
    `bounds`.  Resource totals are additionally capped at what any single
    period can need plus the initial endowment, and buy-and-discard or
    hire-and-fire of the same type within one period is skipped; both
    restrictions keep some optimum reachable because every idle unit,
    idle employee, and same-period round trip has nonnegative carrying
    cost.  Assignment is re-optimized exactly within each period.
    """
    if tables is None:
        tables = build_cost_tables(instance)
    T, n_i, n_j = instance.horizon, instance.n_tech, instance.n_emp
    if n_i > 2 or T > 3 or bounds > 3 or n_j > 4 or len(instance.trainings) > 6:
        raise SizeGuard(
            "exhaustive search is limited to 2 technologies, 3 periods, "
            "4 employee types, 6 training options, and unit bounds of 3"
        )
    if bounds < 1:
        raise ValueError("unit bounds must be at least 1")
    caps = [tech.capacity for tech in instance.technologies]
    demand = [int(d) for d in instance.demand]
    weight = tables.weight
    pairs = derive_qualified_pairs(instance.technologies, instance.employees)
    edges = sorted((o.from_type, o.to_type) for o in instance.trainings)
    dur = {(o.from_type, o.to_type): o.duration for o in instance.trainings}
    max_lag = max((dur[e] for e in edges), default=0)
    bx = tuple(int(c) for c in instance.initial_tech)
    by = tuple(int(c) for c in instance.initial_workforce)

    need = 0
    positive = [d for d in demand if d > 0]
    if positive:
        need = max(-(-d // min(caps)) for d in positive)
    cap_tech = sum(bx) + need
    cap_wf = sum(by) + need

    stock_states = [
        s
        for s in itertools.product(range(cap_tech + 1), repeat=n_i)
        if sum(s) <= cap_tech
    ]
    wf_states = [
        s for s in itertools.product(range(cap_wf + 1), repeat=n_j) if sum(s) <= cap_wf
    ]
    zero = (0,) * n_j

    # training combos per period: per-edge counts with their flow effects
    moves_by_t: list[list[tuple]] = []
    for t in range(T):
        usable = [e for e in edges if t + dur[e] <= T - 1]
        combos = []
        for counts in itertools.product(range(bounds + 1), repeat=len(usable)):
            if sum(counts) > cap_wf:
                continue
            out_flow = [0] * n_j
            now = [0] * n_j
            later = [[0] * n_j for _ in range(max_lag)]
            cost = 0.0
            for q, e in zip(counts, usable):
                if not q:
                    continue
                out_flow[e[0]] += q
                if dur[e] == 0:
                    now[e[1]] += q
                else:
                    later[dur[e] - 1][e[1]] += q
                cost += q * tables.wf_train[e][t]
            combos.append(
                (
                    tuple(out_flow),
                    tuple(now),
                    tuple(tuple(row) for row in later),
                    cost,
                )
            )
        moves_by_t.append(combos)

    pair_items = [
        (i, j, int(caps[i]), float(instance.assignment_cost[(i, j)])) for (i, j) in pairs
    ]
    assign_memo: dict[tuple, float] = {}

    def assign_cost(d: int, S: tuple, Yv: tuple) -> float:
        if d <= 0:
            return 0.0
        key = (d, S, Yv)
        hit = assign_memo.get(key)
        if hit is not None:
            return hit
        best = math.inf
        remS = list(S)
        remY = list(Yv)

        def rec(k: int, short: int, acc: float) -> None:
            nonlocal best
            if acc >= best:
                return
            if short <= 0:
                best = acc
                return
            if k == len(pair_items):
                return
            i, j, c, m = pair_items[k]
            top = min(remS[i], remY[j], -(-short // c))
            for qn in range(top, -1, -1):
                remS[i] -= qn
                remY[j] -= qn
                rec(k + 1, short - qn * c, acc + qn * m)
                remS[i] += qn
                remY[j] += qn

        rec(0, d, 0.0)
        assign_memo[key] = best
        return best

    memo: dict[tuple, float] = {}

    def best_from(t: int, S: tuple, Yv: tuple, pending: tuple) -> float:
        if t == T:
            return 0.0
        key = (t, S, Yv, pending)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if len(memo) > 400_000:
            raise SizeGuard("exhaustive search state space exceeds 400000 entries")
        arrive = pending[0] if pending else zero
        rest = pending[1:] + ((zero,) if pending else ())
        lo = math.inf
        for S2 in stock_states:
            ct = 0.0
            feas = True
            for i in range(n_i):
                delta = S2[i] - S[i]
                if delta > bounds or -delta > bounds:
                    feas = False
                    break
                if delta > 0:
                    ct += delta * tables.tech_purchase[i, t]
                elif delta < 0:
                    ct -= delta * tables.tech_discard[i, t]
            if not feas:
                continue
            for out_flow, now, later, cu in moves_by_t[t]:
                base = [
                    Yv[j] - out_flow[j] + now[j] + arrive[j] for j in range(n_j)
                ]
                if max_lag:
                    pending2 = tuple(
                        tuple(rest[k][j] + later[k][j] for j in range(n_j))
                        for k in range(max_lag)
                    )
                    in_transit = sum(sum(row) for row in pending2)
                else:
                    pending2 = ()
                    in_transit = 0
                for Y2 in wf_states:
                    if sum(Y2) + in_transit > cap_wf:
                        continue
                    cyw = 0.0
                    feas2 = True
                    for j in range(n_j):
                        delta = Y2[j] - base[j]
                        if delta > bounds or -delta > bounds:
                            feas2 = False
                            break
                        if delta > 0:
                            cyw += delta * tables.wf_hire[j, t]
                        elif delta < 0:
                            cyw -= delta * tables.wf_fire[j, t]
                    if not feas2:
                        continue
                    ca = assign_cost(demand[t], S2, Y2)
                    if not math.isfinite(ca):
                        continue
                    val = weight[t] * (ct + cu + cyw + ca) + best_from(
                        t + 1, S2, Y2, pending2
                    )
                    if val < lo:
                        lo = val
        memo[key] = lo
        return lo

    result = best_from(0, bx, by, ((zero,) * max_lag) if max_lag else ())
    if not math.isfinite(result):
        raise Infeasible("demand cannot be covered within the enumeration bounds")
    return float(result)
