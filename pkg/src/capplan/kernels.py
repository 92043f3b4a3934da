"""Combinatorial kernels: the purchase-schedule solver, the bounded
covering knapsack, and the acquisition-path pricer, each with a brute-force
oracle used by the test suite.

All kernels are pure functions over plain arrays; they hold no shared state.
Periods are 0-based; a cost incurred in period t is discounted by
discount**t.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .domain import CostTables, Instance, derive_qualified_pairs


class Infeasible(Exception):
    """No selection can satisfy the covering requirement."""


class Unreachable(Exception):
    """No qualified employee type is attainable by the deadline."""


class SizeGuard(Exception):
    """Brute-force oracle refused an instance too large to enumerate."""


# ---------------------------------------------------------------------------
# Purchase schedules: minimum-cost cumulative capacity covering


@dataclass(frozen=True, eq=False)
class TdkpInstance:
    """Purchase-only planning data.

    costs[i, t] is the unit purchase cost of item type i in period t (the
    folded price including the maintenance stream), capacities[i] its
    capacity.  demand[t] is the residual demand after netting out any
    initial endowment; the caller clamps it at zero.
    """

    capacities: np.ndarray
    costs: np.ndarray
    demand: np.ndarray
    discount: float


def solve_tdkp(tdkp: TdkpInstance) -> tuple[np.ndarray, float]:
    """Cheapest purchase schedule covering cumulative demand in every period.

    Minimizes sum_t discount**t * costs[i, t] * x[i, t] subject to
    sum_i capacities[i] * (x[i, 0] + ... + x[i, t]) >= demand[t], x integer.

    Because capacity only accumulates, the binding requirement in period t is
    the running maximum of demand up to t; demand is preprocessed to that
    running maximum, making the per-period increments non-negative.  Stage
    one solves, for each period, an unbounded covering knapsack M[k] = least
    cost to add at least k capacity units at that period's prices.  Stage two
    runs a shortest path over carried-surplus states 0..C-1 (C = largest
    capacity); a surplus of C or more is never needed because dropping a
    whole item keeps every period covered and never raises cost while all
    prices are non-negative.  Ties are broken toward buying later.
    """
    c = np.asarray(tdkp.capacities, dtype=int)
    p = np.asarray(tdkp.costs, dtype=float)
    n = len(c)
    d = np.maximum.accumulate(np.maximum(np.asarray(tdkp.demand, dtype=int), 0))
    T = len(d)
    x = np.zeros((n, max(T, 0)), dtype=int)
    if T == 0 or d.max(initial=0) == 0:
        return x, 0.0
    if n == 0:
        raise Infeasible("positive demand with no purchasable item types")
    if (c < 1).any():
        raise ValueError("capacities must be positive integers")
    if (p < 0).any():
        raise ValueError("purchase costs must be non-negative")

    weight = tdkp.discount ** np.arange(T, dtype=float)
    delta = np.diff(d, prepend=0)
    C = int(c.max())

    # stage one: per-period unbounded covering knapsack up to delta_t + C - 1
    cover_cost: list[np.ndarray] = []
    cover_pick: list[np.ndarray] = []
    for t in range(T):
        kmax = int(delta[t]) + C - 1
        M = np.zeros(kmax + 1)
        pick = np.full(kmax + 1, -1, dtype=int)
        for k in range(1, kmax + 1):
            best, arg = np.inf, -1
            for i in range(n):
                cand = p[i, t] + M[max(k - c[i], 0)]
                if cand < best - 1e-12:
                    best, arg = cand, i
            M[k] = best
            pick[k] = arg
        cover_cost.append(M)
        cover_pick.append(pick)

    # stage two: shortest path over carried surplus 0..C-1
    ks = np.arange(C)
    F = weight[0] * cover_cost[0][delta[0] + ks]
    pred = np.zeros((T, C), dtype=int)
    for t in range(1, T):
        need = delta[t] + ks[:, None] - ks[None, :]  # [next, prev]
        np.clip(need, 0, None, out=need)
        trans = F[None, :] + weight[t] * cover_cost[t][need]
        # prefer the smallest previous surplus on ties: buy as late as possible
        pred[t] = np.argmin(trans, axis=1)
        F = trans[ks, pred[t]]

    k_final = int(np.argmin(F))
    total = float(F[k_final])

    # decode: walk predecessors, then expand each period's covering choice
    k_path = np.zeros(T, dtype=int)
    k_path[T - 1] = k_final
    for t in range(T - 1, 0, -1):
        k_path[t - 1] = pred[t, k_path[t]]
    for t in range(T):
        prev = k_path[t - 1] if t > 0 else 0
        k = max(int(delta[t] + k_path[t] - prev), 0)
        while k > 0:
            i = cover_pick[t][k]
            x[i, t] += 1
            k = max(k - int(c[i]), 0)
    return x, total


def brute_force_tdkp(tdkp: TdkpInstance, limit: int = 5_000_000) -> float:
    """Exhaustive minimum over purchase schedules, by period-wise recursion.

    Schedules whose cumulative capacity would overshoot the largest demand
    by a full max-capacity item are skipped (removing the overshooting item
    keeps every period covered at no extra cost), as are branches already
    costlier than the incumbent; both prunes preserve the exact optimum.
    """
    c = np.asarray(tdkp.capacities, dtype=int)
    p = np.asarray(tdkp.costs, dtype=float)
    d = np.maximum(np.asarray(tdkp.demand, dtype=int), 0)
    n, T = len(c), len(d)
    if d.max(initial=0) == 0:
        return 0.0
    if n == 0:
        raise Infeasible("positive demand with no purchasable item types")
    weight = tdkp.discount ** np.arange(T, dtype=float)
    cap_ceiling = int(d.max()) + int(c.max()) - 1
    best = np.inf
    nodes = 0

    def bundles(t: int, base: int) -> list[tuple[int, float]]:
        # cheapest cost of adding exactly a capacity units this period, for
        # every a the ceiling allows; a costlier same-size bundle is dominated
        top = max(cap_ceiling - base, 0)
        cost = np.full(top + 1, np.inf)
        cost[0] = 0.0
        for a in range(1, top + 1):
            for i in range(n):
                if c[i] <= a and np.isfinite(cost[a - c[i]]):
                    cand = cost[a - c[i]] + weight[t] * p[i, t]
                    if cand < cost[a]:
                        cost[a] = cand
        return [(a, float(cost[a])) for a in range(top + 1) if np.isfinite(cost[a])]

    def recurse(t: int, cap: int, cost: float) -> None:
        nonlocal best, nodes
        nodes += 1
        if nodes > limit:
            raise SizeGuard(f"search exceeds {limit} nodes")
        if cost >= best:
            return
        if t == T:
            best = cost
            return
        for added, add_cost in bundles(t, cap):
            if cap + added >= d[t] and cost + add_cost < best:
                recurse(t + 1, cap + added, cost + add_cost)

    recurse(0, 0, 0.0)
    if not np.isfinite(best):
        raise Infeasible("demand cannot be covered")
    return float(best)


# ---------------------------------------------------------------------------
# Bounded covering knapsack


@dataclass(frozen=True)
class CoveringItem:
    capacity: int
    cost: float
    bound: int


def solve_covering_knapsack(
    items: list[CoveringItem], target: int
) -> tuple[list[int], float]:
    """Minimize sum(cost * z) subject to sum(capacity * z) >= target with
    0 <= z <= bound.

    Bounded counts are binary-split into 0-1 items, then a DP runs over
    covered-capacity states 0..target with accumulation saturating at the
    target.
    """
    if target <= 0:
        return [0] * len(items), 0.0
    for it in items:
        if it.capacity < 1:
            raise ValueError("item capacities must be positive integers")
        if it.cost < 0:
            raise ValueError("item costs must be non-negative")
        if it.bound < 0:
            raise ValueError("item bounds must be non-negative")
    if sum(it.capacity * it.bound for it in items) < target:
        raise Infeasible(f"total capacity cannot reach target {target}")

    # binary splitting: bound b becomes powers 1, 2, 4, ..., remainder
    pieces: list[tuple[int, int, int]] = []  # (item index, multiplicity, _)
    for idx, it in enumerate(items):
        b = min(it.bound, -(-target // it.capacity))  # never need more
        power = 1
        while b > 0:
            take = min(power, b)
            pieces.append((idx, take, 0))
            b -= take
            power <<= 1

    INF = np.inf
    dp = np.full(target + 1, INF)
    dp[0] = 0.0
    layers: list[np.ndarray] = []
    for idx, mult, _ in pieces:
        cap = items[idx].capacity * mult
        add = items[idx].cost * mult
        new = dp.copy()
        if cap >= target + 1:
            shifted = np.full(target + 1, INF)
        else:
            shifted = np.concatenate([np.full(cap, INF), dp[: target + 1 - cap] + add])
        lo = max(target - cap, 0)
        shifted[target] = min(shifted[target], float(np.min(dp[lo:]) + add))
        np.minimum(new, shifted, out=new)
        layers.append(dp)
        dp = new

    cost = float(dp[target])
    if not np.isfinite(cost):
        raise Infeasible(f"total capacity cannot reach target {target}")

    # backtrack through the layer snapshots
    counts = [0] * len(items)
    k = target
    val = cost
    for piece_idx in range(len(pieces) - 1, -1, -1):
        idx, mult, _ = pieces[piece_idx]
        prev = layers[piece_idx]
        if np.isfinite(prev[k]) and abs(prev[k] - val) <= 1e-9:
            val = float(prev[k])
            continue
        cap = items[idx].capacity * mult
        if k < target:
            k2 = k - cap
        else:
            lo = max(target - cap, 0)
            k2 = int(lo + np.argmin(prev[lo:]))
        counts[idx] += mult
        val = float(prev[k2])
        k = k2
    return counts, cost


def solve_covering_knapsack_plain(
    items: list[CoveringItem], target: int
) -> tuple[list[int], float]:
    """Reference bounded DP without binary splitting (cross-check twin)."""
    if target <= 0:
        return [0] * len(items), 0.0
    if sum(it.capacity * it.bound for it in items) < target:
        raise Infeasible(f"total capacity cannot reach target {target}")
    INF = np.inf
    dp = np.full(target + 1, INF)
    dp[0] = 0.0
    layers = []
    for it in items:
        b = min(it.bound, -(-target // it.capacity))
        new = np.full(target + 1, INF)
        for k in range(target + 1):
            if not np.isfinite(dp[k]):
                continue
            for q in range(b + 1):
                nk = min(k + q * it.capacity, target)
                val = dp[k] + q * it.cost
                if val < new[nk]:
                    new[nk] = val
        layers.append(dp)
        dp = new
    cost = float(dp[target])
    if not np.isfinite(cost):
        raise Infeasible(f"total capacity cannot reach target {target}")
    counts = [0] * len(items)
    k = target
    val = cost
    for i in range(len(items) - 1, -1, -1):
        it = items[i]
        b = min(it.bound, -(-target // it.capacity))
        prev = layers[i]
        done = False
        for q in range(b + 1):
            if k < target:
                candidates = [k - q * it.capacity] if k - q * it.capacity >= 0 else []
            else:
                candidates = range(max(target - q * it.capacity, 0), target + 1)
            for k2 in candidates:
                if np.isfinite(prev[k2]) and abs(prev[k2] + q * it.cost - val) <= 1e-9:
                    counts[i] = q
                    k, val = k2, float(prev[k2])
                    done = True
                    break
            if done:
                break
    return counts, cost


def brute_force_covering(
    items: list[CoveringItem], target: int, limit: int = 2_000_000
) -> float:
    """Exhaustive minimum over all bounded selections."""
    if target <= 0:
        return 0.0
    count = 1
    for it in items:
        count *= it.bound + 1
        if count > limit:
            raise SizeGuard(f"search space exceeds {limit} selections")
    best = np.inf
    for combo in itertools.product(*(range(it.bound + 1) for it in items)):
        if sum(q * it.capacity for q, it in zip(combo, items)) >= target:
            cost = sum(q * it.cost for q, it in zip(combo, items))
            best = min(best, cost)
    if not np.isfinite(best):
        raise Infeasible(f"total capacity cannot reach target {target}")
    return float(best)


# ---------------------------------------------------------------------------
# Acquisition pricing: cheapest way to stand up one employee of a qualified
# type by a deadline


@dataclass(frozen=True, eq=False)
class AcquisitionPricing:
    """Labels of the acquisition network, shared across deadlines.

    label[j, t] is the cheapest discounted-to-period-0 cost of having one
    employee standing as type j in period t, via any hire-then-train
    sequence completing by t.  Wait steps are free because salary streams
    are folded into the hire and training costs at their start periods.
    """

    instance: Instance
    tables: CostTables
    label: np.ndarray
    # parent encoding per (j, t): kind 0 = hired at t, 1 = waited from t-1,
    # 2 = arrived by training from parent_type starting at parent_start
    parent_kind: np.ndarray
    parent_type: np.ndarray
    parent_start: np.ndarray

    def normalized_cost(self, tech: int, deadline: int) -> float:
        j, cost = self.cheapest_qualified(tech, deadline)
        return cost

    def cheapest_qualified(self, tech: int, deadline: int) -> tuple[int, float]:
        """(employee type, cost scaled to deadline-period money) minimizing
        the acquisition cost among types qualified for tech."""
        required = self.instance.technologies[tech].required_skills
        best_j, best = -1, np.inf
        for j, emp in enumerate(self.instance.employees):
            if required <= emp.skills and self.label[j, deadline] < best - 1e-12:
                best_j, best = j, self.label[j, deadline]
        if best_j < 0:
            raise Unreachable(
                f"no employee type qualified for technology {tech} is attainable"
            )
        return best_j, float(best / self.tables.weight[deadline])

    def path(self, j: int, t: int) -> tuple[tuple[int, int], list[tuple[int, int, int, int]]]:
        """((hired type, hire period), trainings as (from, to, start, arrival))
        realizing label[j, t]."""
        moves: list[tuple[int, int, int, int]] = []
        while True:
            kind = int(self.parent_kind[j, t])
            if kind == 0:
                return (j, t), list(reversed(moves))
            if kind == 1:
                t -= 1
                continue
            src = int(self.parent_type[j, t])
            start = int(self.parent_start[j, t])
            moves.append((src, j, start, t))
            j, t = src, start


def price_acquisitions(instance: Instance, tables: CostTables) -> AcquisitionPricing:
    """Dynamic program over the acquisition network.

    Nodes are (employee type, period); arcs are hiring (enter the network),
    waiting (free), and training edges that leave the source type at their
    start period and reach the target type duration periods later.
    Zero-duration trainings stay within a period, so types are relaxed in
    ascending skill-count order.
    """
    T = instance.horizon
    n_j = instance.n_emp
    order = sorted(range(n_j), key=lambda j: (len(instance.employees[j].skills), j))
    by_target: dict[int, list] = {j: [] for j in range(n_j)}
    for opt in instance.trainings:
        by_target[opt.to_type].append(opt)

    label = np.full((n_j, T), np.inf)
    kind = np.zeros((n_j, T), dtype=np.int8)
    ptype = np.full((n_j, T), -1, dtype=int)
    pstart = np.full((n_j, T), -1, dtype=int)

    for t in range(T):
        for j in order:
            best = tables.weight[t] * tables.wf_hire[j][t]
            bkind, btype, bstart = 0, -1, -1
            if t > 0 and label[j, t - 1] < best - 1e-12:
                best, bkind = label[j, t - 1], 1
            for opt in by_target[j]:
                start = t - opt.duration
                if start < 0:
                    continue
                cand = label[opt.from_type, start] + tables.weight[start] * (
                    tables.wf_train[(opt.from_type, opt.to_type)][start]
                )
                if cand < best - 1e-12:
                    best, bkind = cand, 2
                    btype, bstart = opt.from_type, start
            label[j, t] = best
            kind[j, t] = bkind
            ptype[j, t] = btype
            pstart[j, t] = bstart

    return AcquisitionPricing(
        instance=instance,
        tables=tables,
        label=label,
        parent_kind=kind,
        parent_type=ptype,
        parent_start=pstart,
    )


def solve_wsp(
    instance: Instance, tables: CostTables, tech: int, deadline: int
) -> tuple[int, float, tuple]:
    """Cheapest acquisition of one employee qualified for the given
    technology type by the deadline.

    Returns (employee type, cost in deadline-period money, path) where the
    path is ((hired type, hire period), [(from, to, start, arrival), ...]).
    """
    pricing = price_acquisitions(instance, tables)
    j, cost = pricing.cheapest_qualified(tech, deadline)
    return j, cost, pricing.path(j, deadline)


def solve_time_constrained_path(
    instance: Instance, tables: CostTables, tech: int, deadline: int
) -> tuple[int, float, tuple]:
    """Single-type acquisition with all training finished by the deadline;
    the same network as solve_wsp."""
    return solve_wsp(instance, tables, tech, deadline)


def brute_force_paths(
    instance: Instance,
    tables: CostTables,
    tech: int,
    deadline: int,
    limit: int = 1_000_000,
) -> float:
    """Exhaustive enumeration of hire-then-train sequences.

    Enumerates the hiring type and period, then every chain of training
    edges with every feasible start-time assignment completing by the
    deadline; returns the best cost in deadline-period money.
    """
    required = instance.technologies[tech].required_skills
    edges_from: dict[int, list] = {j: [] for j in range(instance.n_emp)}
    for opt in instance.trainings:
        edges_from[opt.from_type].append(opt)

    best = np.inf
    explored = 0

    def visit(j: int, ready: int, cost: float) -> None:
        nonlocal best, explored
        explored += 1
        if explored > limit:
            raise SizeGuard(f"path enumeration exceeds {limit} states")
        if required <= instance.employees[j].skills and cost < best:
            best = cost
        for opt in edges_from[j]:
            for start in range(ready, deadline - opt.duration + 1):
                step = tables.weight[start] * tables.wf_train[
                    (opt.from_type, opt.to_type)
                ][start]
                visit(opt.to_type, start + opt.duration, cost + step)

    for j in range(instance.n_emp):
        for t_hire in range(deadline + 1):
            visit(j, t_hire, tables.weight[t_hire] * tables.wf_hire[j][t_hire])

    if not np.isfinite(best):
        raise Unreachable(
            f"no employee type qualified for technology {tech} is attainable"
        )
    return float(best / tables.weight[deadline])
