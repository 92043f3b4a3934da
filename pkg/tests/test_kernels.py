"""Kernel solvers against brute-force oracles and frozen examples."""
from __future__ import annotations

import numpy as np
import pytest

from capplan.domain import (
    EmployeeType,
    Instance,
    TechnologyType,
    build_cost_tables,
    derive_qualified_pairs,
    derive_training_pairs,
)
from capplan.kernels import (
    CoveringItem,
    Infeasible,
    SizeGuard,
    TdkpInstance,
    Unreachable,
    brute_force_covering,
    brute_force_paths,
    brute_force_tdkp,
    price_acquisitions,
    solve_covering_knapsack,
    solve_covering_knapsack_plain,
    solve_tdkp,
    solve_time_constrained_path,
    solve_wsp,
)
from conftest import make_sample_instance


def random_micro_instance(rng: np.random.Generator, n_tech: int, horizon: int) -> Instance:
    """Skill-lattice instance small enough for exhaustive path enumeration.

    Salaries and hiring costs are sorted so that more skilled types cost
    more, matching the structure the generator produces.
    """
    n_j = 2**n_tech
    technologies = tuple(
        TechnologyType(
            required_skills=frozenset({k + 1}),
            capacity=int(rng.integers(1, 6)),
            purchase_cost=float(rng.uniform(10, 60)),
            maintenance_cost=float(rng.uniform(0, 5)),
            discard_cost=float(rng.uniform(1, 5)),
        )
        for k in range(n_tech)
    )
    masks = sorted(range(n_j), key=lambda m: (bin(m).count("1"), m))
    hiring = np.sort(rng.uniform(100, 400, n_j))
    salary = np.sort(rng.uniform(0, 60, n_j))
    firing = np.sort(rng.uniform(20, 100, n_j))
    employees = tuple(
        EmployeeType(
            skills=frozenset(k + 1 for k in range(n_tech) if mask >> k & 1),
            hiring_cost=float(hiring[rank]),
            salary=float(salary[rank]),
            firing_cost=float(firing[rank]),
        )
        for rank, mask in enumerate(masks)
    )
    skill_time = {k + 1: int(rng.integers(0, 3)) for k in range(n_tech)}
    skill_cost = {k + 1: float(rng.uniform(10, 50)) for k in range(n_tech)}

    def rule(src: frozenset, dst: frozenset) -> tuple[int, float]:
        added = dst - src
        return sum(skill_time[s] for s in added), sum(skill_cost[s] for s in added)

    trainings = derive_training_pairs(employees, rule)
    assign = {
        pair: float(rng.uniform(50, 60))
        for pair in derive_qualified_pairs(technologies, employees)
    }
    return Instance(
        technologies=technologies,
        employees=employees,
        trainings=trainings,
        horizon=horizon,
        discount=0.9,
        demand=tuple(int(d) for d in rng.integers(0, 13, horizon)),
        initial_tech=(0,) * n_tech,
        initial_workforce=(0,) * n_j,
        assignment_cost=assign,
    )


# ---------------------------------------------------------------------------
# purchase schedules


def test_tdkp_zero_demand_is_free():
    td = TdkpInstance(
        capacities=np.array([3, 5]),
        costs=np.full((2, 4), 7.0),
        demand=np.zeros(4, dtype=int),
        discount=0.9,
    )
    x, cost = solve_tdkp(td)
    assert cost == 0.0
    assert (x == 0).all()


def test_tdkp_sample_catalog_matches_oracle(sample_instance):
    tables = build_cost_tables(sample_instance)
    td = TdkpInstance(
        capacities=np.array([t.capacity for t in sample_instance.technologies]),
        costs=tables.tech_purchase,
        demand=np.array(sample_instance.demand),
        discount=sample_instance.discount,
    )
    x, cost = solve_tdkp(td)
    assert cost == pytest.approx(brute_force_tdkp(td), abs=1e-6)
    cum = (td.capacities[:, None] * np.cumsum(x, axis=1)).sum(axis=0)
    assert (cum >= np.array(sample_instance.demand)).all()


def test_tdkp_single_item_buys_at_demand_steps():
    # prices fall over time, so each unit is bought exactly when needed
    T = 3
    tail = np.array([1 + 0.9 + 0.81, 1 + 0.9, 1.0])
    td = TdkpInstance(
        capacities=np.array([1000]),
        costs=(100.0 + 10.0 * tail)[None, :],
        demand=np.array([500, 1500, 1500]),
        discount=0.9,
    )
    x, cost = solve_tdkp(td)
    assert x.tolist() == [[1, 1, 0]]
    assert cost == pytest.approx(brute_force_tdkp(td), abs=1e-6)


def test_tdkp_nonmonotone_demand_binds_on_running_peak():
    # a late dip cannot shed capacity: the peak stays binding
    td = TdkpInstance(
        capacities=np.array([2]),
        costs=np.full((1, 3), 5.0),
        demand=np.array([6, 2, 4]),
        discount=0.9,
    )
    x, cost = solve_tdkp(td)
    assert x.sum() == 3
    assert cost == pytest.approx(brute_force_tdkp(td), abs=1e-6)


def test_tdkp_matches_oracle_on_seeded_micro_instances():
    rng = np.random.default_rng(20240811)
    for _ in range(100):
        n = int(rng.integers(1, 4))
        T = int(rng.integers(2, 5))
        caps = rng.integers(1, 6, n)
        pc = rng.uniform(1, 20, n)
        ms = rng.uniform(0, 3, n)
        tail = np.array([sum(0.9**k for k in range(T - t)) for t in range(T)])
        costs = pc[:, None] + ms[:, None] * tail[None, :]
        demand = rng.integers(0, 13, T)
        td = TdkpInstance(capacities=caps, costs=costs, demand=demand, discount=0.9)
        x, cost = solve_tdkp(td)
        assert cost == pytest.approx(brute_force_tdkp(td), abs=1e-6)
        cum = (caps[:, None] * np.cumsum(x, axis=1)).sum(axis=0)
        assert (cum >= np.maximum(demand, 0)).all()
        weight = 0.9 ** np.arange(T)
        recomputed = float((weight * (costs * x).sum(axis=0)).sum())
        assert cost == pytest.approx(recomputed, abs=1e-9)


def test_tdkp_rejects_negative_costs():
    td = TdkpInstance(
        capacities=np.array([2]),
        costs=np.array([[-1.0, 1.0]]),
        demand=np.array([1, 1]),
        discount=0.9,
    )
    with pytest.raises(ValueError):
        solve_tdkp(td)


def test_tdkp_infeasible_without_items():
    td = TdkpInstance(
        capacities=np.array([], dtype=int),
        costs=np.zeros((0, 2)),
        demand=np.array([1, 1]),
        discount=0.9,
    )
    with pytest.raises(Infeasible):
        solve_tdkp(td)


# ---------------------------------------------------------------------------
# covering knapsack


def test_covering_zero_target():
    sel, cost = solve_covering_knapsack([CoveringItem(3, 5.0, 2)], 0)
    assert sel == [0] and cost == 0.0


def test_covering_sample_items_match_oracle():
    items = [CoveringItem(374, 50.0, 3), CoveringItem(915, 53.2, 2)]
    sel, cost = solve_covering_knapsack(items, 1097)
    assert cost == pytest.approx(brute_force_covering(items, 1097), abs=1e-6)
    assert sum(q * it.capacity for q, it in zip(sel, items)) >= 1097
    assert sum(q * it.cost for q, it in zip(sel, items)) == pytest.approx(cost)


def test_covering_single_item_ceil():
    sel, cost = solve_covering_knapsack([CoveringItem(5, 7.0, 10)], 23)
    assert sel == [5]
    assert cost == pytest.approx(35.0)


def test_covering_infeasible_raises():
    with pytest.raises(Infeasible):
        solve_covering_knapsack([CoveringItem(4, 1.0, 2)], 9)
    with pytest.raises(Infeasible):
        brute_force_covering([CoveringItem(4, 1.0, 2)], 9)


def test_covering_matches_oracle_and_plain_twin():
    rng = np.random.default_rng(20240812)
    for _ in range(100):
        k = int(rng.integers(1, 5))
        items = [
            CoveringItem(
                capacity=int(rng.integers(1, 9)),
                cost=float(rng.uniform(0, 20)),
                bound=int(rng.integers(0, 6)),
            )
            for _ in range(k)
        ]
        target = int(rng.integers(0, 26))
        feasible = sum(it.capacity * it.bound for it in items) >= target
        if not feasible and target > 0:
            with pytest.raises(Infeasible):
                solve_covering_knapsack(items, target)
            continue
        sel, cost = solve_covering_knapsack(items, target)
        oracle = brute_force_covering(items, target)
        assert cost == pytest.approx(oracle, abs=1e-6)
        sel2, cost2 = solve_covering_knapsack_plain(items, target)
        assert cost2 == pytest.approx(oracle, abs=1e-6)
        for chosen in (sel, sel2):
            assert all(0 <= q <= it.bound for q, it in zip(chosen, items))
            assert sum(q * it.capacity for q, it in zip(chosen, items)) >= target
        assert sum(q * it.cost for q, it in zip(sel, items)) == pytest.approx(cost)


def test_covering_oracle_size_guard():
    items = [CoveringItem(1, 1.0, 1000) for _ in range(4)]
    with pytest.raises(SizeGuard):
        brute_force_covering(items, 10)


# ---------------------------------------------------------------------------
# acquisition pricing


def test_wsp_sample_first_period_prefers_instant_training(sample_instance):
    tables = build_cost_tables(sample_instance)
    j, cost, path = solve_wsp(sample_instance, tables, 0, 0)
    # hiring the unskilled type and upgrading instantly beats a direct hire
    assert j == 1
    assert cost == pytest.approx(875.0 + 97.0 + 213.0 * tables.tail[0], abs=1e-9)
    (hired, when), moves = path
    assert (hired, when) == (0, 0)
    assert moves == [(0, 1, 0, 0)]


def test_wsp_matches_path_oracle_on_sample(sample_instance):
    tables = build_cost_tables(sample_instance)
    for tech in range(2):
        for deadline in range(4):
            _, cost, _ = solve_wsp(sample_instance, tables, tech, deadline)
            assert cost == pytest.approx(
                brute_force_paths(sample_instance, tables, tech, deadline), abs=1e-6
            )


def test_time_constrained_path_equals_wsp(sample_instance):
    tables = build_cost_tables(sample_instance)
    assert solve_time_constrained_path(sample_instance, tables, 1, 2) == solve_wsp(
        sample_instance, tables, 1, 2
    )


def test_wsp_deadline_one_with_long_trainings_hires_directly():
    rng = np.random.default_rng(7)
    inst = random_micro_instance(rng, 2, 4)
    # stretch every training beyond the first period
    trainings = tuple(
        type(opt)(opt.from_type, opt.to_type, max(opt.duration, 2), opt.base_cost)
        for opt in inst.trainings
    )
    inst = Instance(
        technologies=inst.technologies,
        employees=inst.employees,
        trainings=trainings,
        horizon=inst.horizon,
        discount=inst.discount,
        demand=inst.demand,
        initial_tech=inst.initial_tech,
        initial_workforce=inst.initial_workforce,
        assignment_cost=inst.assignment_cost,
    )
    tables = build_cost_tables(inst)
    j, cost, path = solve_wsp(inst, tables, 0, 0)
    (hired, when), moves = path
    assert moves == []  # no training fits before the deadline
    assert hired == j and when == 0
    qualified = [
        jj
        for jj, emp in enumerate(inst.employees)
        if inst.technologies[0].required_skills <= emp.skills
    ]
    assert cost == pytest.approx(min(tables.wf_hire[jj][0] for jj in qualified))


def test_wsp_matches_oracle_on_seeded_micro_instances():
    rng = np.random.default_rng(20240813)
    for _ in range(100):
        n = int(rng.integers(1, 4))
        T = int(rng.integers(2, 6))
        inst = random_micro_instance(rng, n, T)
        tables = build_cost_tables(inst)
        pricing = price_acquisitions(inst, tables)
        for tech in range(n):
            for deadline in range(T):
                j, cost = pricing.cheapest_qualified(tech, deadline)
                oracle = brute_force_paths(inst, tables, tech, deadline)
                assert cost == pytest.approx(oracle, abs=1e-6)
                # the reported path must itself realize the reported cost
                (hired, when), moves = pricing.path(j, deadline)
                realized = tables.weight[when] * tables.wf_hire[hired][when]
                for src, dst, start, arrival in moves:
                    realized += tables.weight[start] * tables.wf_train[(src, dst)][start]
                    assert arrival == start + inst.training_map()[(src, dst)].duration
                    assert arrival <= deadline
                assert realized / tables.weight[deadline] == pytest.approx(cost, abs=1e-6)


def test_wsp_cost_never_rises_with_later_deadline():
    rng = np.random.default_rng(20240814)
    for _ in range(20):
        n = int(rng.integers(1, 4))
        inst = random_micro_instance(rng, n, 6)
        tables = build_cost_tables(inst)
        pricing = price_acquisitions(inst, tables)
        for tech in range(n):
            costs = [pricing.cheapest_qualified(tech, t)[1] for t in range(6)]
            for a, b in zip(costs, costs[1:]):
                assert b <= a + 1e-9


def test_wsp_unreachable_when_no_type_qualifies():
    technologies = (TechnologyType(frozenset({1, 2}), 3, 10.0, 1.0, 2.0),)
    employees = (
        EmployeeType(frozenset(), 100.0, 0.0, 10.0),
        EmployeeType(frozenset({1}), 150.0, 20.0, 15.0),
    )
    inst = Instance(
        technologies=technologies,
        employees=employees,
        trainings=(),
        horizon=3,
        discount=0.9,
        demand=(0, 0, 0),
        initial_tech=(0,),
        initial_workforce=(0, 0),
        assignment_cost={},
    )
    tables = build_cost_tables(inst)
    with pytest.raises(Unreachable):
        solve_wsp(inst, tables, 0, 2)
    with pytest.raises(Unreachable):
        brute_force_paths(inst, tables, 0, 2)
