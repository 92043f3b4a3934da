"""Data model, cost table construction, and validation."""
from __future__ import annotations

import math

import numpy as np
import pytest

from capplan.domain import (
    EmployeeType,
    Instance,
    TechnologyType,
    TrainingOption,
    build_cost_tables,
    derive_qualified_pairs,
    derive_training_pairs,
    instance_from_json,
    instance_to_json,
    tail_sums,
    validate_instance,
)
from conftest import make_sample_instance


def test_tail_sums_match_geometric_formula():
    g, T = 0.93, 10
    tail = tail_sums(g, T)
    for t in range(T):
        assert tail[t] == pytest.approx((1 - g ** (T - t)) / (1 - g), abs=1e-12)
    assert tail[T - 1] == 1.0


def test_discounted_hire_costs_frozen_values(sample_instance):
    # Frozen by hand: hiring the single-skill type in the second and third
    # periods, discounted back to the first.
    tables = build_cost_tables(sample_instance)
    second = tables.weight[1] * tables.wf_hire[1][1]
    third = tables.weight[2] * tables.wf_hire[1][2]
    assert second == pytest.approx(3112.1, abs=0.1)
    assert third == pytest.approx(2791.1, abs=0.1)


def test_purchase_discard_sum_is_time_free(sample_instance):
    tables = build_cost_tables(sample_instance)
    for i, tech in enumerate(sample_instance.technologies):
        total = tables.tech_purchase[i] + tables.tech_discard[i]
        assert np.allclose(total, tech.purchase_cost + tech.discard_cost)
    for j, emp in enumerate(sample_instance.employees):
        total = tables.wf_hire[j] + tables.wf_fire[j]
        assert np.allclose(total, emp.hiring_cost + emp.firing_cost)


def test_purchase_cost_telescopes(sample_instance):
    g = sample_instance.discount
    tables = build_cost_tables(sample_instance)
    for i, tech in enumerate(sample_instance.technologies):
        p = tables.tech_purchase[i]
        assert p[-1] == pytest.approx(tech.purchase_cost + tech.maintenance_cost)
        for t in range(len(p) - 1):
            expect = tech.purchase_cost + tech.maintenance_cost + g * (
                p[t + 1] - tech.purchase_cost
            )
            assert p[t] == pytest.approx(expect, abs=1e-9)
        s = tables.tech_discard[i]
        assert s[-1] == pytest.approx(tech.discard_cost - tech.maintenance_cost)


def test_training_cost_adds_salary_differential(sample_instance):
    tables = build_cost_tables(sample_instance)
    # upgrading the single-skill type to the two-skill type in the last
    # period costs tuition plus one period of salary difference
    edge = tables.wf_train[(1, 3)]
    assert edge[-1] == pytest.approx(437.0 + (351.0 - 213.0))
    # the zero-salary base type pays the full target salary stream
    edge0 = tables.wf_train[(0, 1)]
    assert edge0[0] == pytest.approx(97.0 + 213.0 * tables.tail[0])


def test_build_cost_tables_rejects_bad_discount():
    inst = make_sample_instance(discount=1.0)
    with pytest.raises(ValueError):
        build_cost_tables(inst)
    inst = make_sample_instance(discount=0.0)
    with pytest.raises(ValueError):
        build_cost_tables(inst)


def test_qualified_pairs_on_sample(sample_instance):
    pairs = derive_qualified_pairs(
        sample_instance.technologies, sample_instance.employees
    )
    assert set(pairs) == {(0, 1), (0, 3), (1, 2), (1, 3)}


def test_qualified_pairs_on_three_skill_lattice():
    technologies = tuple(
        TechnologyType(frozenset({k}), 100 * (k + 1), 100.0, 10.0, 15.0)
        for k in range(3)
    )
    employees = tuple(
        EmployeeType(frozenset(s for s in range(3) if mask >> s & 1), 500.0, 200.0, 300.0)
        for mask in range(8)
    )
    pairs = derive_qualified_pairs(technologies, employees)
    # each skill appears in half of the eight subsets
    assert len(pairs) == 12


def test_training_pairs_count_on_four_skill_lattice():
    employees = tuple(
        EmployeeType(frozenset(s for s in range(4) if mask >> s & 1), 500.0, 200.0, 300.0)
        for mask in range(16)
    )
    options = derive_training_pairs(employees, lambda a, b: (1, 100.0))
    # ordered strict-subset pairs over all subsets of a 4-set: 3^4 - 2^4
    assert len(options) == 65
    for opt in options:
        assert employees[opt.from_type].skills < employees[opt.to_type].skills


def test_validate_accepts_sample(sample_instance):
    assert validate_instance(sample_instance) == []


def test_validate_accepts_matched_initial_resources():
    inst = make_sample_instance(initial_tech=(2, 1), initial_workforce=(0, 2, 1, 0))
    assert validate_instance(inst) == []


def test_validate_flags_unbalanced_initial_resources():
    inst = make_sample_instance(initial_tech=(1, 0), initial_workforce=(0, 0, 0, 0))
    problems = validate_instance(inst)
    assert any("unbalanced" in p for p in problems)


def test_validate_flags_unqualified_initial_matching():
    # balanced counts, but the only employee on hand cannot run anything
    inst = make_sample_instance(initial_tech=(1, 0), initial_workforce=(1, 0, 0, 0))
    problems = validate_instance(inst)
    assert any("no qualified employee" in p for p in problems)


def test_validate_flags_missing_assignment_cost():
    base = make_sample_instance()
    costs = dict(base.assignment_cost)
    del costs[(0, 1)]
    inst = Instance(
        technologies=base.technologies,
        employees=base.employees,
        trainings=base.trainings,
        horizon=base.horizon,
        discount=base.discount,
        demand=base.demand,
        initial_tech=base.initial_tech,
        initial_workforce=base.initial_workforce,
        assignment_cost=costs,
    )
    problems = validate_instance(inst)
    assert any("assignment cost missing" in p for p in problems)


def test_validate_flags_training_edge_without_new_skills():
    base = make_sample_instance()
    bad = base.trainings + (TrainingOption(1, 2, 1, 50.0),)
    inst = Instance(
        technologies=base.technologies,
        employees=base.employees,
        trainings=bad,
        horizon=base.horizon,
        discount=base.discount,
        demand=base.demand,
        initial_tech=base.initial_tech,
        initial_workforce=base.initial_workforce,
        assignment_cost=base.assignment_cost,
    )
    problems = validate_instance(inst)
    assert any("strictly add skills" in p for p in problems)


def test_validate_flags_bad_demand():
    inst = make_sample_instance(demand=(100, -5, 100, 100, 100, 100, 100, 100, 100, 100))
    problems = validate_instance(inst)
    assert any("non-negative" in p for p in problems)


def test_json_round_trip(sample_instance):
    text = instance_to_json(sample_instance)
    again = instance_from_json(text)
    assert again == sample_instance
    # serialization is deterministic
    assert instance_to_json(again) == text


def test_json_is_plain_data(sample_instance):
    import json

    data = json.loads(instance_to_json(sample_instance))
    assert data["horizon"] == 10
    assert data["technologies"][0]["required_skills"] == [1]
    assert [1, 3, 437.0] in data["trainings"] or any(
        o["from_type"] == 1 and o["to_type"] == 3 for o in data["trainings"]
    )
    assert all(len(row) == 3 for row in data["assignment_costs"])
