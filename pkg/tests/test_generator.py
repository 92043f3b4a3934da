"""Demand shapes, lattice catalogs, and generation determinism."""
from __future__ import annotations

import dataclasses

import numpy as np
import pytest

from capplan.domain import instance_to_json, validate_instance
from capplan.generator import (
    DemandScenario,
    GeneratorConfig,
    config_from_json,
    config_to_dict,
    generate_batch,
    generate_demand,
    generate_instance,
)
import json


def test_identical_configs_generate_bit_identical_instances():
    config = GeneratorConfig(n_tech=3, seed=424242)
    a = generate_instance(config)
    b = generate_instance(GeneratorConfig(n_tech=3, seed=424242))
    assert instance_to_json(a) == instance_to_json(b)


def test_random_increase_is_nondecreasing_within_band():
    rng = np.random.default_rng(11)
    for _ in range(25):
        d = generate_demand(DemandScenario("RandomIncrease"), 10, rng)
        assert len(d) == 10
        assert all(0 <= v <= 2000 for v in d)
        assert all(b >= a for a, b in zip(d, d[1:]))
        assert d[0] >= 1000


def test_random_decrease_is_nonincreasing_within_band():
    rng = np.random.default_rng(12)
    for _ in range(25):
        d = generate_demand(DemandScenario("RandomDecrease"), 10, rng)
        assert all(0 <= v <= 2000 for v in d)
        assert all(b <= a for a, b in zip(d, d[1:]))


def test_cycle_up_down_peaks_mid_horizon_and_returns():
    rng = np.random.default_rng(13)
    for _ in range(25):
        d = generate_demand(DemandScenario("Cycle1UpDown"), 10, rng)
        assert d[0] == 1000
        assert d[-1] == d[0]
        assert d[4] == d[5]  # even horizon holds the peak one period
        assert max(d) == d[4]
        assert all(b >= a for a, b in zip(d[:5], d[1:5]))
        assert all(b <= a for a, b in zip(d[5:], d[6:]))


def test_cycle_down_up_dips_mid_horizon_and_returns():
    rng = np.random.default_rng(14)
    for _ in range(25):
        d = generate_demand(DemandScenario("Cycle2DownUp"), 9, rng)
        assert d[-1] == d[0] == 1000
        assert min(d) == d[4]  # odd horizon, single trough


def test_zero_width_band_gives_constant_demand():
    rng = np.random.default_rng(15)
    for kind in ("RandomIncrease", "RandomFluctuation", "Cycle1UpDown"):
        d = generate_demand(DemandScenario(kind, 1000, 0, 1000), 10, rng)
        assert d == (1000,) * 10


def test_fluctuation_wanders_around_the_start_level():
    rng = np.random.default_rng(16)
    d = generate_demand(DemandScenario("RandomFluctuation"), 100, rng)
    assert all(0 <= v <= 2000 for v in d)
    assert 600 <= np.mean(d) <= 1400


def test_demand_needs_two_periods():
    with pytest.raises(ValueError):
        generate_demand(DemandScenario(), 1, np.random.default_rng(0))


def test_two_technology_lattice_structure():
    inst = generate_instance(GeneratorConfig(n_tech=2, seed=7))
    assert inst.n_tech == 2
    assert inst.n_emp == 4
    skills = [e.skills for e in inst.employees]
    assert skills[0] == frozenset()
    assert {frozenset({1}), frozenset({2})} == set(skills[1:3])
    assert skills[3] == frozenset({1, 2})
    assert len(inst.assignment_cost) == 4
    assert len(inst.trainings) == 5
    single = [o for o in inst.trainings if len(inst.employees[o.to_type].skills - inst.employees[o.from_type].skills) == 1]
    assert len(single) == 4
    assert inst.employees[0].salary == 0.0
    assert validate_instance(inst) == []


def test_single_technology_gives_two_employee_types():
    inst = generate_instance(GeneratorConfig(n_tech=1, seed=3))
    assert inst.n_emp == 2
    assert validate_instance(inst) == []


def test_ten_technology_lattice_size():
    inst = generate_instance(GeneratorConfig(n_tech=10, seed=5))
    assert inst.n_emp == 1024


def test_oversized_lattice_rejected():
    with pytest.raises(ValueError):
        generate_instance(GeneratorConfig(n_tech=17, seed=1))


def test_costs_are_monotone_across_seeds():
    for seed in range(40, 60):
        inst = generate_instance(GeneratorConfig(n_tech=3, seed=seed))
        caps = [t.capacity for t in inst.technologies]
        assert caps == sorted(caps)
        pcs = [t.purchase_cost for t in inst.technologies]
        assert pcs == sorted(pcs)
        for a in inst.employees:
            for b in inst.employees:
                if a.skills < b.skills:
                    assert a.hiring_cost <= b.hiring_cost
                    assert a.salary <= b.salary
        assert validate_instance(inst) == []


def test_generated_costs_fall_in_default_ranges():
    inst = generate_instance(GeneratorConfig(n_tech=2, seed=99))
    for t in inst.technologies:
        assert 200 <= t.capacity <= 1000
        assert 100 <= t.purchase_cost <= 600
        assert t.maintenance_cost == 10.0
        assert 10 <= t.discard_cost <= 20
    for j, e in enumerate(inst.employees):
        assert 500 <= e.hiring_cost <= 2000
        assert 200 <= e.firing_cost <= 500
        if j:
            assert 200 <= e.salary <= 300
    for cost in inst.assignment_cost.values():
        assert 50 <= cost <= 60
    for opt in inst.trainings:
        added = inst.employees[opt.to_type].skills - inst.employees[opt.from_type].skills
        assert 0 <= opt.duration <= 2 * len(added)
        assert 10 * len(added) <= opt.base_cost <= 500 * len(added)


def test_config_json_round_trip():
    config = GeneratorConfig(
        n_tech=4,
        seed=17,
        scenario=DemandScenario("Cycle2DownUp", 900, 100, 1900),
        cost_ranges={"hiring": (600.0, 1500.0)},
        training_time_range=(1, 2),
    )
    back = config_from_json(json.dumps(config_to_dict(config)))
    assert back == config
    assert back.cost_ranges["hiring"] == (600.0, 1500.0)
    assert back.cost_ranges["salary"] == (200.0, 300.0)


def test_batch_uses_derived_seeds():
    config = GeneratorConfig(n_tech=2, seed=100)
    batch = generate_batch(config, 3)
    assert len(batch) == 3
    direct = generate_instance(dataclasses.replace(config, seed=102))
    assert instance_to_json(batch[2]) == instance_to_json(direct)
    assert instance_to_json(batch[0]) != instance_to_json(batch[1])
