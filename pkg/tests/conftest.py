"""Shared fixtures: a small hand-built catalog exercised across modules."""
from __future__ import annotations

import pytest

from capplan.domain import EmployeeType, Instance, TechnologyType, TrainingOption


def make_sample_instance(
    horizon: int = 10,
    discount: float = 0.93,
    demand: tuple[int, ...] | None = None,
    initial_tech: tuple[int, ...] = (0, 0),
    initial_workforce: tuple[int, ...] = (0, 0, 0, 0),
) -> Instance:
    """Two technology types, four employee types on a two-skill lattice.

    All numbers are fixed by hand so tests can freeze expected values.
    """
    if demand is None:
        demand = (1097, 1194, 1298, 1397, 1495, 1594, 1695, 1793, 1898, 1993)
        if horizon != 10:
            demand = demand[:horizon]
    technologies = (
        TechnologyType(frozenset({1}), 374, 154.0, 10.0, 12.0),
        TechnologyType(frozenset({2}), 915, 470.0, 10.0, 16.0),
    )
    employees = (
        EmployeeType(frozenset(), 875.0, 0.0, 226.0),
        EmployeeType(frozenset({1}), 1887.0, 213.0, 563.0),
        EmployeeType(frozenset({2}), 2746.0, 287.0, 579.0),
        EmployeeType(frozenset({1, 2}), 3758.0, 351.0, 613.0),
    )
    trainings = (
        TrainingOption(0, 1, 0, 97.0),
        TrainingOption(0, 2, 1, 437.0),
        TrainingOption(0, 3, 1, 534.0),
        TrainingOption(1, 3, 1, 437.0),
        TrainingOption(2, 3, 0, 97.0),
    )
    assignment_cost = {(0, 1): 50.0, (0, 3): 53.2, (1, 2): 50.0, (1, 3): 53.2}
    return Instance(
        technologies=technologies,
        employees=employees,
        trainings=trainings,
        horizon=horizon,
        discount=discount,
        demand=demand,
        initial_tech=initial_tech,
        initial_workforce=initial_workforce,
        assignment_cost=assignment_cost,
    )


@pytest.fixture
def sample_instance() -> Instance:
    return make_sample_instance()
