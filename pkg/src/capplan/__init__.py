"""Capacity planning for technology purchases, workforce moves, and
assignments over a finite discounted horizon.

Three solvers share one instance model: a hierarchical pipeline that plans
technology first and staffs it afterwards, a joint pipeline that prices
acquisition paths into the technology plan, and an integrated solver that
optimizes everything in a single model.
"""
from .domain import (
    CostTables,
    EmployeeType,
    Instance,
    TechnologyType,
    TrainingOption,
    build_cost_tables,
    derive_qualified_pairs,
    derive_training_pairs,
    instance_from_dict,
    instance_from_json,
    instance_to_dict,
    instance_to_json,
    validate_instance,
)

__all__ = [
    "CostTables",
    "EmployeeType",
    "Instance",
    "TechnologyType",
    "TrainingOption",
    "build_cost_tables",
    "derive_qualified_pairs",
    "derive_training_pairs",
    "instance_from_dict",
    "instance_from_json",
    "instance_to_dict",
    "instance_to_json",
    "validate_instance",
]

__version__ = "0.1.0"
