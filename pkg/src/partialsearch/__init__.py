"""Quantum partial search: exact simulation, reduced 3x3 dynamics and the SO(3)/SU(2) picture."""

from partialsearch.core import (
    Angles,
    DegenerateGeometry,
    GeometryError,
    IterationPlan,
    NonDividing,
    SearchSpace,
    TargetOutOfRange,
    make_space,
)

__all__ = [
    "Angles",
    "DegenerateGeometry",
    "GeometryError",
    "IterationPlan",
    "NonDividing",
    "SearchSpace",
    "TargetOutOfRange",
    "make_space",
]

__version__ = "0.1.0"
