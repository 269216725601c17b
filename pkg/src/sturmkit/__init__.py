"""Spectral analysis of the Dirichlet deformation operator on [-v_c, v_c]."""

__version__ = "0.1.0"

from .core import (Grid, IntervalDomain, OperatorSpec, PhysicalConstants,
                   SymmetricTridiagonal, apply_operator, build_grid,
                   critical_velocity, deformation_value, discretize)
from .functions import TestFunction

__all__ = [
    "Grid", "IntervalDomain", "OperatorSpec", "PhysicalConstants",
    "SymmetricTridiagonal", "TestFunction", "apply_operator", "build_grid",
    "critical_velocity", "deformation_value", "discretize",
]
