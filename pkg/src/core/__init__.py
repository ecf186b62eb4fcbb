"""
Core components of the incompressible membrane simulator.
"""

from .errors import (
    ConfigError,
    DegenerateGeometry,
    MeanCurvatureVanishing,
    MembraneError,
    NonManifold,
    OracleCheckFailed,
    RenormalizationDiverged,
    SolverBreakdown,
)
from .models import EmbeddedMesh, GeometryCache, MeshKind, SimOptions, SimState, SolverMethod

__all__ = [
    "ConfigError",
    "DegenerateGeometry",
    "MeanCurvatureVanishing",
    "MembraneError",
    "NonManifold",
    "OracleCheckFailed",
    "RenormalizationDiverged",
    "SolverBreakdown",
    "EmbeddedMesh",
    "GeometryCache",
    "MeshKind",
    "SimOptions",
    "SimState",
    "SolverMethod",
]
