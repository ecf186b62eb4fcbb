"""
Data models for the incompressible membrane simulator
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np
from scipy import sparse

# One ambient vector per vertex, shape (V, n)
AmbientField = np.ndarray
# One real per vertex, shape (V,)
ScalarField = np.ndarray


class MeshKind(str, Enum):
    """Discrete closed manifold kinds"""
    CURVE_LOOP = "curve"
    TRIANGLE_MESH = "surface"


class SolverMethod(str, Enum):
    """Linear solver paths for the pressure system"""
    AUTO = "auto"
    DIRECT = "direct"
    CG = "cg"


@dataclass(frozen=True, eq=False)
class EmbeddedMesh:
    """Closed polyline loop or closed triangle mesh with a frozen reference measure"""
    kind: MeshKind
    positions: np.ndarray
    reference_measure: np.ndarray
    triangles: Optional[np.ndarray] = None
    # orthonormal combinations of vertex masses that vanish identically, (V, k)
    constraint_kernel: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def vertex_count(self) -> int:
        return int(self.positions.shape[0])

    @property
    def dimension(self) -> int:
        return int(self.positions.shape[1])

    @property
    def intrinsic_dimension(self) -> int:
        return 1 if self.kind == MeshKind.CURVE_LOOP else 2

    @property
    def elements(self) -> np.ndarray:
        """Edges (V, 2) of a loop or triangles (F, 3) of a surface"""
        if self.kind == MeshKind.CURVE_LOOP:
            index = np.arange(self.vertex_count)
            return np.column_stack((index, np.roll(index, -1)))
        return self.triangles

    @property
    def total_reference_volume(self) -> float:
        return float(np.sum(self.reference_measure))

    @property
    def kernel(self) -> np.ndarray:
        if self.constraint_kernel is None:
            return np.zeros((self.vertex_count, 0))
        return self.constraint_kernel


@dataclass(frozen=True, eq=False)
class GeometryCache:
    """Metric data of the embedding at one configuration"""
    kind: MeshKind
    positions: np.ndarray
    mass: np.ndarray
    tangent_basis: np.ndarray
    normal_basis: np.ndarray
    mean_curvature: np.ndarray
    mean_curvature_norm_sq: np.ndarray
    mass_jacobian: sparse.csr_matrix
    component_labels: np.ndarray
    constraint_kernel: np.ndarray

    @property
    def vertex_count(self) -> int:
        return int(self.positions.shape[0])

    @property
    def dimension(self) -> int:
        return int(self.positions.shape[1])

    @property
    def component_count(self) -> int:
        return int(self.component_labels.max()) + 1


@dataclass(frozen=True)
class DecompositionResult:
    """X = X_mu + B(pressure) with diagnostics"""
    X_mu: AmbientField
    pressure: ScalarField
    constraint_residual_norm: float
    orthogonality_defect: float
    solver_iterations: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "X_mu": self.X_mu.tolist(),
            "pressure": self.pressure.tolist(),
            "constraint_residual_norm": self.constraint_residual_norm,
            "orthogonality_defect": self.orthogonality_defect,
            "solver_iterations": self.solver_iterations,
        }


@dataclass(frozen=True)
class RenormalizationResult:
    """Outcome of a Newton density restoration"""
    positions: np.ndarray
    multiplier: ScalarField
    iterations: int
    max_density_error: float


@dataclass(frozen=True)
class SimOptions:
    """Integrator options"""
    renormalize: bool = True
    vol_tol: float = 1e-8
    shake_tol: float = 1e-12
    tol_dyn: float = 1e-9
    newton_max_iter: int = 10
    strict_mean_curvature: bool = False
    solver: SolverMethod = SolverMethod.AUTO
    output_stride: int = 1


@dataclass(frozen=True)
class Diagnostics:
    """Quantities recomputed from a state, never integrated"""
    time: float
    kinetic_energy: float
    potential_energy: float
    total_energy: float
    max_density_error: float
    constraint_residual_norm: float
    pressure_min: float
    pressure_mean: float
    pressure_max: float
    min_mean_curvature_norm: float

    def to_row(self) -> Dict[str, float]:
        return {
            "t": self.time,
            "energy": self.total_energy,
            "kinetic_energy": self.kinetic_energy,
            "potential_energy": self.potential_energy,
            "max_density_error": self.max_density_error,
            "constraint_residual": self.constraint_residual_norm,
            "pressure_min": self.pressure_min,
            "pressure_mean": self.pressure_mean,
            "pressure_max": self.pressure_max,
            "min_mean_curvature_norm": self.min_mean_curvature_norm,
        }


@dataclass(frozen=True, eq=False)
class SimState:
    """Embedding, velocity and pressure at one instant"""
    mesh: EmbeddedMesh
    time: float
    positions: np.ndarray
    velocity: AmbientField
    pressure: ScalarField
    step_index: int = 0
    geometry: Optional[GeometryCache] = field(default=None, repr=False)
    operators: Optional[Any] = field(default=None, repr=False)

    def to_frame(self) -> Dict[str, Any]:
        return {
            "t": self.time,
            "step": self.step_index,
            "positions": self.positions.tolist(),
            "velocity": self.velocity.tolist(),
            "pressure": self.pressure.tolist(),
        }


@dataclass
class Trajectory:
    """Snapshots emitted by a run at the output stride"""
    states: List[SimState] = field(default_factory=list)
    diagnostics: List[Diagnostics] = field(default_factory=list)

    def append(self, state: SimState, diagnostics: Diagnostics):
        self.states.append(state)
        self.diagnostics.append(diagnostics)

    @property
    def final(self) -> SimState:
        return self.states[-1]


@dataclass(frozen=True)
class CheckResult:
    """One validator outcome"""
    name: str
    measured: float
    tolerance: float
    passed: bool
    detail: str = ""


@dataclass
class CheckReport:
    """Pass/fail report of the validation suite"""
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def add(self, name: str, measured: float, tolerance: float, detail: str = "") -> CheckResult:
        measured = float(measured)
        result = CheckResult(name, measured, tolerance, bool(np.isfinite(measured) and measured <= tolerance), detail)
        self.checks.append(result)
        return result

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "checks": [
                {
                    "name": check.name,
                    "measured": check.measured,
                    "tolerance": check.tolerance,
                    "passed": check.passed,
                    "detail": check.detail,
                }
                for check in self.checks
            ],
        }


@dataclass(frozen=True)
class ConvergenceReport:
    """Errors of a manufactured solution over a resolution sweep"""
    radius: float
    mode: int
    resolutions: List[int]
    mesh_sizes: List[float]
    errors: List[float]
    order: Optional[float]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "radius": self.radius,
            "mode": self.mode,
            "resolutions": self.resolutions,
            "mesh_sizes": self.mesh_sizes,
            "errors": self.errors,
            "order": self.order,
        }
