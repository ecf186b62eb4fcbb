"""
Scenario file schema
"""

from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..core.errors import ConfigError
from ..core.models import SimOptions, SolverMethod
from ..utils.helpers import load_json_file
from .settings import settings


class MeshSpec(BaseModel):
    """Mesh file or named generator"""
    model_config = ConfigDict(extra="forbid")

    path: Optional[str] = None
    generator: Optional[Literal["circle", "space_curve", "square", "icosphere"]] = None
    vertices: int = Field(256, ge=4)
    radius: float = Field(1.0, gt=0)
    dimension: Literal[2, 3] = 2
    amplitude: float = 0.3
    subdivisions: int = Field(3, ge=0, le=6)
    points_per_side: int = Field(2, ge=1)
    side: float = Field(2.0, gt=0)

    @model_validator(mode="after")
    def one_source(self):
        if (self.path is None) == (self.generator is None):
            raise ValueError("exactly one of 'path' or 'generator' is required")
        return self


class VelocitySpec(BaseModel):
    """Initial velocity generator"""
    model_config = ConfigDict(extra="forbid")

    type: Literal["rotation", "translation", "radial", "zero", "file"] = "zero"
    omega: float = 1.0
    axis: List[float] = [0.0, 0.0, 1.0]
    direction: Optional[List[float]] = None
    path: Optional[str] = None

    @model_validator(mode="after")
    def required_arguments(self):
        if self.type == "translation" and self.direction is None:
            raise ValueError("translation velocity needs 'direction'")
        if self.type == "file" and self.path is None:
            raise ValueError("file velocity needs 'path'")
        return self


class PotentialSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["none", "gravity"] = "none"
    g: float = 9.81
    # defaults to the last ambient axis
    axis: Optional[List[float]] = None


class LagrangianSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["kinetic"] = "kinetic"
    potential: PotentialSpec = PotentialSpec()


class ToleranceSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    vol_tol: float = Field(settings.VOL_TOL, gt=0)
    shake_tol: float = Field(settings.SHAKE_TOL, gt=0)
    tol_dyn: float = Field(settings.TOL_DYN, gt=0)
    newton_max_iter: int = Field(settings.NEWTON_MAX_ITER, ge=1)


class ScenarioConfig(BaseModel):
    """One simulation run"""
    model_config = ConfigDict(extra="forbid")

    mesh: MeshSpec
    velocity: VelocitySpec = VelocitySpec()
    lagrangian: LagrangianSpec = LagrangianSpec()
    dt: float = Field(gt=0)
    T: float = Field(ge=0)
    output_stride: int = Field(1, ge=1)
    renormalize: bool = True
    strict_mean_curvature: bool = False
    solver: SolverMethod = SolverMethod.AUTO
    tolerances: ToleranceSpec = ToleranceSpec()

    def to_options(self) -> SimOptions:
        return SimOptions(
            renormalize=self.renormalize,
            vol_tol=self.tolerances.vol_tol,
            shake_tol=self.tolerances.shake_tol,
            tol_dyn=self.tolerances.tol_dyn,
            newton_max_iter=self.tolerances.newton_max_iter,
            strict_mean_curvature=self.strict_mean_curvature,
            solver=self.solver,
            output_stride=self.output_stride,
        )


def describe_validation_error(error: ValidationError) -> str:
    """'field.path: message' for every failing field"""
    return "; ".join(
        f"{'.'.join(str(part) for part in item['loc']) or 'scenario'}: {item['msg']}"
        for item in error.errors()
    )


def parse_scenario(data) -> ScenarioConfig:
    try:
        return ScenarioConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"Invalid scenario: {describe_validation_error(e)}")


def load_scenario(file_path: str) -> ScenarioConfig:
    return parse_scenario(load_json_file(file_path))


class ConvergenceSpec(BaseModel):
    """Resolution sweep of the manufactured elliptic solution on a circle"""
    model_config = ConfigDict(extra="forbid")

    radius: float = Field(1.0, gt=0)
    modes: List[int] = Field([1, 3, 5], min_length=1)
    resolutions: List[int] = Field([64, 128, 256, 512], min_length=2)
    expected_order: float = 2.0
    order_tolerance: float = Field(0.2, gt=0)

    @model_validator(mode="after")
    def valid_sweep(self):
        if any(k < 0 for k in self.modes):
            raise ValueError("modes must be non-negative")
        if any(count < 4 for count in self.resolutions):
            raise ValueError("resolutions need at least 4 vertices")
        return self


def load_convergence_spec(file_path: str) -> ConvergenceSpec:
    try:
        return ConvergenceSpec.model_validate(load_json_file(file_path))
    except ValidationError as e:
        raise ConfigError(f"Invalid convergence spec: {describe_validation_error(e)}")
