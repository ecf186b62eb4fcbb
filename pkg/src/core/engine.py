#!/usr/bin/env python3
"""
Scenario orchestration for the incompressible membrane simulator
"""

import logging
import os
from typing import Any, Dict, Optional

import numpy as np

from ..config.scenario import ScenarioConfig
from ..utils.fields import GENERATORS, load_field
from ..utils.helpers import resolve_path, write_csv, write_jsonl
from ..utils.meshes import circle_loop, icosphere, load_mesh, space_curve_loop, square_loop
from .dynamics import run
from .errors import ConfigError
from .lagrangian import LagrangianDensity, gravity, kinetic_potential
from .models import AmbientField, EmbeddedMesh, Trajectory

logger = logging.getLogger(__name__)

TRAJECTORY_FILE = "trajectory.jsonl"
DIAGNOSTICS_FILE = "diagnostics.csv"
DIAGNOSTICS_COLUMNS = [
    "t",
    "energy",
    "kinetic_energy",
    "potential_energy",
    "max_density_error",
    "constraint_residual",
    "pressure_min",
    "pressure_mean",
    "pressure_max",
    "min_mean_curvature_norm",
]


class MembraneSimulator:
    """
    Builds mesh, initial velocity and Lagrangian from a scenario, runs the
    integrator and writes plot-ready outputs
    """

    def __init__(self, scenario: ScenarioConfig, base_dir: str = "."):
        self.scenario = scenario
        self.base_dir = base_dir
        self.mesh: Optional[EmbeddedMesh] = None

    def build_mesh(self) -> EmbeddedMesh:
        spec = self.scenario.mesh
        if spec.path is not None:
            mesh = load_mesh(resolve_path(spec.path, self.base_dir))
        elif spec.generator == "circle":
            mesh = circle_loop(spec.vertices, spec.radius, spec.dimension)
        elif spec.generator == "space_curve":
            mesh = space_curve_loop(spec.vertices, spec.radius, spec.amplitude)
        elif spec.generator == "square":
            mesh = square_loop(spec.points_per_side, spec.side)
        else:
            mesh = icosphere(spec.subdivisions, spec.radius)
        logger.info("mesh: %s with %d vertices in R^%d", mesh.kind.value, mesh.vertex_count, mesh.dimension)
        self.mesh = mesh
        return mesh

    def build_initial_velocity(self, mesh: EmbeddedMesh) -> AmbientField:
        spec = self.scenario.velocity
        positions = mesh.positions
        try:
            if spec.type == "file":
                return load_field(resolve_path(spec.path, self.base_dir), positions)
            if spec.type == "rotation":
                return GENERATORS["rotation"](positions, spec.omega, spec.axis)
            if spec.type == "translation":
                return GENERATORS["translation"](positions, spec.direction)
            return GENERATORS[spec.type](positions)
        except ValueError as e:
            raise ConfigError(f"velocity: {e}")

    def build_lagrangian(self, mesh: EmbeddedMesh) -> LagrangianDensity:
        potential = self.scenario.lagrangian.potential
        if potential.type == "none":
            return kinetic_potential()
        axis = potential.axis
        if axis is None:
            axis = np.eye(mesh.dimension)[-1]
        elif len(axis) != mesh.dimension:
            raise ConfigError(f"lagrangian.potential.axis: needs {mesh.dimension} components")
        return kinetic_potential(gravity(potential.g, axis))

    def run(self) -> Trajectory:
        mesh = self.build_mesh()
        velocity = self.build_initial_velocity(mesh)
        lagrangian = self.build_lagrangian(mesh)
        return run(mesh, velocity, lagrangian, self.scenario.T, self.scenario.dt, self.scenario.to_options())

    def write_outputs(self, trajectory: Trajectory, out_dir: str) -> Dict[str, str]:
        os.makedirs(out_dir, exist_ok=True)
        paths = {
            "trajectory": os.path.join(out_dir, TRAJECTORY_FILE),
            "diagnostics": os.path.join(out_dir, DIAGNOSTICS_FILE),
        }
        write_jsonl(paths["trajectory"], (state.to_frame() for state in trajectory.states))
        write_csv(paths["diagnostics"], [d.to_row() for d in trajectory.diagnostics], DIAGNOSTICS_COLUMNS)
        return paths

    def simulate(self, out_dir: str) -> Dict[str, Any]:
        """Run the scenario and write its outputs; returns a summary"""
        trajectory = self.run()
        paths = self.write_outputs(trajectory, out_dir)
        diagnostics = trajectory.diagnostics
        energies = np.array([d.total_energy for d in diagnostics])
        scale = max(abs(energies[0]), np.finfo(float).tiny)
        summary = {
            "steps": trajectory.final.step_index,
            "frames": len(trajectory.states),
            "final_time": trajectory.final.time,
            "relative_energy_drift": float(np.max(np.abs(energies - energies[0])) / scale),
            "max_density_error": max(d.max_density_error for d in diagnostics),
            "max_constraint_residual": max(d.constraint_residual_norm for d in diagnostics),
            "outputs": paths,
        }
        logger.info("simulation finished: %s", summary)
        return summary
