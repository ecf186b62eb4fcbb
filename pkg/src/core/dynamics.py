"""
Time integration of the incompressible membrane equations

    d/dt[grad_v L] - grad_h L = grad(p) + p H,    c(df/dt) = 0

by a symmetric projection scheme: half kick with the free acceleration,
drift along the flat exponential map, Newton restoration of the density
along range(B) at the start-of-step geometry, geometry rebuild, second half
kick and Helmholtz-Hodge projection of the velocity at the new geometry.
"""

import logging
from dataclasses import replace
from typing import Optional, Tuple

import numpy as np

from ..config.settings import settings
from .decomposition import decompose, require_mean_curvature
from .errors import RenormalizationDiverged
from .geometry import as_ambient_field, build_geometry, metric_inner, vertex_mass
from .lagrangian import (
    LagrangianDensity,
    LagrangianKind,
    free_acceleration,
    kinetic_potential,
    potential_energy,
    total_energy,
)
from .models import (
    AmbientField,
    Diagnostics,
    EmbeddedMesh,
    GeometryCache,
    RenormalizationResult,
    ScalarField,
    SimOptions,
    SimState,
    Trajectory,
)
from .operators import OperatorSet, build_operators, constraint_residual, factorize

logger = logging.getLogger(__name__)

NEWTON_BASIN = 0.5


def _geometry_of(state: SimState) -> Tuple[GeometryCache, OperatorSet]:
    if state.geometry is not None and state.operators is not None:
        return state.geometry, state.operators
    cache = build_geometry(state.mesh, state.positions)
    return cache, build_operators(cache, state.mesh)


def initial_pressure(L: LagrangianDensity, ops: OperatorSet, cache: GeometryCache,
                     mesh: EmbeddedMesh, velocity: AmbientField) -> ScalarField:
    """Pressure keeping the second time derivative of the vertex masses zero

    Differentiating m(f) = mu twice gives J a + D^2 m[v, v] = 0 with
    a = a_free + B p, hence A p = J a_free + D^2 m[v, v].
    """
    x = cache.positions
    speed = float(np.max(np.abs(velocity))) if velocity.size else 0.0
    rhs = cache.mass_jacobian @ free_acceleration(L, x, velocity).reshape(-1)
    if speed > 0.0:
        eps = settings.FD_HESSIAN_STEP / speed
        second = (vertex_mass(mesh, x + eps * velocity) - 2.0 * cache.mass
                  + vertex_mass(mesh, x - eps * velocity)) / (eps * eps)
        rhs = rhs + second
    return ops.solve(rhs)[0]


def initialize(mesh: EmbeddedMesh, v0: AmbientField, options: Optional[SimOptions] = None,
               lagrangian: Optional[LagrangianDensity] = None) -> SimState:
    """Initial state with the velocity projected onto Gamma_mu"""
    options = options or SimOptions()
    lagrangian = lagrangian or kinetic_potential()
    v0 = as_ambient_field(v0, mesh.vertex_count, mesh.dimension)
    cache = build_geometry(mesh)
    ops = build_operators(cache, mesh)
    velocity = decompose(ops, cache, v0, method=options.solver, strict=options.strict_mean_curvature).X_mu
    pressure = initial_pressure(lagrangian, ops, cache, mesh, velocity)
    return SimState(mesh, 0.0, mesh.positions.copy(), velocity, pressure, 0, cache, ops)


def restore_density(mesh: EmbeddedMesh, positions: np.ndarray, anchor: Optional[OperatorSet] = None,
                    tol: float = settings.VOL_TOL,
                    max_iterations: int = settings.NEWTON_MAX_ITER) -> RenormalizationResult:
    """Newton iteration for m(x + B q) = mu

    Without an anchor each update moves along range(B) of the current
    iterate and solves A dq = m - mu. With an anchor the displacement stays
    in range(B_anchor) and the system is -J B_anchor.
    """
    x = np.array(positions, dtype=float)
    multiplier = np.zeros(mesh.vertex_count)
    error = np.inf
    for iteration in range(max_iterations + 1):
        cache = build_geometry(mesh, x)
        residual = cache.mass - mesh.reference_measure
        error = float(np.max(np.abs(residual / mesh.reference_measure)))
        logger.debug("density restoration iteration %d: max|rho-1|=%.3e", iteration, error)
        if error <= tol:
            return RenormalizationResult(x, multiplier, iteration, error)
        if error >= NEWTON_BASIN:
            raise RenormalizationDiverged(f"max|rho-1| = {error:.3g} is outside the Newton basin")
        if iteration == max_iterations:
            break
        if anchor is None:
            ops = build_operators(cache, mesh)
            direction = ops.B
            update = ops.solve(residual)[0]
        else:
            direction = anchor.B
            system = -(cache.mass_jacobian @ direction)
            update = factorize(system, mesh.kernel)(residual)
        x = x + (direction @ update).reshape(x.shape)
        multiplier += update
    raise RenormalizationDiverged(
        f"Density restoration did not converge in {max_iterations} iterations (max|rho-1| = {error:.3g})"
    )


def renormalize_volume(state: SimState, options: Optional[SimOptions] = None) -> SimState:
    """Move the positions along range(B) until max|rho - 1| <= vol_tol"""
    options = options or SimOptions()
    restored = restore_density(state.mesh, state.positions, tol=options.vol_tol,
                               max_iterations=options.newton_max_iter)
    if restored.iterations == 0:
        return state
    return replace(state, positions=restored.positions, geometry=None, operators=None)


def step(state: SimState, lagrangian: LagrangianDensity, dt: float,
         options: Optional[SimOptions] = None) -> SimState:
    """Advance one time step"""
    if dt <= 0:
        raise ValueError(f"Time step must be positive, got {dt}")
    options = options or SimOptions()
    mesh = state.mesh
    cache, ops = _geometry_of(state)
    require_mean_curvature(cache, options.strict_mean_curvature)

    x0, v0 = state.positions, state.velocity
    v_half = v0 + 0.5 * dt * free_acceleration(lagrangian, x0, v0)
    x1 = x0 + dt * v_half
    if options.renormalize:
        restored = restore_density(mesh, x1, anchor=ops, tol=options.shake_tol,
                                   max_iterations=options.newton_max_iter)
        x1 = restored.positions
        v_half = (x1 - x0) / dt

    cache1 = build_geometry(mesh, x1)
    ops1 = build_operators(cache1, mesh)
    v_star = v_half + 0.5 * dt * free_acceleration(lagrangian, x1, v_half)
    result = decompose(ops1, cache1, v_star, method=options.solver, strict=options.strict_mean_curvature)
    if result.constraint_residual_norm > options.tol_dyn:
        logger.warning("step %d: velocity constraint residual %.3e exceeds %.1e",
                       state.step_index + 1, result.constraint_residual_norm, options.tol_dyn)

    # v_new = v_star - B r is a constraint acceleration -B r / (dt / 2)
    pressure = -2.0 * result.pressure / dt
    return SimState(mesh, state.time + dt, x1, result.X_mu, pressure, state.step_index + 1, cache1, ops1)


def compute_diagnostics(state: SimState, lagrangian: Optional[LagrangianDensity] = None) -> Diagnostics:
    """Energies, density error, constraint residual and pressure statistics"""
    lagrangian = lagrangian or kinetic_potential()
    cache, ops = _geometry_of(state)
    velocity = state.velocity
    kinetic = 0.5 * metric_inner(cache, velocity, velocity)
    energy = total_energy(lagrangian, cache, state.positions, velocity)
    if lagrangian.kind == LagrangianKind.KINETIC_POTENTIAL:
        potential = potential_energy(lagrangian, cache, state.positions)
    else:
        potential = energy - kinetic
    residual = constraint_residual(ops, cache, velocity)
    pressure = state.pressure
    return Diagnostics(
        time=state.time,
        kinetic_energy=kinetic,
        potential_energy=potential,
        total_energy=energy,
        max_density_error=float(np.max(np.abs(cache.mass / state.mesh.reference_measure - 1.0))),
        constraint_residual_norm=float(np.sqrt(np.sum(cache.mass * residual * residual))),
        pressure_min=float(np.min(pressure)),
        pressure_mean=float(np.mean(pressure)),
        pressure_max=float(np.max(pressure)),
        min_mean_curvature_norm=float(np.sqrt(np.min(cache.mean_curvature_norm_sq))),
    )


def run(mesh: EmbeddedMesh, v0: AmbientField, lagrangian: LagrangianDensity, T: float, dt: float,
        options: Optional[SimOptions] = None) -> Trajectory:
    """Integrate to time T, keeping every ``output_stride``-th state and the final one"""
    if T < 0:
        raise ValueError(f"Final time must be non-negative, got {T}")
    if dt <= 0:
        raise ValueError(f"Time step must be positive, got {dt}")
    options = options or SimOptions()
    state = initialize(mesh, v0, options, lagrangian)
    trajectory = Trajectory()
    trajectory.append(state, compute_diagnostics(state, lagrangian))

    steps = int(np.ceil(T / dt - 1e-9)) if T > 0 else 0
    for index in range(steps):
        state = step(state, lagrangian, min(dt, T - state.time) if index == steps - 1 else dt, options)
        if state.step_index % options.output_stride == 0 or index == steps - 1:
            diagnostics = compute_diagnostics(state, lagrangian)
            trajectory.append(state, diagnostics)
            logger.info(
                "t=%.6g energy=%.12g max|rho-1|=%.3e |c(v)|=%.3e",
                diagnostics.time, diagnostics.total_energy,
                diagnostics.max_density_error, diagnostics.constraint_residual_norm,
            )
    return trajectory
