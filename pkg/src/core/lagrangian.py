"""
Lagrangian densities L(x, v) on the tangent bundle of flat R^n.

In flat space the vertical gradient is the v-partial and the horizontal
gradient is the x-partial at frozen v (parallel transport is the identity).
Densities built from kinetic energy minus a potential have closed-form
gradients; custom densities get central finite differences.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np

from ..config.settings import settings
from .decomposition import decompose, project
from .models import AmbientField, GeometryCache, ScalarField
from .operators import OperatorSet

logger = logging.getLogger(__name__)

DensityFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


class LagrangianKind(str, Enum):
    """Built-in Lagrangian families"""
    KINETIC_POTENTIAL = "kinetic"
    CUSTOM = "custom"


@dataclass(frozen=True)
class Potential:
    """Ambient potential V with its gradient, both vectorized over rows"""
    name: str
    value: Callable[[np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray], np.ndarray]


def no_potential() -> Potential:
    return Potential(
        name="none",
        value=lambda x: np.zeros(x.shape[:-1]),
        gradient=lambda x: np.zeros_like(x),
    )


def gravity(g: float, axis) -> Potential:
    """V(x) = g * <axis, x>"""
    axis = np.asarray(axis, dtype=float)

    def value(x):
        if x.shape[-1] != axis.shape[0]:
            raise ValueError(f"Gravity axis has {axis.shape[0]} components, positions have {x.shape[-1]}")
        return g * (x @ axis)

    def gradient(x):
        return np.broadcast_to(g * axis, x.shape).copy()

    return Potential(name="gravity", value=value, gradient=gradient)


@dataclass(frozen=True)
class LagrangianDensity:
    """L: TN -> R with vertical and horizontal gradients"""
    kind: LagrangianKind
    eval_fn: DensityFn
    potential: Optional[Potential] = None
    fd_step: float = settings.FD_STEP
    hessian_step: float = settings.FD_HESSIAN_STEP

    def eval(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        return self.eval_fn(x, v)

    def grad_v(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        if self.kind == LagrangianKind.KINETIC_POTENTIAL:
            return np.array(v, dtype=float)
        return self._central_gradient(x, v, wrt_velocity=True)

    def grad_h(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        if self.kind == LagrangianKind.KINETIC_POTENTIAL:
            return -self.potential.gradient(x)
        return self._central_gradient(x, v, wrt_velocity=False)

    def fiber_hessian(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        """d^2 L / dv dv per vertex, shape (V, n, n)"""
        if self.kind == LagrangianKind.KINETIC_POTENTIAL:
            return np.broadcast_to(np.eye(x.shape[-1]), x.shape + (x.shape[-1],)).copy()
        return self._second_difference(x, v, mixed=False)

    def mixed_hessian(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        """d(grad_v)_d / dx_e per vertex, shape (V, n, n)"""
        if self.kind == LagrangianKind.KINETIC_POTENTIAL:
            return np.zeros(x.shape + (x.shape[-1],))
        return self._second_difference(x, v, mixed=True)

    def energy_density(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        """<grad_v L, v> - L, i.e. |v|^2/2 + V for kinetic-potential densities"""
        return np.sum(self.grad_v(x, v) * v, axis=-1) - self.eval(x, v)

    def _central_gradient(self, x, v, wrt_velocity: bool) -> np.ndarray:
        h = self.fd_step
        gradient = np.empty_like(np.asarray(x, dtype=float))
        for d in range(x.shape[-1]):
            shift = np.zeros(x.shape[-1])
            shift[d] = h
            if wrt_velocity:
                gradient[..., d] = (self.eval(x, v + shift) - self.eval(x, v - shift)) / (2.0 * h)
            else:
                gradient[..., d] = (self.eval(x + shift, v) - self.eval(x - shift, v)) / (2.0 * h)
        return gradient

    def _second_difference(self, x, v, mixed: bool) -> np.ndarray:
        h = self.hessian_step
        n = x.shape[-1]
        hessian = np.empty(x.shape + (n,))
        basis = np.eye(n) * h
        for d in range(n):
            for e in range(n):
                if mixed:
                    def shifted(sd, se):
                        return self.eval(x + se * basis[e], v + sd * basis[d])
                else:
                    def shifted(sd, se):
                        return self.eval(x, v + sd * basis[d] + se * basis[e])
                hessian[..., d, e] = (
                    shifted(1, 1) - shifted(1, -1) - shifted(-1, 1) + shifted(-1, -1)
                ) / (4.0 * h * h)
        return hessian


def kinetic_potential(potential: Optional[Potential] = None) -> LagrangianDensity:
    """L = |v|^2 / 2 - V(x)"""
    potential = potential or no_potential()

    def eval_fn(x, v):
        return 0.5 * np.sum(v * v, axis=-1) - potential.value(x)

    return LagrangianDensity(LagrangianKind.KINETIC_POTENTIAL, eval_fn, potential)


def custom(eval_fn: DensityFn, fd_step: float = settings.FD_STEP) -> LagrangianDensity:
    """Density known only through its values, vectorized over rows of (x, v)"""
    return LagrangianDensity(LagrangianKind.CUSTOM, eval_fn, fd_step=fd_step)


def el_force(L: LagrangianDensity, f: np.ndarray, v: AmbientField, a: AmbientField) -> AmbientField:
    """d/dt[grad_v L(f, v)] - grad_h L(f, v), expanded with the chain rule in (v, a)"""
    if L.kind == LagrangianKind.KINETIC_POTENTIAL:
        return a + L.potential.gradient(f)
    rate = np.einsum("vde,ve->vd", L.mixed_hessian(f, v), v) + np.einsum("vde,ve->vd", L.fiber_hessian(f, v), a)
    return rate - L.grad_h(f, v)


def free_acceleration(L: LagrangianDensity, f: np.ndarray, v: AmbientField) -> AmbientField:
    """Acceleration with el_force = 0, the unconstrained motion of each vertex"""
    if L.kind == LagrangianKind.KINETIC_POTENTIAL:
        return -L.potential.gradient(f)
    rhs = -el_force(L, f, v, np.zeros_like(v))
    return np.linalg.solve(L.fiber_hessian(f, v), rhs[..., None])[..., 0]


def el_residual(L: LagrangianDensity, ops: OperatorSet, cache: GeometryCache,
                f: np.ndarray, v: AmbientField, a: AmbientField) -> AmbientField:
    """Projected Euler-Lagrange bracket; vanishes along solutions"""
    return project(ops, cache, el_force(L, f, v, a))


def pressure_from_state(L: LagrangianDensity, ops: OperatorSet, cache: GeometryCache,
                        f: np.ndarray, v: AmbientField, a: AmbientField) -> ScalarField:
    """Pressure p with EL bracket = grad p + p H + (Gamma_mu part)"""
    return decompose(ops, cache, el_force(L, f, v, a)).pressure


def total_energy(L: LagrangianDensity, cache: GeometryCache, f: np.ndarray, v: AmbientField) -> float:
    return float(np.sum(cache.mass * L.energy_density(f, v)))


def potential_energy(L: LagrangianDensity, cache: GeometryCache, f: np.ndarray) -> float:
    """sum m_i V(f_i); custom densities carry no separate potential"""
    if L.potential is None:
        return 0.0
    return float(np.sum(cache.mass * L.potential.value(f)))


def fiber_derivative_check(L: LagrangianDensity, x: np.ndarray, v: np.ndarray, u: np.ndarray,
                           step: float = settings.FD_STEP) -> float:
    """max |<grad_v L, u> - d/dt L(x, v + t u)| at t = 0"""
    directional = (L.eval(x, v + step * u) - L.eval(x, v - step * u)) / (2.0 * step)
    return float(np.max(np.abs(np.sum(L.grad_v(x, v) * u, axis=-1) - directional)))
