"""
Tests for Lagrangian densities and the Euler-Lagrange bracket
"""

import numpy as np
import pytest

from src.core.geometry import build_geometry, make_curve_loop
from src.core.lagrangian import (
    LagrangianKind,
    custom,
    el_force,
    el_residual,
    fiber_derivative_check,
    free_acceleration,
    gravity,
    kinetic_potential,
    potential_energy,
    pressure_from_state,
    total_energy,
)
from src.core.oracle import rigid_rotation_reference
from src.tests.conftest import assembled
from src.utils.meshes import circle_positions


def _gravity_density(g):
    def eval_fn(x, v):
        return 0.5 * np.sum(v * v, axis=-1) - g * x[..., 1]
    return custom(eval_fn)


@pytest.fixture
def state(rng):
    return rng.standard_normal((16, 2)), rng.standard_normal((16, 2))


def test_kinetic_gradients(state):
    x, v = state
    L = kinetic_potential(gravity(2.0, [0.0, 1.0]))
    assert L.kind == LagrangianKind.KINETIC_POTENTIAL
    assert np.array_equal(L.grad_v(x, v), v)
    assert np.allclose(L.grad_h(x, v), [0.0, -2.0])
    assert np.allclose(L.energy_density(x, v), 0.5 * np.sum(v * v, axis=1) + 2.0 * x[:, 1])


def test_custom_gradients_match_closed_form(state):
    x, v = state
    reference = kinetic_potential(gravity(2.0, [0.0, 1.0]))
    L = _gravity_density(2.0)
    assert L.kind == LagrangianKind.CUSTOM
    assert np.allclose(L.grad_v(x, v), reference.grad_v(x, v), atol=1e-8)
    assert np.allclose(L.grad_h(x, v), reference.grad_h(x, v), atol=1e-8)
    assert np.allclose(L.fiber_hessian(x, v), np.eye(2), atol=1e-6)
    assert np.allclose(L.mixed_hessian(x, v), 0.0, atol=1e-6)


def test_custom_el_force_matches_kinetic(state, rng):
    x, v = state
    a = rng.standard_normal(x.shape)
    reference = el_force(kinetic_potential(gravity(2.0, [0.0, 1.0])), x, v, a)
    assert np.allclose(reference, a + [0.0, 2.0])
    assert np.allclose(el_force(_gravity_density(2.0), x, v, a), reference, atol=1e-5)
    assert np.allclose(free_acceleration(_gravity_density(2.0), x, v), [0.0, -2.0], atol=1e-5)


def test_fiber_derivative_is_consistent(state, rng):
    x, v = state
    u = rng.standard_normal(x.shape)
    assert fiber_derivative_check(kinetic_potential(), x, v, u) < 1e-8
    assert fiber_derivative_check(_gravity_density(1.0), x, v, u) < 1e-6


def test_gravity_axis_mismatch():
    L = kinetic_potential(gravity(9.81, [0.0, 0.0, 1.0]))
    with pytest.raises(ValueError):
        L.eval(np.zeros((4, 2)), np.zeros((4, 2)))


def test_pressure_from_rotating_state():
    positions, velocity, expected = rigid_rotation_reference(0.5, 2.0, 0.3, 128)
    mesh = make_curve_loop(positions)
    cache, ops = assembled(mesh)
    acceleration = -4.0 * positions
    p = pressure_from_state(kinetic_potential(), ops, cache, positions, velocity, acceleration)
    assert np.allclose(p, expected, rtol=1e-2)
    assert np.allclose(expected, 1.0)
    residual = el_residual(kinetic_potential(), ops, cache, positions, velocity, acceleration)
    assert np.abs(residual).max() < 1e-10


def test_energies_on_circle():
    mesh = make_curve_loop(circle_positions(64) + [0.0, 1.0])
    cache = build_geometry(mesh)
    L = kinetic_potential(gravity(3.0, [0.0, 1.0]))
    v = np.zeros_like(mesh.positions)
    # center of mass at height 1
    assert potential_energy(L, cache, mesh.positions) == pytest.approx(3.0 * mesh.total_reference_volume, rel=1e-12)
    assert total_energy(L, cache, mesh.positions, v) == pytest.approx(3.0 * mesh.total_reference_volume, rel=1e-12)
    assert potential_energy(custom(L.eval_fn), cache, mesh.positions) == 0.0
