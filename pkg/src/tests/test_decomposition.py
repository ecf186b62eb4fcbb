"""
Tests for the Helmholtz-Hodge decomposition
"""

from dataclasses import replace

import numpy as np
import pytest

from src.core.decomposition import decompose, project, require_mean_curvature
from src.core.errors import MeanCurvatureVanishing
from src.core.models import SolverMethod
from src.core.operators import constraint_residual
from src.tests.conftest import assembled
from src.utils.fields import radial_field, rotation_field, translation_field


def _check_properties(ops, cache, X):
    result = decompose(ops, cache, X)
    scale = np.sqrt(ops.inner(X, X))
    range_part = ops.apply_B(result.pressure)
    assert np.allclose(result.X_mu + range_part, X, atol=1e-12 * np.abs(X).max())
    assert result.constraint_residual_norm < 1e-10 * scale
    assert result.orthogonality_defect < 1e-10 * scale * np.sqrt(ops.inner(range_part, range_part))
    again = project(ops, cache, result.X_mu)
    assert np.abs(again - result.X_mu).max() < 1e-10 * np.abs(result.X_mu).max()


def test_random_fields_on_circle(circle, rng):
    cache, ops = assembled(circle)
    for _ in range(100):
        _check_properties(ops, cache, rng.standard_normal(circle.positions.shape))


def test_random_fields_on_sphere(sphere, rng):
    cache, ops = assembled(sphere)
    for _ in range(100):
        _check_properties(ops, cache, rng.standard_normal(sphere.positions.shape))


def test_random_fields_on_space_curve(space_curve, rng):
    cache, ops = assembled(space_curve)
    for _ in range(100):
        _check_properties(ops, cache, rng.standard_normal(space_curve.positions.shape))


def test_radial_field_has_pressure_minus_one(circle):
    cache, ops = assembled(circle)
    result = decompose(ops, cache, radial_field(circle.positions))
    assert np.allclose(result.pressure, -1.0, atol=1e-10)
    assert np.abs(result.X_mu).max() < 1e-10


def test_rotation_is_divergence_free(circle):
    cache, ops = assembled(circle)
    X = rotation_field(circle.positions)
    result = decompose(ops, cache, X)
    assert np.abs(result.pressure).max() < 1e-10
    assert np.allclose(result.X_mu, X, atol=1e-10)


def test_translation_is_in_constraint_kernel(sphere):
    cache, ops = assembled(sphere)
    X = translation_field(sphere.positions, [0.3, -0.2, 1.0])
    assert np.abs(constraint_residual(ops, cache, X)).max() < 1e-10
    assert np.abs(decompose(ops, cache, X).pressure).max() < 1e-10


def test_pressure_is_unique_across_solvers(sphere, rng):
    cache, ops = assembled(sphere)
    X = rng.standard_normal(sphere.positions.shape)
    direct = decompose(ops, cache, X, method=SolverMethod.DIRECT)
    iterative = decompose(ops, cache, X, method=SolverMethod.CG)
    assert iterative.solver_iterations > 0
    assert np.linalg.norm(iterative.pressure - direct.pressure) < 1e-8 * np.linalg.norm(direct.pressure)


def test_identically_vanishing_curvature_is_rejected(circle):
    cache, ops = assembled(circle)
    flat = replace(cache, mean_curvature=np.zeros_like(cache.mean_curvature),
                   mean_curvature_norm_sq=np.zeros(circle.vertex_count))
    with pytest.raises(MeanCurvatureVanishing):
        decompose(ops, flat, np.ones(circle.positions.shape))


def test_flat_vertices_allowed_unless_strict(square):
    cache, ops = assembled(square)
    X = np.ones(square.positions.shape)
    assert decompose(ops, cache, X).constraint_residual_norm < 1e-10
    with pytest.raises(MeanCurvatureVanishing):
        decompose(ops, cache, X, strict=True)


def test_strict_accepts_curved_everywhere(circle):
    cache, _ = assembled(circle)
    require_mean_curvature(cache, strict=True)


def test_field_shape_mismatch(circle):
    cache, ops = assembled(circle)
    with pytest.raises(ValueError):
        decompose(ops, cache, np.zeros((circle.vertex_count, 3)))


def test_result_serializes(small_circle):
    cache, ops = assembled(small_circle)
    payload = decompose(ops, cache, radial_field(small_circle.positions)).to_dict()
    assert set(payload) == {"X_mu", "pressure", "constraint_residual_norm", "orthogonality_defect", "solver_iterations"}
    assert len(payload["pressure"]) == small_circle.vertex_count
