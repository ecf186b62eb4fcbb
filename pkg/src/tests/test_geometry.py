"""
Tests for meshes, masses, frames and the mean-curvature vector
"""

import numpy as np
import pytest

from src.core.errors import DegenerateGeometry, NonManifold
from src.core.geometry import (
    build_geometry,
    density,
    density_derivative,
    field_norm,
    make_curve_loop,
    make_triangle_mesh,
    metric_inner,
    scalar_norm,
    split_tangent_normal,
    total_volume,
)
from src.core.models import MeshKind
from src.utils.fields import radial_field
from src.utils.meshes import circle_positions, icosphere


def test_circle_mean_curvature_is_inward_unit_normal(circle):
    cache = build_geometry(circle)
    inward = -circle.positions
    assert np.allclose(np.sqrt(cache.mean_curvature_norm_sq), 1.0, atol=1e-12)
    assert np.allclose(cache.mean_curvature, inward, atol=1e-12)


def test_circle_curvature_scales_with_radius():
    mesh = make_curve_loop(circle_positions(128, radius=0.5))
    cache = build_geometry(mesh)
    assert np.allclose(np.sqrt(cache.mean_curvature_norm_sq), 2.0, atol=1e-11)


def test_reference_density_is_one(circle, sphere):
    assert np.allclose(density(circle), 1.0)
    assert np.allclose(density(sphere), 1.0)


def test_scaled_meshes_have_scaled_density(circle, sphere):
    assert np.allclose(density(circle, 2.0 * circle.positions), 2.0, rtol=1e-13)
    assert np.allclose(density(sphere, 2.0 * sphere.positions), 4.0, rtol=1e-13)


def test_collinear_vertex_has_zero_curvature(square):
    cache = build_geometry(square)
    norms = np.sqrt(cache.mean_curvature_norm_sq)
    # vertices alternate corner, edge midpoint
    assert np.abs(norms[1::2]).max() < 1e-12
    assert norms[0::2].min() > 1.0


def test_circle_total_volume_is_perimeter(circle):
    cache = build_geometry(circle)
    assert total_volume(cache) == pytest.approx(256 * 2.0 * np.sin(np.pi / 256), rel=1e-13)
    assert circle.total_reference_volume == pytest.approx(total_volume(cache), rel=1e-14)


def test_icosphere_mean_curvature(sphere):
    cache = build_geometry(sphere)
    norms = np.sqrt(cache.mean_curvature_norm_sq)
    assert abs(norms.mean() - 2.0) < 0.04
    # inward: opposite to the position on the unit sphere
    assert np.all(np.sum(cache.mean_curvature * sphere.positions, axis=1) < 0.0)


def test_icosphere_normals_are_outward_unit(sphere):
    cache = build_geometry(sphere)
    normal = cache.normal_basis[:, 0, :]
    assert np.allclose(np.linalg.norm(normal, axis=1), 1.0)
    assert np.all(np.sum(normal * sphere.positions, axis=1) > 0.98)


def test_frames_are_orthonormal(space_curve, sphere):
    for mesh in (space_curve, sphere):
        cache = build_geometry(mesh)
        frame = np.concatenate((cache.tangent_basis, cache.normal_basis), axis=1)
        gram = np.einsum("vin,vjn->vij", frame, frame)
        assert frame.shape[1] == mesh.dimension
        assert np.allclose(gram, np.eye(mesh.dimension), atol=1e-12)


def test_space_curve_mean_curvature_is_normal(space_curve):
    cache = build_geometry(space_curve)
    along = np.einsum("vkn,vn->vk", cache.tangent_basis, cache.mean_curvature)
    assert np.abs(along).max() < 1e-12 * np.abs(cache.mean_curvature).max()


def test_split_tangent_normal(sphere, rng):
    cache = build_geometry(sphere)
    X = rng.standard_normal(sphere.positions.shape)
    tangential, normal = split_tangent_normal(cache, X)
    assert np.allclose(tangential + normal, X)
    assert np.allclose(np.sum(tangential * cache.normal_basis[:, 0, :], axis=1), 0.0, atol=1e-12)


def test_radial_density_derivative_on_circle(circle):
    cache = build_geometry(circle)
    rate = density_derivative(cache, density(circle), radial_field(circle.positions))
    assert np.allclose(rate, 1.0, atol=1e-10)


def test_radial_density_derivative_on_sphere(sphere):
    # lumped area is homogeneous of degree two in the positions
    cache = build_geometry(sphere)
    X = sphere.positions / np.linalg.norm(sphere.positions, axis=1)[:, None]
    rate = density_derivative(cache, density(sphere), X)
    assert np.allclose(rate, 2.0, atol=1e-10)


def test_rotation_preserves_density(circle):
    cache = build_geometry(circle)
    X = np.column_stack((-circle.positions[:, 1], circle.positions[:, 0]))
    assert np.abs(density_derivative(cache, density(circle), X)).max() < 1e-12


def test_metric_inner_and_norm(circle):
    cache = build_geometry(circle)
    X = np.tile([1.0, 0.0], (circle.vertex_count, 1))
    assert metric_inner(cache, X, X) == pytest.approx(total_volume(cache))
    assert field_norm(cache, X) == pytest.approx(np.sqrt(total_volume(cache)))
    assert scalar_norm(cache, np.full(circle.vertex_count, 2.0)) == pytest.approx(2.0 * np.sqrt(total_volume(cache)))


def test_curve_loop_needs_four_vertices():
    with pytest.raises(ValueError):
        make_curve_loop(circle_positions(3))


def test_curve_loop_rejects_bad_shape():
    with pytest.raises(ValueError):
        make_curve_loop(np.zeros((8, 4)))


def test_duplicate_vertex_is_degenerate():
    positions = circle_positions(8)
    positions[3] = positions[2]
    with pytest.raises(DegenerateGeometry):
        make_curve_loop(positions)


def test_cusp_is_degenerate():
    # the loop doubles back on itself at (2, 0)
    mesh = make_curve_loop([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [1.0, 0.0]])
    with pytest.raises(DegenerateGeometry):
        build_geometry(mesh)


def test_flipped_triangle_is_non_manifold():
    sphere = icosphere(1)
    triangles = sphere.triangles.copy()
    triangles[0] = triangles[0, ::-1]
    with pytest.raises(NonManifold):
        make_triangle_mesh(sphere.positions, triangles)


def test_open_surface_is_non_manifold():
    sphere = icosphere(1)
    with pytest.raises(NonManifold):
        make_triangle_mesh(sphere.positions, sphere.triangles[1:])


def test_triangle_index_out_of_range():
    sphere = icosphere(1)
    triangles = sphere.triangles.copy()
    triangles[0, 0] = sphere.vertex_count
    with pytest.raises(ValueError):
        make_triangle_mesh(sphere.positions, triangles)


def test_positions_shape_mismatch(circle):
    with pytest.raises(ValueError):
        build_geometry(circle, np.zeros((10, 2)))


def test_mesh_properties(circle, sphere):
    assert circle.kind == MeshKind.CURVE_LOOP
    assert circle.intrinsic_dimension == 1
    assert circle.elements.shape == (256, 2)
    assert sphere.kind == MeshKind.TRIANGLE_MESH
    assert sphere.intrinsic_dimension == 2
    assert build_geometry(sphere).component_count == 1
