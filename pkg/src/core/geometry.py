"""
Metric data of discrete embedded submanifolds: vertex masses and their
Jacobian, tangent/normal frames, the mean-curvature vector and the density
map rho = (current volume weight) / (reference volume weight).

Ambient space is flat R^n (n = 2 or 3), so the exponential map, the
connector and the covariant derivative are all affine.
"""

import logging
from typing import Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from ..config.settings import settings
from .errors import DegenerateGeometry, NonManifold
from .models import AmbientField, EmbeddedMesh, GeometryCache, MeshKind, ScalarField

logger = logging.getLogger(__name__)


def make_curve_loop(positions) -> EmbeddedMesh:
    """Closed polyline through ``positions`` (cyclic order), mu frozen from them"""
    positions = np.array(positions, dtype=float)
    if positions.ndim != 2 or positions.shape[1] not in (2, 3):
        raise ValueError("Curve positions must have shape (V, 2) or (V, 3)")
    if positions.shape[0] < 4:
        raise ValueError(f"A curve loop needs at least 4 vertices, got {positions.shape[0]}")
    mesh = EmbeddedMesh(MeshKind.CURVE_LOOP, positions, np.ones(positions.shape[0]))
    return EmbeddedMesh(MeshKind.CURVE_LOOP, positions, vertex_mass(mesh, positions),
                        constraint_kernel=_curve_kernel(positions.shape[0]))


def make_triangle_mesh(positions, triangles) -> EmbeddedMesh:
    """Closed oriented triangle mesh in R^3, mu frozen from ``positions``"""
    positions = np.array(positions, dtype=float)
    triangles = np.array(triangles, dtype=np.int64)
    if positions.ndim != 2 or positions.shape[1] != 3:
        raise ValueError("Surface positions must have shape (V, 3)")
    if triangles.ndim != 2 or triangles.shape[1] != 3:
        raise ValueError("Triangles should have 3 vertices")
    if triangles.size == 0 or triangles.min() < 0 or triangles.max() >= positions.shape[0]:
        raise ValueError("Triangle indices exceed number of vertices")
    _check_closed_oriented_manifold(triangles, positions.shape[0])
    mesh = EmbeddedMesh(MeshKind.TRIANGLE_MESH, positions, np.ones(positions.shape[0]), triangles)
    return EmbeddedMesh(MeshKind.TRIANGLE_MESH, positions, vertex_mass(mesh, positions), triangles,
                        constraint_kernel=_surface_kernel(triangles, positions.shape[0]))


def _check_closed_oriented_manifold(triangles: np.ndarray, vertex_count: int):
    # every directed edge exactly once and its reverse present
    i = triangles.reshape(-1)
    j = np.roll(triangles, -1, axis=1).reshape(-1)
    directed = sparse.csr_matrix((np.ones(i.shape), (i, j)), shape=(vertex_count, vertex_count))
    directed.sum_duplicates()
    if directed.data.size and directed.data.max() > 1:
        raise NonManifold("Edge used twice with the same orientation (inconsistent orientation or non-manifold edge)")
    if (directed - directed.T).count_nonzero() != 0:
        raise NonManifold("Mesh has boundary or non-manifold edges")
    unused = np.setdiff1d(np.arange(vertex_count), triangles)
    if unused.size:
        raise NonManifold(f"{unused.size} vertices are not used by any triangle")


def _curve_kernel(vertex_count: int) -> np.ndarray:
    """Alternating sum of dual lengths vanishes identically on even loops"""
    if vertex_count % 2:
        return np.zeros((vertex_count, 0))
    alternating = (-1.0) ** np.arange(vertex_count)
    return (alternating / np.sqrt(vertex_count))[:, None]


def _surface_kernel(triangles: np.ndarray, vertex_count: int) -> np.ndarray:
    """Pressures summing to zero on every triangle of a 3-colorable component"""
    edge_faces = {}
    for face, corners in enumerate(triangles.tolist()):
        for k in range(3):
            u, v = corners[k], corners[(k + 1) % 3]
            edge_faces.setdefault((min(u, v), max(u, v)), []).append(face)

    color = np.full(vertex_count, -1, dtype=np.int64)
    visited = np.zeros(triangles.shape[0], dtype=bool)
    columns = []
    for seed in range(triangles.shape[0]):
        if visited[seed]:
            continue
        visited[seed] = True
        color[triangles[seed]] = (0, 1, 2)
        queue, faces, colorable = [seed], [seed], True
        # coloring is forced across shared edges
        while queue:
            face = queue.pop()
            corners = triangles[face]
            known = color[corners]
            if np.count_nonzero(known < 0) == 1:
                color[corners[known < 0]] = 3 - known[known >= 0].sum()
            if sorted(color[corners].tolist()) != [0, 1, 2]:
                colorable = False
            for k in range(3):
                u, v = corners[k], corners[(k + 1) % 3]
                for other in edge_faces[(min(u, v), max(u, v))]:
                    if not visited[other]:
                        visited[other] = True
                        queue.append(other)
                        faces.append(other)
        if colorable:
            vertices = np.unique(triangles[faces])
            for pattern in ((1.0, -1.0, 0.0), (1.0, 1.0, -2.0)):
                column = np.zeros(vertex_count)
                column[vertices] = np.asarray(pattern)[color[vertices]]
                columns.append(column)

    if not columns:
        return np.zeros((vertex_count, 0))
    logger.debug("3-colorable surface: %d dependent mass constraints", len(columns))
    basis, _ = np.linalg.qr(np.column_stack(columns))
    return basis


def _element_data(mesh: EmbeddedMesh, positions: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Element measures (E,) and their gradients w.r.t. element corners (E, corners, n)"""
    elements = mesh.elements
    if mesh.kind == MeshKind.CURVE_LOOP:
        edges = positions[elements[:, 1]] - positions[elements[:, 0]]
        lengths = np.linalg.norm(edges, axis=1)
        bad = np.flatnonzero(lengths <= settings.EPS_GEOM)
        if bad.size:
            raise DegenerateGeometry(f"Zero-length edge at vertex {int(bad[0])}")
        unit = edges / lengths[:, None]
        return lengths, np.stack((-unit, unit), axis=1)

    x0 = positions[elements[:, 0]]
    x1 = positions[elements[:, 1]]
    x2 = positions[elements[:, 2]]
    cross = np.cross(x1 - x0, x2 - x0)
    doubled = np.linalg.norm(cross, axis=1)
    bad = np.flatnonzero(doubled <= 2.0 * settings.EPS_GEOM)
    if bad.size:
        raise DegenerateGeometry(f"Zero-area triangle {int(bad[0])}")
    unit = cross / doubled[:, None]
    corners = (x0, x1, x2)
    # dA/dx_c = n x (x_{c+2} - x_{c+1}) / 2
    gradients = np.stack(
        [0.5 * np.cross(unit, corners[(c + 2) % 3] - corners[(c + 1) % 3]) for c in range(3)], axis=1
    )
    return 0.5 * doubled, gradients


def _lump(mesh: EmbeddedMesh, measures: np.ndarray) -> np.ndarray:
    elements = mesh.elements
    corners = elements.shape[1]
    mass = np.zeros(mesh.vertex_count)
    np.add.at(mass, elements.reshape(-1), np.repeat(measures / corners, corners))
    return mass


def vertex_mass(mesh: EmbeddedMesh, positions: np.ndarray) -> np.ndarray:
    """Dual arc length (curves) or barycentric-lumped area (surfaces)"""
    measures, _ = _element_data(mesh, positions)
    return _lump(mesh, measures)


def _mass_jacobian(mesh: EmbeddedMesh, gradients: np.ndarray) -> sparse.csr_matrix:
    """d(mass_a)/d(x_c) as a (V, V*n) sparse matrix"""
    elements = mesh.elements
    count, corners = elements.shape
    n = mesh.dimension
    shape = (count, corners, corners, n)
    rows = np.broadcast_to(elements[:, :, None, None], shape)
    cols = np.broadcast_to(elements[:, None, :, None] * n + np.arange(n), shape)
    vals = np.broadcast_to(gradients[:, None, :, :] / corners, shape)
    jac = sparse.coo_matrix(
        (vals.reshape(-1), (rows.reshape(-1), cols.reshape(-1))),
        shape=(mesh.vertex_count, mesh.vertex_count * n),
    )
    return jac.tocsr()


def _cotangent_laplacian(triangles: np.ndarray, positions: np.ndarray) -> sparse.csr_matrix:
    """Symmetric cotangent weights matrix W with (Lx)_i = sum_j W_ij (x_j - x_i)"""
    rows, cols, vals = [], [], []
    for k in range(3):
        i = triangles[:, (k + 1) % 3]
        j = triangles[:, (k + 2) % 3]
        u = positions[i] - positions[triangles[:, k]]
        v = positions[j] - positions[triangles[:, k]]
        cot = np.sum(u * v, axis=1) / np.linalg.norm(np.cross(u, v), axis=1)
        rows.extend((i, j))
        cols.extend((j, i))
        vals.extend((0.5 * cot, 0.5 * cot))
    size = positions.shape[0]
    weights = sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(size, size)
    )
    return weights.tocsr()


def _unit(vectors: np.ndarray, what: str) -> np.ndarray:
    norms = np.linalg.norm(vectors, axis=-1)
    bad = np.flatnonzero(norms <= settings.EPS_GEOM)
    if bad.size:
        raise DegenerateGeometry(f"Cannot normalize {what} at vertex {int(bad[0])}")
    return vectors / norms[..., None]


def _complement_axis(vectors: np.ndarray) -> np.ndarray:
    """Unit vectors orthogonal to each row of ``vectors`` (unit rows)"""
    n = vectors.shape[1]
    helper = np.eye(n)[np.argmin(np.abs(vectors), axis=1)]
    helper = helper - np.sum(helper * vectors, axis=1)[:, None] * vectors
    return helper / np.linalg.norm(helper, axis=1)[:, None]


def _curve_frames(edge_units: np.ndarray, mass: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    previous = np.roll(edge_units, 1, axis=0)
    tangent = _unit(previous + edge_units, "tangent (cusp)")
    curvature = (edge_units - previous) / mass[:, None]
    n = edge_units.shape[1]
    if n == 2:
        normal = np.stack((-tangent[:, 1], tangent[:, 0]), axis=1)
        return tangent[:, None, :], normal[:, None, :], curvature

    # propagate the first normal along the loop for a continuous frame
    first = _complement_axis(tangent[:1])[0]
    normals = np.empty_like(tangent)
    carried = first
    for index in range(tangent.shape[0]):
        carried = carried - np.dot(carried, tangent[index]) * tangent[index]
        length = np.linalg.norm(carried)
        if length <= settings.TOL_GEOM:
            carried = _complement_axis(tangent[index:index + 1])[0]
        else:
            carried = carried / length
        normals[index] = carried
    binormals = np.cross(tangent, normals)
    return tangent[:, None, :], np.stack((normals, binormals), axis=1), curvature


def _surface_frames(mesh: EmbeddedMesh, positions: np.ndarray, mass: np.ndarray):
    triangles = mesh.triangles
    weights = _cotangent_laplacian(triangles, positions)
    degree = np.asarray(weights.sum(axis=1)).ravel()
    curvature = (weights @ positions - degree[:, None] * positions) / mass[:, None]

    face_normals = np.cross(
        positions[triangles[:, 1]] - positions[triangles[:, 0]],
        positions[triangles[:, 2]] - positions[triangles[:, 0]],
    )
    area_normals = np.zeros_like(positions)
    for k in range(3):
        np.add.at(area_normals, triangles[:, k], face_normals)
    area_normals = _unit(area_normals, "vertex normal")

    magnitude = np.linalg.norm(curvature, axis=1)
    curved = magnitude > settings.EPS_MEAN_CURVATURE
    orientation = np.where(np.sum(curvature * area_normals, axis=1) < 0.0, -1.0, 1.0)
    normal = area_normals.copy()
    normal[curved] = orientation[curved, None] * curvature[curved] / magnitude[curved, None]
    if np.any(~curved):
        flat = ~curved
        logger.debug("%d flat vertices use area-weighted normals", int(flat.sum()))
        curvature[flat] = np.sum(curvature[flat] * normal[flat], axis=1)[:, None] * normal[flat]

    first = _complement_axis(normal)
    second = np.cross(normal, first)
    return np.stack((first, second), axis=1), normal[:, None, :], curvature


def _component_labels(mesh: EmbeddedMesh) -> np.ndarray:
    if mesh.kind == MeshKind.CURVE_LOOP:
        return np.zeros(mesh.vertex_count, dtype=np.int64)
    triangles = mesh.triangles
    i = triangles.reshape(-1)
    j = np.roll(triangles, -1, axis=1).reshape(-1)
    adjacency = sparse.csr_matrix((np.ones(i.shape), (i, j)), shape=(mesh.vertex_count,) * 2)
    _, labels = connected_components(adjacency, directed=False)
    return labels.astype(np.int64)


def _check_positions(mesh: EmbeddedMesh, positions) -> np.ndarray:
    positions = mesh.positions if positions is None else np.asarray(positions, dtype=float)
    if positions.shape != mesh.positions.shape:
        raise ValueError(f"Positions shape {positions.shape} does not match mesh {mesh.positions.shape}")
    return positions


def build_geometry(mesh: EmbeddedMesh, positions: Optional[np.ndarray] = None) -> GeometryCache:
    """Masses, mass Jacobian, frames and mean-curvature vector at ``positions``"""
    positions = _check_positions(mesh, positions)
    measures, gradients = _element_data(mesh, positions)
    mass = _lump(mesh, measures)

    if mesh.kind == MeshKind.CURVE_LOOP:
        tangent, normal, curvature = _curve_frames(gradients[:, 1, :], mass)
    else:
        tangent, normal, curvature = _surface_frames(mesh, positions, mass)

    cache = GeometryCache(
        kind=mesh.kind,
        positions=positions,
        mass=mass,
        tangent_basis=tangent,
        normal_basis=normal,
        mean_curvature=curvature,
        mean_curvature_norm_sq=np.sum(curvature * curvature, axis=1),
        mass_jacobian=_mass_jacobian(mesh, gradients),
        component_labels=_component_labels(mesh),
        constraint_kernel=mesh.kernel,
    )
    logger.debug(
        "geometry: V=%d volume=%.6g min|H|=%.3g",
        cache.vertex_count, total_volume(cache), float(np.sqrt(cache.mean_curvature_norm_sq.min())),
    )
    return cache


def as_ambient_field(X, vertex_count: int, dimension: int) -> AmbientField:
    X = np.asarray(X, dtype=float)
    if X.shape != (vertex_count, dimension):
        raise ValueError(f"Field shape {X.shape} does not match mesh ({vertex_count}, {dimension})")
    return X


def as_scalar_field(p, vertex_count: int) -> ScalarField:
    p = np.asarray(p, dtype=float)
    if p.shape != (vertex_count,):
        raise ValueError(f"Scalar field shape {p.shape} does not match mesh ({vertex_count},)")
    return p


def density(mesh: EmbeddedMesh, positions: Optional[np.ndarray] = None) -> ScalarField:
    """rho = current vertex weight / reference weight"""
    positions = _check_positions(mesh, positions)
    return vertex_mass(mesh, positions) / mesh.reference_measure


def density_derivative(cache: GeometryCache, rho: ScalarField, X: AmbientField) -> ScalarField:
    """Derivative of rho along X: [div(X^T) - <X^perp, H>] * rho

    The bracket is the linearized constraint J X / m, identical to
    ``operators.constraint_residual``.
    """
    X = as_ambient_field(X, cache.vertex_count, cache.dimension)
    rho = as_scalar_field(rho, cache.vertex_count)
    return (cache.mass_jacobian @ X.reshape(-1)) / cache.mass * rho


def split_tangent_normal(cache: GeometryCache, X: AmbientField) -> Tuple[AmbientField, AmbientField]:
    """X = X^T + X^perp with X^T in the span of the tangent frame"""
    X = as_ambient_field(X, cache.vertex_count, cache.dimension)
    coefficients = np.einsum("vkn,vn->vk", cache.tangent_basis, X)
    tangential = np.einsum("vk,vkn->vn", coefficients, cache.tangent_basis)
    return tangential, X - tangential


def tangent_projector(cache: GeometryCache) -> sparse.bsr_matrix:
    """Block-diagonal orthogonal projector onto the tangent spaces"""
    blocks = np.einsum("vki,vkj->vij", cache.tangent_basis, cache.tangent_basis)
    count, n = cache.vertex_count, cache.dimension
    return sparse.bsr_matrix((blocks, np.arange(count), np.arange(count + 1)), shape=(count * n, count * n))


def metric_inner(cache: GeometryCache, X: AmbientField, Y: AmbientField) -> float:
    """L2 metric sum_i m_i <X_i, Y_i>"""
    return float(np.sum(cache.mass * np.sum(X * Y, axis=1)))


def field_norm(cache: GeometryCache, X: AmbientField) -> float:
    return float(np.sqrt(max(metric_inner(cache, X, X), 0.0)))


def scalar_norm(cache: GeometryCache, p: ScalarField) -> float:
    return float(np.sqrt(np.sum(cache.mass * p * p)))


def total_volume(cache: GeometryCache) -> float:
    return float(np.sum(cache.mass))
