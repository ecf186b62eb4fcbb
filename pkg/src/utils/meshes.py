"""
Mesh generators and mesh file loading
"""

import logging
import os

import numpy as np
import trimesh

from ..core.errors import ConfigError, MembraneError
from ..core.geometry import make_curve_loop, make_triangle_mesh
from ..core.models import EmbeddedMesh
from .helpers import load_json_file

logger = logging.getLogger(__name__)


def circle_positions(vertex_count: int, radius: float = 1.0, dimension: int = 2,
                     phase: float = 0.0) -> np.ndarray:
    """Regular polygon inscribed in the circle of ``radius``, counter-clockwise"""
    theta = 2.0 * np.pi * np.arange(vertex_count) / vertex_count + phase
    positions = np.zeros((vertex_count, dimension))
    positions[:, 0] = radius * np.cos(theta)
    positions[:, 1] = radius * np.sin(theta)
    return positions


def circle_loop(vertex_count: int = 256, radius: float = 1.0, dimension: int = 2) -> EmbeddedMesh:
    return make_curve_loop(circle_positions(vertex_count, radius, dimension))


def space_curve_loop(vertex_count: int = 256, radius: float = 1.0, amplitude: float = 0.3) -> EmbeddedMesh:
    """Closed curve (R cos t, R sin t, a sin 2t) in R^3, codimension 2"""
    theta = 2.0 * np.pi * np.arange(vertex_count) / vertex_count
    positions = np.column_stack((radius * np.cos(theta), radius * np.sin(theta), amplitude * np.sin(2.0 * theta)))
    return make_curve_loop(positions)


def square_loop(points_per_side: int = 2, side: float = 2.0) -> EmbeddedMesh:
    """Axis-aligned square; vertices between corners are collinear (zero curvature)"""
    half = 0.5 * side
    corners = np.array([[-half, -half], [half, -half], [half, half], [-half, half]])
    steps = np.arange(points_per_side) / points_per_side
    positions = [corners[k] + s * (corners[(k + 1) % 4] - corners[k]) for k in range(4) for s in steps]
    return make_curve_loop(np.array(positions))


def icosphere(subdivisions: int = 3, radius: float = 1.0) -> EmbeddedMesh:
    sphere = trimesh.creation.icosphere(subdivisions=subdivisions, radius=radius)
    return make_triangle_mesh(np.asarray(sphere.vertices, dtype=float), np.asarray(sphere.faces))


def load_mesh(path: str) -> EmbeddedMesh:
    """Curve JSON {"kind": "curve", "positions": [...]} or Wavefront OBJ surface"""
    extension = os.path.splitext(path)[1].lower()
    try:
        if extension == ".json":
            data = load_json_file(path)
            if data.get("kind") != "curve" or "positions" not in data:
                raise ConfigError(f"{path}: expected {{\"kind\": \"curve\", \"positions\": [...]}}")
            return make_curve_loop(data["positions"])
        if extension == ".obj":
            surface = trimesh.load(path, process=False, force="mesh")
            if len(surface.faces) == 0:
                raise ConfigError(f"{path}: no triangular faces")
            return make_triangle_mesh(np.asarray(surface.vertices, dtype=float), np.asarray(surface.faces))
    except ConfigError:
        raise
    except MembraneError as e:
        # bad file contents are input errors
        raise ConfigError(f"{path}: {type(e).__name__}: {e}")
    except Exception as e:
        raise ConfigError(f"Could not load mesh {path}: {e}")
    raise ConfigError(f"Unsupported mesh format '{extension}' (use .json curves or .obj surfaces)")
