"""
Tests for field generators, mesh loading and file helpers
"""

import csv
import json
import os

import numpy as np
import pytest

from src.core.errors import ConfigError
from src.core.geometry import build_geometry, total_volume
from src.core.models import MeshKind
from src.utils.fields import field_from_spec, load_field, rotation_field
from src.utils.helpers import resolve_path, save_json_file, write_csv
from src.utils.meshes import circle_positions, load_mesh, square_loop

TETRAHEDRON_OBJ = """\
v 1 1 1
v -1 -1 1
v -1 1 -1
v 1 -1 -1
f 1 3 2
f 1 2 4
f 1 4 3
f 2 3 4
"""


def test_rotation_field_in_three_dimensions():
    positions = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, -1.0, 0.0]])
    field = rotation_field(positions, omega=2.0, axis=[0.0, 0.0, 5.0])
    assert np.allclose(field[0], [0.0, 2.0, 0.0])
    assert np.allclose(np.sum(field * positions, axis=1), 0.0)


def test_field_from_values(small_circle):
    values = np.ones_like(small_circle.positions)
    assert np.array_equal(field_from_spec({"values": values.tolist()}, small_circle.positions), values)
    with pytest.raises(ConfigError):
        field_from_spec({"values": [[1.0, 0.0]]}, small_circle.positions)


def test_field_from_generator(small_circle):
    field = field_from_spec({"generator": "translation", "direction": [0.0, 2.0]}, small_circle.positions)
    assert np.allclose(field, [0.0, 2.0])
    with pytest.raises(ConfigError):
        field_from_spec({"generator": "vortex"}, small_circle.positions)
    with pytest.raises(ConfigError):
        field_from_spec({"generator": "translation", "direction": [1.0, 0.0, 0.0]}, small_circle.positions)
    with pytest.raises(ConfigError):
        field_from_spec({"generator": "radial", "scale": 2.0}, small_circle.positions)


def test_load_field(tmp_path, small_circle):
    path = tmp_path / "field.json"
    path.write_text(json.dumps({"generator": "rotation", "omega": 3.0}))
    field = load_field(str(path), small_circle.positions)
    assert np.allclose(np.linalg.norm(field, axis=1), 3.0)


def test_load_curve_json(tmp_path):
    path = tmp_path / "curve.json"
    path.write_text(json.dumps({"kind": "curve", "positions": circle_positions(12).tolist()}))
    mesh = load_mesh(str(path))
    assert mesh.kind == MeshKind.CURVE_LOOP
    assert mesh.vertex_count == 12


def test_load_obj_tetrahedron(tmp_path):
    path = tmp_path / "tetrahedron.obj"
    path.write_text(TETRAHEDRON_OBJ)
    mesh = load_mesh(str(path))
    assert mesh.kind == MeshKind.TRIANGLE_MESH
    assert mesh.vertex_count == 4
    assert mesh.total_reference_volume == pytest.approx(8.0 * np.sqrt(3.0), rel=1e-12)
    assert total_volume(build_geometry(mesh)) == pytest.approx(8.0 * np.sqrt(3.0), rel=1e-12)


def test_load_obj_with_boundary(tmp_path):
    path = tmp_path / "open.obj"
    path.write_text("\n".join(TETRAHEDRON_OBJ.splitlines()[:-1]) + "\n")
    with pytest.raises(ConfigError, match="NonManifold"):
        load_mesh(str(path))


def test_load_degenerate_curve(tmp_path):
    path = tmp_path / "pinched.json"
    positions = circle_positions(8)
    positions[1] = positions[0]
    path.write_text(json.dumps({"kind": "curve", "positions": positions.tolist()}))
    with pytest.raises(ConfigError, match="DegenerateGeometry"):
        load_mesh(str(path))


def test_load_mesh_errors(tmp_path):
    path = tmp_path / "mesh.stl"
    path.write_text("solid empty\nendsolid empty\n")
    with pytest.raises(ConfigError):
        load_mesh(str(path))
    with pytest.raises(ConfigError):
        load_mesh(str(tmp_path / "missing.json"))


def test_square_loop_layout():
    mesh = square_loop(3, side=1.0)
    assert mesh.vertex_count == 12
    assert mesh.total_reference_volume == pytest.approx(4.0)


def test_save_json_file(tmp_path):
    path = tmp_path / "nested" / "data.json"
    save_json_file(str(path), {"b": 1, "a": [1.5]})
    assert json.loads(path.read_text()) == {"a": [1.5], "b": 1}
    assert path.read_text().index('"a"') < path.read_text().index('"b"')


def test_write_csv(tmp_path):
    path = tmp_path / "rows.csv"
    write_csv(str(path), [{"t": 0.1, "x": 1.0 / 3.0}], ["t", "x"])
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["t", "x"]
    assert float(rows[1][1]) == 1.0 / 3.0


def test_resolve_path(tmp_path):
    assert resolve_path("mesh.obj", "configs") == os.path.join("configs", "mesh.obj")
    absolute = str(tmp_path / "mesh.obj")
    assert resolve_path(absolute, "configs") == absolute
