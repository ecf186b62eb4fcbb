"""
Tests for scenario parsing and settings
"""

import importlib
import json
import os

import pytest

from src.config import settings
from src.config.scenario import load_convergence_spec, load_scenario, parse_scenario
from src.core.errors import ConfigError
from src.core.models import SolverMethod


def _minimal(**overrides):
    data = {"mesh": {"generator": "circle"}, "dt": 1e-3, "T": 0.1}
    data.update(overrides)
    return data


def test_defaults():
    """Test that a minimal scenario fills in defaults"""
    scenario = parse_scenario(_minimal())
    assert scenario.mesh.vertices == 256
    assert scenario.velocity.type == "zero"
    assert scenario.lagrangian.potential.type == "none"
    assert scenario.solver == SolverMethod.AUTO
    assert scenario.tolerances.vol_tol == settings.VOL_TOL


def test_to_options():
    scenario = parse_scenario(_minimal(output_stride=5, renormalize=False, solver="cg",
                                       tolerances={"shake_tol": 1e-10}))
    options = scenario.to_options()
    assert options.output_stride == 5
    assert not options.renormalize
    assert options.solver == SolverMethod.CG
    assert options.shake_tol == 1e-10
    assert options.newton_max_iter == settings.NEWTON_MAX_ITER


@pytest.mark.parametrize(
    "data, field",
    [
        ({"dt": 1e-3, "T": 1.0}, "mesh"),
        (_minimal(dt=0.0), "dt"),
        (_minimal(T=-1.0), "T"),
        (_minimal(mesh={"generator": "circle", "path": "mesh.json"}), "mesh"),
        (_minimal(mesh={}), "mesh"),
        (_minimal(velocity={"type": "translation"}), "direction"),
        (_minimal(velocity={"type": "file"}), "path"),
        (_minimal(output_stride=0), "output_stride"),
        (_minimal(unknown=1), "unknown"),
    ],
)
def test_invalid_scenarios(data, field):
    """Test that validation errors name the offending field"""
    with pytest.raises(ConfigError) as excinfo:
        parse_scenario(data)
    assert field in str(excinfo.value)


def test_load_scenario_from_file(tmp_path):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(_minimal(velocity={"type": "rotation", "omega": 2.0})))
    assert load_scenario(str(path)).velocity.omega == 2.0
    with pytest.raises(ConfigError):
        load_scenario(str(tmp_path / "missing.json"))


def test_convergence_spec(tmp_path):
    path = tmp_path / "sweep.json"
    path.write_text(json.dumps({"radius": 2.0}))
    spec = load_convergence_spec(str(path))
    assert spec.modes == [1, 3, 5]
    assert spec.resolutions == [64, 128, 256, 512]
    path.write_text(json.dumps({"resolutions": [64]}))
    with pytest.raises(ConfigError):
        load_convergence_spec(str(path))


def test_settings_defaults():
    assert settings.TOL_SOLVE <= 1e-10
    assert settings.SHAKE_TOL <= settings.VOL_TOL
    assert settings.DENSE_ORACLE_MAX_VERTICES >= 64


def test_entry_point_applies_thread_setting(monkeypatch):
    monkeypatch.delenv("OMP_NUM_THREADS", raising=False)
    monkeypatch.setattr(settings, "THREADS", 3)
    import main
    importlib.reload(main)
    assert os.environ["OMP_NUM_THREADS"] == "3"


if __name__ == "__main__":
    pytest.main([__file__])
