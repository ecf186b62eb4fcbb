"""
Named ambient vector field generators
"""

from typing import Any, Dict, Optional, Sequence

import numpy as np

from ..core.errors import ConfigError
from .helpers import load_json_file


def rotation_field(positions: np.ndarray, omega: float = 1.0, axis: Sequence[float] = (0.0, 0.0, 1.0),
                   center: Optional[Sequence[float]] = None) -> np.ndarray:
    """Infinitesimal rigid rotation omega * axis x (x - center); planar in R^2"""
    center = positions.mean(axis=0) if center is None else np.asarray(center, dtype=float)
    offset = positions - center
    if positions.shape[1] == 2:
        return omega * np.column_stack((-offset[:, 1], offset[:, 0]))
    axis = np.asarray(axis, dtype=float)
    return omega * np.cross(axis / np.linalg.norm(axis), offset)


def translation_field(positions: np.ndarray, direction: Sequence[float]) -> np.ndarray:
    direction = np.asarray(direction, dtype=float)
    if direction.shape != (positions.shape[1],):
        raise ValueError(f"Translation direction needs {positions.shape[1]} components")
    return np.tile(direction, (positions.shape[0], 1))


def radial_field(positions: np.ndarray, center: Optional[Sequence[float]] = None) -> np.ndarray:
    """Unit outward field (x - center) / |x - center|"""
    center = positions.mean(axis=0) if center is None else np.asarray(center, dtype=float)
    offset = positions - center
    return offset / np.linalg.norm(offset, axis=1)[:, None]


def zero_field(positions: np.ndarray) -> np.ndarray:
    return np.zeros_like(positions, dtype=float)


GENERATORS = {
    "rotation": rotation_field,
    "translation": translation_field,
    "radial": radial_field,
    "zero": zero_field,
}


def field_from_spec(spec: Dict[str, Any], positions: np.ndarray) -> np.ndarray:
    """{"values": [[...], ...]} or {"generator": name, **arguments}"""
    if "values" in spec:
        values = np.asarray(spec["values"], dtype=float)
        if values.shape != positions.shape:
            raise ConfigError(f"Field has shape {values.shape}, mesh positions have {positions.shape}")
        return values
    name = spec.get("generator")
    if name not in GENERATORS:
        raise ConfigError(f"Unknown field generator '{name}' (choose from {sorted(GENERATORS)})")
    arguments = {key: value for key, value in spec.items() if key != "generator"}
    try:
        return GENERATORS[name](positions, **arguments)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Invalid arguments for field generator '{name}': {e}")


def load_field(file_path: str, positions: np.ndarray) -> np.ndarray:
    return field_from_spec(load_json_file(file_path), positions)
