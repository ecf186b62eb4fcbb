"""
Utility helper functions for the membrane simulator
"""

import csv
import json
import os
from pathlib import Path
from typing import Any, Dict, Iterable, List

from ..core.errors import ConfigError

FLOAT_FORMAT = ".17g"


def load_json_file(file_path: str) -> Dict[str, Any]:
    """Load JSON file safely"""
    try:
        with open(file_path, "r", encoding="utf-8") as f:
            return json.load(f)
    except Exception as e:
        raise ConfigError(f"Could not load JSON file {file_path}: {e}")


def save_json_file(file_path: str, data: Dict[str, Any]):
    """Save data to JSON file with sorted keys"""
    directory = os.path.dirname(file_path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(file_path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, sort_keys=True, ensure_ascii=False)
        f.write("\n")


def write_jsonl(file_path: str, records: Iterable[Dict[str, Any]]):
    """One compact JSON object per line"""
    Path(file_path).parent.mkdir(parents=True, exist_ok=True)
    with open(file_path, "w", encoding="utf-8") as f:
        for record in records:
            f.write(json.dumps(record, sort_keys=True, separators=(",", ":")))
            f.write("\n")


def format_float(value: float) -> str:
    return format(float(value), FLOAT_FORMAT)


def write_csv(file_path: str, rows: List[Dict[str, float]], fieldnames: List[str]):
    """CSV with a fixed column order and float formatting"""
    Path(file_path).parent.mkdir(parents=True, exist_ok=True)
    with open(file_path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(fieldnames)
        for row in rows:
            writer.writerow([format_float(row[name]) for name in fieldnames])


def resolve_path(path: str, base_dir: str) -> str:
    """Paths in a config file are relative to the config file"""
    return path if os.path.isabs(path) else os.path.join(base_dir, path)
