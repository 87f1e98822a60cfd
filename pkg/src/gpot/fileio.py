"""CSV and JSON readers and writers for matrices, points, paths and reports."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import InvalidInput

FLOAT_FMT = "%.17g"


def read_matrix_csv(path) -> np.ndarray:
    """Headerless CSV of decimal floats as a 2-D array (one row per line)."""
    try:
        a = np.loadtxt(path, delimiter=",", ndmin=2, dtype=float)
    except ValueError as exc:
        raise InvalidInput(f"{path}: not a numeric CSV matrix ({exc})") from exc
    if a.size == 0:
        raise InvalidInput(f"{path}: empty matrix")
    return a


def read_vector_csv(path) -> np.ndarray:
    """Vector stored either as one row or as one value per line."""
    a = read_matrix_csv(path)
    if a.shape[0] != 1 and a.shape[1] != 1:
        raise InvalidInput(f"{path}: expected a single row or column, got shape {a.shape}")
    return a.reshape(-1)


def write_matrix_csv(path, a) -> None:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    np.savetxt(path, a, delimiter=",", fmt=FLOAT_FMT)


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps_json(obj))


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path}: invalid JSON ({exc})") from exc


def path_files(prefix) -> dict:
    """File names used to persist a simulated path sample under ``prefix``."""
    prefix = str(prefix)
    return {
        "z": prefix + ".z.csv",
        "points": prefix + ".points.csv",
        "meta": prefix + ".json",
    }


def points_for(z_path) -> Path | None:
    """Companion points file of a ``<prefix>.z.csv`` path file, if present."""
    z_path = str(z_path)
    if not z_path.endswith(".z.csv"):
        return None
    candidate = Path(z_path[: -len(".z.csv")] + ".points.csv")
    return candidate if candidate.exists() else None
