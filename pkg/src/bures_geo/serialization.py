"""JSON and CSV helpers for the command-line tool."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import InputError
from .states import DensityMatrix


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def dumps(obj) -> str:
    # Python's float repr is the shortest string that round-trips (at most 17 digits)
    return json.dumps(_plain(obj), indent=2, sort_keys=False, allow_nan=True) + "\n"


def write_json(obj, path) -> None:
    Path(path).write_text(dumps(obj))


def read_json(path) -> object:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc


def load_state(path) -> DensityMatrix:
    data = read_json(path)
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected a state object")
    return DensityMatrix.from_dict(data)


def complex_array(data, name: str) -> np.ndarray:
    try:
        re = np.asarray(data["re"], dtype=float)
        im = np.asarray(data.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{name}: expected an object with 're' and 'im' arrays") from exc
    if re.shape != im.shape:
        raise InputError(f"{name}: 're' and 'im' shapes differ")
    return re + 1j * im


def write_csv(path, header: list[str], rows: list[list]) -> None:
    def fmt(v):
        if isinstance(v, (float, np.floating)):
            return f"{float(v):.12g}"
        return v

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
