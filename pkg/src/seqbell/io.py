"""Scenario files in, JSON/CSV out. Floats are always written with 17 significant digits."""

import json
import math
from pathlib import Path

import numpy as np

from .chain import ChainConfig
from .linalg import matrix_from_json
from .quantum import ObservableTriple, QuantumState, UnsharpSetting, canonical_realization


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        # JSON has no NaN/inf
        return fmt(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    return _encode(obj, indent, 0) + "\n"


def write_json(obj, path) -> None:
    Path(path).write_text(dumps(obj))


def csv_text(columns, rows) -> str:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def write_csv(columns, rows, path) -> None:
    Path(path).write_text(csv_text(columns, rows))


def emit(text: str, path=None) -> None:
    if path is None or str(path) == "-":
        print(text, end="")
    else:
        Path(path).write_text(text)


def _triple(value, default: ObservableTriple) -> ObservableTriple:
    if value is None or value == "canonical":
        return default
    if not isinstance(value, list) or len(value) != 3:
        raise ValueError("a triple must be 'canonical' or a list of three matrices")
    return ObservableTriple(*(matrix_from_json(m) for m in value))


def load_scenario(source) -> ChainConfig:
    """Build a ChainConfig from a dict or a JSON file path.

    Keys: ``dims`` (default [2, 2]), ``state`` ("canonical" or a matrix),
    ``alice`` ("canonical" or three matrices), ``bobs`` (list of
    {"triple": ..., "eta": ...}) or the shorthand ``etas`` (canonical
    Bobs), and optional ``weights``.
    """
    data = source if isinstance(source, dict) else json.loads(Path(source).read_text())
    rho0, alice0, bob0 = canonical_realization()
    dims = tuple(data.get("dims", (2, 2)))
    state = data.get("state", "canonical")
    rho = rho0 if state == "canonical" else QuantumState(matrix_from_json(state), dims)
    alice = _triple(data.get("alice"), alice0)
    if "bobs" in data:
        bobs = [(_triple(b.get("triple"), bob0), UnsharpSetting(float(b["eta"]))) for b in data["bobs"]]
    elif "etas" in data:
        bobs = [(bob0, UnsharpSetting(float(e))) for e in data["etas"]]
    else:
        raise ValueError("scenario needs 'bobs' or 'etas'")
    weights = data.get("weights")
    return ChainConfig(rho, alice, bobs, None if weights is None else tuple(float(w) for w in weights))
