"""JSON encoding of instances and squares (0 stands for an empty cell)."""

from __future__ import annotations

import json
from typing import Any

from .core import EMPTY, RhoInstance, RhoVector, StructuralError, SymmetricSquare


class InputError(ValueError):
    """A file that cannot be decoded into a valid instance or square."""


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(", ", ": ")) + "\n"


def _grid_out(square: SymmetricSquare) -> list[list[int]]:
    return square.to_lists(empty=0)


def instance_to_json(instance: RhoInstance) -> dict:
    out = {
        "n": instance.n,
        "k": instance.k,
        "r": instance.r,
        "rho": list(instance.rho.entries),
        "grid": _grid_out(instance.square),
    }
    if instance.tail is not None:
        out["diagonal_tail"] = list(instance.tail)
    return out


def square_to_json(square: SymmetricSquare, rho: "RhoVector | None" = None, tail=None) -> dict:
    out = {"n": square.n, "k": square.k, "r": square.r, "grid": _grid_out(square)}
    if rho is not None:
        out["rho"] = list(rho.entries)
    if tail is not None:
        out["diagonal_tail"] = list(tail)
    return out


def _int(obj: dict, key: str) -> int:
    if key not in obj:
        raise InputError(f"missing field {key!r}")
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise InputError(f"field {key!r} must be an integer, got {value!r}")
    return value


def _int_list(obj: dict, key: str, length: "int | None" = None) -> list[int]:
    value = obj.get(key)
    if not isinstance(value, list) or any(isinstance(x, bool) or not isinstance(x, int) for x in value):
        raise InputError(f"field {key!r} must be a list of integers")
    if length is not None and len(value) != length:
        raise InputError(f"field {key!r} has {len(value)} entries, expected {length}")
    return value


def grid_from_json(obj: dict, n: int) -> list[list["int | None"]]:
    grid = obj.get("grid")
    if not isinstance(grid, list) or len(grid) != n:
        raise InputError(f"field 'grid' must be a list of {n} rows")
    rows = []
    for i, row in enumerate(grid):
        if not isinstance(row, list) or len(row) != n:
            raise InputError(f"grid row {i + 1} must have {n} entries")
        if any(isinstance(x, bool) or not isinstance(x, int) for x in row):
            raise InputError(f"grid row {i + 1} must contain integers")
        rows.append([EMPTY if x == 0 else x for x in row])
    return rows


def instance_from_json(obj: Any) -> RhoInstance:
    if not isinstance(obj, dict):
        raise InputError("instance must be a JSON object")
    n, k, r = _int(obj, "n"), _int(obj, "k"), _int(obj, "r")
    rho = _int_list(obj, "rho", k)
    grid = grid_from_json(obj, n)
    tail = obj.get("diagonal_tail")
    if tail is not None:
        tail = _int_list(obj, "diagonal_tail", k)
    try:
        return RhoInstance(RhoVector(tuple(rho), n), SymmetricSquare(n, k, r, grid), tail)
    except StructuralError as exc:
        raise InputError(str(exc)) from exc


def loads_instance(text: str) -> RhoInstance:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return instance_from_json(obj)


def read_instance(path) -> RhoInstance:
    with open(path, encoding="utf-8") as fh:
        return loads_instance(fh.read())
