"""Plain-text instance files: ``key: value`` header lines, then dense arrays.

Example::

    # phasewin instance
    schema: 1
    family: facility
    m: 4
    @array affinity float64 2 4
    0.5 0.25 0.0 1.0
    0.125 0.75 0.5 0.0

Floats are written with ``repr`` so a load/save cycle is lossless.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .core import ContractError
from .objectives import (AttributionSurrogate, CoverageInstance, FacilityLocationInstance,
                         ModularObjective, SupermodularStressor)

SCHEMA = 1


class InstanceFormatError(ValueError):
    pass


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _dump_array(name: str, arr: np.ndarray) -> list[str]:
    arr = np.asarray(arr)
    if arr.ndim == 1:
        arr2 = arr.reshape(1, -1)
    else:
        arr2 = arr
    kind = "int64" if np.issubdtype(arr.dtype, np.integer) else "float64"
    lines = [f"@array {name} {kind} {' '.join(str(s) for s in arr.shape)}"]
    for row in arr2:
        lines.append(" ".join(_fmt(v) for v in row))
    return lines


def dumps(obj) -> str:
    header: dict[str, object] = {"schema": SCHEMA, "family": obj.family, "m": obj.m}
    arrays: dict[str, np.ndarray] = {}
    if isinstance(obj, ModularObjective):
        arrays["weights"] = np.array(obj.weights, float)
    elif isinstance(obj, SupermodularStressor):
        header["exponent"] = _fmt(obj.exponent)
        arrays["weights"] = np.array(obj.weights, float)
    elif isinstance(obj, CoverageInstance):
        arrays["incidence"] = obj.incidence()
        arrays["item_weights"] = np.array(obj.item_weights, float)
    elif isinstance(obj, FacilityLocationInstance):
        arrays["affinity"] = obj.affinity
    elif isinstance(obj, AttributionSurrogate):
        header.update(
            curvature=obj.curvature,
            target_box=" ".join(str(v) for v in obj.target_box),
            clue_weight=_fmt(obj.clue_weight),
            colla_weight=_fmt(obj.colla_weight),
            noise_seed=obj.noise_seed,
        )
        arrays["grid"] = obj.grid
        arrays["region_map"] = obj.region_map
    else:
        raise ContractError(f"cannot serialise {type(obj).__name__}")
    lines = ["# phasewin instance"]
    lines += [f"{k}: {v}" for k, v in header.items()]
    for name, arr in arrays.items():
        lines += _dump_array(name, arr)
    return "\n".join(lines) + "\n"


def loads(text: str):
    header: dict[str, str] = {}
    arrays: dict[str, np.ndarray] = {}
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        line = lines[i].strip()
        i += 1
        if not line or line.startswith("#"):
            continue
        if line.startswith("@array"):
            parts = line.split()
            if len(parts) < 4:
                raise InstanceFormatError(f"line {i}: malformed array header")
            name, kind, shape = parts[1], parts[2], tuple(int(s) for s in parts[3:])
            nrows = shape[0] if len(shape) == 2 else 1
            rows = []
            for _ in range(nrows):
                if i >= len(lines):
                    raise InstanceFormatError(f"array {name}: truncated")
                rows.append(lines[i].split())
                i += 1
            dtype = np.int64 if kind == "int64" else np.float64
            try:
                arrays[name] = np.array(rows, dtype=dtype).reshape(shape)
            except ValueError as exc:
                raise InstanceFormatError(f"array {name}: {exc}") from None
            continue
        if ":" not in line:
            raise InstanceFormatError(f"line {i}: expected 'key: value'")
        k, v = line.split(":", 1)
        header[k.strip()] = v.strip()
    if int(header.get("schema", -1)) != SCHEMA:
        raise InstanceFormatError(f"unsupported schema {header.get('schema')!r}")
    family = header.get("family")
    try:
        if family == "modular":
            return ModularObjective(tuple(arrays["weights"].tolist()))
        if family == "supermodular":
            return SupermodularStressor(tuple(arrays["weights"].tolist()), float(header["exponent"]))
        if family == "coverage":
            inc = arrays["incidence"]
            covers = tuple(frozenset(np.flatnonzero(row).tolist()) for row in inc)
            return CoverageInstance(covers, tuple(arrays["item_weights"].tolist()))
        if family == "facility":
            return FacilityLocationInstance(arrays["affinity"])
        if family == "surrogate":
            box = tuple(int(v) for v in header["target_box"].split())
            return AttributionSurrogate(arrays["grid"], arrays["region_map"], box,
                                        header["curvature"], float(header["clue_weight"]),
                                        float(header["colla_weight"]), int(header["noise_seed"]))
    except KeyError as exc:
        raise InstanceFormatError(f"missing field {exc} for family {family!r}") from None
    raise InstanceFormatError(f"unknown family {family!r}")


def save(obj, path) -> Path:
    path = Path(path)
    path.write_text(dumps(obj), encoding="utf-8")
    return path


def load(path):
    return loads(Path(path).read_text(encoding="utf-8"))
