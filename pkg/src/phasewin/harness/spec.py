"""Experiment specifications: INI-style files with a JSON mirror.

A spec file looks like::

    [experiment]
    schema = 1
    name = surrogate-sweep
    family = surrogate
    m = 50, 100
    k = m
    replicates = 20
    master_seed = 0
    algorithms = greedy, phasewin

    [objective]
    curvature = submodular

    [algorithm phasewin-lg]
    base = phasewin
    policy = LG

``k = m`` means "select up to every element".  PhaseWin settings left at
``auto`` (``window_size``, ``stop_tau``) follow the size-dependent defaults.
Each ``[algorithm NAME]`` section defines a named variant of a base
algorithm; any name in ``algorithms`` without a section uses the base
defaults.

Seed splitting: an instance's seed and an algorithm run's seed are both
derived by hashing ``master_seed`` together with stable names (family, m,
replicate; instance id, algorithm name).  Adding an algorithm or a size
never shifts the seeds of existing rows.
"""
from __future__ import annotations

import configparser
import hashlib
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

from ..core import ContractError
from ..search.phasewin import PhaseWinConfig

SCHEMA = 1
BASES = ("greedy", "lazy_greedy", "phasewin", "brute_force")
FAMILIES = ("surrogate", "coverage", "facility", "modular", "supermodular")
AUTO = "auto"


class SpecError(ValueError):
    """Spec text could not be parsed or validated."""


def derive_seed(master: int, *parts) -> int:
    key = ":".join([str(master), *map(str, parts)]).encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=4).digest(), "big")


@dataclass
class AlgorithmSpec:
    name: str
    base: str
    settings: dict = field(default_factory=dict)


@dataclass
class ExperimentSpec:
    name: str = "experiment"
    family: str = "surrogate"
    m: list[int] = field(default_factory=lambda: [50])
    k: list[str] = field(default_factory=lambda: ["m"])
    replicates: int = 1
    master_seed: int = 0
    algorithms: list[AlgorithmSpec] = field(default_factory=lambda: [AlgorithmSpec("greedy", "greedy")])
    objective: dict = field(default_factory=dict)
    out: str = "results"

    def validate(self) -> None:
        if self.family not in FAMILIES:
            raise SpecError(f"[experiment] family: unknown family {self.family!r}")
        if not self.m or any(v < 1 for v in self.m):
            raise SpecError("[experiment] m: need one or more positive sizes")
        if self.replicates < 1:
            raise SpecError("[experiment] replicates: must be >= 1")
        for kv in self.k:
            if kv != "m" and not (kv.isdigit() and int(kv) >= 0):
                raise SpecError(f"[experiment] k: {kv!r} is neither 'm' nor a count")
        names = [a.name for a in self.algorithms]
        if len(set(names)) != len(names):
            raise SpecError("[experiment] algorithms: duplicate names")
        for a in self.algorithms:
            if a.base not in BASES:
                raise SpecError(f"[algorithm {a.name}] base: unknown algorithm {a.base!r}")
            if a.base == "phasewin":
                try:
                    self.phasewin_config(a, 50, 50, 0)
                except (ContractError, TypeError) as exc:
                    raise SpecError(f"[algorithm {a.name}] {exc}") from None
            elif a.settings:
                raise SpecError(f"[algorithm {a.name}] {a.base} takes no settings")

    def k_values(self, m: int) -> list[int]:
        out = []
        for kv in self.k:
            k = m if kv == "m" else min(int(kv), m)
            if k not in out:
                out.append(k)
        return out

    def instance_seed(self, m: int, replicate: int) -> int:
        return derive_seed(self.master_seed, self.family, m, replicate)

    def run_seed(self, instance_id: str, algorithm: str) -> int:
        return derive_seed(self.master_seed, instance_id, algorithm)

    def phasewin_config(self, algo: AlgorithmSpec, m: int, k: int, seed: int) -> PhaseWinConfig:
        settings = {key: val for key, val in algo.settings.items() if val != AUTO}
        cfg = PhaseWinConfig.for_size(m, k, seed=seed, **settings)
        cfg.validate(m)
        return cfg

    # -- serialisation

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "name": self.name,
            "family": self.family,
            "m": list(self.m),
            "k": list(self.k),
            "replicates": self.replicates,
            "master_seed": self.master_seed,
            "out": self.out,
            "objective": dict(self.objective),
            "algorithms": [{"name": a.name, "base": a.base,
                            **{k: list(v) if isinstance(v, tuple) else v for k, v in a.settings.items()}}
                           for a in self.algorithms],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentSpec":
        if d.get("schema") != SCHEMA:
            raise SpecError(f"schema: expected {SCHEMA}, got {d.get('schema')!r}")
        algos = []
        for entry in d.get("algorithms", []):
            entry = dict(entry)
            name = entry.pop("name")
            base = entry.pop("base", name)
            entry = {k: tuple(v) if isinstance(v, list) else v for k, v in entry.items()}
            algos.append(AlgorithmSpec(name, base, entry))
        spec = cls(
            name=d.get("name", "experiment"),
            family=d.get("family", "surrogate"),
            m=[int(v) for v in d.get("m", [50])],
            k=[str(v) for v in d.get("k", ["m"])],
            replicates=int(d.get("replicates", 1)),
            master_seed=int(d.get("master_seed", 0)),
            algorithms=algos or [AlgorithmSpec("greedy", "greedy")],
            objective=dict(d.get("objective", {})),
            out=d.get("out", "results"),
        )
        spec.validate()
        return spec

    def dumps(self) -> str:
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str
        cp["experiment"] = {
            "schema": str(SCHEMA),
            "name": self.name,
            "family": self.family,
            "m": ", ".join(map(str, self.m)),
            "k": ", ".join(self.k),
            "replicates": str(self.replicates),
            "master_seed": str(self.master_seed),
            "algorithms": ", ".join(a.name for a in self.algorithms),
            "out": self.out,
        }
        if self.objective:
            cp["objective"] = {k: _to_text(v) for k, v in self.objective.items()}
        for a in self.algorithms:
            if a.settings or a.base != a.name:
                cp[f"algorithm {a.name}"] = {"base": a.base, **{k: _to_text(v) for k, v in a.settings.items()}}
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()


def _to_text(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (list, tuple)):
        return ", ".join(_to_text(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse_scalar(text: str):
    t = text.strip()
    low = t.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    if low in ("none", "null"):
        return None
    if low == AUTO:
        return AUTO
    for conv in (int, float):
        try:
            return conv(t)
        except ValueError:
            pass
    return t


def _parse_value(text: str):
    if "," in text:
        return tuple(_parse_scalar(p) for p in text.split(","))
    return _parse_scalar(text)


def _line_of(text: str, section: str, key: str | None = None) -> int:
    in_section = False
    for n, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if s.startswith("["):
            in_section = s.strip("[]").strip() == section
            if in_section and key is None:
                return n
        elif in_section and key and s.split("=", 1)[0].strip() == key:
            return n
    return 0


def parse_spec(text: str) -> ExperimentSpec:
    """Parse INI or JSON spec text; errors name the line and field."""
    if text.lstrip().startswith("{"):
        try:
            return ExperimentSpec.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise SpecError(f"line {exc.lineno}: invalid JSON: {exc.msg}") from None
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise SpecError(f"unparseable spec: {exc}") from None
    if "experiment" not in cp:
        raise SpecError("missing [experiment] section")
    ex = cp["experiment"]

    def field_(key, conv, default=None):
        if key not in ex:
            if default is None:
                raise SpecError(f"line {_line_of(text, 'experiment')}: [experiment] missing {key!r}")
            return default
        try:
            return conv(ex[key])
        except ValueError:
            raise SpecError(f"line {_line_of(text, 'experiment', key)}: [experiment] {key}: "
                            f"bad value {ex[key]!r}") from None

    schema = field_("schema", int)
    if schema != SCHEMA:
        raise SpecError(f"line {_line_of(text, 'experiment', 'schema')}: schema {schema} unsupported")
    names = [n.strip() for n in ex.get("algorithms", "greedy").split(",") if n.strip()]
    algos = []
    for name in names:
        sect = f"algorithm {name}"
        if sect in cp:
            settings = {k: _parse_value(v) for k, v in cp[sect].items()}
            base = settings.pop("base", name)
            for key in ("theta",):
                if isinstance(settings.get(key), tuple):
                    settings[key] = tuple(float(x) for x in settings[key])
            algos.append(AlgorithmSpec(name, str(base), settings))
        else:
            algos.append(AlgorithmSpec(name, name))
    objective = {k: _parse_value(v) for k, v in cp["objective"].items()} if "objective" in cp else {}
    spec = ExperimentSpec(
        name=ex.get("name", "experiment"),
        family=ex.get("family", "surrogate"),
        m=field_("m", lambda s: [int(v) for v in s.split(",")]),
        k=field_("k", lambda s: [v.strip() for v in s.split(",")], ["m"]),
        replicates=field_("replicates", int, 1),
        master_seed=field_("master_seed", int, 0),
        algorithms=algos,
        objective=objective,
        out=ex.get("out", "results"),
    )
    try:
        spec.validate()
    except SpecError as exc:
        msg = str(exc)
        sect = msg[1:msg.index("]")] if msg.startswith("[") else "experiment"
        raise SpecError(f"line {_line_of(text, sect)}: {msg}") from None
    return spec


def load_spec(path) -> ExperimentSpec:
    return parse_spec(Path(path).read_text(encoding="utf-8"))
