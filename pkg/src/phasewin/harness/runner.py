"""Seeded sweeps over (instance, algorithm) cells and result emission."""
from __future__ import annotations

import csv
import io
import json
import logging
import platform
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .. import __version__
from ..analysis import RunReport
from ..core import GroundSet
from ..objectives import (make_coverage, make_facility_location, make_modular, make_stressor,
                          make_surrogate)
from ..search import greedy, lazy_greedy, phasewin
from ..search.baselines import brute_force_report
from .spec import ExperimentSpec

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
FIELDS = (
    "schema_version", "instance_id", "family", "algorithm", "seed", "m", "k", "steps",
    "f_value", "insertion_auc", "mec", "ac_ratio", "early_exit_fraction", "phases",
    "runtime_note",
)
NULL = "NA"


@dataclass
class ResultRecord:
    row: dict
    order: list[int] = field(default_factory=list)
    step_values: list[float] = field(default_factory=list)


def build_instance(family: str, seed: int, m: int, params: dict | None = None):
    params = dict(params or {})
    if family == "surrogate":
        if "grid" in params:
            params["grid"] = tuple(params["grid"])
        if "target_box" in params:
            params["target_box"] = tuple(params["target_box"])
        return make_surrogate(seed, m, **params)
    if family == "coverage":
        params.setdefault("universe", 4 * m)
        return make_coverage(seed, m, **params)
    if family == "facility":
        return make_facility_location(seed, m, **params)
    if family == "supermodular":
        return make_stressor(seed, m, **params)
    if family == "modular":
        rng = np.random.default_rng(seed)
        return make_modular(rng.integers(1, 100, size=m).astype(float))
    raise ValueError(f"unknown family {family!r}")


def run_algorithm(base: str, inst, m: int, k: int, cfg=None) -> RunReport:
    oracle = inst.oracle()
    ground = GroundSet(inst.areas())
    if base == "greedy":
        return greedy(oracle, m, k, ground)[1]
    if base == "lazy_greedy":
        return lazy_greedy(oracle, m, k, ground)[1]
    if base == "phasewin":
        return phasewin(oracle, m, cfg, ground)[1]
    if base == "brute_force":
        return brute_force_report(oracle, m, k, ground)
    raise ValueError(f"unknown algorithm {base!r}")


def _num(x):
    if x is None:
        return NULL
    if isinstance(x, float):
        return repr(x)
    return x


def make_row(instance_id, family, algo_name, seed, m, k, report: RunReport) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "instance_id": instance_id,
        "family": family,
        "algorithm": algo_name,
        "seed": seed,
        "m": m,
        "k": k,
        "steps": report.steps,
        "f_value": report.value,
        "insertion_auc": report.insertion_auc,
        "mec": report.mec,
        "ac_ratio": report.ac_ratio,
        "early_exit_fraction": report.early_exit_fraction,
        "phases": report.phases if report.algorithm == "phasewin" else None,
        "runtime_note": report.stop_reason,
    }


def _cells(spec: ExperimentSpec):
    for m in spec.m:
        for rep in range(spec.replicates):
            inst_seed = spec.instance_seed(m, rep)
            for k in spec.k_values(m):
                instance_id = f"{spec.family}-m{m}-k{k}-r{rep}"
                for algo in spec.algorithms:
                    yield instance_id, inst_seed, m, k, algo


def _run_cell(spec: ExperimentSpec, cell) -> ResultRecord:
    instance_id, inst_seed, m, k, algo = cell
    inst = build_instance(spec.family, inst_seed, m, spec.objective)
    seed = spec.run_seed(instance_id, algo.name)
    cfg = spec.phasewin_config(algo, m, k, seed) if algo.base == "phasewin" else None
    report = run_algorithm(algo.base, inst, m, k, cfg)
    row = make_row(instance_id, spec.family, algo.name, seed, m, k, report)
    return ResultRecord(row, list(report.solution.order), list(report.solution.step_values))


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> list[ResultRecord]:
    """Every (instance, algorithm) cell exactly once, in spec order."""
    spec.validate()
    cells = list(_cells(spec))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda c: _run_cell(spec, c), cells))
    return [_run_cell(spec, c) for c in cells]


def rows_to_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=FIELDS, lineterminator="\r\n")
    writer.writeheader()
    for rec in records:
        writer.writerow({k: _num(rec.row[k]) for k in FIELDS})
    return buf.getvalue()


def rows_to_json(records) -> str:
    return json.dumps([{k: rec.row[k] for k in FIELDS} for rec in records], indent=1) + "\n"


def curves_to_json(records) -> str:
    return json.dumps([
        {"instance_id": r.row["instance_id"], "algorithm": r.row["algorithm"], "m": r.row["m"],
         "mec": r.row["mec"], "order": r.order, "step_values": r.step_values}
        for r in records
    ]) + "\n"


def read_results(path) -> list[ResultRecord]:
    """Load records from a results directory (or its curves.json / results.json)."""
    path = Path(path)
    if path.is_dir():
        path = path / "curves.json" if (path / "curves.json").exists() else path / "results.json"
    data = json.loads(path.read_text(encoding="utf-8"))
    out = []
    for d in data:
        row = {k: d.get(k) for k in FIELDS}
        row.update({k: d[k] for k in ("instance_id", "algorithm", "m", "mec") if k in d})
        out.append(ResultRecord(row, d.get("order", []), d.get("step_values", [])))
    return out


def write_results(records, out_dir, spec: ExperimentSpec | None = None) -> dict[str, Path]:
    """Write results.csv, results.json, curves.json and a timestamped meta.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "csv": out / "results.csv",
        "json": out / "results.json",
        "curves": out / "curves.json",
        "meta": out / "meta.json",
    }
    with open(paths["csv"], "w", encoding="utf-8", newline="") as fh:
        fh.write(rows_to_csv(records))
    paths["json"].write_text(rows_to_json(records), encoding="utf-8")
    paths["curves"].write_text(curves_to_json(records), encoding="utf-8")
    meta = {
        "created": datetime.now(timezone.utc).isoformat(),
        "package_version": __version__,
        "python": platform.python_version(),
        "schema_version": SCHEMA_VERSION,
        "rows": len(records),
    }
    if spec is not None:
        meta["spec"] = spec.to_dict()
    paths["meta"].write_text(json.dumps(meta, indent=1) + "\n", encoding="utf-8")
    log.info("wrote %d rows to %s", len(records), out)
    return paths
