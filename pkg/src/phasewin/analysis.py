"""Insertion AUC, accuracy-cost ratio, curvature summaries and run comparison."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .core import ContractError, GroundSet, OrderedSolution, ScoreOracle

AC_SCALE = 1000.0
TOL = 1e-9


class ComparisonError(ValueError):
    pass


@dataclass
class RunReport:
    algorithm: str
    solution: OrderedSolution
    mec: int
    insertion_auc: float
    instance_id: str = ""
    steps: int = 0
    phases: int = 0
    early_exit_fraction: float | None = None
    stop_reason: str = "complete"
    diverged: bool = False
    quality_threshold: float | None = None
    trace: Any = None
    extra: dict = field(default_factory=dict)

    @property
    def value(self) -> float:
        return self.solution.value

    @property
    def ac_ratio(self) -> float | None:
        return ac_ratio(self.insertion_auc, self.mec)

    @property
    def meets_quality(self) -> bool | None:
        if self.quality_threshold is None:
            return None
        return self.insertion_auc >= self.quality_threshold


def insertion_auc(solution: OrderedSolution, ground: GroundSet | None = None,
                  oracle: ScoreOracle | None = None) -> float:
    """Area-weighted insertion score ``sum_j |s_j| / A * F(S_:j)``.

    Uses ``solution.step_values`` when present; otherwise every prefix is
    re-evaluated through ``oracle`` (and billed).  Truncated solutions are
    scored over their realised steps only.
    """
    if len(solution) == 0:
        return 0.0
    if ground is None:
        if oracle is None:
            raise ContractError("need a ground set or an oracle to size the area weights")
        ground = GroundSet.uniform(oracle.m)
    if max(solution.order) >= ground.size:
        raise ContractError("solution index outside the ground set")
    values = solution.step_values
    if len(values) != len(solution.order):
        if oracle is None:
            raise ContractError("step values missing and no oracle to recompute them")
        values = [oracle.evaluate(solution.prefix(j)) for j in range(1, len(solution) + 1)]
    total = ground.total_area
    return math.fsum(ground.areas[s] / total * v for s, v in zip(solution.order, values))


def ac_ratio(auc: float, mec: float, scale: float = AC_SCALE) -> float | None:
    """Faithfulness per unit compute: ``auc * scale / mec``; None when mec is 0."""
    if mec <= 0:
        return None
    return auc * scale / mec


@dataclass(frozen=True)
class CurveSummary:
    step_values: tuple[float, ...]
    concave_violations: int
    convex_violations: int

    @property
    def concave(self) -> bool:
        return self.concave_violations == 0

    @property
    def convex(self) -> bool:
        return self.convex_violations == 0


def curvature_report(step_values: Sequence[float], tol: float = TOL) -> CurveSummary:
    values = tuple(float(v) for v in step_values)
    if len(values) < 3:
        raise ContractError("curvature needs at least three points")
    second = np.diff(values, n=2)
    return CurveSummary(values, int((second > tol).sum()), int((second < -tol).sum()))


def gain_violations(gains: Sequence[float], tol: float = TOL) -> tuple[int, int]:
    """Counts of (increases, decreases) between consecutive gains."""
    d = np.diff(np.asarray(gains, dtype=float))
    return int((d > tol).sum()), int((d < -tol).sum())


@dataclass(frozen=True)
class Comparison:
    algorithm: str
    baseline: str
    f_ratio: float
    mec_ratio: float
    auc_ratio: float
    speedup: float
    early_exit_fraction: float | None


def _ratio(a, b):
    if b == 0:
        return math.inf if a else 1.0
    return a / b


def compare(reports: Sequence[RunReport], baseline: str = "greedy") -> list[Comparison]:
    """Each report against the baseline report on the same instance."""
    if len(reports) < 2:
        raise ComparisonError("need at least two reports")
    ids = {r.instance_id for r in reports}
    if len(ids) != 1:
        raise ComparisonError(f"reports cover different instances: {sorted(ids)}")
    base = next((r for r in reports if r.algorithm == baseline), None)
    if base is None:
        raise ComparisonError(f"no {baseline!r} report to compare against")
    rows = []
    for r in reports:
        rows.append(Comparison(
            algorithm=r.algorithm,
            baseline=base.algorithm,
            f_ratio=_ratio(r.value, base.value),
            mec_ratio=_ratio(r.mec, base.mec),
            auc_ratio=_ratio(r.insertion_auc, base.insertion_auc),
            speedup=_ratio(base.mec, r.mec),
            early_exit_fraction=r.early_exit_fraction,
        ))
    return rows


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    lx, ly = np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float))
    return float(np.polyfit(lx, ly, 1)[0])
