"""Phase-window accelerated greedy search.

Each phase sweeps the remaining candidates once, commits the best one as an
anchor, and uses its gain to split the rest into a high-potential pool, a
deferred middle band, and a discarded tail.  The pool is then consumed
through a sliding window (first ``m_active`` phases) or in cached order
(later phases), with probabilistic early exit when realised gains collapse
and an annealed deferral of acceptances.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import asdict, dataclass, field, fields
from typing import Sequence

import numpy as np

from ..analysis import RunReport, insertion_auc
from ..core import ContractError, GroundSet, OrderedSolution, ScoreOracle, Selection
from . import policies
from .bounds import exit_probability, stop_criterion


def default_window(m: int) -> int:
    """16 regions of window per 50 candidates."""
    return max(1, round(0.32 * m))


def default_tau(m: int) -> float:
    """0.025 at m=50, 0.01 at m=100, power-law in between and beyond."""
    if m == 50:
        return 0.025
    if m == 100:
        return 0.01
    return 0.025 * (50 / m) ** math.log2(2.5)


@dataclass
class PhaseWinConfig:
    k: int
    rho_sel: float = 0.6
    rho_del: float = 0.1
    window_size: int = 16
    m_active: int = 3
    theta: float | tuple[float, ...] = 0.3
    policy: str = policies.BA
    anneal: bool = True
    anneal_p0: float = 0.2
    anneal_decay: float = 0.7
    random_sample_frac: float = 0.1
    stop_tau: float | None = 0.025
    seed: int = 0
    ba_beta: float = 0.8
    t2_gap_max: float = 0.1
    baf_batch_size: int | None = None

    @classmethod
    def for_size(cls, m: int, k: int | None = None, **overrides) -> "PhaseWinConfig":
        base = dict(k=m if k is None else k, window_size=default_window(m), stop_tau=default_tau(m))
        base.update(overrides)
        return cls(**base)

    def theta_at(self, t: int) -> float:
        """Supervision coefficient for phase ``t`` (1-based); last value repeats."""
        if isinstance(self.theta, (int, float)):
            return float(self.theta)
        return float(self.theta[min(t, len(self.theta)) - 1])

    @property
    def batch_size(self) -> int:
        return self.baf_batch_size or max(1, self.window_size // 4)

    def validate(self, m: int) -> None:
        errs = []
        if not 0 < self.rho_del < self.rho_sel < 1:
            errs.append("need 0 < rho_del < rho_sel < 1")
        if self.window_size < 1:
            errs.append("window_size must be >= 1")
        if self.m_active < 0:
            errs.append("m_active must be >= 0")
        if not 0 <= self.k <= m:
            errs.append(f"k={self.k} outside [0, {m}]")
        thetas = [self.theta] if isinstance(self.theta, (int, float)) else list(self.theta)
        if not thetas or any(not 0 <= th < 1 for th in thetas):
            errs.append("theta values must lie in [0, 1)")
        if self.policy not in policies.POLICIES:
            errs.append(f"unknown policy {self.policy!r}; pick one of {policies.POLICIES}")
        if not 0 <= self.anneal_p0 <= 1 or not 0 < self.anneal_decay <= 1:
            errs.append("anneal_p0 in [0, 1] and anneal_decay in (0, 1] required")
        if not 0 <= self.random_sample_frac <= 1:
            errs.append("random_sample_frac must lie in [0, 1]")
        if self.stop_tau is not None and self.stop_tau < 0:
            errs.append("stop_tau must be >= 0")
        if errs:
            raise ContractError("; ".join(errs))

    def to_dict(self) -> dict:
        d = asdict(self)
        if isinstance(self.theta, tuple):
            d["theta"] = list(self.theta)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PhaseWinConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ContractError(f"unknown PhaseWin settings: {sorted(unknown)}")
        d = dict(d)
        if isinstance(d.get("theta"), list):
            d["theta"] = tuple(d["theta"])
        return cls(**d)


@dataclass
class PhaseRecord:
    phase: int
    anchor: int
    delta_ref: float
    tau_sel: float
    tau_del: float
    pool_size: int
    pruned: int
    deferred: int
    mode: str
    selected: list[int] = field(default_factory=list)
    early_exit: bool = False
    exit_probability: float | None = None
    evaluations: int = 0


@dataclass
class PhaseTrace:
    phases: list[PhaseRecord] = field(default_factory=list)
    stop_reason: str = "complete"

    def __len__(self):
        return len(self.phases)

    @property
    def early_exit_fraction(self) -> float:
        if not self.phases:
            return 0.0
        return sum(p.early_exit for p in self.phases) / len(self.phases)

    def selected(self) -> list[int]:
        out = []
        for p in self.phases:
            out.append(p.anchor)
            out.extend(p.selected)
        return out


class _Stop(Exception):
    pass


class _PhaseWin:
    """One search run; owns the selection state and the only RNG."""

    def __init__(self, oracle: ScoreOracle, m: int, config: PhaseWinConfig):
        self.oracle = oracle
        self.m = m
        self.cfg = config
        self.rng = np.random.default_rng(config.seed)
        self.sel = Selection(oracle)
        self.trace = PhaseTrace()
        self.prev_gain = math.inf

    # -- bookkeeping

    def _accept(self, r: int, g: float, record: PhaseRecord | None) -> None:
        self.sel.add(r, g)
        self.prev_gain = g
        if record is not None:
            record.selected.append(r)
        if self.cfg.stop_tau is not None and stop_criterion(self.sel.values, self.cfg.stop_tau):
            self.trace.stop_reason = "ratio-stop"
            raise _Stop

    def _supervise(self, g: float, t: int, record: PhaseRecord) -> bool:
        """True when the phase should end after realised gain ``g``."""
        theta = self.cfg.theta_at(t)
        if g >= theta * self.prev_gain:
            return False
        p = exit_probability(g, self.prev_gain, theta)
        record.exit_probability = p
        if self.rng.random() < p:
            record.early_exit = True
            return True
        return False

    # -- phase pieces

    def _partition(self, gains: dict[int, float], remaining: list[int], tau_sel: float, tau_del: float):
        pool, middle, pruned = [], [], []
        for r in remaining:
            g = gains[r]
            if g >= tau_sel:
                pool.append(r)
            elif g <= tau_del:
                pruned.append(r)
            else:
                middle.append(r)
        n = len(middle)
        take = round(self.cfg.random_sample_frac * n)
        if take:
            picks = self.rng.choice(n, size=take, replace=False)
            pool.extend(middle[i] for i in sorted(picks))
        pool.sort(key=lambda r: (-gains[r], r))
        return pool, middle, pruned

    def _window(self, pool: list[int], gains: dict[int, float], t: int,
                tau_sel: float, record: PhaseRecord) -> None:
        cfg, sel = self.cfg, self.sel
        queue = deque((r, gains[r]) for r in pool)
        window: list[tuple[int, float]] = []
        deferred: set[int] = set()
        defer_p = cfg.anneal_p0 * cfg.anneal_decay**t if cfg.anneal else 0.0

        def refill():
            while len(window) < cfg.window_size and queue:
                window.append(queue.popleft())
            window.sort(key=lambda e: (-e[1], e[0]))

        refill()
        while window and sel.size < cfg.k:
            if cfg.policy == policies.LG:
                batch = policies.policy_lg(window, tau_sel)
            elif cfg.policy == policies.BA:
                batch = policies.policy_ba(window, cfg.ba_beta)
            elif cfg.policy == policies.T2:
                batch = policies.policy_t2(window, tau_sel, cfg.t2_gap_max)
            else:
                batch, realised = policies.policy_baf(window, cfg.batch_size, sel.gain)
                # realised gains are tighter bounds for whatever stays in the window
                window[:] = [(i, realised.get(i, g)) for i, g in window]
            if not batch:
                return
            for r in batch:
                if sel.size >= cfg.k:
                    return
                g = sel.gain(r)
                window[:] = [e for e in window if e[0] != r]
                if self._supervise(g, t, record):
                    return
                if g <= 0:
                    continue
                if defer_p and r not in deferred and self.rng.random() < defer_p:
                    deferred.add(r)
                    queue.append((r, g))
                    continue
                self._accept(r, g, record)
            refill()

    def _degenerate(self, pool: list[int], t: int, record: PhaseRecord) -> None:
        for r in pool:
            if self.sel.size >= self.cfg.k:
                return
            g = self.sel.gain(r)
            if self._supervise(g, t, record):
                return
            if g > 0:
                self._accept(r, g, record)

    # -- driver

    def run(self) -> None:
        cfg, sel = self.cfg, self.sel
        remaining = list(range(self.m))
        t = 0
        while sel.size < cfg.k and remaining:
            t += 1
            start = self.oracle.call_count
            gains = sel.sweep(remaining).gains()
            anchor = min(remaining, key=lambda r: (-gains[r], r))
            delta_ref = gains[anchor]
            if delta_ref <= 0:
                self.trace.stop_reason = "no-gain"
                return
            remaining.remove(anchor)
            tau_sel, tau_del = cfg.rho_sel * delta_ref, cfg.rho_del * delta_ref
            pool, middle, pruned = self._partition(gains, remaining, tau_sel, tau_del)
            mode = "window" if t <= cfg.m_active else "greedy"
            record = PhaseRecord(t, anchor, delta_ref, tau_sel, tau_del, len(pool),
                                 len(pruned), len(middle), mode)
            self.trace.phases.append(record)
            dropped = set(pruned)
            try:
                self.prev_gain = math.inf
                self._accept(anchor, delta_ref, None)
                if pool and sel.size < cfg.k:
                    if mode == "window":
                        self._window(pool, gains, t, tau_sel, record)
                    else:
                        self._degenerate(pool, t, record)
            finally:
                record.evaluations = self.oracle.call_count - start
                chosen = set(record.selected) | dropped
                remaining = [r for r in remaining if r not in chosen]
        if sel.size >= cfg.k:
            self.trace.stop_reason = "k-reached"
        elif not remaining:
            self.trace.stop_reason = "exhausted"


def phasewin(oracle: ScoreOracle, m: int, config: PhaseWinConfig,
             ground: GroundSet | None = None) -> tuple[OrderedSolution, RunReport, PhaseTrace]:
    """Run PhaseWin; deterministic for a fixed ``config.seed``."""
    config.validate(m)
    start = oracle.call_count
    run = _PhaseWin(oracle, m, config)
    try:
        run.run()
    except _Stop:
        pass
    sol = run.sel.solution()
    report = RunReport(
        algorithm="phasewin",
        solution=sol,
        mec=oracle.call_count - start,
        insertion_auc=insertion_auc(sol, ground or GroundSet.uniform(m)),
        steps=len(sol),
        phases=len(run.trace),
        early_exit_fraction=run.trace.early_exit_fraction,
        stop_reason=run.trace.stop_reason,
        trace=run.trace,
        extra={"policy": config.policy},
    )
    return sol, report, run.trace


def window_selection(pool: Sequence[tuple[int, float]], oracle: ScoreOracle,
                     selected: Sequence[int], config: PhaseWinConfig, delta_ref: float,
                     phase: int = 1) -> tuple[list[int], PhaseRecord]:
    """Stand-alone windowed pass over a pool of ``(index, cached_gain)`` pairs.

    ``selected`` is the current solution prefix; it is replayed (billed) to
    rebuild the selection state.  Returns the indices accepted in order.
    """
    run = _PhaseWin(oracle, oracle.m, config)
    for r in selected:
        run.sel.add(r, run.sel.gain(r))
    run.prev_gain = delta_ref
    ranked = sorted(pool, key=lambda e: (-e[1], e[0]))
    gains = dict(ranked)
    tau_sel = config.rho_sel * delta_ref
    record = PhaseRecord(phase, -1, delta_ref, tau_sel, config.rho_del * delta_ref,
                         len(ranked), 0, 0, "window")
    try:
        run._window([r for r, _ in ranked], gains, phase, tau_sel, record)
    except _Stop:
        pass
    return record.selected, record
