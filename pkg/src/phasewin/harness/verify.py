"""Built-in invariant suites run by ``phasewin verify``."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..analysis import gain_violations
from ..core import greedy_accounting
from ..objectives import (is_monotone_submodular, make_coverage, make_facility_location, make_modular,
                          make_stressor, make_surrogate)
from ..search import brute_force, greedy, lazy_greedy

SUITES = ("accounting", "approx", "curvature", "equivalence")
GREEDY_RATIO = 1 - 1 / math.e


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}  {self.detail}".rstrip()


def small_instance(kind: str, seed: int, m: int):
    if kind == "coverage":
        return make_coverage(seed, m, universe=3 * m, density=0.25)
    if kind == "facility":
        return make_facility_location(seed, m, clients=10)
    if kind == "surrogate":
        return make_surrogate(seed, m, grid=(12, 12), box_frac=0.5)
    raise ValueError(kind)


def battery(n: int = 210, seed: int = 0, m_range=(6, 12), k_max: int = 5):
    """``n`` small instances, each exhaustively verified monotone submodular.

    Yields ``(label, objective, m, k)``; instances failing verification are
    skipped, so the count can fall short only if generation is broken.
    """
    rng = np.random.default_rng(seed)
    kinds = ("coverage", "facility", "surrogate")
    made = 0
    attempt = 0
    while made < n and attempt < 3 * n:
        kind = kinds[attempt % 3]
        m = int(rng.integers(m_range[0], m_range[1] + 1))
        k = int(rng.integers(1, min(k_max, m) + 1))
        inst_seed = int(rng.integers(2**31))
        attempt += 1
        inst = small_instance(kind, inst_seed, m)
        if not is_monotone_submodular(inst, m):
            continue
        made += 1
        yield f"{kind}-s{inst_seed}-m{m}-k{k}", inst, m, k


def suite_accounting() -> list[Check]:
    out = []
    for m, k, c in [(5, 5, 1), (10, 4, 1), (20, 20, 2), (50, 50, 2), (100, 100, 2), (30, 7, 3)]:
        inst = make_modular(np.arange(1, m + 1, dtype=float))
        _, rep = greedy(inst.oracle(c), m, k)
        want = greedy_accounting(m, k, c)
        out.append(Check(f"greedy MEC m={m} k={k} c={c}", rep.mec == want, f"{rep.mec} vs {want}"))
        _, lrep = lazy_greedy(inst.oracle(c), m, k)
        want = c * (m + k - 1)
        out.append(Check(f"lazy MEC modular m={m} k={k} c={c}", lrep.mec == want, f"{lrep.mec} vs {want}"))
    return out


def suite_approx(n: int = 60) -> list[Check]:
    worst, fails, count = math.inf, [], 0
    for label, inst, m, k in battery(n, seed=11):
        _, rep = greedy(inst.oracle(), m, k)
        opt = brute_force(inst.oracle(), m, k).value
        ratio = rep.value / opt if opt > 0 else 1.0
        worst = min(worst, ratio)
        count += 1
        if rep.value < GREEDY_RATIO * opt - 1e-12:
            fails.append(label)
    return [Check(f"greedy >= (1-1/e) OPT on {count} instances", not fails,
                  f"worst ratio {worst:.4f}" + (f"; failing {fails[:3]}" if fails else ""))]


def suite_equivalence(n: int = 60) -> list[Check]:
    bad, mec_bad, count = [], [], 0
    for label, inst, m, k in battery(n, seed=23):
        g, grep = greedy(inst.oracle(), m, k)
        l, lrep = lazy_greedy(inst.oracle(), m, k, reference=g)
        count += 1
        if lrep.diverged:
            bad.append(label)
        if lrep.mec > grep.mec:
            mec_bad.append(label)
    return [
        Check(f"lazy order == greedy order on {count} instances", not bad, ", ".join(bad[:3])),
        Check(f"lazy MEC <= greedy MEC on {count} instances", not mec_bad, ", ".join(mec_bad[:3])),
    ]


def suite_curvature(n: int = 60) -> list[Check]:
    sub_bad, count = [], 0
    for label, inst, m, k in battery(n, seed=37):
        g, _ = greedy(inst.oracle(), m, m)
        count += 1
        up, _ = gain_violations(g.step_gains)
        if up:
            sub_bad.append(label)
    sup_bad = []
    for seed in range(10):
        inst = make_stressor(seed, 12)
        g, _ = greedy(inst.oracle(), 12, 12)
        _, down = gain_violations(g.step_gains)
        if down:
            sup_bad.append(f"stressor-s{seed}")
    return [
        Check(f"greedy gains non-increasing on {count} submodular instances", not sub_bad,
              ", ".join(sub_bad[:3])),
        Check("greedy gains non-decreasing on 10 supermodular stressors", not sup_bad,
              ", ".join(sup_bad[:3])),
    ]


def verify(suite: str) -> list[Check]:
    runners = {
        "accounting": suite_accounting,
        "approx": suite_approx,
        "curvature": suite_curvature,
        "equivalence": suite_equivalence,
    }
    if suite not in runners:
        raise KeyError(suite)
    return runners[suite]()
