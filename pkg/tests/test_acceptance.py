"""Acceptance criteria, one test each; every test prints a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines.
"""
import math
import statistics
import time

import numpy as np

from phasewin.analysis import gain_violations
from phasewin.harness.runner import rows_to_csv, run_experiment
from phasewin.harness.spec import parse_spec
from phasewin.harness.verify import battery
from phasewin.objectives import make_modular, make_stressor, make_surrogate
from phasewin.search import (BoundParameters, PhaseWinConfig, bound_recurrence, brute_force,
                             classical_bound, greedy, lazy_greedy, phasewin, theoretical_bound)

GREEDY_RATIO = 1 - 1 / math.e
SURROGATE_SEEDS = range(20)


def report(n, passed, detail):
    print(f"\n[criterion {n}] {'PASS' if passed else 'FAIL'}: {detail}")
    assert passed, detail


def _greedy_vs_phasewin(m, seeds=SURROGATE_SEEDS):
    f_ratio, mec_ratio = [], []
    for seed in seeds:
        inst = make_surrogate(seed, m)
        g, grep = greedy(inst.oracle(), m, m)
        _, prep, _ = phasewin(inst.oracle(), m, PhaseWinConfig.for_size(m, m, seed=seed))
        f_ratio.append(prep.value / grep.value)
        mec_ratio.append(prep.mec / grep.mec)
    return f_ratio, mec_ratio


def test_1_greedy_approximation_bound():
    t0 = time.perf_counter()
    count, fails, worst = 0, [], math.inf
    kinds = set()
    for label, inst, m, k in battery(210, seed=2024):
        opt = brute_force(inst.oracle(), m, k).value
        val = greedy(inst.oracle(), m, k)[0].value
        worst = min(worst, val / opt if opt > 0 else 1.0)
        kinds.add(label.split("-")[0])
        count += 1
        if val < GREEDY_RATIO * opt - 1e-12:
            fails.append(label)
    elapsed = time.perf_counter() - t0
    ok = count >= 200 and not fails and elapsed < 60 and len(kinds) == 3
    report(1, ok, f"{count} instances ({', '.join(sorted(kinds))}), {len(fails)} below (1-1/e)*OPT, "
                  f"worst ratio {worst:.4f}, {elapsed:.1f}s")


def test_2_mec_accounting():
    got = {}
    for m in (100, 50):
        inst = make_modular(np.arange(1, m + 1, dtype=float))
        _, rep = greedy(inst.oracle(2), m, m)
        got[m] = rep.mec
    report(2, got[100] == 10100 and got[50] == 2550,
           f"greedy MEC m=100,k=100,c=2 -> {got[100]}; m=50,k=50 -> {got[50]}")


def test_3_faithfulness_at_budget():
    t0 = time.perf_counter()
    f_ratio, mec_ratio = _greedy_vs_phasewin(50)
    elapsed = time.perf_counter() - t0
    mf, mm = statistics.fmean(f_ratio), statistics.fmean(mec_ratio)
    report(3, mf >= 0.95 and mm <= 0.30 and elapsed < 120,
           f"m=50, 20 seeds: mean F ratio {mf:.4f} (>= 0.95), mean MEC ratio {mm:.4f} (<= 0.30), "
           f"{elapsed:.1f}s")


def test_4_speedup_band():
    speedups = []
    for m in (50, 100):
        _, mec_ratio = _greedy_vs_phasewin(m)
        speedups += [1 / r for r in mec_ratio]
    med = statistics.median(speedups)
    report(4, 4 <= med <= 12, f"median greedy/PhaseWin MEC over m in {{50, 100}}: {med:.2f}x (band [4, 12])")


def test_5_lazy_equivalence():
    count, bad_order, bad_mec = 0, [], []
    for label, inst, m, k in battery(210, seed=2024):
        g, grep = greedy(inst.oracle(), m, k)
        l, lrep = lazy_greedy(inst.oracle(), m, k)
        count += 1
        if l.order != g.order:
            bad_order.append(label)
        if lrep.mec > grep.mec:
            bad_mec.append(label)
    modular_bad = []
    for m, k, c in [(10, 10, 1), (50, 20, 2), (100, 100, 2), (37, 5, 3)]:
        inst = make_modular(np.random.default_rng(m).permutation(m) + 1.0)
        mec = lazy_greedy(inst.oracle(c), m, k)[1].mec
        if mec != c * (m + k - 1):
            modular_bad.append((m, k, c, mec))
    ok = not bad_order and not bad_mec and not modular_bad
    report(5, ok, f"{count} battery instances: {len(bad_order)} order mismatches, "
                  f"{len(bad_mec)} with lazy MEC > greedy MEC; modular c(m+k-1) mismatches: {modular_bad}")


def test_6_curvature():
    count, sub_bad = 0, []
    for label, inst, m, _ in battery(210, seed=2024):
        g, _ = greedy(inst.oracle(), m, m)
        count += 1
        if gain_violations(g.step_gains, tol=1e-9)[0]:
            sub_bad.append(label)
    sup_bad = []
    for seed in range(20):
        inst = make_stressor(seed, 12)
        g, _ = greedy(inst.oracle(), 12, 12)
        if gain_violations(g.step_gains, tol=1e-9)[1]:
            sup_bad.append(seed)
    report(6, not sub_bad and not sup_bad,
           f"{len(sub_bad)} increasing-gain violations on {count} submodular instances; "
           f"{len(sup_bad)} decreasing-gain violations on 20 supermodular stressors")


def test_7_bound_formula():
    worst_classic = max(abs(theoretical_bound(BoundParameters(1.0, 0.0, 1.0, k)) - classical_bound(k))
                        for k in range(1, 201))
    rng = np.random.default_rng(7)
    worst_rec = 0.0
    for k in (10, 50):
        for _ in range(50):
            alpha, beta = rng.uniform(0.1, 1.0, size=2)
            gamma = rng.uniform(0, alpha * beta)
            p = BoundParameters(float(alpha), float(gamma), float(beta), k)
            worst_rec = max(worst_rec, abs(theoretical_bound(p) - bound_recurrence(p)))
    report(7, worst_classic <= 1e-12 and worst_rec <= 1e-9,
           f"max |bound - (1-(1-1/k)^k)| = {worst_classic:.2e} (k<=200); "
           f"max |closed form - recurrence| = {worst_rec:.2e} (k in {{10, 50}})")


DETERMINISM_SPEC = """\
[experiment]
schema = 1
family = {family}
m = 20, 30
k = m, 5
replicates = 2
master_seed = {seed}
algorithms = greedy, lazy_greedy, phasewin, pw-baf

[algorithm pw-baf]
base = phasewin
policy = BAF-B
"""


def test_8_determinism():
    mismatched = []
    for family in ("surrogate", "coverage", "facility"):
        for seed in (0, 17):
            spec = DETERMINISM_SPEC.format(family=family, seed=seed)
            a = rows_to_csv(run_experiment(parse_spec(spec))).encode()
            b = rows_to_csv(run_experiment(parse_spec(spec), workers=3)).encode()
            c = rows_to_csv(run_experiment(parse_spec(spec))).encode()
            if not a == b == c:
                mismatched.append((family, seed))
    report(8, not mismatched, f"6 (spec, seed) pairs, 3 runs each (one threaded): "
                              f"{len(mismatched)} with differing CSV bytes")
