"""Exact and greedy reference algorithms."""
from __future__ import annotations

import heapq
import itertools
import math

from ..analysis import RunReport, insertion_auc
from ..core import ContractError, GroundSet, OrderedSolution, ScoreOracle, Selection

BRUTE_FORCE_LIMIT = 10**7


def _check_k(m, k):
    if not 0 <= k <= m:
        raise ContractError(f"need 0 <= k <= m, got k={k}, m={m}")


def _report(name, oracle, sel, ground, start_calls, **kw) -> RunReport:
    sol = sel.solution()
    return RunReport(
        algorithm=name,
        solution=sol,
        mec=oracle.call_count - start_calls,
        insertion_auc=insertion_auc(sol, ground or GroundSet.uniform(oracle.m)),
        steps=len(sol),
        **kw,
    )


def greedy_order(oracle: ScoreOracle, subset) -> OrderedSolution:
    """Order a fixed subset by greedy insertion (for AUC comparability)."""
    sel = Selection(oracle)
    left = sorted(subset)
    while left:
        best, best_gain = None, -math.inf
        for r in left:
            g = sel.gain(r)
            if g > best_gain:
                best, best_gain = r, g
        sel.add(best, best_gain)
        left.remove(best)
    return sel.solution()


def brute_force(oracle: ScoreOracle, m: int, k: int) -> OrderedSolution:
    """Best size-``k`` subset by enumeration; ties go to the lexicographically smallest."""
    _check_k(m, k)
    if math.comb(m, k) > BRUTE_FORCE_LIMIT:
        raise ContractError(f"C({m},{k}) = {math.comb(m, k)} exceeds the enumeration guard")
    best, best_value = None, -math.inf
    for combo in itertools.combinations(range(m), k):
        v = oracle.evaluate(combo)
        if v > best_value:
            best, best_value = combo, v
    return greedy_order(oracle, best)


def brute_force_report(oracle: ScoreOracle, m: int, k: int,
                       ground: GroundSet | None = None) -> RunReport:
    start = oracle.call_count
    sol = brute_force(oracle, m, k)
    return RunReport(
        algorithm="brute_force",
        solution=sol,
        mec=oracle.call_count - start,
        insertion_auc=insertion_auc(sol, ground or GroundSet.uniform(m)),
        steps=len(sol),
    )


def greedy(oracle: ScoreOracle, m: int, k: int, ground: GroundSet | None = None,
           max_workers: int = 1) -> tuple[OrderedSolution, RunReport]:
    """Standard greedy: sweep every remaining element each step.

    Stops early once the best marginal gain is not positive.
    """
    _check_k(m, k)
    start = oracle.call_count
    sel = Selection(oracle)
    remaining = list(range(m))
    reason = "k-reached"
    while sel.size < k:
        if not remaining:
            reason = "exhausted"
            break
        gains = sel.sweep(remaining, max_workers)
        best = gains.argmax()
        g = gains.get(best)
        if g <= 0:
            reason = "no-gain"
            break
        sel.add(best, g)
        remaining.remove(best)
    report = _report("greedy", oracle, sel, ground, start, stop_reason=reason)
    return report.solution, report


def lazy_greedy(oracle: ScoreOracle, m: int, k: int, ground: GroundSet | None = None,
                reference: OrderedSolution | None = None) -> tuple[OrderedSolution, RunReport]:
    """Lazy greedy with stale upper bounds in a max-heap.

    Ties go to the lowest index, so on submodular objectives the order
    matches :func:`greedy`.  Pass ``reference`` (a greedy solution) to have
    the report flag any divergence instead of failing.
    """
    _check_k(m, k)
    start = oracle.call_count
    sel = Selection(oracle)
    heap: list[tuple[float, int, int]] = []
    if k > 0:
        for r, (g, stamp) in sel.sweep(list(range(m))).items():
            heap.append((-g, r, stamp))
        heapq.heapify(heap)
    reason = "k-reached"
    while sel.size < k:
        if not heap:
            reason = "exhausted"
            break
        neg, r, stamp = heapq.heappop(heap)
        if stamp != sel.size:
            g = sel.gain(r)
            heapq.heappush(heap, (-g, r, sel.size))
            continue
        if -neg <= 0:
            reason = "no-gain"
            break
        sel.add(r, -neg)
    diverged = reference is not None and tuple(sel.order) != reference.order
    report = _report("lazy_greedy", oracle, sel, ground, start,
                     stop_reason=reason, diverged=diverged)
    return report.solution, report
