import math
import threading

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phasewin.core import (ContractError, GainCache, GroundSet, OracleError, OrderedSolution,
                           ScoreOracle, Selection, canonical, full_sweep, greedy_accounting,
                           marginal_gain, mec)


def counting(values=None):
    return ScoreOracle(lambda s: float(sum(s)) + (values or 0.0), m=10)


def test_canonical_sorts_and_casts():
    assert canonical([3, np.int64(1), 2]) == (1, 2, 3)


def test_groundset_rejects_bad_areas():
    with pytest.raises(ContractError):
        GroundSet(())
    with pytest.raises(ContractError):
        GroundSet((1.0, 0.0))
    with pytest.raises(ContractError):
        GroundSet((1.0, math.inf))
    g = GroundSet.uniform(4)
    assert g.size == 4 and g.total_area == pytest.approx(1.0)


def test_oracle_bills_cost_factor_per_nonempty_call():
    o = ScoreOracle(lambda s: len(s), m=5, cost_factor=3)
    assert o.evaluate([]) == 0.0
    assert mec(o) == 0
    o.evaluate([1, 2])
    o([0])
    assert o.call_count == 6
    o.reset()
    assert o.call_count == 0


def test_oracle_empty_value_computed_once():
    calls = []

    def fn(s):
        calls.append(s)
        return 0.5

    o = ScoreOracle(fn, m=3)
    assert o.empty_value() == 0.5
    assert o.evaluate(()) == 0.5
    assert calls == [()]


@pytest.mark.parametrize("bad", [math.nan, math.inf, "x", None])
def test_oracle_rejects_unusable_values(bad):
    o = ScoreOracle(lambda s: bad, m=3)
    with pytest.raises(OracleError) as err:
        o.evaluate([2, 0])
    assert err.value.subset == (0, 2)


def test_oracle_cost_factor_validated():
    with pytest.raises(ContractError):
        ScoreOracle(len, m=2, cost_factor=0)
    with pytest.raises(ContractError):
        ScoreOracle(len, m=2, cost_factor=1.5)


def test_oracle_counter_thread_safe():
    o = ScoreOracle(lambda s: 1.0, m=4, cost_factor=2)

    def work():
        for _ in range(500):
            o.evaluate([1])

    threads = [threading.Thread(target=work) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert o.call_count == 8 * 500 * 2


def test_ordered_solution_gains_and_value():
    sol = OrderedSolution((2, 0, 1), (0.5, 0.8, 0.9), base_value=0.1)
    assert sol.step_gains == pytest.approx((0.4, 0.3, 0.1))
    assert sol.value == 0.9
    assert sol.prefix(2) == (2, 0)
    assert OrderedSolution.empty(0.3).value == 0.3
    with pytest.raises(ContractError):
        OrderedSolution((1, 1), (1.0, 2.0))
    with pytest.raises(ContractError):
        OrderedSolution((1,), ())


def test_gain_cache_ties_and_staleness():
    c = GainCache()
    c.put(5, 2.0, 0)
    c.put(3, 2.0, 0)
    c.put(7, 1.0, 1)
    assert c.argmax() == 3
    assert c.argmax([5, 7]) == 5
    assert c.is_fresh(7, 1) and not c.is_fresh(5, 1)
    c.drop(3)
    assert 3 not in c and len(c) == 2
    with pytest.raises(ContractError):
        GainCache().argmax()


def test_marginal_gain_and_sweep(modular10):
    o = modular10.oracle()
    assert marginal_gain(o, 3.0, [2], 4) == 5.0
    with pytest.raises(ContractError):
        marginal_gain(o, 3.0, [2], 2)
    cache = full_sweep(o, [0], [1, 2, 3], base_value=1.0)
    assert cache.gains() == {1: 2.0, 2: 3.0, 3: 4.0}
    assert all(cache.stamp(i) == 1 for i in (1, 2, 3))
    with pytest.raises(ContractError):
        full_sweep(o, [0], [0, 1])


def test_parallel_sweep_matches_serial(coverage8):
    a = full_sweep(coverage8.oracle(), [1], [0, 2, 3, 4, 5, 6, 7])
    b = full_sweep(coverage8.oracle(), [1], [0, 2, 3, 4, 5, 6, 7], max_workers=4)
    assert a.gains() == b.gains()


def test_selection_reuses_fresh_gains(modular10):
    o = modular10.oracle()
    sel = Selection(o)
    sel.sweep(range(10))
    assert o.call_count == 10
    assert sel.gain(9) == 10.0
    assert o.call_count == 10
    sel.add(9)
    assert sel.value == 10.0
    assert sel.gain(0) == 1.0
    assert o.call_count == 11
    with pytest.raises(ContractError):
        sel.gain(9)


def test_greedy_accounting_closed_form():
    assert greedy_accounting(100, 100, 2) == 10100
    assert greedy_accounting(50, 50, 2) == 2550
    assert greedy_accounting(5, 0) == 0


@settings(max_examples=50, deadline=None)
@given(m=st.integers(1, 60), data=st.data())
def test_greedy_accounting_sum_identity(m, data):
    k = data.draw(st.integers(0, m))
    c = data.draw(st.integers(1, 4))
    assert greedy_accounting(m, k, c) == c * (k * (m + 1) - k * (k + 1) // 2)
