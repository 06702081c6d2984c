"""Ground sets, the set-function oracle contract, and evaluation accounting.

Every search algorithm talks to the objective through a :class:`ScoreOracle`.
The oracle counts evaluations in MEC units (one unit = one simulated model
forward); objectives that need several forwards per set evaluation declare a
``cost_factor`` greater than one.
"""
from __future__ import annotations

import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np


class ContractError(ValueError):
    """A caller broke a documented precondition."""


class OracleError(RuntimeError):
    """The objective returned something unusable (NaN, inf, wrong type)."""

    def __init__(self, subset: Sequence[int], value: object):
        self.subset = tuple(subset)
        self.value = value
        super().__init__(f"oracle returned non-finite value {value!r} for subset {list(self.subset)}")


def canonical(subset: Iterable[int]) -> tuple[int, ...]:
    """Sorted tuple form handed to every objective."""
    return tuple(sorted(int(i) for i in subset))


@dataclass(frozen=True)
class GroundSet:
    """Indexed candidate elements with positive area weights."""

    areas: tuple[float, ...]

    def __post_init__(self):
        areas = tuple(float(a) for a in self.areas)
        object.__setattr__(self, "areas", areas)
        if len(areas) < 1:
            raise ContractError("ground set needs at least one element")
        if any(not (a > 0 and math.isfinite(a)) for a in areas):
            raise ContractError("every area must be a positive finite number")

    @classmethod
    def uniform(cls, m: int, total: float = 1.0) -> "GroundSet":
        return cls(tuple([total / m] * m))

    @property
    def size(self) -> int:
        return len(self.areas)

    @property
    def total_area(self) -> float:
        return math.fsum(self.areas)

    def __len__(self) -> int:
        return len(self.areas)


class ScoreOracle:
    """Counts calls to a deterministic set function ``F``.

    ``call_count`` grows by ``cost_factor`` per evaluation of a non-empty
    subset. ``F(empty)`` is a per-instance reference value computed once and
    kept outside the MEC tally (see ``empty_value``).
    """

    def __init__(self, fn: Callable[[tuple[int, ...]], float], m: int,
                 cost_factor: int = 1, name: str = "oracle"):
        if int(cost_factor) != cost_factor or cost_factor < 1:
            raise ContractError("cost_factor must be a positive integer")
        self._fn = fn
        self.m = int(m)
        self.cost_factor = int(cost_factor)
        self.name = name
        self._calls = 0
        self._lock = threading.Lock()
        self._empty: float | None = None

    @property
    def call_count(self) -> int:
        return self._calls

    def _checked(self, subset: tuple[int, ...]) -> float:
        value = self._fn(subset)
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise OracleError(subset, value) from None
        if not math.isfinite(value):
            raise OracleError(subset, value)
        return value

    def evaluate(self, subset: Iterable[int]) -> float:
        key = canonical(subset)
        if not key:
            return self.empty_value()
        value = self._checked(key)
        with self._lock:
            self._calls += self.cost_factor
        return value

    def empty_value(self) -> float:
        """``F`` of the empty set; the blank-input reference, not billed."""
        if self._empty is None:
            self._empty = self._checked(())
        return self._empty

    def reset(self) -> None:
        with self._lock:
            self._calls = 0

    def __call__(self, subset: Iterable[int]) -> float:
        return self.evaluate(subset)

    def __repr__(self) -> str:
        return f"ScoreOracle({self.name!r}, m={self.m}, cost_factor={self.cost_factor}, calls={self._calls})"


def mec(oracle: ScoreOracle) -> int:
    """Model evaluation count consumed so far."""
    return oracle.call_count


@dataclass(frozen=True)
class OrderedSolution:
    """Selection order with the objective value after every prefix."""

    order: tuple[int, ...]
    step_values: tuple[float, ...]
    base_value: float = 0.0
    step_gains: tuple[float, ...] = field(default=())

    def __post_init__(self):
        order = tuple(int(i) for i in self.order)
        values = tuple(float(v) for v in self.step_values)
        if len(order) != len(values):
            raise ContractError("order and step_values differ in length")
        if len(set(order)) != len(order):
            raise ContractError("solution order contains duplicates")
        prev = [self.base_value, *values[:-1]]
        gains = tuple(v - p for v, p in zip(values, prev))
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "step_values", values)
        object.__setattr__(self, "step_gains", gains)

    @classmethod
    def empty(cls, base_value: float = 0.0) -> "OrderedSolution":
        return cls((), (), base_value)

    def __len__(self) -> int:
        return len(self.order)

    @property
    def value(self) -> float:
        return self.step_values[-1] if self.step_values else self.base_value

    def prefix(self, j: int) -> tuple[int, ...]:
        return self.order[:j]


class GainCache:
    """Marginal gains stamped with the solution size they were measured at."""

    def __init__(self):
        self._entries: dict[int, tuple[float, int]] = {}

    def put(self, index: int, gain: float, stamp: int) -> None:
        self._entries[int(index)] = (float(gain), int(stamp))

    def get(self, index: int) -> float:
        return self._entries[index][0]

    def stamp(self, index: int) -> int:
        return self._entries[index][1]

    def is_fresh(self, index: int, size: int) -> bool:
        entry = self._entries.get(index)
        return entry is not None and entry[1] == size

    def drop(self, index: int) -> None:
        self._entries.pop(index, None)

    def items(self):
        return self._entries.items()

    def gains(self) -> dict[int, float]:
        return {i: g for i, (g, _) in self._entries.items()}

    def argmax(self, among: Iterable[int] | None = None) -> int:
        """Largest cached gain; lowest index wins ties."""
        keys = self._entries.keys() if among is None else among
        best, best_gain = -1, -math.inf
        for i in sorted(keys):
            g = self._entries[i][0]
            if g > best_gain:
                best, best_gain = i, g
        if best < 0:
            raise ContractError("argmax over an empty cache")
        return best

    def __contains__(self, index: int) -> bool:
        return index in self._entries

    def __len__(self) -> int:
        return len(self._entries)


def marginal_gain(oracle: ScoreOracle, base_value: float, base_set: Iterable[int],
                  candidate: int) -> float:
    base = canonical(base_set)
    if candidate in base:
        raise ContractError(f"candidate {candidate} already in base set")
    return oracle.evaluate(base + (candidate,)) - base_value


def full_sweep(oracle: ScoreOracle, base_set: Iterable[int], remaining: Sequence[int],
               base_value: float | None = None, max_workers: int = 1) -> GainCache:
    """Fresh gains for every element of ``remaining`` relative to ``base_set``.

    With ``max_workers > 1`` the evaluations run on a thread pool; the cache
    content does not depend on completion order.
    """
    base = canonical(base_set)
    remaining = [int(r) for r in remaining]
    overlap = set(base).intersection(remaining)
    if overlap:
        raise ContractError(f"remaining overlaps base set: {sorted(overlap)}")
    cache = GainCache()
    if not remaining:
        return cache
    if base_value is None:
        base_value = oracle.evaluate(base)
    stamp = len(base)

    def one(r):
        return oracle.evaluate(base + (r,)) - base_value

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            gains = list(pool.map(one, remaining))
    else:
        gains = [one(r) for r in remaining]
    for r, g in zip(remaining, gains):
        cache.put(r, g, stamp)
    return cache


class Selection:
    """Mutable search state: the ordered solution under construction.

    Keeps ``F(S)`` carried forward so marginal gains never recompute it.
    """

    def __init__(self, oracle: ScoreOracle):
        self.oracle = oracle
        self.base_value = oracle.empty_value()
        self.order: list[int] = []
        self.values: list[float] = []
        self.members: set[int] = set()
        self.cache = GainCache()

    @property
    def size(self) -> int:
        return len(self.order)

    @property
    def value(self) -> float:
        return self.values[-1] if self.values else self.base_value

    def gain(self, candidate: int) -> float:
        """True marginal gain, served from the cache when still fresh."""
        if self.cache.is_fresh(candidate, self.size):
            return self.cache.get(candidate)
        if candidate in self.members:
            raise ContractError(f"candidate {candidate} already selected")
        g = self.oracle.evaluate(self.order + [candidate]) - self.value
        self.cache.put(candidate, g, self.size)
        return g

    def sweep(self, remaining: Sequence[int], max_workers: int = 1) -> GainCache:
        fresh = full_sweep(self.oracle, self.order, remaining, self.value, max_workers)
        for i, (g, s) in fresh.items():
            self.cache.put(i, g, s)
        return fresh

    def add(self, candidate: int, gain: float | None = None) -> float:
        if gain is None:
            gain = self.gain(candidate)
        self.order.append(int(candidate))
        self.members.add(int(candidate))
        self.values.append(self.value + gain)
        self.cache.drop(candidate)
        return gain

    def solution(self) -> OrderedSolution:
        return OrderedSolution(tuple(self.order), tuple(self.values), self.base_value)


def greedy_accounting(m: int, steps: int, cost_factor: int = 1) -> int:
    """Closed-form MEC of plain greedy after ``steps`` full selection steps."""
    return cost_factor * sum(m - i + 1 for i in range(1, steps + 1))


def as_index_array(subset: Iterable[int]) -> np.ndarray:
    return np.fromiter(subset, dtype=np.intp)
