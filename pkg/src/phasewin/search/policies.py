"""Window policies: which windowed candidates get a true evaluation.

A window is a list of ``(index, cached_gain)`` pairs sorted by cached gain,
highest first (lowest index first among equal gains).  Cached gains come
from earlier sweeps, so on a submodular objective they upper-bound the
current marginal gains.
"""
from __future__ import annotations

from typing import Callable, Sequence

Window = Sequence[tuple[int, float]]

LG = "LG"
BA = "BA"
T2 = "T2"
BAF = "BAF-B"
POLICIES = (LG, BA, T2, BAF)


def policy_lg(window: Window, tau_sel: float) -> list[int]:
    """Top candidate, if its cached gain clears the selection threshold."""
    if not window or window[0][1] < tau_sel:
        return []
    return [window[0][0]]


def policy_ba(window: Window, beta: float = 0.8) -> list[int]:
    """Every candidate whose cached gain is within ``beta`` of the window max."""
    if not window:
        return []
    top = window[0][1]
    if top <= 0:
        return []
    return [i for i, g in window if g >= beta * top]


def policy_t2(window: Window, tau_sel: float = float("-inf"), gap_max: float = 0.1) -> list[int]:
    """Top two together when both clear ``tau_sel`` and sit close; else the top one."""
    if not window:
        return []
    (i1, g1) = window[0]
    if len(window) > 1:
        i2, g2 = window[1]
        if g1 >= tau_sel and g2 >= tau_sel and g1 > 0 and (g1 - g2) / g1 <= gap_max:
            return [i1, i2]
    return [i1]


def policy_baf(window: Window, batch_size: int,
               true_gain: Callable[[int], float]) -> tuple[list[int], dict[int, float]]:
    """Batched best-above with forward checking.

    Evaluates the window batch by batch and stops once the best realised
    gain beats every cached bound still unevaluated.  Returns the winner and
    all realised gains (the caller can tighten its bounds with them).
    """
    if not window:
        return [], {}
    batch_size = max(1, int(batch_size))
    realised: dict[int, float] = {}
    best, best_gain = None, float("-inf")
    for start in range(0, len(window), batch_size):
        for i, _ in window[start:start + batch_size]:
            g = true_gain(i)
            realised[i] = g
            if g > best_gain or (g == best_gain and i < best):
                best, best_gain = i, g
        rest = window[start + batch_size:]
        if not rest or best_gain > rest[0][1]:
            break
    return [best], realised
