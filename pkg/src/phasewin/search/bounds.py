"""Supervision and stopping rules, plus the approximation-ratio formula."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from ..core import ContractError


def exit_probability(gain: float, prev_gain: float, theta: float) -> float:
    """Chance of ending the phase after a realised gain ``gain``.

    ``clamp(1 - gain / (theta * prev_gain), 0, 1)``: zero at the supervision
    boundary, one at zero gain.  A non-positive ``prev_gain`` ends the phase.
    """
    if not prev_gain > 0:
        return 1.0
    bound = theta * prev_gain
    if gain >= bound:
        return 0.0
    if bound <= 0:
        return 1.0
    return min(1.0, max(0.0, 1.0 - gain / bound))


def stop_criterion(values: Sequence[float], tau: float) -> bool:
    """Ratio test on the last three objective values.

    Fires when ``|S[-3]/S[-2] - S[-2]/S[-1]| <= tau``.  Disabled (False) with
    fewer than three values or any non-positive value among them.
    """
    if tau < 0:
        raise ContractError("tau must be non-negative")
    if len(values) < 3:
        return False
    a, b, c = values[-3], values[-2], values[-1]
    if min(a, b, c) <= 0:
        return False
    return abs(a / b - b / c) <= tau


@dataclass(frozen=True)
class BoundParameters:
    alpha: float
    gamma: float
    beta: float | Sequence[float]
    k: int

    def betas(self) -> list[float]:
        if isinstance(self.beta, (int, float)):
            return [float(self.beta)] * self.k
        betas = [float(b) for b in self.beta]
        if len(betas) != self.k:
            raise ContractError("need one beta per step")
        return betas


def _lam_mu(alpha, beta, gamma, k):
    lam = alpha * beta / k
    mu = lam * (k / (alpha * beta) - 1 - k * gamma)
    return lam, mu


def _validate(p: BoundParameters):
    if p.k < 1:
        raise ContractError("k must be >= 1")
    for b in p.betas():
        if not (0 < p.alpha <= 1 and 0 < b <= 1):
            raise ContractError("alpha and beta must lie in (0, 1]")
        if p.alpha * b < p.gamma:
            raise ContractError("requires alpha * beta >= gamma")
    if p.gamma < 0:
        raise ContractError("gamma must be non-negative")


def bound_recurrence(params: BoundParameters) -> float:
    """``lam_k + mu_k lam_{k-1} + mu_k mu_{k-1} lam_{k-2} + ... + mu_k..mu_2 lam_1``."""
    _validate(params)
    k, total, prod = params.k, 0.0, 1.0
    coeffs = [_lam_mu(params.alpha, b, params.gamma, k) for b in params.betas()]
    for lam, mu in reversed(coeffs):
        total += prod * lam
        prod *= mu
    return total


def theoretical_bound(params: BoundParameters) -> float:
    """Guaranteed fraction of the optimum for constant ``beta``.

    Closed form ``lam (1 - mu^k) / (1 - mu)``; the ``mu == 1`` limit is
    ``lam * k``.  A per-step beta sequence falls back to the recurrence.
    """
    _validate(params)
    if not isinstance(params.beta, (int, float)):
        return bound_recurrence(params)
    lam, mu = _lam_mu(params.alpha, params.beta, params.gamma, params.k)
    if math.isclose(mu, 1.0, rel_tol=0, abs_tol=1e-15):
        return lam * params.k
    return lam * (1 - mu**params.k) / (1 - mu)


def classical_bound(k: int) -> float:
    return 1 - (1 - 1 / k) ** k
