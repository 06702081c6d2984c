"""Synthetic set functions used as search oracles.

Coverage and facility location are textbook monotone submodular families.
The attribution surrogate stands in for a detector-backed region scorer: a
saliency field with a planted target box, tiled into regions, scored by a
clue term (transformed in-box evidence) plus a collaboration term.  Its
functional form is our own construction; no real model sits behind it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import ContractError, ScoreOracle, canonical

SUBMODULAR = "submodular"
SUPERMODULAR = "supermodular"


class _Objective:
    """Shared plumbing: each family implements ``value`` on a sorted tuple."""

    family = "objective"
    cost_factor = 1

    @property
    def m(self) -> int:
        raise NotImplementedError

    def value(self, subset: tuple[int, ...]) -> float:
        raise NotImplementedError

    def __call__(self, subset) -> float:
        return self.value(canonical(subset))

    def oracle(self, cost_factor: int | None = None) -> ScoreOracle:
        cf = self.cost_factor if cost_factor is None else cost_factor
        return ScoreOracle(self.value, self.m, cost_factor=cf, name=self.family)

    def areas(self) -> tuple[float, ...]:
        return (1.0,) * self.m


@dataclass(frozen=True, eq=False)
class ModularObjective(_Objective):
    weights: tuple[float, ...]
    family = "modular"

    @property
    def m(self) -> int:
        return len(self.weights)

    def value(self, subset):
        return math.fsum(self.weights[i] for i in subset)


@dataclass(frozen=True, eq=False)
class CoverageInstance(_Objective):
    """``F(S)`` = total weight of universe items covered by ``S``."""

    covers: tuple[frozenset[int], ...]
    item_weights: tuple[float, ...]
    family = "coverage"

    @property
    def m(self) -> int:
        return len(self.covers)

    @property
    def universe_size(self) -> int:
        return len(self.item_weights)

    def value(self, subset):
        items: set[int] = set()
        for i in subset:
            items |= self.covers[i]
        return math.fsum(self.item_weights[j] for j in sorted(items))

    def incidence(self) -> np.ndarray:
        mat = np.zeros((self.m, self.universe_size), dtype=np.int64)
        for i, c in enumerate(self.covers):
            mat[i, sorted(c)] = 1
        return mat


@dataclass(frozen=True, eq=False)
class FacilityLocationInstance(_Objective):
    """``F(S) = sum_c max_{e in S} affinity[c, e]``, zero on the empty set."""

    affinity: np.ndarray
    family = "facility"

    @property
    def m(self) -> int:
        return self.affinity.shape[1]

    @property
    def client_count(self) -> int:
        return self.affinity.shape[0]

    def value(self, subset):
        if not subset:
            return 0.0
        return float(self.affinity[:, list(subset)].max(axis=1).sum())


@dataclass(frozen=True, eq=False)
class SupermodularStressor(_Objective):
    """``(sum w / sum W) ** p`` with ``p > 1``: increasing returns."""

    weights: tuple[float, ...]
    exponent: float = 2.0
    family = "supermodular"

    def __post_init__(self):
        if self.exponent <= 1:
            raise ContractError("stressor exponent must exceed 1")

    @property
    def m(self) -> int:
        return len(self.weights)

    def value(self, subset):
        total = math.fsum(self.weights)
        return (math.fsum(self.weights[i] for i in subset) / total) ** self.exponent


@dataclass(frozen=True, eq=False)
class AttributionSurrogate(_Objective):
    """Planted-box region scorer.

    ``F(S) = clue_weight * g(x) + colla_weight * (1 - x_c)`` where ``x`` is
    the share of in-box saliency held by ``S``, ``x_c`` the share held by its
    complement, and ``g`` is ``sqrt`` (submodular mode) or squaring
    (supermodular mode).  Saliency outside the box is a distractor: it is
    present in the field but never moves the score.  Each evaluation is
    billed two forwards (clue pass plus removal pass).
    """

    grid: np.ndarray
    region_map: np.ndarray
    target_box: tuple[int, int, int, int]
    curvature: str = SUBMODULAR
    clue_weight: float = 0.5
    colla_weight: float = 0.5
    noise_seed: int = 0
    family = "surrogate"
    cost_factor = 2

    def __post_init__(self):
        if self.curvature not in (SUBMODULAR, SUPERMODULAR):
            raise ContractError(f"unknown curvature {self.curvature!r}")
        m = int(self.region_map.max()) + 1
        r0, c0, r1, c1 = self.target_box
        inside = np.zeros(self.grid.shape, dtype=bool)
        inside[r0:r1, c0:c1] = True
        flat = self.region_map.ravel()
        box_mass = np.bincount(flat, weights=(self.grid * inside).ravel(), minlength=m)
        object.__setattr__(self, "_box_share", box_mass / box_mass.sum())
        object.__setattr__(self, "_areas", tuple(float(a) for a in np.bincount(flat, minlength=m)))

    @property
    def m(self) -> int:
        return len(self._areas)

    def areas(self):
        return self._areas

    def _transform(self, x: float) -> float:
        x = min(max(x, 0.0), 1.0)
        return math.sqrt(x) if self.curvature == SUBMODULAR else x * x

    def clue(self, subset) -> float:
        return self._transform(math.fsum(self._box_share[i] for i in subset))

    def colla(self, subset) -> float:
        rest = 1.0 - math.fsum(self._box_share[i] for i in subset)
        return 1.0 - min(max(rest, 0.0), 1.0)

    def value(self, subset):
        return self.clue_weight * self.clue(subset) + self.colla_weight * self.colla(subset)


def _check_count(name, value):
    if int(value) != value or value < 1:
        raise ContractError(f"{name} must be a positive integer, got {value!r}")


def make_modular(weights: Sequence[float]) -> ModularObjective:
    return ModularObjective(tuple(float(w) for w in weights))


def make_coverage(seed: int, m: int, universe: int, density: float = 0.2,
                  integer_weights: bool = True) -> CoverageInstance:
    """Random coverage instance; every element covers at least one item.

    Integer item weights keep all sums exact, so submodularity checks and
    greedy/lazy comparisons are free of rounding noise.
    """
    _check_count("m", m)
    _check_count("universe", universe)
    if not 0 < density <= 1:
        raise ContractError("density must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    hits = rng.random((m, universe)) < density
    for i in range(m):
        if not hits[i].any():
            hits[i, rng.integers(universe)] = True
    if integer_weights:
        weights = rng.integers(1, 10, size=universe).astype(float)
    else:
        weights = rng.uniform(0.1, 1.0, size=universe)
    covers = tuple(frozenset(np.flatnonzero(row).tolist()) for row in hits)
    return CoverageInstance(covers, tuple(weights.tolist()))


def make_facility_location(seed: int, m: int, clients: int = 20) -> FacilityLocationInstance:
    _check_count("m", m)
    _check_count("clients", clients)
    rng = np.random.default_rng(seed)
    # dyadic affinities: exact float sums
    aff = rng.integers(0, 64, size=(clients, m)).astype(float) / 64.0
    return FacilityLocationInstance(aff)


def make_stressor(seed: int, m: int, exponent: float = 2.0) -> SupermodularStressor:
    """Near-uniform weights under a convex power.

    Weights sit in ``[1, 1 + (p - 1) / (2m)]``: narrow enough that greedy's
    gain sequence keeps increasing all the way to ``k = m``.
    """
    _check_count("m", m)
    if exponent <= 1:
        raise ContractError("stressor exponent must exceed 1")
    rng = np.random.default_rng(seed)
    spread = min(exponent - 1, 1.0) / (2 * m)
    return SupermodularStressor(tuple((1 + spread * rng.random(m)).tolist()), exponent)


def tile_regions(shape: tuple[int, int], m: int) -> np.ndarray:
    """Partition a grid into ``m`` rectangular tiles.

    Uses ``rows`` bands with ``rows`` nearest to sqrt(m); the ``m`` tiles are
    spread over the bands as evenly as possible so every region is non-empty.
    """
    h, w = shape
    if m > h * w:
        raise ContractError("more regions than grid cells")
    rows = max(1, min(h, round(math.sqrt(m))))
    while rows > 1 and math.ceil(m / rows) > w:
        rows -= 1
    if math.ceil(m / rows) > w:
        raise ContractError("grid too narrow for the requested region count")
    per_row = [m // rows + (1 if r < m % rows else 0) for r in range(rows)]
    row_edges = np.linspace(0, h, rows + 1).round().astype(int)
    region_map = np.empty((h, w), dtype=np.int64)
    label = 0
    for r in range(rows):
        col_edges = np.linspace(0, w, per_row[r] + 1).round().astype(int)
        for c in range(per_row[r]):
            region_map[row_edges[r]:row_edges[r + 1], col_edges[c]:col_edges[c + 1]] = label
            label += 1
    return region_map


def default_box(shape: tuple[int, int], seed: int, frac: float = 0.2) -> tuple[int, int, int, int]:
    """Seeded box covering roughly ``frac`` of each grid dimension."""
    h, w = shape
    rng = np.random.default_rng([seed, 1])
    bh, bw = max(1, round(h * frac)), max(1, round(w * frac))
    r0 = int(rng.integers(0, h - bh + 1))
    c0 = int(rng.integers(0, w - bw + 1))
    return (r0, c0, r0 + bh, c0 + bw)


def make_surrogate(seed: int, m: int, grid: tuple[int, int] = (40, 40),
                   target_box: tuple[int, int, int, int] | None = None,
                   curvature: str = SUBMODULAR, clue_weight: float = 0.5,
                   colla_weight: float = 0.5, box_boost: float = 10.0,
                   box_frac: float = 0.2) -> AttributionSurrogate:
    """Build a planted-target surrogate with ``m`` tiled regions.

    The saliency field is positive noise, multiplied by ``box_boost`` inside
    the target box.  Without an explicit box, a seeded one spanning
    ``box_frac`` of each grid side is placed: a small object whose score
    saturates once its handful of regions is revealed.
    """
    _check_count("m", m)
    h, w = grid
    if target_box is None:
        target_box = default_box(grid, seed, box_frac)
    r0, c0, r1, c1 = target_box
    if not (0 <= r0 < r1 <= h and 0 <= c0 < c1 <= w):
        raise ContractError(f"target box {target_box} is empty or outside the {h}x{w} grid")
    rng = np.random.default_rng(seed)
    field = rng.gamma(shape=2.0, scale=1.0, size=(h, w)) + 1e-3
    field[r0:r1, c0:c1] *= box_boost
    region_map = tile_regions(grid, m)
    return AttributionSurrogate(field, region_map, tuple(int(v) for v in target_box),
                                curvature, clue_weight, colla_weight, seed)


# ---------------------------------------------------------------- diagnostics

@dataclass(frozen=True)
class CurvatureDiagnosis:
    submodular_fraction: float
    supermodular_fraction: float
    samples: int


def check_submodularity(oracle, m: int, samples: int = 1000, seed: int = 0,
                        atol: float = 1e-9) -> CurvatureDiagnosis:
    """Classify random triples ``A <= B``, ``x`` outside ``B`` by curvature.

    Ties count toward both fractions.  ``oracle`` may be a ScoreOracle or any
    callable on index tuples.
    """
    if samples < 1:
        raise ContractError("samples must be >= 1")
    if m < 1:
        raise ContractError("m must be >= 1")
    rng = np.random.default_rng(seed)
    sub = sup = 0
    for _ in range(samples):
        x = int(rng.integers(m))
        others = np.array([i for i in range(m) if i != x], dtype=np.intp)
        in_b = rng.random(len(others)) < rng.random()
        b = others[in_b]
        a = b[rng.random(len(b)) < rng.random()]
        a, b = canonical(a), canonical(b)
        da = oracle(a + (x,)) - oracle(a)
        db = oracle(b + (x,)) - oracle(b)
        if da >= db - atol:
            sub += 1
        if da <= db + atol:
            sup += 1
    return CurvatureDiagnosis(sub / samples, sup / samples, samples)


def subset_table(fn, m: int) -> np.ndarray:
    """``F`` on every subset, indexed by bitmask (bit i = element i)."""
    if m > 16:
        raise ContractError("exhaustive tables are limited to m <= 16")
    table = np.empty(1 << m)
    for mask in range(1 << m):
        table[mask] = fn(tuple(i for i in range(m) if mask >> i & 1))
    return table


def exhaustive_check(fn, m: int, atol: float = 1e-9) -> dict:
    """Check monotonicity and curvature over all ``(A <= B, x)`` triples."""
    table = subset_table(fn, m)
    masks = np.arange(1 << m)
    monotone = True
    # gains[x][mask] for masks without x
    gains = []
    for x in range(m):
        bit = 1 << x
        without = masks[(masks & bit) == 0]
        g = np.full(1 << m, np.nan)
        g[without] = table[without | bit] - table[without]
        if (g[without] < -atol).any():
            monotone = False
        gains.append(g)
    total = sub = sup = 0
    for b in range(1 << m):
        sub_a = [a for a in _submasks(b)]
        for x in range(m):
            if b >> x & 1:
                continue
            gb = gains[x][b]
            ga = gains[x][sub_a]
            total += len(ga)
            sub += int((ga >= gb - atol).sum())
            sup += int((ga <= gb + atol).sum())
    return {
        "monotone": monotone,
        "triples": total,
        "submodular_fraction": sub / total if total else 1.0,
        "supermodular_fraction": sup / total if total else 1.0,
    }


def is_monotone_submodular(fn, m: int, atol: float = 1e-9) -> bool:
    """Exhaustive test via the local exchange condition.

    ``F(A + x) - F(A) >= F(A + y + x) - F(A + y)`` for every ``A`` and
    distinct ``x, y`` outside it is equivalent to full diminishing returns.
    """
    table = subset_table(fn, m)
    masks = np.arange(1 << m)
    for x in range(m):
        bx = 1 << x
        without_x = masks[(masks & bx) == 0]
        gx = table[without_x | bx] - table[without_x]
        if (gx < -atol).any():
            return False
        for y in range(m):
            by = 1 << y
            if y == x:
                continue
            a = without_x[(without_x & by) == 0]
            lo = table[a | bx] - table[a]
            hi = table[a | by | bx] - table[a | by]
            if (lo < hi - atol).any():
                return False
    return True


def _submasks(mask: int):
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask
