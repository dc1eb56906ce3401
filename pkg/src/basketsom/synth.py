"""Seeded synthetic basket data with planted co-purchase groups.

Also holds deliberately naive counting oracles used to cross-check the
vectorized statistics in :mod:`basketsom.analysis`.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date

import numpy as np

from .errors import EmptyInputError
from .ingest import Basket, ProductCatalog

__all__ = [
    "PlantedGroup",
    "SynthSpec",
    "default_spec",
    "generate",
    "synthetic_catalog",
    "oracle_pair_counts",
    "oracle_support",
    "oracle_confidence",
]

SYNTH_DATE = date(2011, 9, 1)


@dataclass(frozen=True)
class PlantedGroup:
    products: tuple[int, ...]
    p_in: float


@dataclass(frozen=True)
class SynthSpec:
    n_baskets: int
    n_products: int
    groups: tuple[PlantedGroup, ...]
    p_bg: float = 0.05
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "groups", tuple(self.groups))
        if self.n_baskets < 1 or self.n_products < 1:
            raise ValueError("n_baskets and n_products must be positive")
        if not self.groups:
            raise ValueError("at least one planted group is required")
        for g in self.groups:
            if not g.products or any(not 0 <= j < self.n_products for j in g.products):
                raise ValueError(f"group products {g.products} outside [0, {self.n_products})")
            if not 0 <= self.p_bg < g.p_in <= 1:
                raise ValueError("need 0 <= p_bg < p_in <= 1 for every group")
        if self.p_bg == 0 and any(g.p_in == 0 for g in self.groups):
            raise ValueError("generator could never produce a non-empty basket")


def default_spec(seed=0, n_baskets=5000, n_products=30, p_in=0.8, p_bg=0.05) -> SynthSpec:
    """Three planted groups of three products, spread across the catalog.

    Loosely shaped after three dominant retail groups: a cooking staples
    trio, a dairy trio and a soft-drinks trio.
    """
    third = n_products // 3
    groups = tuple(
        PlantedGroup(tuple(range(k * third, k * third + 3)), p_in) for k in range(3)
    )
    return SynthSpec(n_baskets, n_products, groups, p_bg, seed)


def synthetic_catalog(n_products: int) -> ProductCatalog:
    """Names ``P00``, ``P01``, ... whose lexicographic order is the column order."""
    width = max(2, len(str(n_products - 1)))
    return ProductCatalog(tuple(f"P{j:0{width}d}" for j in range(n_products)))


def generate(spec: SynthSpec) -> list[Basket]:
    """Draw ``spec.n_baskets`` baskets; each picks one group uniformly.

    Group members are included with the group's ``p_in``, every other
    product with ``p_bg``; an empty draw is redrawn with the same group.
    """
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    width = len(str(spec.n_baskets))
    probs = []
    for g in spec.groups:
        p = np.full(spec.n_products, spec.p_bg)
        p[list(g.products)] = g.p_in
        probs.append(p)

    baskets = []
    for i in range(spec.n_baskets):
        p = probs[rng.integers(len(probs))]
        vec = rng.random(spec.n_products) < p
        while not vec.any():
            vec = rng.random(spec.n_products) < p
        baskets.append(Basket(i + 1, f"synth-{i + 1:0{width}d}", SYNTH_DATE, vec.astype(np.uint8)))
    return baskets


def oracle_pair_counts(baskets) -> dict[tuple[int, int], int]:
    """Exhaustive co-occurrence counts for every pair ``i <= j``.

    The diagonal ``(i, i)`` holds the single-product count. Pure Python
    loops on purpose; this is the reference the fast paths are checked
    against.
    """
    rows = [[int(v) for v in b.vector] for b in baskets]
    if not rows:
        raise EmptyInputError("no baskets")
    d = len(rows[0])
    counts = {(i, j): 0 for i in range(d) for j in range(i, d)}
    for row in rows:
        for i in range(d):
            if row[i] != 1:
                continue
            for j in range(i, d):
                if row[j] == 1:
                    counts[(i, j)] += 1
    return counts


def oracle_support(counts, n_baskets, i):
    return counts[(i, i)] / n_baskets


def oracle_confidence(counts, a, b):
    pair = counts[(min(a, b), max(a, b))]
    return pair / counts[(a, a)]
