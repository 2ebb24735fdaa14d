"""Shared builders for seeded instances and constraint systems."""

from __future__ import annotations

import numpy as np
import pytest

from submax import (
    GroundSet,
    IntersectionSystem,
    PartitionMatroid,
    Rng,
    SyntheticSpec,
    UniformMatroid,
    generate,
)


def make_objective(kind: str, n: int, seed: int, **kw):
    """Fresh counted oracle + ground for a synthetic objective."""
    spec = SyntheticSpec(kind=kind, n=n, seed=seed, **kw)
    return generate(spec)


def make_partition_intersection(n: int, k: int, seed: int) -> IntersectionSystem:
    """Intersection of k random partition matroids on n elements: a
    k-extendible system (declared k = k)."""
    gen = Rng(seed, 17).generator
    ground = GroundSet(n)
    parts = []
    for j in range(k):
        n_blocks = int(gen.integers(2, max(3, n // 2 + 1)))
        assignment = gen.integers(0, n_blocks, size=n)
        block_of = {e: f"p{j}b{int(assignment[e])}" for e in range(n)}
        capacities = {
            f"p{j}b{b}": int(gen.integers(1, 4)) for b in range(n_blocks)
        }
        parts.append(PartitionMatroid(ground, block_of, capacities))
    return IntersectionSystem(parts)


def make_uniform_partition_system(n: int, m: int, seed: int, extra_parts: int = 1):
    """Uniform matroid of rank m intersected with `extra_parts` partition
    matroids -> a (1 + extra_parts)-extendible system."""
    gen = Rng(seed, 23).generator
    ground = GroundSet(n)
    comps = [UniformMatroid(ground, m)]
    for j in range(extra_parts):
        n_blocks = max(2, n // 3)
        assignment = gen.integers(0, n_blocks, size=n)
        block_of = {e: f"q{j}b{int(assignment[e])}" for e in range(n)}
        capacities = {f"q{j}b{b}": int(gen.integers(1, 4)) for b in range(n_blocks)}
        comps.append(PartitionMatroid(ground, block_of, capacities))
    return IntersectionSystem(comps)


@pytest.fixture
def rng():
    return Rng(2024, 0)
