"""Variation and mating-selection operators on integer genomes."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .encoding import SearchSpaceConfig, DEFAULT_SPACE, repair_skips


@dataclass(frozen=True)
class VariationConfig:
    crossover_prob: float = 0.9
    mutation_prob: float = 0.1
    eta_m: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.crossover_prob <= 1.0:
            raise ValueError("crossover_prob must be in [0, 1]")
        if not 0.0 <= self.mutation_prob <= 1.0:
            raise ValueError("mutation_prob must be in [0, 1]")
        if self.eta_m <= 0.0:
            raise ValueError("eta_m must be positive")


def polynomial_step(value: float, low: float, high: float, eta: float, u: float) -> float:
    """Parent-centric polynomial perturbation (continuous form).

    u <= 0.5 pulls toward the lower bound, u > 0.5 toward the upper; u = 0.5
    returns the value unchanged.  The distribution index eta concentrates
    offspring near the parent as it grows.
    """
    if u <= 0.5:
        return value + ((2.0 * u) ** (1.0 / (1.0 + eta)) - 1.0) * (value - low)
    return value + (1.0 - (2.0 * (1.0 - u)) ** (1.0 / (1.0 + eta))) * (high - value)


def _round_away_from_parent(mutated: float, parent: int) -> int:
    # nearest integer; exact .5 offsets resolve away from the parent so a
    # mutation event cannot silently round back onto it
    offset = mutated - parent
    return parent + int(math.trunc(offset + math.copysign(0.5, offset)))


def mutate(
    genome,
    p_m: float,
    eta_m: float,
    rng: np.random.Generator,
    space: SearchSpaceConfig = DEFAULT_SPACE,
) -> np.ndarray:
    """Integer polynomial mutation, position-wise with probability p_m.

    Bounds come from each position's option-list extent (skippable slots
    reach down to 0).  The result is repaired for skip contiguity.
    """
    g = np.array(genome, dtype=np.int64)
    low, high = space.position_bounds()
    for pos in range(space.genome_length):
        if rng.random() >= p_m:
            continue
        u = rng.random()
        moved = polynomial_step(float(g[pos]), float(low[pos]), float(high[pos]), eta_m, u)
        g[pos] = min(max(_round_away_from_parent(moved, int(g[pos])), low[pos]), high[pos])
    return repair_skips(g, space)


def crossover(
    parent_a,
    parent_b,
    p_c: float,
    rng: np.random.Generator,
    space: SearchSpaceConfig = DEFAULT_SPACE,
) -> tuple[np.ndarray, np.ndarray]:
    """Uniform crossover: each position inherited from either parent with
    equal probability, the two children taking complementary picks.

    With probability 1 - p_c the children are plain copies.  Positions where
    the parents agree are always preserved; children are repaired for skip
    contiguity afterwards.
    """
    a = np.array(parent_a, dtype=np.int64)
    b = np.array(parent_b, dtype=np.int64)
    if rng.random() >= p_c:
        return a, b
    take_a = rng.random(space.genome_length) < 0.5
    child_a = np.where(take_a, a, b)
    child_b = np.where(take_a, b, a)
    return repair_skips(child_a, space), repair_skips(child_b, space)


def mutation_offsets(
    value: int,
    low: int,
    high: int,
    eta_m: float,
    n: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Vectorized integer offsets produced by n guaranteed mutation events.

    Matches the per-position path of :func:`mutate` (polynomial step, round
    half away from the parent, clip to bounds); used for spread studies.
    """
    u = rng.random(n)
    lo_branch = value + ((2.0 * u) ** (1.0 / (1.0 + eta_m)) - 1.0) * (value - low)
    hi_branch = value + (
        1.0 - (2.0 * (1.0 - u)) ** (1.0 / (1.0 + eta_m))
    ) * (high - value)
    moved = np.where(u <= 0.5, lo_branch, hi_branch)
    offset = moved - value
    rounded = value + np.trunc(offset + np.copysign(0.5, offset))
    return np.clip(rounded, low, high).astype(np.int64) - value


def binary_tournament(
    ranks: np.ndarray,
    distances: np.ndarray,
    rng: np.random.Generator,
) -> int:
    """Pick the index of a mating parent from annotated population members.

    Two distinct members are drawn uniformly; lower non-domination rank
    wins, ties fall to the smaller reference-direction distance, and exact
    ties resolve uniformly at random.
    """
    n = len(ranks)
    if n < 2:
        raise ValueError("tournament needs a population of at least 2")
    i, j = rng.choice(n, size=2, replace=False)
    if ranks[i] != ranks[j]:
        return int(i if ranks[i] < ranks[j] else j)
    if distances[i] != distances[j]:
        return int(i if distances[i] < distances[j] else j)
    return int(i if rng.random() < 0.5 else j)
