"""Per-position categorical distribution over encoding options.

Estimated empirically from an archive (each position's option frequencies)
and sampled during supernet adaptation.  Row i has one probability per
option value at position i, indexed by the option code itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .encoding import SearchSpaceConfig, DEFAULT_SPACE, repair_skips


def option_counts(space: SearchSpaceConfig) -> list[int]:
    """Number of option values (including 0 where skippable) per position."""
    counts = [len(space.resolutions), len(space.width_multipliers)]
    for pos in range(2, space.genome_length):
        counts.append(space.n_codes + 1)
    return counts


@dataclass
class AdaptationDistribution:
    probs: list[np.ndarray]  # probs[i][j] = p(position i takes value j)

    def __post_init__(self):
        for i, row in enumerate(self.probs):
            row = np.asarray(row, dtype=float)
            if (row < 0).any() or abs(row.sum() - 1.0) > 1e-9:
                raise ValueError(f"position {i}: probabilities must be a distribution")
            self.probs[i] = row

    def as_rows(self) -> list[list[float]]:
        return [row.tolist() for row in self.probs]

    @classmethod
    def from_rows(cls, rows) -> "AdaptationDistribution":
        return cls(probs=[np.asarray(r, dtype=float) for r in rows])


def estimate_distribution(
    genomes,
    space: SearchSpaceConfig = DEFAULT_SPACE,
) -> AdaptationDistribution:
    """Empirical per-position option frequencies over the archive genomes."""
    G = np.asarray(genomes, dtype=np.int64)
    if G.ndim != 2 or len(G) == 0:
        raise ValueError("need a non-empty genome matrix")
    probs = []
    for pos, n_opts in enumerate(option_counts(space)):
        counts = np.bincount(G[:, pos], minlength=n_opts).astype(float)
        probs.append(counts / len(G))
    return AdaptationDistribution(probs=probs)


def uniform_distribution(space: SearchSpaceConfig = DEFAULT_SPACE) -> AdaptationDistribution:
    """Uniform over every position's full valid option range."""
    probs = []
    for pos, n_opts in enumerate(option_counts(space)):
        row = np.ones(n_opts)
        if pos >= 2 and not space.skippable(pos):
            row[0] = 0.0  # mandatory slots cannot skip
        probs.append(row / row.sum())
    return AdaptationDistribution(probs=probs)


def sample_subnet_batch(
    dist: AdaptationDistribution,
    n: int,
    rng: np.random.Generator,
    space: SearchSpaceConfig = DEFAULT_SPACE,
) -> np.ndarray:
    """Draw ``n`` genomes: independent categorical per position, then skip repair."""
    G = np.empty((n, space.genome_length), dtype=np.int64)
    for pos, row in enumerate(dist.probs):
        G[:, pos] = rng.choice(len(row), size=n, p=row)
    for i in range(n):
        G[i] = repair_skips(G[i], space)
    return G


def sample_subnet(
    dist: AdaptationDistribution,
    rng: np.random.Generator,
    space: SearchSpaceConfig = DEFAULT_SPACE,
) -> np.ndarray:
    return sample_subnet_batch(dist, 1, rng, space)[0]
