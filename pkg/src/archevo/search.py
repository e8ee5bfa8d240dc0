"""Surrogate-driven inner evolutionary search.

One call runs a complete generational loop: parents come from the archive
(top slice under survival selection on predicted objectives), offspring are
bred by tournament + uniform crossover + polynomial mutation, and the
merged population is truncated back to size each generation.  Accuracy is
predicted; every other objective is computed exactly from the genome.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .encoding import SearchSpaceConfig, DEFAULT_SPACE, genome_key, sample_uniform
from .operators import VariationConfig, binary_tournament, crossover, mutate
from .selection import survive

DUPLICATE_RETRIES = 3


@dataclass
class SearchConfig:
    population_size: int = 100
    generations: int = 100
    variation: VariationConfig = field(default_factory=VariationConfig)

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be at least 2")
        if self.generations < 0:
            raise ValueError("generations must be non-negative")


@dataclass
class EvolveResult:
    genomes: list[np.ndarray]
    objectives: np.ndarray          # predicted-accuracy + exact auxiliaries
    generation_stats: list[dict]


def evolve(
    predictor,
    aux_fns,
    archive_genomes,
    cfg: SearchConfig,
    directions: np.ndarray,
    rng: np.random.Generator,
    space: SearchSpaceConfig = DEFAULT_SPACE,
) -> EvolveResult:
    """Run ``cfg.generations`` generations and return the final parents.

    ``predictor`` must expose ``predict_batch(genomes) -> accuracies``; the
    predicted accuracy is negated into minimization form as the first
    objective.  If the archive is smaller than the population, uniform
    samples fill the initial parent pool.
    """
    k = cfg.population_size
    aux_cache: dict[tuple, tuple] = {}

    def objective_rows(genomes: list[np.ndarray]) -> np.ndarray:
        acc = np.asarray(predictor.predict_batch(np.stack(genomes)), dtype=float)
        rows = np.empty((len(genomes), 1 + len(aux_fns)))
        rows[:, 0] = -acc
        for i, g in enumerate(genomes):
            key = genome_key(g)
            if key not in aux_cache:
                aux_cache[key] = tuple(fn(g) for fn in aux_fns)
            rows[i, 1:] = aux_cache[key]
        return rows

    pool = [np.asarray(g, dtype=np.int64) for g in archive_genomes]
    if not pool:
        raise ValueError("archive must be non-empty")
    seen = {genome_key(g) for g in pool}
    while len(pool) < k:
        g = sample_uniform(space, rng)
        if genome_key(g) not in seen:
            pool.append(g)
            seen.add(genome_key(g))

    objs = objective_rows(pool)
    res = survive(objs, k, directions, rng)
    parents = [pool[i] for i in res.indices]
    parent_objs = objs[res.indices]
    ranks, dists = res.ranks, res.distances

    stats: list[dict] = []

    def record(gen: int):
        front = int((ranks == 0).sum())
        stats.append(
            {
                "generation": gen,
                "best_predicted_accuracy": float(-parent_objs[:, 0].min()),
                "mean_predicted_accuracy": float(-parent_objs[:, 0].mean()),
                "front_size": front,
            }
        )

    record(0)
    for gen in range(1, cfg.generations + 1):
        population_keys = {genome_key(g) for g in parents}
        offspring: list[np.ndarray] = []
        while len(offspring) < k:
            ia = binary_tournament(ranks, dists, rng)
            ib = binary_tournament(ranks, dists, rng)
            children = crossover(
                parents[ia], parents[ib], cfg.variation.crossover_prob, rng, space
            )
            for child in children:
                if len(offspring) >= k:
                    break
                child = mutate(
                    child, cfg.variation.mutation_prob, cfg.variation.eta_m, rng, space
                )
                for _ in range(DUPLICATE_RETRIES):
                    if genome_key(child) not in population_keys:
                        break
                    child = mutate(
                        child, cfg.variation.mutation_prob, cfg.variation.eta_m, rng, space
                    )
                population_keys.add(genome_key(child))
                offspring.append(child)

        merged = parents + offspring
        merged_objs = np.vstack([parent_objs, objective_rows(offspring)])
        res = survive(merged_objs, k, directions, rng)
        parents = [merged[i] for i in res.indices]
        parent_objs = merged_objs[res.indices]
        ranks, dists = res.ranks, res.distances
        record(gen)

    return EvolveResult(genomes=parents, objectives=parent_objs, generation_stats=stats)
