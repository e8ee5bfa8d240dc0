"""Benchmark and ablation runners used by the CLI and experiment scripts.

These reproduce the algorithm-level comparisons at desk scale: selection
methods on the scalable DTLZ1 problem, online vs offline surrogate
modelling on the banana function, single-objective operator ablations on
the synthetic supernet landscape, and a uniform-random search baseline.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

from .encoding import SearchSpaceConfig, DEFAULT_SPACE, genome_key, sample_uniform
from .evaluators import DTLZ1_K, dtlz1_batch
from .metrics import igd
from .operators import VariationConfig, binary_tournament, crossover, mutate, polynomial_step
from .selection import (
    das_dennis,
    direction_count,
    non_dominated_sort,
    survive,
)

# Das-Dennis partition choices keeping direction counts (and with them the
# population, rounded up to a multiple of 4 with a floor of 92) in a range
# that runs in minutes at 400 generations.
DTLZ1_PARTITIONS = {3: 12, 5: 5, 10: 2, 15: 2}
DTLZ1_REFERENCE_PARTITIONS = {3: 30, 5: 8, 10: 3, 15: 3}
DTLZ1_ETA_M = 20.0
DTLZ1_P_C = 0.9


def dtlz1_population_size(m: int) -> int:
    dirs = direction_count(m, DTLZ1_PARTITIONS[m])
    return max(92, -(-dirs // 4) * 4)


def dtlz1_reference_front(m: int) -> np.ndarray:
    """Uniform sample of the true front (the simplex with coordinate sum 0.5)."""
    return 0.5 * das_dennis(m, DTLZ1_REFERENCE_PARTITIONS[m])


def _uniform_crossover_real(a, b, rng):
    take = rng.random(len(a)) < 0.5
    return np.where(take, a, b), np.where(take, b, a)


def _pm_real(x, p_m, eta, rng):
    y = x.copy()
    for i in range(len(y)):
        if rng.random() >= p_m:
            continue
        y[i] = min(max(polynomial_step(y[i], 0.0, 1.0, eta, rng.random()), 0.0), 1.0)
    return y


def _survive_domination_only(F, n, rng):
    """Whole fronts, then uniform random truncation inside the split front."""
    picked: list[int] = []
    for front in non_dominated_sort(F):
        if len(picked) + len(front) <= n:
            picked.extend(int(i) for i in front)
        else:
            extra = rng.choice(front, size=n - len(picked), replace=False)
            picked.extend(int(i) for i in extra)
            break
    return np.array(picked, dtype=np.int64)


def dtlz1_run(m: int, method: str, generations: int, seed_rng: np.random.Generator) -> float:
    """One GA run on DTLZ1; returns the final population's IGD.

    Both survival methods share the identical variation pipeline (uniform
    crossover, continuous polynomial mutation with p_m = 1/n_var); only the
    truncation differs.
    """
    if method not in ("reference", "domination"):
        raise ValueError(f"unknown method {method!r}")
    n_var = m + DTLZ1_K - 1
    pop_size = dtlz1_population_size(m)
    directions = das_dennis(m, DTLZ1_PARTITIONS[m])
    reference = dtlz1_reference_front(m)
    p_m = 1.0 / n_var

    X = seed_rng.random((pop_size, n_var))
    F = dtlz1_batch(X, m)
    for _ in range(generations):
        order = seed_rng.permutation(pop_size)
        children = []
        for i in range(0, pop_size - 1, 2):
            a, b = X[order[i]], X[order[i + 1]]
            if seed_rng.random() < DTLZ1_P_C:
                a, b = _uniform_crossover_real(a, b, seed_rng)
            children.append(_pm_real(a, p_m, DTLZ1_ETA_M, seed_rng))
            children.append(_pm_real(b, p_m, DTLZ1_ETA_M, seed_rng))
        Q = np.stack(children[:pop_size])
        RX = np.vstack([X, Q])
        RF = np.vstack([F, dtlz1_batch(Q, m)])
        if method == "reference":
            idx = survive(RF, pop_size, directions, seed_rng).indices
        else:
            idx = _survive_domination_only(RF, pop_size, seed_rng)
        X, F = RX[idx], RF[idx]
    return igd(F, reference)


@dataclass
class SingleObjectiveResult:
    best_accuracy: float
    best_per_generation: list[float]
    evaluations: int
    evaluations_to_target: int | None  # None if the target was never reached


def single_objective_search(
    evaluate_fn,
    variation: VariationConfig,
    rng: np.random.Generator,
    population_size: int = 50,
    generations: int = 100,
    target: float | None = None,
    space: SearchSpaceConfig = DEFAULT_SPACE,
) -> SingleObjectiveResult:
    """Plain elitist GA maximizing ``evaluate_fn`` over genomes.

    Parents are picked by binary tournament on fitness rank; survival is
    truncation of the merged population.  Used by the operator ablations.
    """
    pop = [sample_uniform(space, rng) for _ in range(population_size)]
    fit = np.asarray(evaluate_fn(np.stack(pop)), dtype=float)
    evals = population_size
    hit = None
    if target is not None and fit.max() >= target:
        hit = int(np.argmax(fit >= target)) + 1
    best_history = [float(fit.max())]

    for _ in range(generations):
        if target is not None and hit is not None:
            break
        ranks = rankdata(-fit, method="min")
        zeros = np.zeros(len(pop))
        offspring = []
        while len(offspring) < population_size:
            ia = binary_tournament(ranks, zeros, rng)
            ib = binary_tournament(ranks, zeros, rng)
            for child in crossover(pop[ia], pop[ib], variation.crossover_prob, rng, space):
                if len(offspring) < population_size:
                    offspring.append(
                        mutate(child, variation.mutation_prob, variation.eta_m, rng, space)
                    )
        off_fit = np.asarray(evaluate_fn(np.stack(offspring)), dtype=float)
        if target is not None and hit is None and off_fit.max() >= target:
            hit = evals + int(np.argmax(off_fit >= target)) + 1
        evals += population_size
        merged = pop + offspring
        merged_fit = np.concatenate([fit, off_fit])
        keep = np.argsort(-merged_fit, kind="stable")[:population_size]
        pop = [merged[i] for i in keep]
        fit = merged_fit[keep]
        best_history.append(float(fit.max()))

    return SingleObjectiveResult(
        best_accuracy=float(fit.max()),
        best_per_generation=best_history,
        evaluations=evals,
        evaluations_to_target=hit,
    )


def random_search_genomes(
    n: int,
    rng: np.random.Generator,
    space: SearchSpaceConfig = DEFAULT_SPACE,
) -> list[np.ndarray]:
    """n distinct uniform genomes (the random-search baseline's samples)."""
    out: list[np.ndarray] = []
    seen: set[tuple] = set()
    while len(out) < n:
        g = sample_uniform(space, rng)
        if genome_key(g) not in seen:
            seen.add(genome_key(g))
            out.append(g)
    return out
