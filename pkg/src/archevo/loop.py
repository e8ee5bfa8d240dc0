"""Outer transfer loop: archive, predictor refresh, search, adaptation.

Each iteration rebuilds the accuracy predictor from the archive, runs the
inner evolutionary search on it, truly evaluates the returned candidates,
truncates the archive back to capacity on true objectives, and hands the
archive's option distribution to the evaluator for adaptation.
"""

from __future__ import annotations

import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .distribution import AdaptationDistribution, estimate_distribution
from .encoding import (
    CostModel,
    DEFAULT_COST,
    DEFAULT_SPACE,
    SearchSpaceConfig,
    genome_key,
    sample_uniform,
)
from .evaluators import Evaluator, aux_objective_fn
from .metrics import MAX_HV_OBJECTIVES, hypervolume
from .operators import VariationConfig
from .rng import rng_for
from .search import SearchConfig, evolve
from .selection import das_dennis, default_partitions, non_dominated, survive
from .surrogate import build_ensemble, spearman


class RunError(RuntimeError):
    """Evaluator or configuration failure; carries the iteration index."""

    def __init__(self, message: str, iteration: int | None = None):
        super().__init__(message)
        self.iteration = iteration


@dataclass
class RunConfig:
    archive_size: int = 300
    iterations: int = 30
    predictor_min_train: int = 100
    ensemble_size: int = 500
    population_size: int = 100
    generations: int = 100
    variation: VariationConfig = field(default_factory=VariationConfig)
    adapt_epochs: int = 5
    objectives: tuple[str, ...] = ("neg_top1", "madds")
    space: SearchSpaceConfig = field(default_factory=lambda: DEFAULT_SPACE)
    cost: CostModel = field(default_factory=lambda: DEFAULT_COST)
    hv_reference: tuple[float, ...] | None = None
    parallel_evals: int = 1

    def __post_init__(self):
        if self.archive_size < 2:
            raise ValueError("archive_size must be at least 2")
        if self.iterations < 0:
            raise ValueError("iterations must be non-negative")
        if self.archive_size < self.predictor_min_train:
            raise ValueError(
                "archive_size must reach predictor_min_train so the first "
                "ensemble has enough true evaluations"
            )
        if self.population_size < 2:
            raise ValueError("population_size must be at least 2")
        if not self.objectives or self.objectives[0] != "neg_top1":
            raise ValueError("first objective must be neg_top1")

    def search_config(self) -> SearchConfig:
        return SearchConfig(
            population_size=self.population_size,
            generations=self.generations,
            variation=self.variation,
        )


@dataclass
class Archive:
    """Deduplicated truly-evaluated genomes, capped at capacity."""

    genomes: list[np.ndarray]
    objectives: np.ndarray
    capacity: int

    def __len__(self) -> int:
        return len(self.genomes)

    def keys(self) -> set[tuple]:
        return {genome_key(g) for g in self.genomes}

    def front_indices(self) -> np.ndarray:
        return non_dominated(self.objectives)

    def as_records(self) -> list[dict]:
        return [
            {"genome": [int(v) for v in g], "objectives": [float(v) for v in o]}
            for g, o in zip(self.genomes, self.objectives)
        ]


@dataclass
class IterationRecord:
    iteration: int
    hypervolume: float
    predictor_spearman: float
    evaluations_cumulative: int
    wall_seconds: float
    archive_genomes: list[list[int]]
    archive_objectives: np.ndarray


@dataclass
class RunHistory:
    hv_reference: tuple[float, ...] | None
    initial_hypervolume: float
    initial_evaluations: int
    records: list[IterationRecord] = field(default_factory=list)

    def csv_rows(self) -> list[dict]:
        return [
            {
                "iteration": r.iteration,
                "archive_hypervolume": r.hypervolume,
                "predictor_spearman": r.predictor_spearman,
                "evaluations_cumulative": r.evaluations_cumulative,
                "wall_seconds": r.wall_seconds,
            }
            for r in self.records
        ]


def evaluate_genomes(evaluator: Evaluator, genomes, parallel: int = 1) -> np.ndarray:
    """Evaluate a batch, optionally splitting it across worker threads."""
    glist = list(genomes)
    if not glist:
        return np.empty((0, evaluator.objective_count))
    if parallel <= 1 or len(glist) < 2:
        return np.atleast_2d(np.asarray(evaluator.evaluate(glist), dtype=float))
    chunks = np.array_split(np.arange(len(glist)), min(parallel, len(glist)))
    with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
        parts = list(pool.map(lambda c: evaluator.evaluate([glist[i] for i in c]), chunks))
    return np.vstack([np.atleast_2d(np.asarray(p, dtype=float)) for p in parts])


def _archive_hypervolume(objectives: np.ndarray, ref) -> float:
    if ref is None or objectives.shape[1] > MAX_HV_OBJECTIVES:
        return float("nan")
    front = objectives[non_dominated(objectives)]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return hypervolume(front, np.asarray(ref, dtype=float))


def default_hv_reference(objectives: np.ndarray) -> tuple[float, ...] | None:
    """Worst corner of the initial sample, nudged so points count fully."""
    if objectives.shape[1] > MAX_HV_OBJECTIVES:
        return None
    worst = objectives.max(axis=0)
    span = objectives.max(axis=0) - objectives.min(axis=0)
    margin = np.maximum(1e-9, 0.01 * span)
    return tuple(float(v) for v in worst + margin)


def run(evaluator: Evaluator, cfg: RunConfig, seed: int) -> tuple[Archive, RunHistory]:
    """Run the full transfer loop; deterministic given (evaluator seed, cfg, seed)."""
    if evaluator.objective_count != len(cfg.objectives):
        raise RunError(
            f"evaluator provides {evaluator.objective_count} objectives, "
            f"config expects {len(cfg.objectives)}"
        )
    m = len(cfg.objectives)
    aux_fns = [aux_objective_fn(n, cfg.space, cfg.cost) for n in cfg.objectives[1:]]
    outer_dirs = das_dennis(m, default_partitions(m, cfg.archive_size))
    inner_dirs = das_dennis(m, default_partitions(m, cfg.population_size))

    init_rng = rng_for(seed, "init")
    genomes: list[np.ndarray] = []
    seen: set[tuple] = set()
    while len(genomes) < cfg.archive_size:
        g = sample_uniform(cfg.space, init_rng)
        if genome_key(g) not in seen:
            genomes.append(g)
            seen.add(genome_key(g))

    evaluations = 0
    try:
        objectives = evaluate_genomes(evaluator, genomes, cfg.parallel_evals)
    except Exception as err:
        raise RunError(f"evaluator failed during initialization: {err}", 0) from err
    evaluations += len(genomes)

    archive = Archive(genomes=genomes, objectives=objectives, capacity=cfg.archive_size)
    hv_ref = cfg.hv_reference or default_hv_reference(objectives)
    history = RunHistory(
        hv_reference=hv_ref,
        initial_hypervolume=_archive_hypervolume(objectives, hv_ref),
        initial_evaluations=evaluations,
    )

    start = time.monotonic()
    for t in range(1, cfg.iterations + 1):
        accuracies = -archive.objectives[:, 0]
        ensemble = build_ensemble(
            np.stack(archive.genomes),
            accuracies,
            size=cfg.ensemble_size,
            rng=rng_for(seed, "ensemble", t),
        )
        result = evolve(
            ensemble,
            aux_fns,
            archive.genomes,
            cfg.search_config(),
            inner_dirs,
            rng_for(seed, "evolve", t),
            cfg.space,
        )

        known = archive.keys()
        new_genomes, new_pred_acc, picked = [], [], set()
        for g, row in zip(result.genomes, result.objectives):
            key = genome_key(g)
            if key in known or key in picked:
                continue
            picked.add(key)
            new_genomes.append(g)
            new_pred_acc.append(-row[0])

        try:
            new_objs = evaluate_genomes(evaluator, new_genomes, cfg.parallel_evals)
        except Exception as err:
            raise RunError(f"evaluator failed at iteration {t}: {err}", t) from err
        evaluations += len(new_genomes)

        rho = float("nan")
        if len(new_genomes) >= 2:
            true_acc = -new_objs[:, 0]
            if np.ptp(true_acc) > 0 and np.ptp(new_pred_acc) > 0:
                rho = spearman(np.asarray(new_pred_acc), true_acc)

        merged_genomes = archive.genomes + new_genomes
        merged_objs = (
            np.vstack([archive.objectives, new_objs])
            if len(new_genomes)
            else archive.objectives
        )
        sel = survive(merged_objs, cfg.archive_size, outer_dirs, rng_for(seed, "select", t))
        archive = Archive(
            genomes=[merged_genomes[i] for i in sel.indices],
            objectives=merged_objs[sel.indices],
            capacity=cfg.archive_size,
        )

        dist = estimate_distribution(np.stack(archive.genomes), cfg.space)
        try:
            evaluator.adapt(dist, cfg.adapt_epochs)
        except Exception as err:
            raise RunError(f"evaluator adapt failed at iteration {t}: {err}", t) from err

        history.records.append(
            IterationRecord(
                iteration=t,
                hypervolume=_archive_hypervolume(archive.objectives, hv_ref),
                predictor_spearman=rho,
                evaluations_cumulative=evaluations,
                wall_seconds=time.monotonic() - start,
                archive_genomes=[[int(v) for v in g] for g in archive.genomes],
                archive_objectives=archive.objectives.copy(),
            )
        )

    return archive, history


def final_distribution(archive: Archive, space: SearchSpaceConfig) -> AdaptationDistribution:
    return estimate_distribution(np.stack(archive.genomes), space)
