#!/usr/bin/env python3
"""Crossover ablation on the synthetic landscape (oracle mode).

Part 1: evaluations needed to reach a high accuracy threshold, with
crossover (p_c=0.9, p_m=0.1) vs without (p_c=0, p_m=0.2).
Part 2: median final accuracy under a fixed budget as p_c sweeps down.
"""

import argparse

import numpy as np

from archevo import SyntheticSupernet, SyntheticSupernetConfig, VariationConfig
from archevo.benchmarks import single_objective_search
from archevo.rng import rng_for


def reach_threshold(supernet: SyntheticSupernet, quantile: float = 0.95) -> float:
    """Accuracy ``quantile`` of the way from the range floor to the best
    found by a long reference search."""
    fn = supernet.true_accuracy
    best = max(
        single_objective_search(
            fn, VariationConfig(0.9, 0.1, 1.0), rng_for(s, "abl-reference"),
            population_size=40, generations=250,
        ).best_accuracy
        for s in (1000, 1001)
    )
    lo = supernet.config.accuracy_range[0]
    return lo + quantile * (best - lo)


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--landscape-seed", type=int, default=77)
    parser.add_argument("--runs", type=int, default=11)
    args = parser.parse_args()

    supernet = SyntheticSupernet(
        seed=args.landscape_seed, config=SyntheticSupernetConfig(oracle=True)
    )
    fn = supernet.true_accuracy
    target = reach_threshold(supernet)
    print(f"threshold accuracy: {target:.4f}")

    for label, p_c, p_m in (("with crossover", 0.9, 0.1), ("without crossover", 0.0, 0.2)):
        counts = []
        for s in range(args.runs):
            r = single_objective_search(
                fn, VariationConfig(p_c, p_m, 1.0), rng_for(s, "ablate-crx", label),
                population_size=40, generations=250, target=target,
            )
            counts.append(r.evaluations_to_target or r.evaluations)
        print(f"{label:<20s} median evaluations to threshold: {np.median(counts):.0f}")

    print("\nfixed budget (40 x 15 generations), p_c sweep:")
    for p_c in (0.9, 0.6, 0.4, 0.2):
        finals = [
            single_objective_search(
                fn, VariationConfig(p_c, 0.1, 1.0), rng_for(s, "ablate-pc", p_c),
                population_size=40, generations=15,
            ).best_accuracy
            for s in range(args.runs)
        ]
        print(f"  p_c={p_c}: median final accuracy {np.median(finals):.4f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
