"""Command-line front end: run searches, benchmarks, and archive analysis.

Exit codes: 0 success, 2 configuration/input error, 3 evaluator or runtime
failure.  All randomness derives from --seed.
"""

from __future__ import annotations

import argparse
import csv
import json
import subprocess
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .benchmarks import DTLZ1_PARTITIONS, dtlz1_run
from .encoding import CostModel, SearchSpaceConfig
from .evaluators import EvaluationError, SyntheticSupernet, SyntheticSupernetConfig, rosenbrock_demo
from .external import ExternalEvaluator
from .loop import RunConfig, RunError, final_distribution, run
from .metrics import hypervolume, trade_off_scores
from .operators import VariationConfig
from .rng import rng_for
from .selection import non_dominated


class ConfigError(ValueError):
    pass


_RUN_KEYS = {
    "archive_size": 300,
    "iterations": 30,
    "predictor_min_train": 100,
    "ensemble_size": 500,
    "population_size": 100,
    "generations": 100,
    "crossover_prob": 0.9,
    "mutation_prob": 0.1,
    "eta_m": 1.0,
    "adapt_epochs": 5,
    "evaluator": {"type": "synthetic"},
    "search_space": {},
    "objectives": ["neg_top1", "madds"],
}

_SPACE_KEYS = {
    "resolutions",
    "width_multipliers",
    "expand_ratios",
    "kernel_sizes",
    "stages",
    "min_layers_per_stage",
    "max_layers_per_stage",
    "cost",
}
_COST_KEYS = {
    "stem_channels",
    "stage_output_channels",
    "stage_strides",
    "tail_channels",
    "channel_round_to",
    "num_classes",
}
_SYNTHETIC_KEYS = {
    "type",
    "seed",
    "oracle",
    "m0",
    "tau",
    "steps_per_epoch",
    "pairwise_count",
    "unary_sigma",
    "pairwise_sigma",
    "capacity_gain",
}
_EXTERNAL_KEYS = {"type", "cmd", "timeout", "batch_size"}


def version_string() -> str:
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            capture_output=True,
            text=True,
            cwd=Path(__file__).resolve().parent,
            timeout=5,
        )
        if out.returncode == 0 and out.stdout.strip():
            return f"archevo-{__version__}+{out.stdout.strip()}"
    except Exception:
        pass
    return f"archevo-{__version__}"


def _check_keys(block: dict, allowed, where: str):
    for key in block:
        if key not in allowed:
            raise ConfigError(f"unknown config key '{where}{key}'")


def _require(cond: bool, key: str, why: str):
    if not cond:
        raise ConfigError(f"config key '{key}' {why}")


def resolve_config(raw: dict) -> dict:
    """Merge the raw JSON config over the defaults, validating every key."""
    _check_keys(raw, _RUN_KEYS, "")
    cfg = {k: raw.get(k, v) for k, v in _RUN_KEYS.items()}

    for key in ("archive_size", "iterations", "predictor_min_train", "ensemble_size",
                "population_size", "generations", "adapt_epochs"):
        _require(isinstance(cfg[key], int) and not isinstance(cfg[key], bool),
                 key, "must be an integer")
    _require(cfg["archive_size"] >= 2, "archive_size", "must be at least 2")
    _require(cfg["iterations"] >= 0, "iterations", "must be non-negative")
    _require(cfg["predictor_min_train"] >= 2, "predictor_min_train", "must be at least 2")
    _require(cfg["archive_size"] >= cfg["predictor_min_train"],
             "archive_size", "must be at least predictor_min_train")
    _require(cfg["ensemble_size"] >= 1, "ensemble_size", "must be positive")
    _require(cfg["population_size"] >= 2, "population_size", "must be at least 2")
    _require(cfg["generations"] >= 1, "generations", "must be at least 1")
    _require(cfg["adapt_epochs"] >= 0, "adapt_epochs", "must be non-negative")
    for key in ("crossover_prob", "mutation_prob"):
        _require(isinstance(cfg[key], (int, float)) and 0.0 <= cfg[key] <= 1.0,
                 key, "must be a probability in [0, 1]")
    _require(isinstance(cfg["eta_m"], (int, float)) and cfg["eta_m"] > 0,
             "eta_m", "must be positive")

    objectives = cfg["objectives"]
    _require(isinstance(objectives, list) and len(objectives) >= 1,
             "objectives", "must be a non-empty list")
    _require(objectives[0] == "neg_top1", "objectives", "must start with 'neg_top1'")
    for name in objectives[1:]:
        _require(name in ("madds", "params"), "objectives",
                 f"has unsupported auxiliary objective '{name}'")

    space_block = dict(cfg["search_space"])
    _check_keys(space_block, _SPACE_KEYS, "search_space.")
    cost_block = dict(space_block.pop("cost", {}))
    _check_keys(cost_block, _COST_KEYS, "search_space.cost.")

    ev = dict(cfg["evaluator"])
    ev_type = ev.get("type", "synthetic")
    if ev_type == "synthetic":
        _check_keys(ev, _SYNTHETIC_KEYS, "evaluator.")
    elif ev_type == "external":
        _check_keys(ev, _EXTERNAL_KEYS, "evaluator.")
        _require(isinstance(ev.get("cmd"), list) and ev["cmd"],
                 "evaluator.cmd", "must be a non-empty argv list")
    else:
        raise ConfigError(f"config key 'evaluator.type' has unknown value '{ev_type}'")

    cfg["search_space"] = space_block
    cfg["search_space_cost"] = cost_block
    cfg["evaluator"] = ev
    return cfg


def build_space(cfg: dict) -> tuple[SearchSpaceConfig, CostModel]:
    block = {k: tuple(v) if isinstance(v, list) else v for k, v in cfg["search_space"].items()}
    cost_block = {
        k: tuple(v) if isinstance(v, list) else v for k, v in cfg["search_space_cost"].items()
    }
    try:
        return SearchSpaceConfig(**block), CostModel(**cost_block)
    except (TypeError, ValueError) as err:
        raise ConfigError(f"config key 'search_space' is invalid: {err}") from err


def build_evaluator(cfg: dict, seed: int, space: SearchSpaceConfig, cost: CostModel):
    ev = cfg["evaluator"]
    if ev["type"] == "external":
        return ExternalEvaluator(
            ev["cmd"], timeout=float(ev.get("timeout", 60.0)),
            batch_size=ev.get("batch_size"),
        )
    fields = {k: v for k, v in ev.items() if k not in ("type", "seed")}
    sn_cfg = SyntheticSupernetConfig(**{**fields, "accuracy_range": (0.55, 0.95)})
    return SyntheticSupernet(
        seed=int(ev.get("seed", seed)),
        space=space,
        cost=cost,
        config=sn_cfg,
        objectives=tuple(cfg["objectives"]),
    )


def run_config_from(cfg: dict, space, cost, parallel: int) -> RunConfig:
    return RunConfig(
        archive_size=cfg["archive_size"],
        iterations=cfg["iterations"],
        predictor_min_train=cfg["predictor_min_train"],
        ensemble_size=cfg["ensemble_size"],
        population_size=cfg["population_size"],
        generations=cfg["generations"],
        variation=VariationConfig(
            crossover_prob=cfg["crossover_prob"],
            mutation_prob=cfg["mutation_prob"],
            eta_m=cfg["eta_m"],
        ),
        adapt_epochs=cfg["adapt_epochs"],
        objectives=tuple(cfg["objectives"]),
        space=space,
        cost=cost,
        parallel_evals=parallel,
    )


def _dump_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _entries_payload(version: str, seed: int, objectives, records) -> dict:
    return {
        "version": version,
        "seed": seed,
        "objectives": list(objectives),
        "entries": records,
    }


def cmd_search(args) -> int:
    try:
        raw = json.loads(Path(args.config).read_text())
        cfg = resolve_config(raw)
        space, cost = build_space(cfg)
        run_cfg = run_config_from(cfg, space, cost, args.parallel_evals)
    except (OSError, json.JSONDecodeError) as err:
        print(f"error: cannot read config: {err}", file=sys.stderr)
        return 2
    except (ConfigError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2

    evaluator = None
    try:
        evaluator = build_evaluator(cfg, args.seed, space, cost)
        archive, history = run(evaluator, run_cfg, args.seed)
    except (RunError, EvaluationError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    finally:
        if evaluator is not None:
            evaluator.close()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    version = version_string()

    _dump_json(out / "archive.json",
               _entries_payload(version, args.seed, cfg["objectives"], archive.as_records()))
    front = archive.front_indices()
    records = archive.as_records()
    _dump_json(out / "pareto.json",
               _entries_payload(version, args.seed, cfg["objectives"],
                                [records[i] for i in front]))

    _dump_json(out / "distribution.json",
               {"version": version, "rows": final_distribution(archive, space).as_rows()})

    with (out / "history.csv").open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=[
            "iteration", "archive_hypervolume", "predictor_spearman",
            "evaluations_cumulative", "wall_seconds"])
        writer.writeheader()
        writer.writerows(history.csv_rows())

    snapdir = out / "snapshots"
    snapdir.mkdir(exist_ok=True)
    for rec in history.records:
        _dump_json(snapdir / f"iter_{rec.iteration:03d}.json", [
            {"genome": g, "objectives": [float(v) for v in o]}
            for g, o in zip(rec.archive_genomes, rec.archive_objectives)
        ])

    manifest = {
        "version": version,
        "seed": args.seed,
        "parallel_evals": args.parallel_evals,
        "config": {k: v for k, v in cfg.items() if k != "search_space_cost"},
        "search_space_cost": cfg["search_space_cost"],
        "evaluations": history.records[-1].evaluations_cumulative
        if history.records else history.initial_evaluations,
        "hv_reference": list(history.hv_reference) if history.hv_reference else None,
    }
    _dump_json(out / "run_manifest.json", manifest)
    print(f"wrote {out}/archive.json with {len(archive)} entries "
          f"({len(front)} non-dominated)")
    return 0


def cmd_bench(args) -> int:
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2

    if args.problem == "dtlz1":
        ms = args.objectives or [3, 5, 10, 15]
        rows = []
        for m in ms:
            if m not in DTLZ1_PARTITIONS:
                print(f"error: unsupported objective count {m} "
                      "(supported: 3, 5, 10, 15)", file=sys.stderr)
                return 2
            for method in ("reference", "domination"):
                igds = [
                    dtlz1_run(m, method, args.generations,
                              rng_for(args.seed, "dtlz1", m, method, r))
                    for r in range(args.runs)
                ]
                rows.append({
                    "m": m, "method": method, "runs": args.runs,
                    "igd_mean": float(np.mean(igds)),
                    "igd_std": float(np.std(igds)),
                    "igd_median": float(np.median(igds)),
                })
                print(f"dtlz1 m={m:<3d} {method:<11s} IGD "
                      f"{rows[-1]['igd_mean']:.4f} +- {rows[-1]['igd_std']:.4f} "
                      f"(median {rows[-1]['igd_median']:.4f})")
        path = out / "dtlz1_igd.csv"
    else:
        rows = []
        for mode in ("online", "offline"):
            for r in range(args.runs):
                res = rosenbrock_demo(60, mode, rng_for(args.seed, "rosenbrock", mode, r))
                dist = float(np.median(
                    np.linalg.norm(res.evaluated_x - np.array([1.0, 1.0]), axis=1)))
                rows.append({"mode": mode, "run": r, "best_f": res.best_f,
                             "median_distance_to_optimum": dist})
        for mode in ("online", "offline"):
            vals = [r["best_f"] for r in rows if r["mode"] == mode]
            print(f"rosenbrock {mode:<8s} best-f median {np.median(vals):.4f} "
                  f"(mean {np.mean(vals):.4f})")
        path = out / "rosenbrock.csv"

    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {path}")
    return 0


def cmd_analyze(args) -> int:
    try:
        payload = json.loads(Path(args.archive).read_text())
        entries = payload["entries"]
        objs = np.array([e["objectives"] for e in entries], dtype=float)
        if objs.ndim != 2 or len(objs) == 0:
            raise ValueError("archive has no objective vectors")
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as err:
        print(f"error: cannot read archive: {err}", file=sys.stderr)
        return 2

    front_idx = non_dominated(objs)
    front = objs[front_idx]
    m = objs.shape[1]
    print(f"archive: {len(objs)} entries, non-dominated front: {len(front)}")

    hv = None
    if args.ref_point:
        try:
            ref = np.array([float(v) for v in args.ref_point.split(",")])
            if len(ref) != m:
                raise ValueError(f"reference point needs {m} components")
            hv = hypervolume(front, ref)
        except ValueError as err:
            print(f"error: bad --ref-point: {err}", file=sys.stderr)
            return 2
        print(f"hypervolume vs {args.ref_point}: {hv:.6g}")

    scores = np.full(len(front), np.nan)
    preferred = False
    if len(front) >= m + 1:
        scores, preferred = trade_off_scores(front)
        best = int(np.argmax(scores))
        print(f"max trade-off score {scores[best]:.4f} at front member {best} "
              f"(archive entry {int(front_idx[best])})")
        if preferred:
            genome = entries[int(front_idx[best])]["genome"]
            print(f"preferred solution exists: genome {genome}")
        else:
            print("no statistically preferred solution "
                  "(max score within mean + 3 std of the rest)")
    else:
        print(f"front too small for trade-off analysis (need at least {m + 1})")

    out = Path(args.out) if args.out else Path(args.archive).resolve().parent
    out.mkdir(parents=True, exist_ok=True)
    path = out / "front.csv"
    with path.open("w", newline="") as fh:
        names = [f"objective_{i}" for i in range(m)]
        writer = csv.writer(fh)
        writer.writerow(["archive_index"] + names + ["trade_off_score"])
        for row, (idx, vec) in enumerate(zip(front_idx, front)):
            writer.writerow([int(idx)] + [float(v) for v in vec]
                            + [float(scores[row])])
    print(f"wrote {path}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="archevo", description=__doc__)
    parser.add_argument("--version", action="version", version=version_string())
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("search", help="run the full transfer loop")
    p.add_argument("--config", required=True, help="JSON config path")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--parallel-evals", type=int, default=1)
    p.set_defaults(fn=cmd_search)

    p = sub.add_parser("bench", help="run a benchmark study")
    p.add_argument("--problem", choices=["dtlz1", "rosenbrock"], required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--objectives", type=int, nargs="*",
                   help="objective counts for dtlz1 (default 3 5 10 15)")
    p.add_argument("--runs", type=int, default=31)
    p.add_argument("--generations", type=int, default=400)
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("analyze", help="analyze a search archive")
    p.add_argument("--archive", required=True, help="archive.json path")
    p.add_argument("--ref-point", help="comma-separated reference point")
    p.add_argument("--out", help="output directory (default: next to archive)")
    p.set_defaults(fn=cmd_analyze)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
