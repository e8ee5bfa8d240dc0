#!/usr/bin/env python3
"""Reference external evaluator speaking the JSON-lines stdio protocol.

Wraps the synthetic supernet so a search can be driven through a child
process exactly as a real training-based evaluator would be:

    archevo search --config cfg.json --seed 1 --out out/

with cfg.json's evaluator block set to

    {"type": "external", "cmd": ["python3", "scripts/external_eval_demo.py"]}
"""

import argparse
import json
import sys

import numpy as np

from archevo.distribution import AdaptationDistribution
from archevo.evaluators import SyntheticSupernet, SyntheticSupernetConfig


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--oracle", action="store_true")
    args = parser.parse_args()

    supernet = SyntheticSupernet(
        seed=args.seed, config=SyntheticSupernetConfig(oracle=args.oracle)
    )
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        msg = json.loads(line)
        cmd = msg.get("cmd")
        if cmd == "hello":
            reply = {"ok": True, "objectives": list(supernet.objective_names)}
        elif cmd == "evaluate":
            objs = supernet.evaluate(np.asarray(msg["genomes"], dtype=np.int64))
            reply = {"id": msg["id"], "objectives": objs.tolist()}
        elif cmd == "adapt":
            supernet.adapt(
                AdaptationDistribution.from_rows(msg["distribution"]), msg["epochs"]
            )
            reply = {"ok": True}
        elif cmd == "shutdown":
            return 0
        else:
            reply = {"ok": False, "error": f"unknown command {cmd!r}"}
        sys.stdout.write(json.dumps(reply) + "\n")
        sys.stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
