#!/usr/bin/env python3
"""Run one experiment and write its report directory.

    python scripts/run_experiment.py confusion --scale desk --out runs/confusion
    python scripts/run_experiment.py forecast-det --set form=\"cos\" --out runs/det-cos
"""

import argparse
import json
import logging
from pathlib import Path

from chanlearn import experiments as ex


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("name", choices=sorted(ex.EXPERIMENTS))
    p.add_argument("--scale", choices=ex.SCALES, default="desk")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--set", action="append", default=[], metavar="KEY=JSON", help="override one config field")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", type=Path, required=True)
    args = p.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    overrides = {"seed": args.seed}
    for item in args.set:
        key, _, value = item.partition("=")
        overrides[key] = json.loads(value)
    cfg = ex.make_config(args.name, args.scale, overrides)
    report = ex.run_experiment(args.name, cfg, threads=args.threads)
    report.write(args.out)
    print(json.dumps(report.to_dict()["metrics"], indent=1, sort_keys=True)[:2000])
    print(f"wall time {report.wall_time:.1f}s -> {args.out}")


if __name__ == "__main__":
    main()
