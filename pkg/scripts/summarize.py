#!/usr/bin/env python3
"""Print the headline numbers of every report.json below a directory."""

import json
import sys
from pathlib import Path

HEADLINES = {
    "confusion": lambda m: f"best acc {m['best_test_accuracy']:.4f}, dominant {'<->'.join(m['dominant_confusion'])}",
    "classify-sweep": lambda m: "; ".join(
        f"{pt}: " + " ".join(f"{k}={v['mean']:.3f}" for k, v in models.items()) for pt, models in m["points"].items()
    ),
    "complexity": lambda m: " ".join(f"{k}:{v['mean']:.3f}" for k, v in m["tiers"].items()),
    "memory-binning": lambda m: " ".join(f"c={k}:{v:.3f}" for k, v in m["accuracy"].items()),
    "regression": lambda m: f"train {m['final_train_mse']:.2e} test {m['final_test_mse']:.2e}",
    "forecast-markov": lambda m: " ".join(f"mu={k}:{v['mean']:.2e}" for k, v in m["per_mu"].items()),
    "forecast-det": lambda m: f"K={m['setup']['K']} test {m['final_test_mse']:.2e}",
}


def main(root: str = "runs") -> None:
    for path in sorted(Path(root).rglob("report.json")):
        doc = json.loads(path.read_text())
        line = HEADLINES[doc["experiment"]](doc["metrics"])
        print(f"{path.parent}: {line}")


if __name__ == "__main__":
    main(*sys.argv[1:])
