"""Model persistence: ``manifest.json`` plus ``params.bin`` (little-endian float64)."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .network import Network, NetworkSpec
from .optim import AdamState
from .train import TrainConfig, TrainedModel

MANIFEST = "manifest.json"
PARAMS = "params.bin"


def _tensors(model: TrainedModel):
    """(group, layer, name, array) in a fixed order."""
    groups = [("params", model.net.params)]
    if model.best_params is not None:
        groups.append(("best", model.best_params))
    groups += [("adam_m", model.adam.m), ("adam_v", model.adam.v)]
    for group, plist in groups:
        for i, p in enumerate(plist):
            for name in sorted(p):
                yield group, i, name, p[name]


def save_model(model: TrainedModel, directory) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries, offset = [], 0
    with (directory / PARAMS).open("wb") as fh:
        for group, i, name, arr in _tensors(model):
            data = np.ascontiguousarray(arr, dtype="<f8")
            fh.write(data.tobytes())
            entries.append({"group": group, "layer": i, "name": name, "shape": list(arr.shape), "offset": offset})
            offset += data.size
    manifest = {
        "format": "chanlearn-model",
        "version": 1,
        "spec": model.spec.to_dict(),
        "train_config": {
            "epochs": model.config.epochs,
            "batch_size": model.config.batch_size,
            "learning_rate": model.config.learning_rate,
            "seed": model.config.seed,
            "eval_train": model.config.eval_train,
        },
        "adam_t": model.adam.t,
        "best_epoch": model.best_epoch,
        "history": model.history,
        "tensors": entries,
    }
    (directory / MANIFEST).write_text(json.dumps(manifest, indent=1, sort_keys=True))
    return directory


def load_model(directory) -> TrainedModel:
    directory = Path(directory)
    manifest = json.loads((directory / MANIFEST).read_text())
    if manifest.get("format") != "chanlearn-model":
        raise ValueError(f"{directory / MANIFEST} is not a model manifest")
    spec = NetworkSpec.from_dict(manifest["spec"])
    flat = np.fromfile(directory / PARAMS, dtype="<f8")
    n = len(spec.layers)
    groups = {g: [dict() for _ in range(n)] for g in ("params", "best", "adam_m", "adam_v")}
    for e in manifest["tensors"]:
        size = int(np.prod(e["shape"]))
        arr = flat[e["offset"] : e["offset"] + size].astype(np.float64).reshape(e["shape"])
        groups[e["group"]][e["layer"]][e["name"]] = arr
    has_best = any(e["group"] == "best" for e in manifest["tensors"])
    return TrainedModel(
        Network(spec, groups["params"]),
        AdamState(groups["adam_m"], groups["adam_v"], manifest["adam_t"]),
        TrainConfig(**manifest["train_config"]),
        manifest["history"],
        groups["best"] if has_best else None,
        manifest["best_epoch"],
    )
