"""Command-line entry point: ``chanlearn {generate,train,eval,experiment}``.

Every command resolves its parameters as defaults < ``--config`` file <
explicit flags < ``--set key=value`` and writes the result to
``resolved_config.json`` in its output directory. Passing that file back with
``--config`` reproduces the run. Exit codes: 0 success, 1 runtime error, 2
usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import asdict
from pathlib import Path

from . import dataset as dsm
from . import experiments as ex
from . import forest as rf
from .nn import (
    NetworkSpec,
    TrainConfig,
    build_named,
    evaluate_classification,
    evaluate_regression,
    load_model,
    save_model,
    train,
)

log = logging.getLogger("chanlearn")

DATASET_FILE = "dataset.chl"
FOREST_FILE = "forest.json"
RESOLVED = "resolved_config.json"
SEED_ENV = "CHANLEARN_SEED"
MODELS = ("ffnn", "rnn", "cnn1d", "forest")
GEN_TASKS = ("classification", "regression", "forecast-markov", "forecast-det", "binning")

# parameters each generate task accepts, with defaults
GEN_PARAMS = {
    "classification": {"per_class": 100, "len": 30, "r": 1.0, "gen": "d1"},
    "regression": {"count": 1000, "len": 5, "r": 1.0, "gen": "d2"},
    "forecast-markov": {"count": 1000, "mu": 0.5, "inputs": 6, "horizon": 3, "r": 1.0, "gen": "d1"},
    "forecast-det": {"count": 1000, "form": "exp", "K": 6, "horizon": 6, "r": 1.0},
    "binning": {"count": 1000, "c": 0.5, "len": 10, "r": 1.0},
}
TRAIN_DEFAULTS = {
    "model": None,
    "spec": None,
    "test": None,
    "split": 0.8,
    "epochs": 200,
    "batch_size": 1000,
    "lr": 1e-3,
    "n_estimators": 100,
}


class UsageError(Exception):
    pass


# ---- config resolution -------------------------------------------------------


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _read_config(path) -> tuple[dict, dict]:
    """``(params, document)`` from a JSON config file; empty when no file is given."""
    if path is None:
        return {}, {}
    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise UsageError(f"--config: no such file {path}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"--config: {path} is not valid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise UsageError(f"--config: {path} must hold a JSON object")
    # a resolved_config.json nests its parameters under "params"
    return dict(data.get("params", data)), data


def _overrides(pairs) -> dict:
    out = {}
    for pair in pairs or ():
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise UsageError(f"--set expects KEY=VALUE, got {pair!r}")
        out[key.replace("-", "_")] = _parse_value(value)
    return out


def _resolve_seed(args, file_params: dict) -> int:
    if args.seed is not None:
        return args.seed
    if "seed" in file_params:
        return int(file_params["seed"])
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    return 0


def _explicit(args, names) -> dict:
    return {k: getattr(args, k) for k in names if getattr(args, k, None) is not None}


def _write_resolved(outdir: Path, command: str, params: dict, **extra) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    doc = {"command": command, **extra, "params": params}
    (outdir / RESOLVED).write_text(json.dumps(ex._plain(doc), indent=1, sort_keys=True) + "\n")


def _load_dataset(path) -> dsm.Dataset:
    path = Path(path)
    if path.is_dir():
        path = path / DATASET_FILE
    return dsm.load(path)


# ---- generate ----------------------------------------------------------------


def cmd_generate(args) -> int:
    file_params, doc = _read_config(args.config)
    task = args.task or doc.get("task") or file_params.pop("task", None)
    file_params.pop("task", None)
    if task is None:
        raise UsageError("--task is required")
    if task not in GEN_TASKS:
        raise UsageError(f"--task must be one of {', '.join(GEN_TASKS)}")
    allowed = GEN_PARAMS[task]
    given = _explicit(args, [k for p in GEN_PARAMS.values() for k in p])
    for name in given:
        if name not in allowed:
            raise UsageError(f"--{name.replace('_', '-')} is not valid for task {task}")
    params = {**allowed}
    for source in (file_params, given, _overrides(args.set)):
        for k, v in source.items():
            if k == "seed":
                continue
            if k not in allowed:
                raise UsageError(f"parameter {k!r} is not valid for task {task}")
            params[k] = v
    seed = _resolve_seed(args, file_params)
    if "gen" in params:
        if str(params["gen"]).lower() not in ("d1", "d2"):
            raise UsageError(f"--gen must be d1 or d2, got {params['gen']!r}")
        params["gen"] = str(params["gen"]).lower()
    if task == "forecast-det" and "K" not in given and "K" not in file_params:
        params["K"] = ex.FORECAST_K.get(params["form"], params["K"])

    gen = params.get("gen", "d1").upper()
    if task == "classification":
        ds = dsm.build_classification(params["per_class"], params["len"], params["r"], gen, seed)
    elif task == "regression":
        ds = dsm.build_regression(params["count"], params["r"], seed, params["len"], gen)
    elif task == "forecast-markov":
        ds = dsm.build_forecast_markovian(
            params["count"], params["mu"], params["r"], seed, params["inputs"], params["horizon"], gen
        )
    elif task == "forecast-det":
        ds = dsm.build_forecast_deterministic(
            params["count"], params["form"], params["K"], params["r"], seed, params["horizon"]
        )
    else:
        ds = dsm.build_memory_binning(params["count"], params["c"], seed, params["len"], params["r"])

    outdir = Path(args.out)
    _write_resolved(outdir, "generate", {**params, "seed": seed}, task=task)
    path = dsm.save(ds, outdir / DATASET_FILE)
    print(f"wrote {len(ds)} samples to {path}")
    return 0


# ---- train -------------------------------------------------------------------


def cmd_train(args) -> int:
    file_params, _ = _read_config(args.config)
    params = dict(TRAIN_DEFAULTS)
    explicit = _explicit(args, list(TRAIN_DEFAULTS))
    for source in (file_params, explicit, _overrides(args.set)):
        for k, v in source.items():
            if k in ("seed", "data"):
                continue
            if k not in params:
                raise UsageError(f"unknown train parameter {k!r}")
            params[k] = v
    data = args.data or file_params.get("data")
    if data is None:
        raise UsageError("--data is required")
    if (params["model"] is None) == (params["spec"] is None):
        raise UsageError("give exactly one of --model or --spec")
    if params["model"] is not None and params["model"] not in MODELS:
        raise UsageError(f"--model must be one of {', '.join(MODELS)}")
    seed = _resolve_seed(args, file_params)

    ds = _load_dataset(data)
    if params["test"] is not None:
        train_ds, test_ds = ds, _load_dataset(params["test"])
    elif params["split"] >= 1.0:
        train_ds, test_ds = ds, None
    else:
        pair = dsm.split(ds, params["split"], seed)
        train_ds, test_ds = pair.train, pair.test

    outdir = Path(args.out)
    _write_resolved(outdir, "train", {**params, "data": str(data), "seed": seed})
    if params["model"] == "forest":
        fitted = rf.fit(train_ds, params["n_estimators"], seed, args.threads)
        (outdir / FOREST_FILE).write_text(json.dumps(fitted.to_dict()) + "\n")
        row = {"train_acc": rf.accuracy(fitted, train_ds)[0]}
        if test_ds is not None:
            row["test_acc"] = rf.accuracy(fitted, test_ds)[0]
        (outdir / "history.csv").write_text(ex.rows_to_csv([row]))
        print(json.dumps(row, sort_keys=True))
        return 0

    if params["spec"] is not None:
        spec = NetworkSpec.from_dict(json.loads(Path(params["spec"]).read_text()))
    else:
        spec = build_named(params["model"], ds.task, ds.seq_len, ds.target_width, max(ds.n_classes, 2))
    cfg = TrainConfig(params["epochs"], params["batch_size"], params["lr"], seed)
    model = train(spec, train_ds, test_ds, cfg, log_every=10)
    save_model(model, outdir)
    (outdir / "history.csv").write_text(ex.rows_to_csv(model.history))
    print(json.dumps(model.history[-1], sort_keys=True))
    return 0


# ---- eval --------------------------------------------------------------------


def evaluate_path(model_dir, data, checkpoint: str = "final") -> dict:
    model_dir = Path(model_dir)
    ds = _load_dataset(data)
    if (model_dir / FOREST_FILE).exists():
        fitted = rf.Forest.from_dict(json.loads((model_dir / FOREST_FILE).read_text()))
        if ds.task not in dsm.CATEGORICAL_TASKS:
            raise ValueError("forest supports classification only")
        acc, conf = rf.accuracy(fitted, ds)
        return {"accuracy": acc, "confusion": conf.tolist(), "n_samples": len(ds)}
    if not model_dir.exists():
        raise FileNotFoundError(f"no such model directory: {model_dir}")
    model = load_model(model_dir)
    net = model.best_network() if checkpoint == "best" else model.net
    if net.spec.loss == "softmax_cross_entropy":
        acc, conf = evaluate_classification(net, ds)
        return {"accuracy": acc, "confusion": conf.tolist(), "n_samples": len(ds)}
    return {"mse": evaluate_regression(net, ds), "n_samples": len(ds)}


def cmd_eval(args) -> int:
    file_params, _ = _read_config(args.config)
    params = {"model": args.model or file_params.get("model"), "data": args.data or file_params.get("data")}
    params["checkpoint"] = args.checkpoint or file_params.get("checkpoint", "final")
    if params["model"] is None or params["data"] is None:
        raise UsageError("--model and --data are required")
    metrics = evaluate_path(params["model"], params["data"], params["checkpoint"])
    text = json.dumps(metrics, sort_keys=True)
    if args.out is not None:
        outdir = Path(args.out)
        _write_resolved(outdir, "eval", params)
        (outdir / "metrics.json").write_text(text + "\n")
    print(text)
    return 0


# ---- experiment --------------------------------------------------------------


def cmd_experiment(args) -> int:
    file_params, doc = _read_config(args.config)
    name = args.name
    if doc.get("experiment") not in (None, name):
        raise UsageError(f"--config holds a {doc['experiment']} config, not {name}")
    scale = args.scale or doc.get("scale") or "desk"
    overrides = {**file_params, **_overrides(args.set)}
    overrides["seed"] = _resolve_seed(args, file_params)
    try:
        cfg = ex.make_config(name, scale, overrides)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    outdir = Path(args.out)
    _write_resolved(outdir, "experiment", asdict(cfg), experiment=name, scale=scale)
    report = ex.run_experiment(name, cfg, args.threads)
    report.write(outdir)
    print(f"wrote {outdir / 'report.json'}")
    return 0


# ---- parser ------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, out_required: bool = True) -> None:
    p.add_argument("--config", help="JSON file of parameters (a resolved_config.json works)")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one parameter (JSON value)")
    p.add_argument("--seed", type=int, help=f"master seed (fallback: ${SEED_ENV}, then 0)")
    p.add_argument("--out", required=out_required, help="output directory")
    p.add_argument("--threads", type=int, default=1, help="worker cap; results do not depend on it")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chanlearn", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log training progress")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="simulate a dataset and write it as .chl")
    g.add_argument("--task", choices=GEN_TASKS)
    g.add_argument("--per-class", dest="per_class", type=int)
    g.add_argument("--count", type=int)
    g.add_argument("--len", type=int, help="sequence length")
    g.add_argument("--r", type=float, help="squeezing parameter")
    g.add_argument("--gen", type=str.lower, choices=("d1", "d2"), help="first-use distribution family")
    g.add_argument("--mu", type=float, help="Markovian memory for forecast-markov")
    g.add_argument("--inputs", type=int, help="observed uses for forecast-markov")
    g.add_argument("--horizon", type=int)
    g.add_argument("--form", choices=("cos", "exp"))
    g.add_argument("--K", type=int, help="observed uses for forecast-det")
    g.add_argument("--c", type=float, help="memory threshold for binning")
    _common(g)
    g.set_defaults(func=cmd_generate)

    t = sub.add_parser("train", help="train a network or a random forest on a dataset")
    t.add_argument("--data", help="dataset file or directory")
    t.add_argument("--model", choices=MODELS)
    t.add_argument("--spec", help="network spec JSON instead of a named model")
    t.add_argument("--test", help="separate test dataset (default: split --data)")
    t.add_argument("--split", type=float, help="train fraction of --data; 1 disables the test set")
    t.add_argument("--epochs", type=int)
    t.add_argument("--batch-size", dest="batch_size", type=int)
    t.add_argument("--lr", type=float)
    t.add_argument("--n-estimators", dest="n_estimators", type=int)
    _common(t)
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("eval", help="evaluate a trained model on a dataset")
    e.add_argument("--model", help="model directory")
    e.add_argument("--data", help="dataset file or directory")
    e.add_argument("--checkpoint", choices=("final", "best"))
    _common(e, out_required=False)
    e.set_defaults(func=cmd_eval)

    x = sub.add_parser("experiment", help="reproduce one of the experiments")
    x.add_argument("name", choices=sorted(ex.EXPERIMENTS))
    x.add_argument("--scale", choices=ex.SCALES)
    _common(x)
    x.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on usage errors
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING, format="%(asctime)s %(name)s %(message)s"
    )
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except Exception as exc:  # runtime failures: report and exit 1
        print(f"chanlearn: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
