"""Labelled sigma_11 time-series datasets for classification, regression and forecasting.

Every sample owns a random stream derived from ``(seed, sample_index)``, so a
dataset is a pure function of its builder arguments.

File format (``.chl``): the first line is a JSON header object; each further
line is one sample, ``f_0,...,f_{L-1},t_0,...``, floats written with 17
significant digits. Class labels are written as integers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import eta_process as ep
from .gaussian_channel import feature_sigma11
from .rng import TAG_SAMPLE, TAG_SPLIT, derive_rng

CLASS_LABELS = ("NM", "M", "ML", "C", "D")
TASKS = ("classification", "regression", "forecast", "binning")
CATEGORICAL_TASKS = ("classification", "binning")
FORMAT_VERSION = 1


class DatasetFormatError(ValueError):
    """Malformed dataset file; carries the 1-based line and, if known, the field index."""

    def __init__(self, message: str, line: int, field: int | None = None):
        where = f"line {line}" if field is None else f"line {line}, field {field}"
        super().__init__(f"{where}: {message}")
        self.line = line
        self.field = field


@dataclass
class Sample:
    features: np.ndarray
    target: int | np.ndarray
    meta: dict


@dataclass(eq=False)
class Dataset:
    features: np.ndarray
    targets: np.ndarray
    r: float
    seq_len: int
    task: str
    generation: str
    seed: int
    n_classes: int = 0
    # per-sample generating parameters (mu, a, b, delta); in-memory only
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        if self.task not in TASKS:
            raise ValueError(f"unknown task {self.task!r}")
        if self.task in CATEGORICAL_TASKS:
            self.targets = np.asarray(self.targets, dtype=np.int64)
        else:
            self.targets = np.asarray(self.targets, dtype=np.float64)
        if self.features.ndim != 2 or self.features.shape[1] != self.seq_len:
            raise ValueError(f"features must have shape (n, {self.seq_len}), got {self.features.shape}")
        if len(self.targets) != len(self.features):
            raise ValueError("features and targets disagree on sample count")

    def __len__(self) -> int:
        return len(self.features)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.header() == other.header()
            and self.features.dtype == other.features.dtype
            and self.targets.dtype == other.targets.dtype
            and np.array_equal(self.features, other.features)
            and np.array_equal(self.targets, other.targets)
        )

    @property
    def target_width(self) -> int:
        return 1 if self.targets.ndim == 1 else self.targets.shape[1]

    def sample(self, i: int) -> Sample:
        return Sample(self.features[i], self.targets[i], {k: v[i] for k, v in self.meta.items()})

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx, dtype=np.int64)
        return Dataset(
            self.features[idx], self.targets[idx], self.r, self.seq_len, self.task,
            self.generation, self.seed, self.n_classes,
            {k: v[idx] for k, v in self.meta.items()},
        )

    def header(self) -> dict:
        return {
            "format": "chl",
            "version": FORMAT_VERSION,
            "task": self.task,
            "r": self.r,
            "seq_len": self.seq_len,
            "target_width": self.target_width,
            "n_classes": self.n_classes,
            "generation": self.generation,
            "seed": self.seed,
            "n_samples": len(self),
        }


# ---- per-class sampling ----------------------------------------------------


def _open_uniform(rng: np.random.Generator, lo: float, hi: float) -> float:
    while True:
        x = float(rng.uniform(lo, hi))
        if lo < x < hi:
            return x


def sample_kind(label: int, rng: np.random.Generator) -> ep.ChannelKind:
    """Draw the class-conditional channel parameters for one sample."""
    name = CLASS_LABELS[label]
    if name == "NM":
        return ep.NonMarkovian(float(rng.uniform(0.2, ep.NM_MU_MAX)))
    if name == "M":
        return ep.Markovian(_open_uniform(rng, 0.1, 1.0))
    if name == "ML":
        return ep.Memoryless()
    if name == "C":
        return ep.Compound()
    a, b = _open_uniform(rng, 0.0, 0.5), _open_uniform(rng, 0.0, 0.5)
    if rng.uniform() < 0.5:
        return ep.DeterministicCos(a, b, _open_uniform(rng, 1.0, 10.0))
    return ep.DeterministicExp(a, b, _open_uniform(rng, 10.0, 30.0))


def _kind_meta(kind: ep.ChannelKind) -> dict:
    return {
        "mu": getattr(kind, "mu", math.nan),
        "a": getattr(kind, "a", math.nan),
        "b": getattr(kind, "b", math.nan),
        "delta": getattr(kind, "delta", math.nan),
    }


def _simulate(kind, generation: str, length: int, rng) -> np.ndarray:
    init = None if isinstance(kind, ep.DETERMINISTIC) else ep.sample_init(generation, rng)
    return ep.sample_eta_sequence(kind, init, length, rng).values


def _stack_meta(rows: list[dict]) -> dict:
    if not rows:
        return {}
    return {k: np.array([row[k] for row in rows], dtype=float) for k in rows[0]}


def _check_r(r: float) -> float:
    if not r > 0:
        raise ValueError(f"squeezing r must be > 0, got {r}")
    return float(r)


def _check_count(n: int, name: str) -> int:
    if int(n) != n or n < 1:
        raise ValueError(f"{name} must be a positive integer, got {n}")
    return int(n)


def _check_generation(generation: str) -> str:
    g = generation.upper()
    if g not in ("D1", "D2"):
        raise ValueError(f"generation must be D1 or D2, got {generation!r}")
    return g


# ---- builders --------------------------------------------------------------


def build_classification(
    per_class: int, seq_len: int, r: float = 1.0, generation: str = "D1", seed: int = 0
) -> Dataset:
    """Five-class dataset; sample ``i`` has label ``i // per_class``."""
    per_class = _check_count(per_class, "per_class")
    seq_len = _check_count(seq_len, "seq_len")
    r, generation = _check_r(r), _check_generation(generation)
    n = 5 * per_class
    feats = np.empty((n, seq_len))
    labels = np.repeat(np.arange(5), per_class)
    meta = []
    for i in range(n):
        rng = derive_rng(seed, TAG_SAMPLE, i)
        kind = sample_kind(int(labels[i]), rng)
        feats[i] = feature_sigma11(_simulate(kind, generation, seq_len, rng), r)
        meta.append(_kind_meta(kind))
    return Dataset(feats, labels, r, seq_len, "classification", generation, seed, 5, _stack_meta(meta))


def build_regression(
    count: int, r: float = 1.0, seed: int = 0, seq_len: int = 5, generation: str = "D2"
) -> Dataset:
    """Features are sigma_11 for ``seq_len`` uses, targets the generating etas.

    Channel kinds cycle through the five classes, so the mixture is uniform.
    """
    count = _check_count(count, "count")
    seq_len = _check_count(seq_len, "seq_len")
    r, generation = _check_r(r), _check_generation(generation)
    feats = np.empty((count, seq_len))
    targets = np.empty((count, seq_len))
    meta = []
    for i in range(count):
        rng = derive_rng(seed, TAG_SAMPLE, i)
        kind = sample_kind(i % 5, rng)
        eta = _simulate(kind, generation, seq_len, rng)
        targets[i] = eta
        feats[i] = feature_sigma11(eta, r)
        meta.append({**_kind_meta(kind), "label": i % 5})
    return Dataset(feats, targets, r, seq_len, "regression", generation, seed, 0, _stack_meta(meta))


def build_forecast_markovian(
    count: int,
    mu: float,
    r: float = 1.0,
    seed: int = 0,
    n_inputs: int = 6,
    horizon: int = 3,
    generation: str = "D1",
) -> Dataset:
    """Markovian sequences with fixed memory ``mu``: inputs sigma_11 at uses 1..n_inputs,
    targets the etas of the next ``horizon`` uses."""
    count = _check_count(count, "count")
    if not 0.0 < mu <= 1.0:
        raise ValueError(f"mu must lie in (0, 1], got {mu}")
    r, generation = _check_r(r), _check_generation(generation)
    kind = ep.Markovian(float(mu))
    feats = np.empty((count, n_inputs))
    targets = np.empty((count, horizon))
    for i in range(count):
        rng = derive_rng(seed, TAG_SAMPLE, i)
        eta = _simulate(kind, generation, n_inputs + horizon, rng)
        feats[i] = feature_sigma11(eta[:n_inputs], r)
        targets[i] = eta[n_inputs:]
    meta = {"mu": np.full(count, float(mu))}
    return Dataset(feats, targets, r, n_inputs, "forecast", generation, seed, 0, meta)


def build_forecast_deterministic(
    count: int, form: str, K: int, r: float = 1.0, seed: int = 0, horizon: int = 6
) -> Dataset:
    """Deterministic laws with per-sample (a, b, delta): inputs sigma_11 at uses 1..K,
    targets the etas at uses K+1..K+horizon."""
    count = _check_count(count, "count")
    K = _check_count(K, "K")
    r = _check_r(r)
    if form not in ("cos", "exp"):
        raise ValueError(f"form must be 'cos' or 'exp', got {form!r}")
    feats = np.empty((count, K))
    targets = np.empty((count, horizon))
    meta = []
    ks = np.arange(1, K + horizon + 1)
    for i in range(count):
        rng = derive_rng(seed, TAG_SAMPLE, i)
        a, b = _open_uniform(rng, 0.0, 0.5), _open_uniform(rng, 0.0, 0.5)
        if form == "cos":
            kind = ep.DeterministicCos(a, b, _open_uniform(rng, 1.0, 10.0))
        else:
            kind = ep.DeterministicExp(a, b, _open_uniform(rng, 10.0, 30.0))
        eta = ep.deterministic_eta(kind, ks)
        feats[i] = feature_sigma11(eta[:K], r)
        targets[i] = eta[K:]
        meta.append(_kind_meta(kind))
    return Dataset(feats, targets, r, K, "forecast", "none", seed, 0, _stack_meta(meta))


def build_memory_binning(
    count: int, c: float, seed: int = 0, seq_len: int = 10, r: float = 1.0
) -> Dataset:
    """Markovian sequences with mu ~ U(0, 1) and a Beta(2, 2) start; label is ``mu >= c``."""
    count = _check_count(count, "count")
    if not 0.3 <= c <= 0.96:
        raise ValueError(f"threshold c must lie in [0.3, 0.96], got {c}")
    r = _check_r(r)
    init = ep.D1(ep.BetaParams(2.0, 2.0))
    feats = np.empty((count, seq_len))
    labels = np.empty(count, dtype=np.int64)
    mus = np.empty(count)
    for i in range(count):
        rng = derive_rng(seed, TAG_SAMPLE, i)
        mu = _open_uniform(rng, 0.0, 1.0)
        eta = ep.sample_eta_sequence(ep.Markovian(mu), init, seq_len, rng).values
        feats[i] = feature_sigma11(eta, r)
        labels[i] = int(mu >= c)
        mus[i] = mu
    return Dataset(feats, labels, r, seq_len, "binning", "D1", seed, 2, {"mu": mus})


# ---- splitting -------------------------------------------------------------


@dataclass
class SplitPair:
    train: Dataset
    test: Dataset


def split(ds: Dataset, ratio: float = 0.8, seed: int = 0) -> SplitPair:
    """Random train/test split; categorical tasks are stratified per label."""
    if len(ds) == 0:
        raise ValueError("cannot split an empty dataset")
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"ratio must lie in (0, 1), got {ratio}")
    rng = derive_rng(seed, TAG_SPLIT)
    if ds.task in CATEGORICAL_TASKS:
        train_idx, test_idx = [], []
        for label in np.unique(ds.targets):
            members = np.flatnonzero(ds.targets == label)
            members = members[rng.permutation(len(members))]
            cut = int(math.floor(ratio * len(members)))
            train_idx.append(members[:cut])
            test_idx.append(members[cut:])
        train = np.concatenate(train_idx)
        test = np.concatenate(test_idx)
        train = train[rng.permutation(len(train))]
        test = test[rng.permutation(len(test))]
    else:
        perm = rng.permutation(len(ds))
        cut = int(math.floor(ratio * len(ds)))
        train, test = perm[:cut], perm[cut:]
    return SplitPair(ds.subset(train), ds.subset(test))


# ---- persistence -----------------------------------------------------------


def _fmt(x: float) -> str:
    return "%.17g" % x


def save(ds: Dataset, path) -> Path:
    path = Path(path)
    lines = [json.dumps(ds.header(), sort_keys=True)]
    categorical = ds.task in CATEGORICAL_TASKS
    targets = ds.targets.reshape(len(ds), -1)
    for f, t in zip(ds.features, targets):
        row = [_fmt(v) for v in f]
        row += [str(int(v)) for v in t] if categorical else [_fmt(v) for v in t]
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n")
    return path


_REQUIRED = ("task", "r", "seq_len", "target_width", "n_classes", "generation", "seed", "n_samples")


def load(path) -> Dataset:
    path = Path(path)
    with path.open() as fh:
        first = fh.readline()
        try:
            header = json.loads(first)
        except json.JSONDecodeError as exc:
            raise DatasetFormatError(f"header is not valid JSON ({exc.msg})", 1) from None
        if not isinstance(header, dict) or header.get("format") != "chl":
            raise DatasetFormatError("header is not a chl dataset header", 1)
        for key in _REQUIRED:
            if key not in header:
                raise DatasetFormatError(f"header is missing {key!r}", 1)
        if header["task"] not in TASKS:
            raise DatasetFormatError(f"unknown task {header['task']!r}", 1)
        seq_len, width = int(header["seq_len"]), int(header["target_width"])
        categorical = header["task"] in CATEGORICAL_TASKS
        if categorical and width != 1:
            raise DatasetFormatError("categorical tasks must have target_width 1", 1)
        ncol = seq_len + width
        feats, targets = [], []
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            cells = line.split(",")
            if len(cells) != ncol:
                raise DatasetFormatError(
                    f"expected {ncol} fields (seq_len {seq_len} + {width} targets), got {len(cells)}",
                    lineno,
                )
            row = []
            for j, cell in enumerate(cells):
                try:
                    row.append(int(cell) if categorical and j >= seq_len else float(cell))
                except ValueError:
                    raise DatasetFormatError(f"cannot parse {cell!r} as a number", lineno, j) from None
            feats.append(row[:seq_len])
            targets.append(row[seq_len:])
    if len(feats) != int(header["n_samples"]):
        raise DatasetFormatError(
            f"header declares {header['n_samples']} samples, file holds {len(feats)}", 1
        )
    features = np.array(feats, dtype=np.float64).reshape(len(feats), seq_len)
    if categorical:
        tgt = np.array(targets, dtype=np.int64).reshape(len(feats))
    else:
        tgt = np.array(targets, dtype=np.float64).reshape(len(feats), width)
    return Dataset(
        features, tgt, float(header["r"]), seq_len, header["task"], header["generation"],
        int(header["seed"]), int(header["n_classes"]),
    )
