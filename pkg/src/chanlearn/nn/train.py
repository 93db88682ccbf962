"""Minibatch Adam training loop and evaluation helpers."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from ..dataset import CATEGORICAL_TASKS, Dataset
from ..rng import TAG_DROPOUT, TAG_INIT, TAG_SHUFFLE, derive_rng
from .network import Network, NetworkSpec, compute_gradients, loss_value
from .optim import AdamState, adam_step

log = logging.getLogger(__name__)


class TrainingDivergedError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 200
    batch_size: int = 1000
    learning_rate: float = 1e-3
    seed: int = 0
    # False: report the running mean of minibatch losses instead of a full
    # inference-mode pass over the training set (saves one forward pass per epoch)
    eval_train: bool = True

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be positive")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")


@dataclass
class TrainedModel:
    net: Network
    adam: AdamState
    config: TrainConfig
    history: list = field(default_factory=list)
    best_params: list | None = None
    best_epoch: int | None = None

    @property
    def spec(self) -> NetworkSpec:
        return self.net.spec

    def best_network(self) -> Network:
        if self.best_params is None:
            return self.net
        return Network(self.net.spec, self.best_params)

    def history_column(self, key: str) -> list:
        return [row[key] for row in self.history]


def dataset_inputs(ds: Dataset, spec: NetworkSpec) -> np.ndarray:
    size = int(np.prod(spec.input_shape))
    if size != ds.seq_len:
        raise ValueError(f"network expects {spec.input_shape} inputs, dataset has sequences of {ds.seq_len}")
    return ds.features.reshape((len(ds),) + spec.input_shape)


def dataset_targets(ds: Dataset, spec: NetworkSpec) -> np.ndarray:
    width = spec.output_shape[0]
    if spec.loss == "softmax_cross_entropy":
        if ds.task not in CATEGORICAL_TASKS:
            raise ValueError(f"a classifier cannot be trained on a {ds.task} dataset")
        if ds.targets.max(initial=0) >= width:
            raise ValueError(f"labels exceed the classifier's {width} outputs")
        return ds.targets
    if ds.task in CATEGORICAL_TASKS:
        raise ValueError(f"a regression network cannot be trained on a {ds.task} dataset")
    if ds.target_width != width:
        raise ValueError(f"network outputs {width} values, dataset targets have width {ds.target_width}")
    return ds.targets.reshape(len(ds), width)


def _diagnose(net: Network, x, training, rng) -> str:
    _, cache = net.forward(x, training=training, rng=rng, keep_outputs=True)
    for i, (layer, out) in enumerate(zip(net.spec.layers, cache.outputs)):
        if not np.all(np.isfinite(out)):
            return f"first non-finite output in layer {i} ({layer.kind})"
    for i, p in enumerate(net.params):
        for name, arr in p.items():
            if not np.all(np.isfinite(arr)):
                return f"non-finite parameter {name} in layer {i}"
    return "non-finite loss with finite activations"


def _metrics(net: Network, x, y, batch_size=2000) -> tuple[float, float | None]:
    out = net.predict(x, batch_size)
    loss = loss_value(net.spec.loss, out, y)
    acc = None
    if net.spec.loss == "softmax_cross_entropy":
        acc = float(np.mean(out.argmax(axis=1) == y))
    return loss, acc


def train(
    spec: NetworkSpec,
    train_ds: Dataset,
    test_ds: Dataset | None,
    cfg: TrainConfig,
    log_every: int = 0,
) -> TrainedModel:
    """Train from a fresh initialisation; fully determined by ``cfg.seed``.

    After every epoch the test set (and, with ``cfg.eval_train``, the train
    set) is evaluated in inference mode. The best checkpoint is the highest test accuracy for classifiers and
    the lowest test loss otherwise (train loss when no test set is given).
    """
    net = Network.initialise(spec, derive_rng(cfg.seed, TAG_INIT))
    adam = AdamState.zeros_like(net.params)
    model = TrainedModel(net, adam, cfg)

    x_tr, y_tr = dataset_inputs(train_ds, spec), dataset_targets(train_ds, spec)
    if test_ds is not None:
        x_te, y_te = dataset_inputs(test_ds, spec), dataset_targets(test_ds, spec)
    classifier = spec.loss == "softmax_cross_entropy"
    n = len(x_tr)
    best = -math.inf

    for epoch in range(cfg.epochs):
        order = derive_rng(cfg.seed, TAG_SHUFFLE, epoch).permutation(n)
        drop_rng = derive_rng(cfg.seed, TAG_DROPOUT, epoch)
        batch_losses = []
        for b, start in enumerate(range(0, n, cfg.batch_size)):
            idx = order[start : start + cfg.batch_size]
            value, grads, _ = compute_gradients(net, x_tr[idx], y_tr[idx], training=True, rng=drop_rng)
            batch_losses.append(value * len(idx))
            if not math.isfinite(value):
                where = _diagnose(net, x_tr[idx], False, None)
                raise TrainingDivergedError(f"epoch {epoch}, batch {b}: loss is {value}; {where}")
            adam_step(net.params, grads, adam, cfg.learning_rate)
            net.version += 1

        row = {"epoch": epoch + 1}
        if cfg.eval_train:
            row["train_loss"], acc = _metrics(net, x_tr, y_tr)
            if classifier:
                row["train_acc"] = acc
        else:
            row["train_loss"] = math.fsum(batch_losses) / n
        if test_ds is not None:
            row["test_loss"], acc = _metrics(net, x_te, y_te)
            if classifier:
                row["test_acc"] = acc
        model.history.append(row)

        if test_ds is None:
            score = -row["train_loss"]
        else:
            score = row["test_acc"] if classifier else -row["test_loss"]
        if score > best:
            best = score
            model.best_params = net.copy_params()
            model.best_epoch = epoch + 1

        if log_every and (epoch + 1) % log_every == 0:
            log.info("epoch %d %s", epoch + 1, {k: v for k, v in row.items() if k != "epoch"})
    return model


# ---- evaluation ------------------------------------------------------------


def _as_network(model) -> Network:
    return model.net if isinstance(model, TrainedModel) else model


def confusion_matrix(true: np.ndarray, pred: np.ndarray, n_classes: int) -> np.ndarray:
    """Rows are true labels, columns predicted labels."""
    out = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(out, (true, pred), 1)
    return out


def evaluate_classification(model, ds: Dataset) -> tuple[float, np.ndarray]:
    net = _as_network(model)
    if net.spec.loss != "softmax_cross_entropy" or ds.task not in CATEGORICAL_TASKS:
        raise ValueError("evaluate_classification needs a classifier and a categorical dataset")
    probs = net.predict(dataset_inputs(ds, net.spec))
    # argmax returns the first maximum, i.e. ties go to the lowest class index
    pred = probs.argmax(axis=1)
    n_classes = max(ds.n_classes, probs.shape[1])
    conf = confusion_matrix(ds.targets, pred, n_classes)
    return float(np.trace(conf) / conf.sum()), conf


def evaluate_regression(model, ds: Dataset) -> float:
    net = _as_network(model)
    if net.spec.loss != "mse" or ds.task in CATEGORICAL_TASKS:
        raise ValueError("evaluate_regression needs an MSE network and a regression/forecast dataset")
    pred = net.predict(dataset_inputs(ds, net.spec))
    return float(np.mean((pred - dataset_targets(ds, net.spec)) ** 2))
