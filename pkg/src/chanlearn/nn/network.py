"""Network specs, parameter containers, losses and the forward/backward drivers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .layers import Dense, Layer, layer_from_dict

LOSSES = ("softmax_cross_entropy", "mse")


@dataclass(frozen=True)
class NetworkSpec:
    input_shape: tuple
    layers: tuple
    loss: str = "mse"

    def __post_init__(self):
        object.__setattr__(self, "input_shape", tuple(int(s) for s in self.input_shape))
        object.__setattr__(self, "layers", tuple(self.layers))
        if self.loss not in LOSSES:
            raise ValueError(f"unknown loss {self.loss!r}")
        if not self.layers:
            raise ValueError("a network needs at least one layer")
        self.shapes()  # validates chaining
        if self.loss == "softmax_cross_entropy":
            last = self.layers[-1]
            if not (isinstance(last, Dense) and last.activation == "softmax"):
                raise ValueError("cross-entropy networks must end in a softmax Dense layer")

    def shapes(self) -> list[tuple]:
        """Input shape of every layer followed by the network output shape."""
        out = [self.input_shape]
        for layer in self.layers:
            out.append(layer.output_shape(out[-1]))
        return out

    @property
    def output_shape(self) -> tuple:
        return self.shapes()[-1]

    def to_dict(self) -> dict:
        return {
            "input_shape": list(self.input_shape),
            "layers": [layer.to_dict() for layer in self.layers],
            "loss": self.loss,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NetworkSpec":
        return cls(tuple(d["input_shape"]), tuple(layer_from_dict(x) for x in d["layers"]), d["loss"])


def param_count(spec: NetworkSpec) -> int:
    shapes = spec.shapes()
    total = 0
    for layer, in_shape in zip(spec.layers, shapes):
        for shp in layer.param_shapes(in_shape).values():
            total += int(np.prod(shp))
    return total


def init_params(spec: NetworkSpec, rng: np.random.Generator) -> list[dict]:
    return [layer.init_params(s, rng) for layer, s in zip(spec.layers, spec.shapes())]


@dataclass
class ForwardCache:
    caches: list
    outputs: list
    version: int
    fused_logits: np.ndarray | None = None


@dataclass
class Network:
    """A spec bound to concrete parameters. ``version`` bumps on every update."""

    spec: NetworkSpec
    params: list
    version: int = 0

    @classmethod
    def initialise(cls, spec: NetworkSpec, rng: np.random.Generator) -> "Network":
        return cls(spec, init_params(spec, rng))

    def forward(self, x: np.ndarray, training: bool = False, rng=None, keep_outputs=False):
        x = np.asarray(x, dtype=np.float64)
        if x.shape[1:] != self.spec.input_shape:
            raise ValueError(f"batch shape {x.shape[1:]} does not match input shape {self.spec.input_shape}")
        caches, outputs = [], []
        h = x
        logits = None
        last = len(self.spec.layers) - 1
        for i, (layer, p) in enumerate(zip(self.spec.layers, self.params)):
            h, cache = layer.forward(p, h, training=training, rng=rng)
            caches.append(cache)
            if keep_outputs:
                outputs.append(h)
            if i == last and isinstance(layer, Dense):
                logits = cache[1]
        return h, ForwardCache(caches, outputs, self.version, logits)

    def predict(self, x: np.ndarray, batch_size: int = 1000) -> np.ndarray:
        outs = [self.forward(x[i : i + batch_size])[0] for i in range(0, len(x), batch_size)]
        return np.concatenate(outs, axis=0)

    def backward(self, cache: ForwardCache, grad: np.ndarray, pre_activation: bool = False) -> list[dict]:
        """Parameter gradients given dL/d(output); with ``pre_activation`` the
        gradient is taken w.r.t. the last Dense layer's logits instead."""
        if cache.version != self.version:
            raise ValueError("stale forward cache: parameters changed since the forward pass")
        grads: list[dict] = [None] * len(self.spec.layers)
        d = grad
        for i in range(len(self.spec.layers) - 1, -1, -1):
            layer, p = self.spec.layers[i], self.params[i]
            if pre_activation and i == len(self.spec.layers) - 1:
                d, grads[i] = layer.backward(p, cache.caches[i], d, pre_activation=True)
            else:
                d, grads[i] = layer.backward(p, cache.caches[i], d)
        return grads

    def copy_params(self) -> list[dict]:
        return [{k: v.copy() for k, v in p.items()} for p in self.params]


# ---- losses ----------------------------------------------------------------


def one_hot(labels: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros((len(labels), n))
    out[np.arange(len(labels)), labels] = 1.0
    return out


def loss_and_grad(loss: str, out: np.ndarray, target: np.ndarray, cache: ForwardCache | None = None):
    """Mean loss and its gradient.

    For softmax cross-entropy the gradient is w.r.t. the final logits (the
    fused form), to be passed to ``Network.backward(..., pre_activation=True)``.
    """
    n = out.shape[0]
    if loss == "softmax_cross_entropy":
        labels = np.asarray(target, dtype=np.int64)
        p = out[np.arange(n), labels]
        value = float(-np.mean(np.log(np.maximum(p, 1e-300))))
        grad = (out - one_hot(labels, out.shape[1])) / n
        return value, grad
    target = np.asarray(target, dtype=np.float64).reshape(out.shape)
    diff = out - target
    value = float(np.mean(diff * diff))
    return value, 2.0 * diff / diff.size


def loss_value(loss: str, out: np.ndarray, target: np.ndarray) -> float:
    return loss_and_grad(loss, out, target)[0]


def compute_gradients(net: Network, x, y, training=False, rng=None):
    """Loss and parameter gradients for one batch."""
    out, cache = net.forward(x, training=training, rng=rng)
    value, g = loss_and_grad(net.spec.loss, out, y)
    fused = net.spec.loss == "softmax_cross_entropy"
    return value, net.backward(cache, g, pre_activation=fused), cache


def flat_param_index(net: Network) -> list[tuple[int, str, int]]:
    return [
        (i, name, j)
        for i, p in enumerate(net.params)
        for name in sorted(p)
        for j in range(p[name].size)
    ]


def grad_check(
    net: Network,
    x: np.ndarray,
    y: np.ndarray,
    n_checks: int = 200,
    step: float = 1e-5,
    seed: int = 0,
    training: bool = False,
) -> float:
    """Max relative error between analytic and central-difference gradients on
    ``n_checks`` randomly chosen parameters. Dropout masks are held fixed by
    replaying the same stream for every evaluation."""
    def run(with_grads):
        rng = np.random.default_rng(seed) if training else None
        if with_grads:
            return compute_gradients(net, x, y, training=training, rng=rng)
        out, _ = net.forward(x, training=training, rng=rng)
        return loss_value(net.spec.loss, out, y)

    _, grads, _ = run(True)
    index = flat_param_index(net)
    pick = np.random.default_rng(seed + 1).choice(len(index), size=min(n_checks, len(index)), replace=False)
    worst = 0.0
    for k in pick:
        i, name, j = index[k]
        arr = net.params[i][name].reshape(-1)
        orig = arr[j]
        arr[j] = orig + step
        up = run(False)
        arr[j] = orig - step
        down = run(False)
        arr[j] = orig
        numeric = (up - down) / (2 * step)
        analytic = grads[i][name].reshape(-1)[j]
        err = abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-8)
        worst = max(worst, err)
    return worst
