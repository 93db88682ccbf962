"""Layer specifications with analytic forward and backward passes.

Shapes exclude the batch axis. Sequences are ``(T, C)``; every layer works in
float64. A layer's ``forward`` returns ``(output, cache)`` and its
``backward`` consumes that cache and returns ``(input_grad, param_grads)``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from numba import njit
from scipy.special import expit

ACTIVATIONS = ("relu", "tanh", "linear", "softmax", "sigmoid")


def glorot_uniform(rng: np.random.Generator, shape, fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


def softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def activate(name: str, z: np.ndarray) -> np.ndarray:
    if name == "relu":
        return np.maximum(z, 0.0)
    if name == "tanh":
        return np.tanh(z)
    if name == "sigmoid":
        return expit(z)
    if name == "softmax":
        return softmax(z)
    return z


def activation_backward(name: str, z: np.ndarray, y: np.ndarray, dy: np.ndarray) -> np.ndarray:
    """Gradient w.r.t. the pre-activation ``z`` given ``y = act(z)`` and ``dL/dy``."""
    if name == "relu":
        return dy * (z > 0.0)
    if name == "tanh":
        return dy * (1.0 - y * y)
    if name == "sigmoid":
        return dy * y * (1.0 - y)
    if name == "softmax":
        return y * (dy - np.sum(dy * y, axis=-1, keepdims=True))
    return dy


class Layer:
    kind = "layer"

    def output_shape(self, in_shape: tuple) -> tuple:
        return in_shape

    def param_shapes(self, in_shape: tuple) -> dict:
        return {}

    def init_params(self, in_shape: tuple, rng: np.random.Generator) -> dict:
        return {}

    def to_dict(self) -> dict:
        return {"kind": self.kind, **asdict(self)}


@dataclass(frozen=True)
class Dense(Layer):
    units: int
    activation: str = "linear"
    kind = "dense"

    def __post_init__(self):
        if self.units < 1:
            raise ValueError("Dense units must be >= 1")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")

    def output_shape(self, in_shape):
        if len(in_shape) != 1:
            raise ValueError(f"Dense expects a flat input, got shape {in_shape}")
        return (self.units,)

    def param_shapes(self, in_shape):
        return {"W": (in_shape[0], self.units), "b": (self.units,)}

    def init_params(self, in_shape, rng):
        n_in = in_shape[0]
        return {
            "W": glorot_uniform(rng, (n_in, self.units), n_in, self.units),
            "b": np.zeros(self.units),
        }

    def forward(self, params, x, training=False, rng=None):
        z = x @ params["W"] + params["b"]
        y = activate(self.activation, z)
        return y, (x, z, y)

    def backward(self, params, cache, dy, pre_activation=False):
        x, z, y = cache
        dz = dy if pre_activation else activation_backward(self.activation, z, y, dy)
        grads = {"W": x.T @ dz, "b": dz.sum(axis=0)}
        return dz @ params["W"].T, grads


@dataclass(frozen=True)
class Lstm(Layer):
    """Unidirectional LSTM, gate order (input, forget, cell, output), zero initial state."""

    units: int
    return_sequences: bool = False
    kind = "lstm"

    def __post_init__(self):
        if self.units < 1:
            raise ValueError("LSTM units must be >= 1")

    def output_shape(self, in_shape):
        if len(in_shape) != 2:
            raise ValueError(f"LSTM expects (T, C) input, got shape {in_shape}")
        return (in_shape[0], self.units) if self.return_sequences else (self.units,)

    def param_shapes(self, in_shape):
        u = self.units
        return {"W": (in_shape[1], 4 * u), "U": (u, 4 * u), "b": (4 * u,)}

    def init_params(self, in_shape, rng):
        u, d = self.units, in_shape[1]
        b = np.zeros(4 * u)
        b[u : 2 * u] = 1.0
        return {
            "W": glorot_uniform(rng, (d, 4 * u), d, 4 * u),
            "U": glorot_uniform(rng, (u, 4 * u), u, 4 * u),
            "b": b,
        }

    def forward(self, params, x, training=False, rng=None):
        B, T, D = x.shape
        u = self.units
        U = params["U"]
        # time-major internals keep every per-step slice contiguous
        xt = np.ascontiguousarray(x.transpose(1, 0, 2))
        # sigmoid(v) = (1 + tanh(v/2)) / 2: halving the sigmoid-gate columns up
        # front lets a single vectorised tanh evaluate all four gates
        scale = _gate_scale(u)
        W_s, U_s, b_s = params["W"] * scale, params["U"] * scale, params["b"] * scale
        xw = (xt.reshape(T * B, D) @ W_s + b_s).reshape(T, B, 4 * u)
        hs = np.zeros((T + 1, B, u))
        cs = np.zeros((T + 1, B, u))
        gates = np.empty((T, B, 4 * u))
        tcs = np.empty((T, B, u))
        for t in range(T):
            g = gates[t]
            np.matmul(hs[t], U_s, out=g)
            g += xw[t]
            np.tanh(g, out=g)
            _cell_update(g, cs[t], cs[t + 1])
            np.tanh(cs[t + 1], out=tcs[t])
            np.multiply(g[:, 3 * u :], tcs[t], out=hs[t + 1])
        if self.return_sequences:
            y = np.ascontiguousarray(hs[1:].transpose(1, 0, 2))
        else:
            y = hs[T].copy()
        return y, (xt, hs, cs, gates, tcs)

    def backward(self, params, cache, dy):
        xt, hs, cs, gates, tcs = cache
        T, B, D = xt.shape
        u = self.units
        U_T = np.ascontiguousarray(params["U"].T)
        if self.return_sequences:
            dy_t = np.ascontiguousarray(dy.transpose(1, 0, 2))
        dz_all = np.empty((T, B, 4 * u))
        dh_next = np.zeros((B, u))
        dc = np.zeros((B, u))
        for t in range(T - 1, -1, -1):
            if self.return_sequences:
                dh = dy_t[t] + dh_next
            elif t == T - 1:
                dh = dy + dh_next
            else:
                dh = dh_next
            _cell_backward(dh, dc, gates[t], cs[t], tcs[t], dz_all[t])
            dh_next = dz_all[t] @ U_T
        flat_dz = dz_all.reshape(T * B, 4 * u)
        grads = {
            "W": xt.reshape(T * B, D).T @ flat_dz,
            "U": hs[:-1].reshape(T * B, u).T @ flat_dz,
            "b": flat_dz.sum(axis=0),
        }
        dx = (flat_dz @ params["W"].T).reshape(T, B, D).transpose(1, 0, 2)
        return np.ascontiguousarray(dx), grads


def _gate_scale(u: int) -> np.ndarray:
    scale = np.full(4 * u, 0.5)
    scale[2 * u : 3 * u] = 1.0
    return scale


@njit(cache=True)
def _cell_update(gates, c_prev, c_out):
    """Map tanh(v/2) to sigmoid(v) on the i, f, o columns, then c = f*c_prev + i*g."""
    n, u = c_prev.shape
    for b in range(n):
        for j in range(u):
            i = 0.5 * gates[b, j] + 0.5
            f = 0.5 * gates[b, u + j] + 0.5
            o = 0.5 * gates[b, 3 * u + j] + 0.5
            gates[b, j] = i
            gates[b, u + j] = f
            gates[b, 3 * u + j] = o
            c_out[b, j] = f * c_prev[b, j] + i * gates[b, 2 * u + j]


@njit(cache=True)
def _cell_backward(dh, dc, gates, c_prev, tc, dz):
    """One BPTT step; ``dc`` holds dL/dc_t on entry and dL/dc_{t-1} on exit."""
    n, u = dh.shape
    for b in range(n):
        for j in range(u):
            i = gates[b, j]
            f = gates[b, u + j]
            g = gates[b, 2 * u + j]
            o = gates[b, 3 * u + j]
            t = tc[b, j]
            d = dc[b, j] + dh[b, j] * o * (1.0 - t * t)
            dz[b, j] = d * g * i * (1.0 - i)
            dz[b, u + j] = d * c_prev[b, j] * f * (1.0 - f)
            dz[b, 2 * u + j] = d * i * (1.0 - g * g)
            dz[b, 3 * u + j] = dh[b, j] * t * o * (1.0 - o)
            dc[b, j] = d * f


@dataclass(frozen=True)
class Conv1D(Layer):
    """Valid (unpadded) stride-1 convolution over time."""

    filters: int
    kernel_size: int
    activation: str = "linear"
    kind = "conv1d"

    def __post_init__(self):
        if self.filters < 1 or self.kernel_size < 1:
            raise ValueError("Conv1D filters and kernel_size must be >= 1")
        if self.activation not in ACTIVATIONS or self.activation == "softmax":
            raise ValueError(f"unsupported Conv1D activation {self.activation!r}")

    def output_shape(self, in_shape):
        if len(in_shape) != 2:
            raise ValueError(f"Conv1D expects (T, C) input, got shape {in_shape}")
        t_out = in_shape[0] - self.kernel_size + 1
        if t_out < 1:
            raise ValueError(f"sequence of length {in_shape[0]} too short for kernel {self.kernel_size}")
        return (t_out, self.filters)

    def param_shapes(self, in_shape):
        return {"W": (self.kernel_size * in_shape[1], self.filters), "b": (self.filters,)}

    def init_params(self, in_shape, rng):
        k, c, f = self.kernel_size, in_shape[1], self.filters
        return {"W": glorot_uniform(rng, (k * c, f), k * c, k * f), "b": np.zeros(f)}

    def _columns(self, x):
        t_out = x.shape[1] - self.kernel_size + 1
        return np.concatenate([x[:, j : j + t_out] for j in range(self.kernel_size)], axis=2)

    def forward(self, params, x, training=False, rng=None):
        cols = self._columns(x)
        z = cols @ params["W"] + params["b"]
        y = activate(self.activation, z)
        return y, (x.shape, cols, z, y)

    def backward(self, params, cache, dy):
        x_shape, cols, z, y = cache
        dz = activation_backward(self.activation, z, y, dy)
        B, t_out, kc = cols.shape
        grads = {
            "W": cols.reshape(B * t_out, kc).T @ dz.reshape(B * t_out, -1),
            "b": dz.sum(axis=(0, 1)),
        }
        dcols = dz @ params["W"].T
        dx = np.zeros(x_shape)
        c = x_shape[2]
        for j in range(self.kernel_size):
            dx[:, j : j + t_out] += dcols[:, :, j * c : (j + 1) * c]
        return dx, grads


@dataclass(frozen=True)
class MaxPool1D(Layer):
    """Non-overlapping max pooling (stride = pool_size); trailing steps are dropped."""

    pool_size: int = 2
    kind = "maxpool1d"

    def __post_init__(self):
        if self.pool_size < 1:
            raise ValueError("pool_size must be >= 1")

    def output_shape(self, in_shape):
        t_out = in_shape[0] // self.pool_size
        if t_out < 1:
            raise ValueError(f"sequence of length {in_shape[0]} too short for pool {self.pool_size}")
        return (t_out, in_shape[1])

    def forward(self, params, x, training=False, rng=None):
        B, T, C = x.shape
        p = self.pool_size
        t_out = T // p
        xr = x[:, : t_out * p].reshape(B, t_out, p, C)
        idx = xr.argmax(axis=2)
        y = np.take_along_axis(xr, idx[:, :, None, :], axis=2)[:, :, 0, :]
        return y, (x.shape, idx)

    def backward(self, params, cache, dy):
        (B, T, C), idx = cache
        p = self.pool_size
        t_out = T // p
        route = np.arange(p)[None, None, :, None] == idx[:, :, None, :]
        dx = np.zeros((B, T, C))
        dx[:, : t_out * p] = (route * dy[:, :, None, :]).reshape(B, t_out * p, C)
        return dx, {}


@dataclass(frozen=True)
class Dropout(Layer):
    """Inverted dropout: survivors are scaled by 1/(1-rate) in training, identity otherwise."""

    rate: float = 0.2
    kind = "dropout"

    def __post_init__(self):
        if not 0.0 <= self.rate < 1.0:
            raise ValueError("dropout rate must lie in [0, 1)")

    def forward(self, params, x, training=False, rng=None):
        if not training or self.rate == 0.0:
            return x, None
        if rng is None:
            raise ValueError("training-mode dropout needs a random stream")
        mask = (rng.random(x.shape) >= self.rate) / (1.0 - self.rate)
        return x * mask, mask

    def backward(self, params, cache, dy):
        return (dy if cache is None else dy * cache), {}


@dataclass(frozen=True)
class Flatten(Layer):
    kind = "flatten"

    def output_shape(self, in_shape):
        return (int(np.prod(in_shape)),)

    def forward(self, params, x, training=False, rng=None):
        return x.reshape(x.shape[0], -1), x.shape

    def backward(self, params, cache, dy):
        return dy.reshape(cache), {}


LAYER_TYPES = {cls.kind: cls for cls in (Dense, Lstm, Conv1D, MaxPool1D, Dropout, Flatten)}


def layer_from_dict(d: dict) -> Layer:
    d = dict(d)
    kind = d.pop("kind")
    try:
        cls = LAYER_TYPES[kind]
    except KeyError:
        raise ValueError(f"unknown layer kind {kind!r}") from None
    return cls(**d)
