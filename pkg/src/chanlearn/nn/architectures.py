"""The layer stacks used in the experiments."""

from __future__ import annotations

from .layers import Conv1D, Dense, Dropout, Flatten, Lstm, MaxPool1D
from .network import NetworkSpec, param_count

RNN_WIDTHS = (64, 32, 64, 16)


def ffnn_classifier(seq_len: int, n_classes: int = 5, dropout: float = 0.2) -> NetworkSpec:
    layers = (
        Flatten(),
        Dense(128, "relu"),
        Dropout(dropout),
        Dense(128, "relu"),
        Dropout(dropout),
        Dense(64, "relu"),
        Dense(64, "relu"),
        Dropout(dropout),
        Dense(16, "relu"),
        Dense(n_classes, "softmax"),
    )
    return NetworkSpec((seq_len, 1), layers, "softmax_cross_entropy")


def rnn_classifier(
    seq_len: int, n_classes: int = 5, widths=RNN_WIDTHS, dropout: float = 0.2
) -> NetworkSpec:
    """LSTM -> LSTM -> Dense -> Dense -> softmax, dropout after each hidden Dense."""
    l1, l2, d1, d2 = widths
    layers = (
        Lstm(l1, return_sequences=True),
        Lstm(l2),
        Dense(d1, "relu"),
        Dropout(dropout),
        Dense(d2, "relu"),
        Dropout(dropout),
        Dense(n_classes, "softmax"),
    )
    return NetworkSpec((seq_len, 1), layers, "softmax_cross_entropy")


def cnn_classifier(seq_len: int, n_classes: int = 5, filters: int = 128, kernel: int = 2) -> NetworkSpec:
    """Two conv/pool blocks, Dense(64), softmax.

    A pooling stage is skipped when it would leave too few steps for the next
    convolution (or, after the last one, fewer than one step), so every length
    from ``2 * kernel - 1`` up remains usable.
    """
    layers = []
    t = seq_len
    for block in range(2):
        layers.append(Conv1D(filters, kernel, "relu"))
        t = t - kernel + 1
        needed = kernel if block == 0 else 1
        if t // 2 >= needed:
            layers.append(MaxPool1D(2))
            t //= 2
    layers += [Flatten(), Dense(64, "relu"), Dense(n_classes, "softmax")]
    return NetworkSpec((seq_len, 1), tuple(layers), "softmax_cross_entropy")


def mlp_regressor(n_in: int, n_out: int, hidden=(64, 32)) -> NetworkSpec:
    layers = tuple(Dense(h, "relu") for h in hidden) + (Dense(n_out, "linear"),)
    return NetworkSpec((n_in,), layers, "mse")


def regression_mlp(seq_len: int = 5, hidden=(64, 32)) -> NetworkSpec:
    return mlp_regressor(seq_len, seq_len, hidden)


def markov_forecast_mlp(n_in: int = 6, horizon: int = 3) -> NetworkSpec:
    return mlp_regressor(n_in, horizon, (32, 16))


def deterministic_forecast_mlp(n_in: int, horizon: int = 6) -> NetworkSpec:
    return mlp_regressor(n_in, horizon, (256, 64, 32))


def _scaled_widths(widths, factor: float) -> tuple:
    return tuple(max(1, int(round(w * factor))) for w in widths)


def scaled_rnn_classifier(target_params: int, seq_len: int, n_classes: int = 5, tol: float = 0.1):
    """Scale every hidden width of the LSTM classifier by one common factor,
    found by bisection on the parameter count. Returns ``(spec, factor)``."""

    def count(f):
        return param_count(rnn_classifier(seq_len, n_classes, _scaled_widths(RNN_WIDTHS, f)))

    lo, hi = 1e-3, 1.0
    while count(hi) < target_params:
        hi *= 2.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if count(mid) < target_params:
            lo = mid
        else:
            hi = mid
    # the count is a step function of the factor; take whichever side lands closer
    best = min((lo, hi), key=lambda f: abs(count(f) - target_params))
    spec = rnn_classifier(seq_len, n_classes, _scaled_widths(RNN_WIDTHS, best))
    if abs(param_count(spec) - target_params) > tol * target_params:
        raise ValueError(f"cannot reach {target_params} parameters within {tol:.0%}; got {param_count(spec)}")
    return spec, best


CLASSIFIERS = {"ffnn": ffnn_classifier, "rnn": rnn_classifier, "cnn1d": cnn_classifier}


def build_named(name: str, task: str, seq_len: int, out_width: int, n_classes: int = 5) -> NetworkSpec:
    """Network for a model name and dataset task.

    Classifiers use the fixed stacks above. For regression and forecasting,
    ``ffnn`` picks the MLP matching the target width (5: regression, 3:
    Markovian forecast, otherwise the deterministic forecaster); ``rnn`` and
    ``cnn1d`` reuse the classifier bodies with a linear head.
    """
    if task in ("classification", "binning"):
        try:
            return CLASSIFIERS[name](seq_len, n_classes)
        except KeyError:
            raise ValueError(f"unknown model {name!r}; expected one of {sorted(CLASSIFIERS)}") from None
    if name == "ffnn":
        if task == "regression":
            return mlp_regressor(seq_len, out_width, (64, 32))
        if out_width == 3:
            return markov_forecast_mlp(seq_len, out_width)
        return deterministic_forecast_mlp(seq_len, out_width)
    if name in ("rnn", "cnn1d"):
        body = CLASSIFIERS[name](seq_len, 1).layers[:-1]
        return NetworkSpec((seq_len, 1), body + (Dense(out_width, "linear"),), "mse")
    raise ValueError(f"unknown model {name!r}; expected ffnn, rnn or cnn1d")
