"""Generators of transmissivity sequences for the five channel classes.

Stochastic classes draw each eta_k from a Beta distribution whose mean and
variance are updated from past values through a weight vector ``mu``;
compound and deterministic classes are the degenerate (Dirac) cases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

DEGENERATE_VAR = 1e-12
CLAMP_FRACTION = 0.999
NM_MU_MAX = 6.0 / 11.0


@dataclass(frozen=True)
class BetaParams:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise ValueError(f"Beta shapes must be positive, got ({self.alpha}, {self.beta})")


@dataclass(frozen=True)
class MomentSpec:
    mean: float
    var: float

    def __post_init__(self):
        if not 0.0 < self.mean < 1.0:
            raise ValueError(f"mean must lie in (0, 1), got {self.mean}")
        if not 0.0 <= self.var < self.mean * (1.0 - self.mean):
            raise ValueError(
                f"variance {self.var} outside [0, mean(1-mean)) for mean {self.mean}"
            )


# ---- channel kinds ---------------------------------------------------------


@dataclass(frozen=True)
class NonMarkovian:
    mu: float
    label = "NM"

    def __post_init__(self):
        if not 0.0 <= self.mu <= NM_MU_MAX + 1e-12:
            raise ValueError(f"non-Markovian mu must lie in [0, 6/11], got {self.mu}")


@dataclass(frozen=True)
class Markovian:
    mu: float
    label = "M"

    def __post_init__(self):
        if not 0.0 <= self.mu <= 1.0:
            raise ValueError(f"Markovian mu must lie in [0, 1], got {self.mu}")


@dataclass(frozen=True)
class Memoryless:
    label = "ML"


@dataclass(frozen=True)
class Compound:
    label = "C"


def _check_det(a: float, b: float, delta: float, lo: float, hi: float, name: str):
    if not (0.0 < a < 0.5 and 0.0 < b < 0.5):
        raise ValueError(f"{name}: need 0 < a, b < 0.5, got a={a}, b={b}")
    if not lo < delta < hi:
        raise ValueError(f"{name}: need {lo} < delta < {hi}, got {delta}")


@dataclass(frozen=True)
class DeterministicCos:
    a: float
    b: float
    delta: float
    label = "D"

    def __post_init__(self):
        _check_det(self.a, self.b, self.delta, 1.0, 10.0, "DeterministicCos")


@dataclass(frozen=True)
class DeterministicExp:
    a: float
    b: float
    delta: float
    label = "D"

    def __post_init__(self):
        _check_det(self.a, self.b, self.delta, 10.0, 30.0, "DeterministicExp")


ChannelKind = Union[NonMarkovian, Markovian, Memoryless, Compound, DeterministicCos, DeterministicExp]
DETERMINISTIC = (DeterministicCos, DeterministicExp)

# ---- initialisation --------------------------------------------------------


@dataclass(frozen=True)
class D1:
    params: BetaParams
    name = "D1"

    @property
    def moments(self) -> MomentSpec:
        return moments_from_beta(self.params)


@dataclass(frozen=True)
class D2:
    moments: MomentSpec
    name = "D2"

    @property
    def params(self) -> BetaParams:
        return beta_from_moments(self.moments)


InitSpec = Union[D1, D2]


@dataclass
class EtaSequence:
    values: np.ndarray
    kind: ChannelKind
    init: InitSpec | None
    seed: int | None = None
    meta: dict = field(default_factory=dict)


# ---- Beta algebra ----------------------------------------------------------


def moments_from_beta(p: BetaParams) -> MomentSpec:
    s = p.alpha + p.beta
    return MomentSpec(p.alpha / s, p.alpha * p.beta / (s * s * (s + 1.0)))


def beta_from_moments(m: MomentSpec) -> BetaParams:
    if m.var == 0.0:
        raise ValueError("zero variance: the distribution is a point mass, not a Beta")
    scale = m.mean * (1.0 - m.mean) / m.var - 1.0
    return BetaParams(m.mean * scale, (1.0 - m.mean) * scale)


def unimodal_var_bound(mean: float) -> float:
    """Largest variance for which the Beta with this mean still has alpha, beta >= 1."""
    v = mean * (1.0 - mean)
    return min(v / (1.0 + 1.0 / mean), v / (1.0 + 1.0 / (1.0 - mean)))


def sample_beta(p: BetaParams, rng: np.random.Generator) -> float:
    return float(rng.beta(p.alpha, p.beta))


# ---- memory update ---------------------------------------------------------


def memory_weights(kind: ChannelKind, k: int) -> tuple[float, ...]:
    """Weights applied to (eta_{k-1}, eta_{k-2}, ...) when drawing eta_k."""
    if k < 2:
        raise ValueError(f"memory weights are defined for k >= 2, got {k}")
    if isinstance(kind, NonMarkovian):
        full = (kind.mu, kind.mu / 2.0, kind.mu / 3.0)
        return full[: min(3, k - 1)]
    if isinstance(kind, Markovian):
        return (kind.mu,)
    if isinstance(kind, Memoryless):
        return ()
    if isinstance(kind, Compound):
        return (1.0,)
    raise ValueError(f"{type(kind).__name__} has no stochastic memory update")


def next_moments(weights, history, init: MomentSpec) -> tuple[float, float]:
    """Conditional (mean, var) for the next draw; ``history`` is newest-first.

    Returns a raw pair rather than a MomentSpec because the variance may be
    exactly zero (compound limit).
    """
    weights = tuple(weights)
    total = math.fsum(weights)
    if total > 1.0 + 1e-12:
        raise ValueError(f"memory weights sum to {total} > 1")
    if len(history) < len(weights):
        raise ValueError("history shorter than the weight vector")
    total = min(total, 1.0)
    mean = math.fsum(w * h for w, h in zip(weights, history)) + (1.0 - total) * init.mean
    var = (1.0 - total) * init.var
    return mean, var


def deterministic_eta(kind: DeterministicCos | DeterministicExp, k) -> float | np.ndarray:
    """Deterministic transmissivity at use ``k`` (1-based); vectorised over ``k``."""
    k = np.asarray(k, dtype=float)
    if np.any(k < 1):
        raise ValueError("channel uses are numbered from 1")
    if isinstance(kind, DeterministicExp):
        out = kind.a + kind.b * np.exp(-((k - 1.0) ** 2) / kind.delta)
    elif isinstance(kind, DeterministicCos):
        out = kind.a + kind.b * np.abs(np.cos((k - 1.0) / kind.delta))
    else:
        raise ValueError(f"{type(kind).__name__} is not deterministic")
    return float(out) if out.ndim == 0 else out


# ---- initial distributions -------------------------------------------------


def sample_init_d1(rng: np.random.Generator) -> D1:
    a, b = rng.uniform(1.0, 10.0, size=2)
    return D1(BetaParams(float(a), float(b)))


def sample_init_d2(rng: np.random.Generator) -> D2:
    mean = 0.0
    while mean == 0.0:
        mean = float(rng.uniform())
    u = 0.0
    while u == 0.0:
        u = float(rng.uniform())
    return D2(MomentSpec(mean, u * unimodal_var_bound(mean)))


def sample_init(generation: str, rng: np.random.Generator) -> InitSpec:
    if generation.upper() == "D1":
        return sample_init_d1(rng)
    if generation.upper() == "D2":
        return sample_init_d2(rng)
    raise ValueError(f"unknown generation mode {generation!r} (expected D1 or D2)")


# ---- sequences -------------------------------------------------------------


def _conditional_draw(mean: float, var: float, rng: np.random.Generator) -> float:
    if var < DEGENERATE_VAR or not 0.0 < mean < 1.0:
        return mean
    var = min(var, CLAMP_FRACTION * unimodal_var_bound(mean))
    return sample_beta(beta_from_moments(MomentSpec(mean, var)), rng)


def sample_eta_sequence(
    kind: ChannelKind, init: InitSpec | None, length: int, rng: np.random.Generator
) -> EtaSequence:
    if length < 1:
        raise ValueError(f"sequence length must be >= 1, got {length}")
    if isinstance(kind, DETERMINISTIC):
        values = deterministic_eta(kind, np.arange(1, length + 1))
        return EtaSequence(np.asarray(values, dtype=float).reshape(length), kind, init)
    if init is None:
        raise ValueError("stochastic channel kinds need an initial distribution")

    values = np.empty(length)
    values[0] = sample_beta(init.params, rng)
    m1 = init.moments
    for k in range(2, length + 1):
        weights = memory_weights(kind, k)
        history = values[k - 2 :: -1][: len(weights)]
        mean, var = next_moments(weights, history, m1)
        values[k - 1] = _conditional_draw(mean, var, rng)
    return EtaSequence(values, kind, init)
