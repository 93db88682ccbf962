from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

BETA1 = 0.9
BETA2 = 0.999
EPS = 1e-8


@dataclass
class AdamState:
    m: list = field(default_factory=list)
    v: list = field(default_factory=list)
    t: int = 0

    @classmethod
    def zeros_like(cls, params: list[dict]) -> "AdamState":
        return cls(
            [{k: np.zeros_like(a) for k, a in p.items()} for p in params],
            [{k: np.zeros_like(a) for k, a in p.items()} for p in params],
            0,
        )


def adam_step(params: list[dict], grads: list[dict], state: AdamState, lr: float) -> None:
    """One bias-corrected Adam update, applied in place to ``params`` and ``state``."""
    state.t += 1
    bc1 = 1.0 - BETA1**state.t
    bc2 = 1.0 - BETA2**state.t
    for p, g, m, v in zip(params, grads, state.m, state.v):
        for k in p:
            gk = g[k]
            m[k] *= BETA1
            m[k] += (1.0 - BETA1) * gk
            v[k] *= BETA2
            v[k] += (1.0 - BETA2) * (gk * gk)
            p[k] -= lr * (m[k] / bc1) / (np.sqrt(v[k] / bc2) + EPS)
