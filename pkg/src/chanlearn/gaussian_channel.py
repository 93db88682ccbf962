"""Covariance-level simulation of a pure lossy channel on a two-mode squeezed vacuum.

Conventions: quadrature ordering (x1, p1, x2, p2), vacuum covariance is the
identity. The channel acts on mode 1 only; mode 2 is the idler kept by the
sender, so the output is the Choi state covariance of the channel.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

PHYSICALITY_TOL = 1e-9

SIGMA_Z = np.diag([1.0, -1.0])
OMEGA_1 = np.array([[0.0, 1.0], [-1.0, 0.0]])
OMEGA = np.kron(np.eye(2), OMEGA_1)


class ChannelMatrices(NamedTuple):
    x: np.ndarray
    y: np.ndarray


def _check_eta(eta: float) -> float:
    eta = float(eta)
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"transmissivity must lie in [0, 1], got {eta}")
    return eta


def _check_r(r: float) -> float:
    r = float(r)
    if not r >= 0.0:
        raise ValueError(f"squeezing parameter must be >= 0, got {r}")
    return r


def tmsv_covariance(r: float) -> np.ndarray:
    """Covariance matrix of the two-mode squeezed vacuum with squeezing ``r``."""
    r = _check_r(r)
    c, s = np.cosh(2 * r), np.sinh(2 * r)
    out = np.zeros((4, 4))
    out[:2, :2] = c * np.eye(2)
    out[2:, 2:] = c * np.eye(2)
    out[:2, 2:] = s * SIGMA_Z
    out[2:, :2] = s * SIGMA_Z
    return out


def lossy_channel_matrices(eta: float) -> ChannelMatrices:
    eta = _check_eta(eta)
    return ChannelMatrices(np.sqrt(eta) * np.eye(2), (1.0 - eta) * np.eye(2))


def check_physical(sigma: np.ndarray) -> bool:
    """True iff ``sigma + i*Omega`` is positive semidefinite (up to ``PHYSICALITY_TOL``)."""
    sigma = np.asarray(sigma, dtype=float)
    n = sigma.shape[0]
    omega = np.kron(np.eye(n // 2), OMEGA_1)
    # Hermitian H = S + iW is PSD iff the real embedding [[S, -W], [W, S]] is
    embed = np.block([[sigma, -omega], [omega, sigma]])
    return bool(np.linalg.eigvalsh(embed).min() >= -PHYSICALITY_TOL)


def apply_lossy_first_mode(sigma: np.ndarray, eta: float) -> np.ndarray:
    """Send mode 1 of a two-mode state through the pure lossy channel."""
    eta = _check_eta(eta)
    sigma = np.asarray(sigma, dtype=float)
    if sigma.shape != (4, 4):
        raise ValueError(f"expected a 4x4 covariance matrix, got shape {sigma.shape}")
    if not check_physical(sigma):
        raise ValueError("input covariance matrix violates the uncertainty relation")
    x, y = lossy_channel_matrices(eta)
    big_x = np.eye(4)
    big_x[:2, :2] = x
    big_y = np.zeros((4, 4))
    big_y[:2, :2] = y
    out = big_x @ sigma @ big_x.T + big_y
    return 0.5 * (out + out.T)


def choi_covariance(eta: float, r: float) -> np.ndarray:
    """Closed-form Choi-state covariance for transmissivity ``eta`` and squeezing ``r``."""
    eta, r = _check_eta(eta), _check_r(r)
    c, s = np.cosh(2 * r), np.sinh(2 * r)
    a = eta * c + (1.0 - eta)
    t = np.sqrt(eta) * s
    return np.array(
        [
            [a, 0.0, t, 0.0],
            [0.0, a, 0.0, -t],
            [t, 0.0, c, 0.0],
            [0.0, -t, 0.0, c],
        ]
    )


def feature_sigma11(eta, r: float):
    """First diagonal entry of the Choi covariance; vectorised over ``eta``."""
    r = _check_r(r)
    eta_arr = np.asarray(eta, dtype=float)
    if np.any((eta_arr < 0.0) | (eta_arr > 1.0)):
        raise ValueError("transmissivity must lie in [0, 1]")
    out = eta_arr * np.cosh(2 * r) + (1.0 - eta_arr)
    return float(out) if out.ndim == 0 else out


def invert_feature(f, r: float):
    """Recover ``eta`` from a sigma_11 feature value; vectorised over ``f``."""
    r = _check_r(r)
    if r == 0.0:
        raise ValueError("feature map is degenerate at r = 0")
    top = np.cosh(2 * r)
    f_arr = np.asarray(f, dtype=float)
    # float slack: features produced by feature_sigma11 may overshoot cosh(2r) by an ulp
    slack = 1e-12 * top
    if np.any((f_arr < 1.0 - slack) | (f_arr > top + slack)):
        raise ValueError(f"feature outside [1, cosh(2r)] = [1, {top}]")
    out = np.clip((f_arr - 1.0) / (top - 1.0), 0.0, 1.0)
    return float(out) if out.ndim == 0 else out
