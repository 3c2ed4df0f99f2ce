"""Scalar and vector AWGN capacity expressions shared by the bound and regions.

Rates are in bits per real channel use: a point-to-point link of gain h
carries at most ``0.5 * log2(1 + h^2 * P / sigma^2)``.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["awgn_half_capacity", "mimo_equal_power_capacity", "mimo_cooperative_capacity"]


def awgn_half_capacity(snr: float) -> float:
    """0.5 * log2(1 + snr); snr must be >= 0."""
    if snr < 0:
        raise ValueError(f"negative SNR {snr}")
    return 0.5 * math.log2(1.0 + snr)


def mimo_equal_power_capacity(H: np.ndarray, snr_scale: float) -> float:
    """0.5 * log2 det(I + (P/sigma^2) H H^T) with independent equal-power inputs."""
    H = np.asarray(H, dtype=float)
    gram = np.eye(H.shape[0]) + snr_scale * (H @ H.T)
    sign, logdet = np.linalg.slogdet(gram)
    if sign <= 0:
        raise ArithmeticError("log-det argument not positive definite")
    return 0.5 * logdet / math.log(2.0)


def _project_capped_psd(Q: np.ndarray, cap: float, sweeps: int = 12) -> np.ndarray:
    """Approximate projection onto {Q psd, Q_ii <= cap} by alternating steps."""
    Q = 0.5 * (Q + Q.T)
    for _ in range(sweeps):
        w, V = np.linalg.eigh(Q)
        Q = (V * np.maximum(w, 0.0)) @ V.T
        d = np.diag(Q)
        over = d > cap
        if not over.any():
            break
        scale = np.ones_like(d)
        scale[over] = np.sqrt(cap / d[over])
        Q = Q * np.outer(scale, scale)
    return 0.5 * (Q + Q.T)


def mimo_cooperative_capacity(
    H: np.ndarray,
    power: float,
    noise: float,
    tol: float = 1e-9,
    max_iters: int = 400,
) -> float:
    """Transmitter-cooperative upper bound under per-antenna power caps.

    Maximizes 0.5 * log2 det(I + H Q H^T / sigma^2) over psd Q with
    Q_ii <= P by projected gradient ascent with step halving.  The
    objective is concave, so this converges to the optimum of the relaxed
    (approximately projected) problem; used for sensitivity studies only.
    """
    H = np.asarray(H, dtype=float)
    nr, nt = H.shape

    def value(Q: np.ndarray) -> float:
        sign, logdet = np.linalg.slogdet(np.eye(nr) + (H @ Q @ H.T) / noise)
        return 0.5 * logdet / math.log(2.0) if sign > 0 else -np.inf

    Q = np.eye(nt) * power
    best = value(Q)
    step = float(power)
    for _ in range(max_iters):
        inner = np.linalg.inv(np.eye(nr) + (H @ Q @ H.T) / noise)
        grad = (H.T @ inner @ H) / (noise * 2.0 * math.log(2.0))
        improved = False
        t = step
        while t > 1e-14:
            cand = _project_capped_psd(Q + t * grad, power)
            cand_val = value(cand)
            if cand_val > best + tol:
                Q, best = cand, cand_val
                step = t
                improved = True
                break
            t *= 0.5
        if not improved:
            break
    return float(best)
