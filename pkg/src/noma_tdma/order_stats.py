"""Paired order statistics of exponentially distributed effective SNRs.

Out of M i.i.d. Rayleigh users the m-th and n-th weakest (1 <= m < n <= M)
are paired; their effective SNRs x = rho*|h_(m)|^2, y = rho*|h_(n)|^2 are
the m-th and n-th order statistics of M i.i.d. exponential(mean rho) draws.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .regions import ChannelPair


@dataclass(frozen=True)
class PairingConfig:
    """Population size M, paired order indices (m, n), transmit SNR rho."""

    M: int
    m: int
    n: int
    rho: float

    def __post_init__(self):
        if not (isinstance(self.M, int) and isinstance(self.m, int)
                and isinstance(self.n, int)):
            raise ValueError("M, m, n must be integers")
        if not 1 <= self.m < self.n <= self.M:
            raise ValueError(f"need 1 <= m < n <= M, got (M,m,n)=({self.M},{self.m},{self.n})")
        if not (np.isfinite(self.rho) and self.rho > 0.0):
            raise ValueError(f"rho must be positive and finite, got {self.rho}")


@dataclass(frozen=True)
class AnalyticConstants:
    """Constants entering the closed-form event probabilities.

    w1: joint order-statistic normalization M!/((m-1)!(n-1-m)!(M-n)!)
    w2: SNR threshold (1 - 2*a2)/a2^2 for the equal time split
    w3: n-th order-statistic normalization M!/((n-1)!(M-n)!)
    d:  exp(-w2/rho)
    """

    w1: float
    w2: float
    w3: float
    d: float


def constants_for(cfg: PairingConfig, a2: float) -> AnalyticConstants:
    """Evaluate (w1, w2, w3, d) for a pairing and a power split a2 in (0, 1/2]."""
    if not 0.0 < a2 <= 0.5:
        raise ValueError(f"need 0 < a2 <= 1/2, got {a2}")
    M, m, n = cfg.M, cfg.m, cfg.n
    w1 = math.factorial(M) // (
        math.factorial(m - 1) * math.factorial(n - 1 - m) * math.factorial(M - n))
    w3 = math.factorial(M) // (math.factorial(n - 1) * math.factorial(M - n))
    w2 = (1.0 - 2.0 * a2) / a2**2
    return AnalyticConstants(float(w1), w2, float(w3), math.exp(-w2 / cfg.rho))


def joint_pdf(x, y, cfg: PairingConfig):
    """Joint density of the paired order statistics at (x, y); zero for x >= y.

    f(x, y) = w1 f(x) f(y) F(x)^(m-1) [1-F(y)]^(M-n) [F(y)-F(x)]^(n-1-m)
    with f, F the exponential(mean rho) pdf/cdf.  Accepts scalars or arrays.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if np.any(x <= 0.0) or np.any(y <= 0.0):
        raise ValueError("SNR arguments must be positive")
    M, m, n, rho = cfg.M, cfg.m, cfg.n, cfg.rho
    w1 = constants_for(cfg, 0.5).w1
    ux = np.exp(-x / rho)          # 1 - F(x)
    uy = np.exp(-y / rho)
    dens = (w1 / rho**2 * ux * uy
            * (1.0 - ux)**(m - 1)
            * uy**(M - n)
            * np.maximum(ux - uy, 0.0)**(n - 1 - m))
    out = np.where(x < y, dens, 0.0)
    return float(out) if out.ndim == 0 else out


def marginal_cdf_n(t, cfg: PairingConfig):
    """CDF of the n-th order statistic: P(at least n of M draws <= t)."""
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < 0.0):
        raise ValueError("t must be nonnegative")
    M, n = cfg.M, cfg.n
    F = -np.expm1(-t / cfg.rho)
    out = np.zeros_like(F)
    for i in range(n, M + 1):
        out = out + math.comb(M, i) * F**i * (1.0 - F)**(M - i)
    return float(out) if out.ndim == 0 else out


def sample_pairs(cfg: PairingConfig, rng: np.random.Generator,
                 size: int) -> tuple[np.ndarray, np.ndarray]:
    """Draw `size` ordered SNR pairs (x, y); vectorized sampler.

    Each row sorts M i.i.d. exponential(mean rho) draws and keeps entries
    m and n.  Exact ties (probability ~0 in float64) are resampled.
    """
    rho, M, m, n = cfg.rho, cfg.M, cfg.m, cfg.n
    gains = rng.exponential(scale=rho, size=(size, M))
    gains.sort(axis=1)
    x = gains[:, m - 1].copy()
    y = gains[:, n - 1].copy()
    while True:
        bad = np.flatnonzero(x >= y)
        if bad.size == 0:
            break
        redraw = rng.exponential(scale=rho, size=(bad.size, M))
        redraw.sort(axis=1)
        x[bad] = redraw[:, m - 1]
        y[bad] = redraw[:, n - 1]
    return x, y


def sample_pair(cfg: PairingConfig, rng: np.random.Generator) -> ChannelPair:
    """Draw one ordered channel pair."""
    x, y = sample_pairs(cfg, rng, 1)
    return ChannelPair(float(x[0]), float(y[0]))
