"""Deterministic quadrature oracle for the event probabilities.

The joint order-statistic density is pushed through u = exp(-x/rho),
s = exp(-(y-x)/rho) (i.e. s = v/u with v = exp(-y/rho)), which maps the
support 0 < x < y onto the open unit square and turns the density into the
separable polynomial

    w1 (1-u)^(m-1) u^(M-m) * s^(M-n) (1-s)^(n-1-m).

For a fixed u the weak-user SNR x is fixed, so the event label along the
s-direction changes at a handful of points only; those are located by
bisection on the (black-box) classifier and each labelled segment is
integrated exactly via the regularized incomplete beta function.  The outer
u-integral is then done with adaptive Gauss-Legendre panels refined near the
kinks the event boundaries induce.
"""
from __future__ import annotations

import heapq
import math
from functools import lru_cache

import numpy as np
from scipy.special import betainc, beta as beta_fn

from .analytic import ConvergenceError, EventProbabilities
from .events import EventId, classify_many
from .order_stats import PairingConfig

_BISECT_ITERS = 60   # enough to pin a boundary to ~1e-18 in s
_MAX_PANELS = 4096


def _s_probe_grid() -> np.ndarray:
    """Coarse s-samples used to bracket label changes: uniform in the bulk,
    geometric toward both endpoints so boundaries hugging s=0 (y -> inf) or
    s=1 (y -> x) are still detected."""
    tails = 2.0 ** -np.arange(6, 44, 2.0)
    bulk = (np.arange(64) + 0.5) / 64
    return np.unique(np.concatenate((tails, bulk, 1.0 - tails)))


_SPROBES = _s_probe_grid()


def _column_masses(u: float, cfg: PairingConfig, a2: float, b2: float) -> np.ndarray:
    """Integrate s^(M-n)(1-s)^(n-1-m) over each event's share of s in (0,1)."""
    M, m, n, rho = cfg.M, cfg.m, cfg.n, cfg.rho
    x = -rho * math.log(u)
    a_b, b_b = M - n + 1, n - m  # beta parameters of the s-factor
    bfull = beta_fn(a_b, b_b)

    s = _SPROBES
    labels = classify_many(x, x - rho * np.log(s), a2, b2)

    changes = np.flatnonzero(labels[1:] != labels[:-1])
    lo = s[changes]
    hi = s[changes + 1]
    left_label = labels[changes]
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        lab_mid = classify_many(x, x - rho * np.log(mid), a2, b2)
        take_lo = lab_mid == left_label
        lo = np.where(take_lo, mid, lo)
        hi = np.where(take_lo, hi, mid)
    cuts = 0.5 * (lo + hi)

    edges = np.concatenate(([0.0], cuts, [1.0]))
    seg_labels = np.concatenate((labels[changes], [labels[-1]])) if changes.size \
        else labels[:1]
    cdf = bfull * betainc(a_b, b_b, edges)
    seg_mass = np.diff(cdf)

    masses = np.zeros(4)
    for lab, mass in zip(seg_labels, seg_mass):
        masses[lab - 1] += mass
    return masses


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def _gauss8(lo: float, hi: float, colmass, weight_fn) -> np.ndarray:
    """8-node Gauss-Legendre estimate of one u-panel (4-vector of events)."""
    u = 0.5 * (hi + lo) + 0.5 * (hi - lo) * _GL_NODES
    w = 0.5 * (hi - lo) * _GL_WEIGHTS
    acc = np.zeros(4)
    for ui, wi in zip(u, w):
        acc += wi * weight_fn(ui) * colmass(ui)
    return acc


def event_probabilities_quadrature(cfg: PairingConfig, a2: float, b2: float = 0.5,
                                   tol: float = 1e-6,
                                   max_panels: int = _MAX_PANELS) -> EventProbabilities:
    """All four event probabilities by adaptive 2-D quadrature of the joint
    density against the classifier indicator.  Deterministic for fixed tol."""
    if tol < 1e-10:
        raise ValueError(f"tol must be >= 1e-10, got {tol}")
    M, m = cfg.M, cfg.m
    logw1 = (math.lgamma(M + 1) - math.lgamma(m) - math.lgamma(cfg.n - m)
             - math.lgamma(M - cfg.n + 1))
    w1 = math.exp(logw1)

    cache: dict[float, np.ndarray] = {}

    def colmass(u: float) -> np.ndarray:
        got = cache.get(u)
        if got is None:
            got = cache[u] = _column_masses(u, cfg, a2, b2)
        return got

    def weight(u: float) -> float:
        return w1 * (1.0 - u)**(m - 1) * u**(M - m)

    # adaptive bisected Gauss: error of a panel is |whole - (left + right)|,
    # refined breadth-first by a worst-first heap with a global budget
    heap = []
    counter = 0  # heap tie-breaker

    def push(lo: float, hi: float, whole: np.ndarray) -> None:
        nonlocal counter
        mid = 0.5 * (lo + hi)
        left = _gauss8(lo, mid, colmass, weight)
        right = _gauss8(mid, hi, colmass, weight)
        err = float(np.abs(whole - (left + right)).sum())
        counter += 1
        heapq.heappush(heap, (-err, counter, lo, mid, hi, left, right))

    n_start = 8
    for i in range(n_start):
        lo, hi = i / n_start, (i + 1) / n_start
        push(lo, hi, _gauss8(lo, hi, colmass, weight))

    refined = 0
    while True:
        total_err = -math.fsum(item[0] for item in heap)
        if total_err <= 0.5 * tol:
            break
        if len(heap) >= max_panels:
            raise ConvergenceError(
                f"u-panel budget {max_panels} exhausted; residual error "
                f"estimate {total_err:.3e} (panels refined: {refined})")
        _, _, lo, mid, hi, left, right = heapq.heappop(heap)
        push(lo, mid, left)
        push(mid, hi, right)
        refined += 1

    totals = np.zeros(4)
    for _, _, _, _, _, left, right in heap:
        totals += left + right
    if abs(totals.sum() - 1.0) > 10.0 * tol:
        raise ConvergenceError(
            f"event masses sum to {totals.sum()}, outside 1 +/- {10 * tol}")
    p = np.clip(totals, 0.0, 1.0)
    return EventProbabilities(*map(float, p), method="quadrature")


@lru_cache(maxsize=128)
def _cached_quadrature(cfg: PairingConfig, a2: float, b2: float,
                       tol: float) -> EventProbabilities:
    return event_probabilities_quadrature(cfg, a2, b2, tol)


def p_event_quadrature(event: EventId, cfg: PairingConfig, a2: float,
                       b2: float = 0.5, tol: float = 1e-6) -> float:
    """Single event probability; the underlying 4-vector is computed once
    per (cfg, a2, b2, tol) and cached."""
    probs = _cached_quadrature(cfg, a2, b2, tol)
    return probs.as_tuple()[event.value - 1]
