"""Randomized self-check suites, shared by the CLI `validate` command and the
test suite.  Each check returns a record dict with a boolean `passed`."""
from __future__ import annotations

import math

import numpy as np
from scipy.integrate import dblquad

from . import analytic, montecarlo, quadrature
from .events import classify_many
from .order_stats import PairingConfig, constants_for, marginal_cdf_n, sample_pairs
from .regions import (
    ChannelPair,
    log2_1p,
    noma_boundary,
    noma_boundary_slope,
    noma_rates,
    single_user_rates,
    tdma_boundary,
)

#: (m, n) pairs and SNRs (dB) of the closed/quadrature/MC agreement grid
AGREEMENT_PAIRS = [(1, 2), (1, 10), (2, 7), (4, 5), (5, 6)]
AGREEMENT_RHO_DB = [20.0, 25.0, 30.0]


def _record(suite: str, check: str, passed: bool, detail: str) -> dict:
    return {"suite": suite, "check": check, "passed": bool(passed),
            "detail": detail}


def _random_channels(rng: np.random.Generator, count: int):
    x = rng.uniform(0.05, 50.0, count)
    y = x * (1.0 + rng.uniform(1e-3, 20.0, count))
    return x, y


def check_propositions(seed: int, samples: int = 1_000_000) -> list[dict]:
    """Monotone-sum and dominance inequalities plus full/reduced classifier
    agreement, on `samples` random draws."""
    rng = np.random.default_rng(seed)
    x, y = _random_channels(rng, samples)
    r2_star = log2_1p(y)

    z_a = rng.uniform(0.0, 1.0, samples) * r2_star
    z_b = rng.uniform(0.0, 1.0, samples) * r2_star
    z_hi = np.maximum(z_a, z_b)
    z_lo = np.minimum(z_a, z_b)
    distinct = z_hi > z_lo

    def f_noma(z):
        return log2_1p(x) - log2_1p(np.expm1(z * math.log(2.0)) * x / y)

    def f_tdma(z):
        return (1.0 - z / r2_star) * log2_1p(x)

    # sum monotonicity: z > z0 implies f^N(z) + z > f^T(z0) + z0
    lhs = f_noma(z_hi) + z_hi
    rhs = f_tdma(z_lo) + z_lo
    v1 = int(np.sum((lhs <= rhs) & distinct))

    # dominance: z < z0 implies f^N(z) > f^T(z0)
    v2 = int(np.sum((f_noma(z_lo) <= f_tdma(z_hi)) & distinct))

    a2 = rng.uniform(0.01, 0.5, samples)
    b2 = rng.uniform(0.01, 0.99, samples)
    full = classify_many(x, y, a2, b2, reduced=False)
    red = classify_many(x, y, a2, b2, reduced=True)
    disagreements = int(np.sum(full != red))

    return [
        _record("propositions", "monotone_sum_strict", v1 == 0,
                f"{v1} violations in {samples} draws"),
        _record("propositions", "dominance_strict", v2 == 0,
                f"{v2} violations in {samples} draws"),
        _record("propositions", "full_reduced_agreement", disagreements == 0,
                f"{disagreements} disagreements in {samples} draws"),
    ]


def check_regions(seed: int, samples: int = 1000) -> list[dict]:
    """Boundary endpoint identities, dominance, concavity, slope, and the
    point-F coordinates on random channels."""
    rng = np.random.default_rng(seed)
    records = []
    worst = {"endpoints": 0.0, "dominance": 0.0, "concavity": -np.inf,
             "monotone_sum": 0, "consistency": 0.0, "slope": 0.0, "point_f": 0.0}
    for _ in range(samples):
        x = float(rng.uniform(0.05, 50.0))
        y = x * (1.0 + float(rng.uniform(1e-3, 20.0)))
        ch = ChannelPair(x, y)
        r1s, r2s = single_user_rates(ch)

        worst["endpoints"] = max(
            worst["endpoints"],
            abs(noma_boundary(0.0, ch) - r1s), abs(noma_boundary(r2s, ch)),
            abs(tdma_boundary(0.0, ch) - r1s), abs(tdma_boundary(r2s, ch)))

        z = np.sort(rng.uniform(0.0, r2s, 16))
        fn = np.array([noma_boundary(float(zi), ch) for zi in z])
        ft = np.array([tdma_boundary(float(zi), ch) for zi in z])
        worst["dominance"] = max(worst["dominance"], float(np.max(ft - fn)))
        worst["monotone_sum"] += int(np.sum(np.diff(fn + z) <= 0.0))

        h = r2s / 64.0
        zi = float(rng.uniform(2 * h, r2s - 2 * h))
        second = (noma_boundary(zi + h, ch) - 2 * noma_boundary(zi, ch)
                  + noma_boundary(zi - h, ch)) / h**2
        worst["concavity"] = max(worst["concavity"], second / max(abs(second), 1.0))

        a2 = float(rng.uniform(0.0, 0.5))
        r1n, r2n = noma_rates(x, y, a2)
        worst["consistency"] = max(
            worst["consistency"], abs(float(r1n) - noma_boundary(float(r2n), ch)))

        hs = 1e-5  # small central-difference step for the slope comparison
        fd = (noma_boundary(zi + hs, ch) - noma_boundary(zi - hs, ch)) / (2 * hs)
        an = noma_boundary_slope(zi, ch)
        worst["slope"] = max(worst["slope"], abs(fd - an) / abs(an))

        f_expected = (math.log2(1 + y / 2), math.log2(1 + x / (2 + x)))
        r1f, r2f = noma_rates(x, y, 0.5)
        worst["point_f"] = max(worst["point_f"],
                               abs(float(r2f) - f_expected[0]),
                               abs(float(r1f) - f_expected[1]))

    records.append(_record("regions", "endpoint_identities",
                           worst["endpoints"] <= 1e-12,
                           f"worst |err| = {worst['endpoints']:.2e}"))
    records.append(_record("regions", "noma_dominates_tdma",
                           worst["dominance"] <= 1e-12,
                           f"worst f^T - f^N = {worst['dominance']:.2e}"))
    records.append(_record("regions", "monotone_sum",
                           worst["monotone_sum"] == 0,
                           f"{worst['monotone_sum']} non-increasing steps"))
    records.append(_record("regions", "concavity",
                           worst["concavity"] <= 1e-8,
                           f"worst normalized f'' = {worst['concavity']:.2e}"))
    records.append(_record("regions", "point_on_boundary",
                           worst["consistency"] <= 1e-10,
                           f"worst |r1 - f^N(r2)| = {worst['consistency']:.2e}"))
    records.append(_record("regions", "analytic_slope",
                           worst["slope"] <= 1e-6,
                           f"worst relative slope error = {worst['slope']:.2e}"))
    records.append(_record("regions", "point_f_coordinates",
                           worst["point_f"] <= 1e-10,
                           f"worst point-F deviation = {worst['point_f']:.2e}"))
    return records


def check_orderstats(seed: int, samples: int = 200_000) -> list[dict]:
    """Joint-PDF normalization, sampler-vs-CDF KS test, sampler-vs-PDF
    chi-square test, and a closed-form mean spot check."""
    records = []
    cfg = PairingConfig(10, 2, 7, 10.0)

    # substitution (u, v) = (exp(-x/rho), exp(-y/rho)) maps the support onto
    # the triangle 0 < v < u < 1 and the density onto a polynomial
    mass, _ = dblquad(lambda vv, uu: _uv_density(uu, vv, cfg),
                      0.0, 1.0, 0.0, lambda uu: uu,
                      epsabs=1e-10, epsrel=1e-10)
    records.append(_record("orderstats", "pdf_normalization",
                           abs(mass - 1.0) <= 1e-6,
                           f"integral = {mass:.9f}"))

    rng = np.random.default_rng(seed)
    x, y = sample_pairs(cfg, rng, samples)
    ks = _ks_statistic(y, lambda t: marginal_cdf_n(t, cfg))
    crit = 1.628 / math.sqrt(samples)  # 1% critical value
    records.append(_record("orderstats", "sampler_marginal_ks",
                           ks < crit, f"D = {ks:.2e}, 1% critical = {crit:.2e}"))

    pval = _chi_square_pvalue(x, y, cfg)
    records.append(_record("orderstats", "sampler_joint_chi_square",
                           pval > 0.001, f"p-value = {pval:.4f}"))

    cfg2 = PairingConfig(2, 1, 2, 1.0)
    _, y2 = sample_pairs(cfg2, np.random.default_rng(seed + 1), samples)
    mean = float(np.mean(y2))
    se = float(np.std(y2) / math.sqrt(samples))
    records.append(_record("orderstats", "max_of_two_mean",
                           abs(mean - 1.5) <= 3 * se,
                           f"mean = {mean:.4f}, expect 1.5 +/- {3 * se:.4f}"))
    return records


def _ks_statistic(samples: np.ndarray, cdf) -> float:
    s = np.sort(samples)
    c = cdf(s)
    k = np.arange(1, len(s) + 1)
    return float(max(np.max(k / len(s) - c), np.max(c - (k - 1) / len(s))))


def _chi_square_pvalue(x: np.ndarray, y: np.ndarray, cfg: PairingConfig,
                       grid: int = 8) -> float:
    """Chi-square of sampled (x, y) against the cell-integrated joint PDF on
    a grid over (exp(-x/rho), exp(-y/rho)); low-count cells are pooled."""
    from scipy.stats import chi2

    rho = cfg.rho
    u = np.exp(-x / rho)
    v = np.exp(-y / rho)
    edges = np.linspace(0.0, 1.0, grid + 1)
    observed = np.histogram2d(u, v, bins=(edges, edges))[0]

    N = len(x)
    expected = np.zeros_like(observed)
    for i in range(grid):
        for j in range(grid):
            if edges[j] >= edges[i + 1]:  # cell entirely above the diagonal
                continue
            mass, _ = dblquad(
                lambda vv, uu: _uv_density(uu, vv, cfg),
                edges[i], edges[i + 1],
                lambda uu: edges[j], lambda uu: min(edges[j + 1], 1.0),
                epsabs=1e-10, epsrel=1e-8)
            expected[i, j] = mass * N

    obs = observed.ravel()
    exp_ = expected.ravel()
    # pool cells with small expectation to keep the statistic valid
    small = exp_ < 10.0
    obs_pooled = np.append(obs[~small], obs[small].sum())
    exp_pooled = np.append(exp_[~small], exp_[small].sum())
    keep = exp_pooled > 0
    stat = float(np.sum((obs_pooled[keep] - exp_pooled[keep])**2 / exp_pooled[keep]))
    dof = int(np.sum(keep)) - 1
    return float(chi2.sf(stat, dof))


def _uv_density(u: float, v: float, cfg: PairingConfig) -> float:
    if v >= u:
        return 0.0
    M, m, n = cfg.M, cfg.m, cfg.n
    w1 = constants_for(cfg, 0.5).w1
    return w1 * (1 - u)**(m - 1) * v**(M - n) * (u - v)**(n - 1 - m)


def check_probabilities(seed: int, trials: int = 1_000_000,
                        quad_tol: float = 1e-6, M: int = 10) -> list[dict]:
    """Three-way closed/quadrature/MC agreement over the standard grid."""
    records = []
    for (m, n) in AGREEMENT_PAIRS:
        for rho_db in AGREEMENT_RHO_DB:
            rho = 10.0**(rho_db / 10.0)
            cfg = PairingConfig(M, m, n, rho)
            a2 = 1.0 / math.sqrt(rho)
            closed = analytic.event_probabilities_closed(cfg, a2)
            quad = quadrature._cached_quadrature(cfg, a2, 0.5, quad_tol)
            mc = montecarlo.estimate_event_probs(
                cfg, a2, 0.5, montecarlo.McConfig(trials=trials, seed=seed))
            dq = max(abs(a - b) for a, b in
                     zip(closed.as_tuple(), quad.as_tuple()))
            dmc = max(abs(a - b) - 3.0 * se for a, b, se in
                      zip(closed.as_tuple(), mc.as_tuple(), mc.stderr))
            sums_ok = (abs(math.fsum(closed.as_tuple()) - 1.0) <= 1e-9
                       and abs(math.fsum(quad.as_tuple()) - 1.0) <= 1e-9)
            ok = dq <= 1e-3 and dmc <= 0.0 and sums_ok
            records.append(_record(
                "probabilities", f"three_way_m{m}_n{n}_rho{rho_db:g}dB", ok,
                f"|closed-quad| = {dq:.2e}, MC excess over 3*stderr = {dmc:.2e}"))
    return records


SUITES = {
    "propositions": check_propositions,
    "regions": check_regions,
    "orderstats": check_orderstats,
    "probabilities": check_probabilities,
}


def run_suites(names, seed: int) -> list[dict]:
    records = []
    for name in names:
        records.extend(SUITES[name](seed))
    return records
