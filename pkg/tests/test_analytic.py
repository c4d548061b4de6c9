import math

import numpy as np
import pytest
from scipy.integrate import dblquad

from noma_tdma import (
    ConvergenceError,
    EventId,
    EventProbabilities,
    InconsistencyError,
    PairingConfig,
    constants_for,
    event_probabilities_closed,
    event_probabilities_quadrature,
    joint_pdf,
    marginal_cdf_n,
    optimal_a2_special,
    p_eps1_closed,
    p_eps2_closed,
    p_eps2_special,
    p_eps3_closed,
    p_eps4_closed,
    p_event_quadrature,
    strong_user_tail,
)

RHO25 = 10.0**2.5


class TestSpecialCase:
    def test_values(self):
        assert p_eps2_special(10, 0.5) == pytest.approx(0.998046875, abs=1e-15)
        assert p_eps2_special(5, 1.0) == 0.0
        assert p_eps2_special(3, 0.3) == pytest.approx(0.63, abs=1e-12)

    def test_argument_validation(self):
        with pytest.raises(ValueError):
            p_eps2_special(10, 0.0)
        with pytest.raises(ValueError):
            p_eps2_special(10, 1.1)
        with pytest.raises(ValueError):
            p_eps2_special(1, 0.5)

    def test_large_population_limit(self):
        assert p_eps2_special(20, 0.5) == pytest.approx(
            1.0 - 2.0**-19, abs=1e-12)

    def test_half_is_optimal(self):
        d = np.arange(1e-3, 1.0, 1e-3)
        vals = 1.0 - (1.0 - d)**10 - d**10
        assert d[np.argmax(vals)] == pytest.approx(0.5, abs=1e-3)
        assert np.max(vals) <= p_eps2_special(10, 0.5)


class TestOptimalSplit:
    def test_round_trip_gives_half(self):
        rng = np.random.default_rng(31)
        for rho in rng.uniform(1.0, 1e6, 50):
            a2 = optimal_a2_special(float(rho))
            assert a2 < 0.5
            d = constants_for(PairingConfig(2, 1, 2, float(rho)), a2).d
            assert d == pytest.approx(0.5, rel=1e-10)

    def test_25db_value(self):
        assert optimal_a2_special(RHO25) == pytest.approx(0.06314, abs=5e-5)

    def test_high_snr_limit(self):
        assert optimal_a2_special(1e12) < 1e-5


class TestEps2Closed:
    def test_reduces_to_special_case(self):
        rng = np.random.default_rng(32)
        for M in (2, 5, 10):
            cfg = PairingConfig(M, 1, M, RHO25)
            for a2 in rng.uniform(0.01, 0.5, 10):
                d = constants_for(cfg, float(a2)).d
                assert p_eps2_closed(cfg, float(a2)) == pytest.approx(
                    p_eps2_special(M, d), abs=1e-10)

    def test_special_d_half(self):
        a2 = optimal_a2_special(RHO25)
        assert p_eps2_closed(PairingConfig(2, 1, 2, RHO25), a2) == \
            pytest.approx(0.5, abs=1e-12)
        assert p_eps2_closed(PairingConfig(10, 1, 10, RHO25), a2) == \
            pytest.approx(0.998046875, abs=1e-12)

    def test_boundary_split_vanishes(self):
        assert p_eps2_closed(PairingConfig(10, 2, 7, RHO25), 0.5) == 0.0

    def test_against_threshold_integral(self):
        # P(E2) = P(x < w2 < y) computed directly from the joint pdf
        cfg = PairingConfig(10, 2, 7, RHO25)
        a2 = 1.0 / math.sqrt(RHO25)
        w2 = constants_for(cfg, a2).w2
        val, _ = dblquad(lambda y, x: joint_pdf(x, y, cfg),
                         1e-12, w2, w2, 50.0 * RHO25,
                         epsabs=1e-10, epsrel=1e-9)
        assert p_eps2_closed(cfg, a2) == pytest.approx(val, abs=1e-7)

    def test_monotone_in_n(self):
        a2 = 1.0 / math.sqrt(RHO25)
        vals = [p_eps2_closed(PairingConfig(10, 1, n, RHO25), a2)
                for n in range(2, 11)]
        assert all(b >= a for a, b in zip(vals, vals[1:]))


class TestEps1Closed:
    def test_marginal_identity(self):
        rng = np.random.default_rng(33)
        for _ in range(30):
            M = int(rng.integers(2, 12))
            m = int(rng.integers(1, M))
            n = int(rng.integers(m + 1, M + 1))
            cfg = PairingConfig(M, m, n, float(rng.uniform(1.0, 1e4)))
            a2 = float(rng.uniform(0.01, 0.5))
            w2 = constants_for(cfg, a2).w2
            expect = 1.0 - marginal_cdf_n(w2, cfg) - p_eps2_closed(cfg, a2)
            assert p_eps1_closed(cfg, a2) == pytest.approx(expect, abs=1e-10)

    def test_two_user_d_half(self):
        # P(y > w2) = 1 - (1-d)^2 = 3/4 at d = 1/2; P(E1) = 3/4 - 1/2
        cfg = PairingConfig(2, 1, 2, RHO25)
        a2 = optimal_a2_special(RHO25)
        assert strong_user_tail(cfg, a2) == pytest.approx(0.75, abs=1e-12)
        assert p_eps1_closed(cfg, a2) == pytest.approx(0.25, abs=1e-12)

    def test_boundary_split(self):
        # w2 = 0: every y exceeds the threshold but no x is below it,
        # so E1 happens with certainty
        cfg = PairingConfig(10, 2, 7, RHO25)
        assert p_eps1_closed(cfg, 0.5) == pytest.approx(1.0, abs=1e-12)


class TestEps4Closed:
    def test_quad_tol_validation(self):
        cfg = PairingConfig(10, 2, 7, RHO25)
        with pytest.raises(ValueError):
            p_eps4_closed(cfg, 0.25, quad_tol=1e-13)
        with pytest.raises(ValueError):
            p_eps4_closed(cfg, 0.25, quad_tol=1e-3)

    def test_boundary_split_vanishes(self):
        # w2 = 0 empties both the integration interval and the event
        assert p_eps4_closed(PairingConfig(10, 2, 7, RHO25), 0.5) == 0.0

    def test_against_quadrature_oracle(self):
        for (m, n) in [(1, 10), (2, 7), (5, 6)]:
            cfg = PairingConfig(10, m, n, RHO25)
            a2 = 1.0 / math.sqrt(RHO25)
            oracle = p_event_quadrature(EventId.E4, cfg, a2, tol=1e-6)
            assert p_eps4_closed(cfg, a2) == pytest.approx(oracle, abs=1e-3)


class TestEps3AndDistribution:
    def test_complement(self):
        cfg = PairingConfig(10, 1, 10, RHO25)
        a2 = 1.0 / math.sqrt(RHO25)
        total = (p_eps1_closed(cfg, a2) + p_eps2_closed(cfg, a2)
                 + p_eps3_closed(cfg, a2) + p_eps4_closed(cfg, a2))
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_distribution_object(self):
        cfg = PairingConfig(10, 4, 5, RHO25)
        probs = event_probabilities_closed(cfg, 1.0 / math.sqrt(RHO25))
        assert probs.method == "closed_form"
        assert math.fsum(probs.as_tuple()) == pytest.approx(1.0, abs=1e-9)

    def test_invalid_distribution_rejected(self):
        with pytest.raises(InconsistencyError):
            EventProbabilities(0.5, 0.5, 0.5, 0.5, method="closed_form")
        with pytest.raises(InconsistencyError):
            EventProbabilities(1.2, -0.2, 0.0, 0.0, method="closed_form")


class TestQuadratureOracle:
    def test_partition_of_unity(self):
        cfg = PairingConfig(10, 2, 7, RHO25)
        probs = event_probabilities_quadrature(cfg, 1.0 / math.sqrt(RHO25),
                                               tol=1e-5)
        assert math.fsum(probs.as_tuple()) == pytest.approx(1.0, abs=1e-4)
        assert probs.method == "quadrature"

    def test_special_case_value(self):
        cfg = PairingConfig(10, 1, 10, RHO25)
        a2 = optimal_a2_special(RHO25)
        assert p_event_quadrature(EventId.E2, cfg, a2, tol=1e-6) == \
            pytest.approx(0.998046875, abs=1e-4)

    def test_threshold_form(self):
        # E2 mass equals P(x < w2 < y) from the joint density
        cfg = PairingConfig(10, 4, 5, RHO25)
        a2 = 1.0 / math.sqrt(RHO25)
        w2 = constants_for(cfg, a2).w2
        val, _ = dblquad(lambda y, x: joint_pdf(x, y, cfg),
                         1e-12, w2, w2, 50.0 * RHO25,
                         epsabs=1e-10, epsrel=1e-9)
        assert p_event_quadrature(EventId.E2, cfg, a2, tol=1e-6) == \
            pytest.approx(val, abs=1e-4)

    def test_general_time_split(self):
        # no closed form exists for b2 != 1/2; the oracle still integrates a
        # valid distribution
        cfg = PairingConfig(6, 2, 5, 100.0)
        probs = event_probabilities_quadrature(cfg, 0.2, b2=0.3, tol=1e-5)
        assert math.fsum(probs.as_tuple()) == pytest.approx(1.0, abs=1e-4)
        assert all(0.0 <= p <= 1.0 for p in probs.as_tuple())

    def test_tolerance_validation(self):
        cfg = PairingConfig(6, 2, 5, 100.0)
        with pytest.raises(ValueError):
            event_probabilities_quadrature(cfg, 0.2, tol=1e-12)

    def test_budget_exhaustion_raises(self):
        cfg = PairingConfig(10, 2, 7, RHO25)
        with pytest.raises(ConvergenceError):
            event_probabilities_quadrature(cfg, 1.0 / math.sqrt(RHO25),
                                           tol=1e-9, max_panels=16)
