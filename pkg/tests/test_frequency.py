import math

import numpy as np
import pytest

from qpbeam.frequency import (
    FrequencyVector,
    certify_nonresonance,
    golden_frequency,
    liouvillean_frequency,
    minimal_gamma,
    small_divisor,
)


class TestSmallDivisor:
    def test_unit_vector(self):
        omega = FrequencyVector((1.0, 0.0))
        assert small_divisor(omega, (1, 0)) == 1.0

    def test_rational_resonance(self):
        omega = FrequencyVector((0.6, 0.8))
        assert small_divisor(omega, (4, -3)) < 1e-14

    def test_zero_k_rejected(self):
        with pytest.raises(ValueError):
            small_divisor(golden_frequency(), (0, 0))

    def test_continued_fraction_minima(self):
        # |p - q alpha| minimised along convergents of alpha
        omega = golden_frequency()
        alpha = omega.omega[1] / omega.omega[0]
        fib = [(1, 1), (1, 2), (2, 3), (3, 5), (5, 8)]
        values = [small_divisor(omega, (p, -q)) for p, q in fib]
        assert all(values[i + 1] < values[i] for i in range(len(values) - 1))
        # convergent p/q beats every other candidate with the same l1 size
        p, q = 3, 5
        best = small_divisor(omega, (p, -q))
        for pp in range(-8, 9):
            for qq in range(-8, 9):
                if (pp, qq) in ((0, 0), (p, -q), (-p, q)):
                    continue
                if abs(pp) + abs(qq) <= p + q:
                    assert small_divisor(omega, (pp, qq)) > best


class TestCertificate:
    def test_sqrt2_vector_valid(self):
        omega = FrequencyVector.normalized([1.0, math.sqrt(2.0) - 1.0])
        cert = certify_nonresonance(omega, gamma=10.0, M=3, rho=0.5, k_max=50)
        assert cert.valid
        assert cert.worst_ratio <= 1.0

    def test_resonant_vector_invalid(self):
        omega = FrequencyVector((0.6, 0.8))
        cert = certify_nonresonance(omega, gamma=10.0, M=3, rho=0.5, k_max=10)
        assert not cert.valid
        assert abs(cert.worst_k[0]) + abs(cert.worst_k[1]) <= 10
        assert cert.worst_divisor < 1e-14

    def test_monotone_in_gamma(self):
        omega = golden_frequency()
        small = certify_nonresonance(omega, gamma=2.0, M=3, rho=0.5, k_max=30)
        large = certify_nonresonance(omega, gamma=20.0, M=3, rho=0.5, k_max=30)
        assert large.worst_ratio < small.worst_ratio
        if small.valid:
            assert large.valid

    def test_larger_scan_never_improves(self):
        omega = golden_frequency()
        short = certify_nonresonance(omega, gamma=5.0, M=3, rho=0.5, k_max=20)
        long = certify_nonresonance(omega, gamma=5.0, M=3, rho=0.5, k_max=40)
        assert long.worst_ratio >= short.worst_ratio

    def test_deterministic(self):
        omega = golden_frequency()
        a = certify_nonresonance(omega, gamma=3.0, M=3, rho=0.4, k_max=25)
        b = certify_nonresonance(omega, gamma=3.0, M=3, rho=0.4, k_max=25)
        assert a == b

    def test_parameter_validation(self):
        omega = golden_frequency()
        with pytest.raises(ValueError):
            certify_nonresonance(omega, gamma=1.0, M=3, rho=0.5, k_max=10)
        with pytest.raises(ValueError):
            certify_nonresonance(omega, gamma=2.0, M=2, rho=0.5, k_max=10)


class TestLiouvillean:
    def test_normalized(self):
        for depth in (2, 3, 4):
            omega, _ = liouvillean_frequency(depth)
            assert abs(np.linalg.norm(omega.values) - 1.0) < 1e-12

    def test_quotients_grow_superexponentially(self):
        _, diag = liouvillean_frequency(3)
        assert diag.partial_quotients[0] == 1
        q_prev = 1
        for a, (p, q) in zip(diag.partial_quotients[1:], diag.convergents):
            assert a >= math.exp(q_prev) - 1
            q_prev = q

    def test_brjuno_terms_do_not_decay(self):
        _, diag = liouvillean_frequency(4)
        # every term past the first stays >= 1 under the exponential rule
        assert all(t >= 1.0 for t in diag.brjuno_terms[1:])

    def test_golden_brjuno_terms_decay(self):
        _, diag = liouvillean_frequency(12, growth="ones")
        golden = (math.sqrt(5.0) - 1.0) / 2.0
        assert abs(diag.alpha - golden) < 1e-12
        terms = diag.brjuno_terms
        assert terms[-1] < 0.1
        # the golden partial sums stay bounded (full Brjuno sum ~ 3.27)
        assert sum(terms) < 3.5

    def test_depth_two_certificate(self):
        omega, _ = liouvillean_frequency(2)
        cert = certify_nonresonance(omega, gamma=30.0, M=3, rho=0.5, k_max=12)
        assert cert.valid

    def test_minimum_attained_at_convergent_pair(self):
        omega, diag = liouvillean_frequency(3)
        om = omega.values
        best, best_k = math.inf, None
        K = 12
        for k1 in range(-K, K + 1):
            for k2 in range(-(K - abs(k1)), K - abs(k1) + 1):
                if (k1, k2) == (0, 0):
                    continue
                val = abs(k1 * om[0] + k2 * om[1])
                if val < best:
                    best, best_k = val, (k1, k2)
        pairs = set()
        for p, q in diag.convergents:
            pairs.update({(p, -q), (-p, q)})
        assert best_k in pairs

    def test_overflow_depth_raises(self):
        with pytest.raises(OverflowError):
            liouvillean_frequency(5)

    def test_depth_validation(self):
        with pytest.raises(ValueError):
            liouvillean_frequency(1)

    def test_minimal_gamma_matches_certificate(self):
        omega, _ = liouvillean_frequency(3)
        gmin = minimal_gamma(omega, M=3, rho=0.5, k_max=64)
        below = certify_nonresonance(omega, gamma=gmin * 0.99, M=3, rho=0.5, k_max=64)
        above = certify_nonresonance(omega, gamma=gmin * 1.01, M=3, rho=0.5, k_max=64)
        assert not below.valid
        assert above.valid


class TestFrequencyVector:
    def test_magnitude_constraint(self):
        with pytest.raises(ValueError):
            FrequencyVector((1.0, 1.0))

    def test_golden_matches_reference(self):
        omega = golden_frequency()
        alpha = (math.sqrt(5.0) - 1.0) / 2.0
        c = 1.0 / math.hypot(1.0, alpha)
        assert abs(omega.values[0] - c) < 1e-15
        assert abs(omega.values[1] - c * alpha) < 1e-15
