import math

import numpy as np
import pytest
from scipy import integrate

from randfid import analytic
from randfid.errors import DegenerateVariance, DomainError, UnsupportedK

PI = math.pi

# Frozen reference values; each was cross-checked between at least two
# independent routes (X matrices, power series, explicit forms).
ROOT_MEANS = {
    (2, 2): 0.8097959183673469,
    (3, 3): 0.7764915138167485,
    (4, 4): 0.764933998324484,
    (3, 2): 0.6780482624638474,
    (4, 2): 0.5934909431412941,
    (5, 2): 0.5339647043326371,
}
MEANS = {
    (2, 2): 0.6734891398628987,
    (3, 3): 0.6122412213768135,
    (4, 4): 0.5906334798183558,
    (3, 2): 0.4779076165524153,
    (4, 2): 0.3685960917031532,
    (5, 2): 0.2996207170306484,
    (6, 2): 0.25227822036488173,
}


class TestConstants:
    @pytest.mark.parametrize(
        "value, expected",
        [
            (lambda: analytic.mean_fidelity_NK(2, 2), 0.5 + 9 * PI**2 / 512),
            (lambda: analytic.mean_fidelity_NK(2, 3), 0.5 + (15 * math.sqrt(2) * PI / 128) ** 2),
            (lambda: analytic.mean_fidelity_2K(1.5), 0.5 + 8 / (9 * PI**2)),
            (lambda: analytic.mean_fidelity_NK(3, 2), 1 / 3 + 15 * (PI / 32) ** 2),
            (lambda: analytic.mean_root_fidelity_NK(2, 1), 2 / 3),
            (lambda: analytic.mean_root_fidelity_NK(3, 1), 8 / 15),
            (lambda: analytic.mean_fidelity_NK(3, 1), 1 / 3),
            (lambda: analytic.cloning_exceed_prob(2), 1 / 6),
        ],
    )
    def test_exact(self, value, expected):
        assert value() == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("N", [2, 3, 7])
    def test_pure_states(self, N):
        assert analytic.mean_fidelity_fs(N) == 1 / N
        assert analytic.mean_fidelity_NK(N, 1) == pytest.approx(1 / N, abs=1e-12)

    def test_cloning(self):
        assert analytic.cloning_fidelity(2) == pytest.approx(5 / 6)
        with pytest.raises(DomainError):
            analytic.cloning_exceed_prob(1)

    def test_asymptotic_constants(self):
        assert analytic.asymptotic_trace_moment(0.5, "hs") == pytest.approx(8 / (3 * PI), rel=1e-14)
        assert analytic.asymptotic_trace_moment(0.5, "bures") == pytest.approx(0.7868937, abs=1e-7)
        assert analytic.asymptotic_trace_moment(2, "hs") == pytest.approx(2)


class TestXMatrixRoute:
    @pytest.mark.parametrize("key", sorted(ROOT_MEANS))
    def test_root_means(self, key):
        assert analytic.mean_root_fidelity_NK(*key) == pytest.approx(ROOT_MEANS[key], abs=1e-12)

    @pytest.mark.parametrize("key", sorted(MEANS))
    def test_means(self, key):
        assert analytic.mean_fidelity_NK(*key) == pytest.approx(MEANS[key], abs=1e-12)

    @pytest.mark.parametrize("K", range(2, 11))
    def test_qubit_explicit(self, K):
        assert analytic.mean_root_fidelity_NK(2, K) == pytest.approx(analytic.mean_root_fidelity_2K_explicit(K), abs=1e-12)
        assert analytic.mean_fidelity_NK(2, K) == pytest.approx(analytic.mean_fidelity_2K(K), abs=1e-12)

    @pytest.mark.parametrize("K", range(3, 12))
    def test_qutrit_explicit(self, K):
        assert analytic.mean_root_fidelity_NK(3, K) == pytest.approx(analytic.mean_root_fidelity_3K_explicit(K), abs=1e-12)
        assert analytic.mean_fidelity_NK(3, K) == pytest.approx(analytic.mean_fidelity_3K_explicit(K), abs=1e-12)

    @pytest.mark.parametrize("N", range(3, 7))
    def test_k2_forms(self, N):
        assert analytic.mean_fidelity_N2_explicit(N) == pytest.approx(analytic.mean_fidelity_NK(N, 2), abs=1e-12)
        assert analytic.mean_root_fidelity_N2_explicit(N) == pytest.approx(analytic.mean_root_fidelity_NK(N, 2), abs=1e-12)

    def test_monotone_in_K(self):
        for N in (2, 3, 4):
            m = [analytic.mean_fidelity_NK(N, K) for K in range(1, 9)]
            assert np.all(np.diff(m) > 0)

    def test_hs_diagonal_decreases(self):
        m = [analytic.mean_fidelity_NK(N, N) for N in range(2, 7)]
        assert np.all(np.diff(m) < 0)

    def test_jensen(self):
        for N in (2, 3, 5):
            for K in (1, 2, 3, 6):
                r, f = analytic.mean_root_fidelity_NK(N, K), analytic.mean_fidelity_NK(N, K)
                assert r * r <= f <= r

    def test_x_matrix_shape(self):
        x = analytic.x_matrix(3, 2.5)
        assert x.scaled(0, 0).shape == (3, 3)

    def test_provenance(self):
        assert analytic.estimate_mean(2, 2).provenance == "closed-form"
        assert analytic.estimate_mean(3, 1, "sqrtf").provenance == "continued"


class TestSeries:
    def test_qubit_moments(self):
        t = analytic.moment_root_fidelity_series(2, 2, 8)
        assert t.method == "series-Z"
        assert t[1] == pytest.approx(ROOT_MEANS[(2, 2)], abs=1e-13)
        assert t[2] == pytest.approx(MEANS[(2, 2)], abs=1e-13)
        assert t[4] == pytest.approx(0.4934891398628989, abs=1e-13)
        assert t[8] == pytest.approx(0.3068515487747252, abs=1e-13)
        assert all(t.errors[m] < 1e-12 for m in range(1, 9))

    @pytest.mark.parametrize("N,K", [(3, 3), (3, 4), (4, 4), (4, 2), (5, 2)])
    def test_agrees_with_x_route(self, N, K):
        t = analytic.moment_root_fidelity_series(N, K, 2)
        assert t[1] == pytest.approx(analytic.mean_root_fidelity_NK(N, K), abs=1e-11)
        assert t[2] == pytest.approx(analytic.mean_fidelity_NK(N, K), abs=1e-11)

    def test_rank_deficient_route(self):
        t = analytic.moment_root_fidelity_series(3, 2, 4)
        assert t.method == "series-ZK"
        assert t[2] == pytest.approx(MEANS[(3, 2)], abs=1e-12)

    def test_moments_decrease(self):
        t = analytic.moment_root_fidelity_series(3, 3, 6)
        vals = [t[m] for m in range(0, 7)]
        assert np.all(np.diff(vals) < 0)

    def test_estimate_mean_series(self):
        e = analytic.estimate_mean(3, 3, "f", "series")
        assert e.value == pytest.approx(MEANS[(3, 3)], abs=1e-12)
        with pytest.raises(DomainError):
            analytic.estimate_mean(3, 3, "f", "nope")


class TestPureStateLaws:
    @pytest.mark.parametrize("N", [2, 3, 6])
    def test_pure_pure_normalized(self, N):
        assert integrate.quad(lambda f: analytic.pdf_pure_pure(N, f), 0, 1)[0] == pytest.approx(1)

    def test_pure_pure_qubit_flat(self):
        np.testing.assert_allclose(analytic.pdf_pure_pure(2, np.linspace(0, 1, 5)), 1)

    @pytest.mark.parametrize("N,K,real", [(2, 2, False), (3, 3, False), (4, 1.5, False), (2, 2, True), (3, 5, True)])
    def test_pure_induced_normalized_mean(self, N, K, real):
        total = integrate.quad(lambda f: analytic.pdf_pure_induced(N, K, f, real), 0, 1)[0]
        mean = integrate.quad(lambda f: f * analytic.pdf_pure_induced(N, K, f, real), 0, 1)[0]
        assert total == pytest.approx(1, abs=1e-10)
        assert mean == pytest.approx(1 / N, abs=1e-10)

    def test_qubit_hs_and_rebit(self):
        F = np.linspace(0.05, 0.95, 7)
        np.testing.assert_allclose(analytic.pdf_pure_hs(2, F), 6 * F * (1 - F))
        np.testing.assert_allclose(analytic.pdf_pure_induced(2, 1.5, F), 8 / PI * np.sqrt(F * (1 - F)))
        np.testing.assert_allclose(analytic.pdf_pure_hs(2, F, real=True), 1)

    def test_domain(self):
        with pytest.raises(DomainError):
            analytic.pdf_pure_induced(2, 2, 1.5)


class TestQubitSymmetric:
    @pytest.mark.parametrize("K", [1.5, 2, 2.5, 3, 5])
    def test_closed_form_normalized(self, K):
        total = integrate.quad(lambda f: analytic.pdf_fidelity_2K_closed(f, K), 0, 1, limit=100)[0]
        mean = integrate.quad(lambda f: f * analytic.pdf_fidelity_2K_closed(f, K), 0, 1, limit=100)[0]
        assert total == pytest.approx(1, abs=1e-9)
        assert mean == pytest.approx(analytic.mean_fidelity_2K(K), abs=1e-9)

    def test_hs_closed_form(self):
        F = np.linspace(0.01, 0.99, 9)
        expected = 4.5 * F * (1 - F) - 2.25 * np.sqrt(F * (1 - F)) * (1 - 2 * F) * np.arccos(1 - 2 * F)
        np.testing.assert_allclose(analytic.pdf_fidelity_2K_closed(F, 2), expected, atol=1e-13)

    def test_uniform_for_pure(self):
        assert analytic.pdf_fidelity_2K_closed(0.3, 1) == 1.0

    def test_unsupported_K(self):
        with pytest.raises(UnsupportedK):
            analytic.pdf_fidelity_2K_closed(0.3, 2.7)

    def test_frozen_value(self):
        assert analytic.pdf_fidelity_2K_closed(0.3, 2.5) == pytest.approx(0.21317776915187625, rel=1e-12)

    def test_asymptotic_near_mode(self):
        F = np.linspace(0.95, 0.99, 9)
        ratio = analytic.pdf_fidelity_2K_asymptotic(F, 10) / analytic.pdf_fidelity_2K_closed(F, 10)
        assert np.all(abs(ratio - 1) < 0.1)

    @pytest.mark.parametrize("K", [1.5, 2, 3, 4.5])
    def test_radial_density(self, K):
        total = integrate.quad(lambda r: analytic.radial_pdf_2K(r, K), 0, math.sqrt(0.5))[0]
        assert total == pytest.approx(1, abs=1e-8)

    def test_radial_density_hs(self):
        assert analytic.radial_pdf_2K(0.3, 2) == pytest.approx(6 * math.sqrt(2) * 0.09)

    def test_radial_density_gives_mean(self):
        t = integrate.quad(lambda r: math.sqrt(0.5 - r * r) * analytic.radial_pdf_2K(r, 3), 0, math.sqrt(0.5))[0]
        assert 0.5 + t * t == pytest.approx(analytic.mean_fidelity_2K(3), abs=1e-10)
        assert analytic.normalization_2K(2) == pytest.approx(72)


class TestGauge:
    def test_alpha(self):
        assert analytic.gauge_alpha(0.7, 0.5, 0.29) == pytest.approx(1.0)

    def test_at_mean(self):
        assert analytic.gauge_alpha(0.5, 0.5, 0.3) == 0

    def test_degenerate(self):
        with pytest.raises(DegenerateVariance):
            analytic.gauge_alpha(0.5, 1.0, 1.0)

    def test_purity(self):
        assert analytic.mean_purity(2, 2) == pytest.approx(0.8)
