import math

import numpy as np
import pytest
from scipy import integrate

from randfid import analytic, distnum
from randfid.errors import DomainError

GRID = (np.arange(50) + 0.5) / 50


class TestPureBures:
    def test_qubit_limit(self):
        F = np.array([0.1, 0.5, 0.9])
        np.testing.assert_allclose(distnum.pdf_pure_bures(2, F), 8 / math.pi * np.sqrt(F * (1 - F)))

    @pytest.mark.parametrize("N", [3, 4, 6])
    def test_normalized_with_mean_one_over_N(self, N):
        pdf = lambda f: distnum.pdf_pure_bures(N, f)
        assert integrate.quad(pdf, 0, 1, limit=200)[0] == pytest.approx(1, abs=1e-8)
        assert integrate.quad(lambda f: f * pdf(f), 0, 1, limit=200)[0] == pytest.approx(1 / N, abs=1e-8)

    @pytest.mark.parametrize("F", [0.01, 0.2, 0.6, 0.95])
    def test_routes_agree(self, F):
        a = distnum.pdf_pure_bures(4, F)
        b = distnum.pdf_pure_bures(4, F, method="quadrature")
        c = distnum.pdf_pure_bures(4, F, distnum.QuadConfig(endpoint_substitution="none"), method="quadrature")
        assert a == pytest.approx(b, rel=1e-8)
        assert a == pytest.approx(c, rel=1e-6)

    def test_frozen(self):
        assert distnum.pdf_pure_bures(3, 0.3) == pytest.approx(2.128260088912256, rel=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            distnum.pdf_pure_bures(3, 1.0)
        with pytest.raises(DomainError):
            distnum.pdf_pure_bures(3, 0.5, method="other")


class TestQubitIntegral:
    @pytest.mark.parametrize("K", [1.5, 2, 3, 4.5])
    def test_matches_closed_form(self, K):
        np.testing.assert_allclose(
            distnum.pdf_fidelity_2K_integral(GRID, K), analytic.pdf_fidelity_2K_closed(GRID, K), atol=1e-9
        )

    def test_non_half_integer_normalizes(self):
        total = integrate.quad(lambda f: distnum.pdf_fidelity_2K_integral(f, 2.7), 0, 1, limit=100)[0]
        assert total == pytest.approx(1, abs=1e-7)

    def test_pure_is_uniform(self):
        np.testing.assert_array_equal(distnum.pdf_fidelity_2K_integral(GRID[:3], 1), 1.0)


class TestZ:
    def test_h_k(self):
        x = 3.0
        r = math.sqrt(x * x / 4 - 1)
        assert distnum.h_k(x, 1) == pytest.approx(-2 / r)
        with pytest.raises(DomainError):
            distnum.h_k(1.5, 1)

    @pytest.mark.parametrize("x", [2.5, 5.0, 20.0])
    def test_representations_agree(self, x):
        a = distnum.z_of_x(x, 2, 3)
        assert a == pytest.approx(distnum.z_of_x_y_form(x, 2, 3), rel=1e-9)
        assert a == pytest.approx(distnum.z_complex(x, 2, 3)[0].real, rel=1e-9)

    def test_z0(self):
        assert distnum.z_complex(0.0, 3, 3)[0].real == pytest.approx(8.0, rel=1e-12)

    def test_cut_values(self):
        # Above the cut the contour evaluator should reproduce det(A1 + i A2).
        x = 3.0
        A1, A2 = distnum.a_matrices(x, 2, 2)
        z = distnum.z_complex(-x + 0j, 2, 2)[0]
        assert z == pytest.approx(np.linalg.det(A1 + 1j * A2), rel=1e-9)
        assert distnum.im_z_minus(x, 2, 2) == pytest.approx(-z.imag, rel=1e-9)

    def test_decay(self):
        # For N = 2 the decay is x^-(2KN-2).
        z1, z2 = distnum.z_of_x(100.0, 2, 2), distnum.z_of_x(200.0, 2, 2)
        assert math.log(z1 / z2) / math.log(2) == pytest.approx(6, abs=0.05)


class TestKernels:
    def test_kappa_imaginary_beyond_two(self):
        k = distnum.kappa(np.array([2.5, 4.0]), 4)
        assert abs(k.real).max() < 1e-12 and abs(k.imag).min() > 1e-4

    def test_kappa_laplace_identity(self, rng):
        # E[kappa(z/sqrt(T))/sqrt(T)] = exp(-z), T a product of two Gamma(KN) variables
        KN, z = 3, 0.7
        T = rng.gamma(KN, size=200000) * rng.gamma(KN, size=200000)
        vals = distnum.kappa(z / np.sqrt(T), KN).real / np.sqrt(T)
        assert vals.mean() == pytest.approx(math.exp(-z), abs=5 * vals.std() / math.sqrt(T.size))

    def test_b_kernel_edges(self):
        assert distnum.b_kernel(1.5, 0.5, 2, 2) == 0.0
        assert distnum.b_kernel(3.0, 0.5, 2, 2) > 0
        assert distnum.b_kernel(3.0, 1 - 1e-12, 2, 2) < 1e-7


class TestWPipeline:
    def test_hs_qubit(self):
        np.testing.assert_allclose(distnum.WPipeline(2, 2).pdf(GRID), analytic.pdf_fidelity_2K_closed(GRID, 2), atol=1e-10)

    def test_k3_qubit(self):
        np.testing.assert_allclose(distnum.pdf_fidelity_NK(GRID, 2, 3), analytic.pdf_fidelity_2K_closed(GRID, 3), atol=1e-10)

    def test_qutrit_moments(self):
        w = distnum.WPipeline(3, 3)
        assert w.normalization == pytest.approx(1, abs=1e-8)
        assert w.moment(1) == pytest.approx(analytic.mean_root_fidelity_NK(3, 3), abs=1e-8)
        assert w.moment(2) == pytest.approx(analytic.mean_fidelity_NK(3, 3), abs=1e-8)
        t = analytic.moment_root_fidelity_series(3, 3, 4)
        assert w.moment(4) == pytest.approx(t[4], abs=1e-8)

    def test_nonnegative(self):
        assert np.all(distnum.pdf_fidelity_NK(np.array([1e-4, 0.5, 0.9999]), 3, 3) >= 0)

    def test_curve(self):
        c = distnum.WPipeline(2, 2).curve(GRID[:5])
        assert c.provenance == "quadrature" and c.pdf.shape == (5,)

    @pytest.mark.parametrize("N,K", [(3, 2), (0, 1), (2, 1.5)])
    def test_domain(self, N, K):
        with pytest.raises(DomainError):
            distnum.WPipeline(N, K)


class TestQuadConfig:
    def test_validation(self):
        with pytest.raises(DomainError):
            distnum.QuadConfig(abs_tol=0)
        with pytest.raises(DomainError):
            distnum.QuadConfig(endpoint_substitution="magic")
