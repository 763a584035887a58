import numpy as np
import pytest
from scipy import integrate, stats

from randfid import samplers
from randfid.errors import DomainError, McmcNotConverged, OffSimplex
from randfid.samplers import BuresMcmcConfig, MeasureSpec, RngStream
from randfid.states import validate_state


class TestRngStream:
    def test_deterministic(self):
        a = RngStream(7, 3).generator().standard_normal(5)
        b = RngStream(7, 3).generator().standard_normal(5)
        np.testing.assert_array_equal(a, b)

    def test_streams_differ(self):
        a = RngStream(7, 3).generator().standard_normal(5)
        b = RngStream(7, 4).generator().standard_normal(5)
        c = RngStream(7, 3).substream(0).generator().standard_normal(5)
        assert not np.allclose(a, b) and not np.allclose(a, c)

    @pytest.mark.parametrize("rng", [None, 3, np.random.default_rng(1), RngStream(1)])
    def test_as_generator(self, rng):
        assert isinstance(samplers.as_generator(rng), np.random.Generator)


class TestMeasureSpec:
    def test_canonical(self):
        assert MeasureSpec.hilbert_schmidt(3).canonical() == MeasureSpec.induced(3, 3)
        assert MeasureSpec.fubini_study(3).canonical() == MeasureSpec.induced(3, 1)
        assert MeasureSpec.bures(3).label() == "bures(N=3)"

    @pytest.mark.parametrize("args", [("nope", 2, None), ("induced", 2, None), ("induced", 2, 0), ("hs", 0, None)])
    def test_invalid(self, args):
        with pytest.raises(DomainError):
            MeasureSpec(*args)


class TestHaar:
    def test_unitary(self, rng):
        u = samplers.haar_unitary(4, rng, size=10)
        np.testing.assert_allclose(u @ np.conj(np.swapaxes(u, -1, -2)), np.broadcast_to(np.eye(4), u.shape), atol=1e-12)

    def test_trace_moments(self, rng):
        # E|Tr U|^2 = 1 and E|Tr U|^4 = 2 for Haar unitaries with N >= 2.
        t = np.abs(np.trace(samplers.haar_unitary(5, rng, size=40000), axis1=1, axis2=2)) ** 2
        assert t.mean() == pytest.approx(1, abs=0.04)
        assert (t**2).mean() == pytest.approx(2, abs=0.15)

    def test_phase_uniform(self, rng):
        u = samplers.haar_unitary(3, rng, size=20000)
        ph = np.angle(u[:, 0, 0])
        assert stats.kstest(ph, stats.uniform(-np.pi, 2 * np.pi).cdf).pvalue > 0.01


class TestInduced:
    @pytest.mark.parametrize("N,K", [(2, 1), (2, 2), (3, 5), (4, 2)])
    def test_valid_states(self, N, K, rng):
        x = samplers.sample_batch(MeasureSpec.induced(N, K), 20, rng)
        for m in x:
            r = validate_state(m)
            assert r.rank == min(N, K)

    @pytest.mark.parametrize("N,K", [(2, 2), (3, 4), (4, 1)])
    def test_mean_purity(self, N, K, rng):
        x = samplers.sample_batch(MeasureSpec.induced(N, K), 40000, rng)
        p = np.einsum("nij,nji->n", x, x).real
        assert abs(p.mean() - (N + K) / (N * K + 1)) < 4 * p.std() / 200

    def test_real_states_are_real(self, rng):
        x = samplers.sample_batch(MeasureSpec.real_induced(3, 2), 5, rng)
        assert np.all(x.imag == 0)

    def test_single_state_api(self, rng):
        assert samplers.sample_induced(3, 2, rng).rank == 2
        assert samplers.sample_hs(2, rng).dim == 2
        assert samplers.sample_real_induced(2, 3, rng).dim == 2


class TestEigenvalueDensities:
    @pytest.mark.parametrize("K", [2, 3.5])
    def test_induced_qubit_normalizes(self, K):
        total = integrate.quad(lambda x: samplers.pdf_induced_eigs([x, 1 - x], 2, K), 0, 1)[0]
        assert total == pytest.approx(1, abs=1e-10)

    def test_bures_qubit_normalizes(self):
        total = integrate.quad(lambda x: samplers.pdf_bures_eigs([x, 1 - x], 2), 0, 1)[0]
        assert total == pytest.approx(1, abs=1e-8)

    def test_bures_three_normalizes(self):
        f = lambda y, x: samplers.pdf_bures_eigs([x, y, 1 - x - y], 3)
        total = integrate.dblquad(f, 0, 1, 0, lambda x: 1 - x, epsabs=1e-7)[0]
        assert total == pytest.approx(1, abs=1e-5)

    def test_off_simplex(self):
        with pytest.raises(OffSimplex):
            samplers.pdf_bures_eigs([0.5, 0.6], 2)

    def test_edge_values(self):
        assert samplers.pdf_bures_eigs([0.5, 0.5], 2) == 0.0


class TestBures:
    def test_qubit_radius_law(self, rng):
        x = samplers.sample_batch(MeasureSpec.bures(2), 20000, rng)
        w = np.linalg.eigvalsh(x)
        r = (w[:, 1] - w[:, 0]) / np.sqrt(2)
        # radius density proportional to r^2 / sqrt(1/2 - r^2)
        theta = np.arcsin(np.clip(r * np.sqrt(2), 0, 1))
        cdf = lambda t: (2 * t - np.sin(2 * t)) / np.pi
        assert stats.kstest(theta, cdf).pvalue > 0.01

    def test_inverse_cdf_monotone(self):
        u = np.linspace(0, 1, 101)
        r = samplers.bures_radius_inverse_cdf(u)
        assert np.all(np.diff(r) >= 0) and r[0] == pytest.approx(0, abs=1e-12)
        assert r[-1] == pytest.approx(np.sqrt(2) / 2)

    def test_mcmc_mean_root_trace(self):
        spectra, rate = samplers.bures_spectra(3, 4000, RngStream(5), BuresMcmcConfig(burn_in=2000))
        assert 0.3 < rate < 0.9
        np.testing.assert_allclose(spectra.sum(axis=1), 1, atol=1e-12)
        # <Tr sqrt(rho)> for N = 3 from quadrature over the eigenvalue density
        m = np.sqrt(spectra).sum(axis=1)
        assert abs(m.mean() - 1.40365) < 5 * m.std() / np.sqrt(4000 / 10)

    def test_rank_full(self):
        r = samplers.sample_bures(3, RngStream(1), BuresMcmcConfig(burn_in=500))
        assert r.rank == 3

    def test_low_acceptance_raises(self):
        cfg = BuresMcmcConfig(burn_in=50, proposal_concentration=1e-3, min_acceptance=0.9)
        with pytest.raises(McmcNotConverged):
            samplers.bures_spectra(4, 100, RngStream(0), cfg)

    def test_bad_config(self):
        with pytest.raises(DomainError):
            BuresMcmcConfig(thinning=0)


class TestDeterminism:
    @pytest.mark.parametrize("spec", [MeasureSpec.induced(3, 2), MeasureSpec.bures(2), MeasureSpec.bures(3)])
    def test_same_stream_same_states(self, spec):
        cfg = BuresMcmcConfig(burn_in=200)
        a = samplers.sample_batch(spec, 10, RngStream(11, 2), cfg)
        b = samplers.sample_batch(spec, 10, RngStream(11, 2), cfg)
        np.testing.assert_array_equal(a, b)
