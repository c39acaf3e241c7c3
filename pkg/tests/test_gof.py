"""Tests for the goodness-of-fit checks."""

import math

import numpy as np
import pytest
from scipy import stats

from zpd.domain.errors import ConvergenceError, DomainError
from zpd.domain.models import ModelParams
from zpd.domain.types import DensityTarget
from zpd.services.gof import AnalyticCdf, GofReport, gof, gof_against
from zpd.services.pdfs import amplitude_pdf
from zpd.services.simulate import sample_z


def uniform_on_0_2(x):
    return np.ones_like(np.asarray(x, dtype=float))


@pytest.fixture(scope="module")
def default_batch_l5():
    params = ModelParams(sigma_x=0.7, sigma_y=1.5, mu_abs=0.5, epsilon=math.pi / 6.0, big_l=5)
    return params, sample_z(params, 20_000, seed=12345)


class TestAnalyticCdf:
    """Tests for the tabulated CDF."""

    def test_uniform(self):
        cdf = AnalyticCdf(uniform_on_0_2, 0.0, 2.0, knots=64)
        assert cdf.total_mass == pytest.approx(2.0)
        assert cdf(1.0) == pytest.approx(0.5)
        assert cdf(np.array([-1.0, 3.0])).tolist() == [0.0, 1.0]
        assert cdf.quantile(0.25) == pytest.approx(0.5)

    def test_normal(self):
        cdf = AnalyticCdf(stats.norm.pdf, -9.0, 9.0)
        x = np.array([-2.0, -0.3, 0.0, 1.0, 2.5])
        np.testing.assert_allclose(cdf(x), stats.norm.cdf(x), atol=1e-7)

    def test_normalizes_truncated_density(self):
        """Mass outside the support is renormalized away."""
        cdf = AnalyticCdf(stats.norm.pdf, 0.0, 9.0)
        assert cdf.total_mass == pytest.approx(0.5, rel=1e-12)
        assert cdf(stats.norm.ppf(0.75)) == pytest.approx(0.5, abs=1e-7)

    def test_bin_masses_sum_to_one(self):
        cdf = AnalyticCdf(stats.norm.pdf, -9.0, 9.0)
        edges = np.linspace(-9.0, 9.0, 31)
        assert float(np.sum(cdf.bin_masses(edges))) == pytest.approx(1.0)

    def test_amplitude_support(self, default_params):
        """For L = 1 the density falls like r log r at the origin."""
        cdf = AnalyticCdf(lambda r: amplitude_pdf(default_params, r), 0.0, 40.0)
        assert cdf.total_mass == pytest.approx(1.0, abs=1e-8)

    def test_singular_lower_edge(self):
        """x^(-1/2) / 2 on [0, 1] is resolved next to its pole."""
        cdf = AnalyticCdf(lambda x: 0.5 / np.sqrt(x), 0.0, 1.0)
        assert cdf.total_mass == pytest.approx(1.0, rel=1e-9)
        assert cdf(0.25) == pytest.approx(0.5, abs=1e-7)

    def test_zero_density_rejected(self):
        with pytest.raises(ConvergenceError):
            AnalyticCdf(lambda x: np.zeros_like(x), 0.0, 1.0)

    @pytest.mark.parametrize("lower, upper", [(1.0, 1.0), (0.0, float("inf")), (2.0, 1.0)])
    def test_support_checked(self, lower, upper):
        with pytest.raises(DomainError):
            AnalyticCdf(uniform_on_0_2, lower, upper)


class TestGof:
    """Tests for gof()."""

    def test_quantile_sample_fits(self):
        """Draws pushed through the analytic quantile pass every check."""
        cdf = AnalyticCdf(stats.norm.pdf, -9.0, 9.0)
        values = cdf.quantile(np.random.default_rng(3).uniform(size=10_000))
        report = gof(values, stats.norm.pdf, (-9.0, 9.0), bins=50, target="normal")
        assert report.ks_pvalue > 1e-4
        assert report.chi2_pvalue > 1e-4
        assert report.tv_distance < 0.06
        assert report.target == "normal"

    def test_shifted_sample_fails(self):
        values = np.random.default_rng(4).normal(0.3, 1.0, size=10_000)
        report = gof(values, stats.norm.pdf, (-9.0, 9.0))
        assert not report.passed
        assert report.ks_stat > 0.05

    def test_chi_square_bins_follow_sample_size(self):
        """At least 20 expected counts per bin."""
        values = np.random.default_rng(5).uniform(0.0, 2.0, size=400)
        report = gof(values, uniform_on_0_2, (0.0, 2.0), bins=100)
        assert report.chi2_dof == 19

    def test_empty_sample_rejected(self):
        with pytest.raises(DomainError):
            gof(np.array([]), uniform_on_0_2, (0.0, 2.0))

    def test_non_finite_sample_rejected(self):
        with pytest.raises(DomainError):
            gof(np.array([1.0, float("inf")]), uniform_on_0_2, (0.0, 2.0))


class TestGofReport:
    def test_critical_value(self):
        report = GofReport("x", 10_000, 0.01, 0.3, 10.0, 9, 0.3, 0.02)
        assert report.critical_value == pytest.approx(0.0163)
        assert report.passed

    def test_as_dict(self):
        data = GofReport("x", 100, 0.5, 0.0, 10.0, 4, 0.0, 0.4).as_dict()
        assert data["passed"] is False
        assert data["critical_value"] == pytest.approx(0.163)
        assert data["chi2_dof"] == 4


class TestGofAgainst:
    """Simulated batches against the analytic densities."""

    def test_amplitude_fits(self, default_batch_l5):
        params, batch = default_batch_l5
        report = gof_against(batch.z, params, DensityTarget.AMPLITUDE)
        assert report.target == "amplitude"
        assert report.n == 20_000
        assert report.ks_pvalue > 1e-4

    def test_phase_fits(self, default_batch_l5):
        params, batch = default_batch_l5
        report = gof_against(batch.z, params, "phase-exact")
        assert report.ks_pvalue > 1e-4

    def test_legacy_amplitude_rejected(self, default_batch_l5):
        """The legacy density does not describe the simulated amplitudes."""
        params, batch = default_batch_l5
        report = gof_against(batch.z, params, DensityTarget.AMPLITUDE_LEGACY)
        assert not report.passed
        assert report.ks_stat > 0.1

    def test_phase_approx_runs(self, default_batch_l5):
        params, batch = default_batch_l5
        report = gof_against(batch.z, params, DensityTarget.PHASE_APPROX)
        assert 0.0 <= report.ks_stat <= 1.0

    def test_phase_approx_requires_two_products(self, default_params):
        batch = sample_z(default_params, 100, seed=1)
        with pytest.raises(DomainError):
            gof_against(batch.z, default_params, DensityTarget.PHASE_APPROX)

    def test_unknown_target(self, default_params):
        with pytest.raises(ValueError):
            gof_against(np.ones(3, dtype=complex), default_params, "density")
