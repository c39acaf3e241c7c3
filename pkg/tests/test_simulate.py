"""Tests for Monte-Carlo generation and histograms."""

import logging
import math

import numpy as np
import pytest

from zpd.domain.errors import DomainError, ResourceError
from zpd.domain.models import ComplexValue, ModelParams
from zpd.services.simulate import (
    SampleBatch,
    chunk_rng,
    histogram_1d,
    histogram_2d,
    iter_z_chunks,
    max_samples,
    sample_pair,
    sample_pairs,
    sample_z,
    worker_count,
)


class TestConfiguration:
    """Tests for the environment-driven settings."""

    def test_worker_count_from_env(self, monkeypatch):
        monkeypatch.setenv("ZPD_THREADS", "3")
        assert worker_count() == 3

    def test_worker_count_at_least_one(self, monkeypatch):
        monkeypatch.setenv("ZPD_THREADS", "0")
        assert worker_count() == 1

    def test_max_samples_from_env(self, monkeypatch):
        monkeypatch.setenv("ZPD_MAX_SAMPLES", "1234")
        assert max_samples() == 1234

    @pytest.mark.parametrize("name, read", [("ZPD_THREADS", worker_count), ("ZPD_MAX_SAMPLES", max_samples)])
    def test_non_integer_setting_rejected(self, monkeypatch, name, read):
        monkeypatch.setenv(name, "abc")
        with pytest.raises(DomainError, match=name):
            read()


class TestPairs:
    """Tests for the correlated pair generator."""

    def test_second_order_statistics(self, default_params):
        """E|X|^2 = sigma_x^2, E|Y|^2 = sigma_y^2, E[XY] = mu sigma_x sigma_y, E[X conj Y] = 0."""
        x, y = sample_pairs(default_params, 400_000, chunk_rng(11, 0))
        assert np.mean(np.abs(x) ** 2) == pytest.approx(0.49, rel=1e-2)
        assert np.mean(np.abs(y) ** 2) == pytest.approx(2.25, rel=1e-2)
        assert complex(np.mean(x * y)) == pytest.approx(default_params.mu * 1.05, abs=1e-2)
        assert abs(np.mean(x * np.conj(y))) < 1e-2
        assert abs(np.mean(x * x)) < 1e-2

    def test_single_pair(self, default_params):
        x, y = sample_pair(default_params, chunk_rng(5, 0))
        assert isinstance(x, ComplexValue) and isinstance(y, ComplexValue)

    def test_same_stream_same_pairs(self, default_params):
        first = sample_pairs(default_params, 10, chunk_rng(5, 2))
        second = sample_pairs(default_params, 10, chunk_rng(5, 2))
        np.testing.assert_array_equal(first[0], second[0])
        np.testing.assert_array_equal(first[1], second[1])

    def test_chunks_are_distinct_streams(self, default_params):
        first, _ = sample_pairs(default_params, 10, chunk_rng(5, 0))
        second, _ = sample_pairs(default_params, 10, chunk_rng(5, 1))
        assert not np.array_equal(first, second)

    @pytest.mark.parametrize("seed", [-1, 2 ** 64, 1.5, True])
    def test_invalid_seed(self, seed):
        with pytest.raises(DomainError):
            chunk_rng(seed, 0)


class TestSampleZ:
    """Tests for sample_z() and iter_z_chunks()."""

    def test_reproducible(self, default_params_l5):
        first = sample_z(default_params_l5, 5000, seed=42)
        second = sample_z(default_params_l5, 5000, seed=42)
        np.testing.assert_array_equal(first.z, second.z)

    def test_seed_changes_stream(self, default_params_l5):
        assert not np.array_equal(sample_z(default_params_l5, 100, seed=1).z, sample_z(default_params_l5, 100, seed=2).z)

    @pytest.mark.parametrize("workers", [1, 2, 5])
    def test_independent_of_worker_count(self, default_params_l5, workers):
        reference = sample_z(default_params_l5, 1050, seed=9, chunk_size=100, workers=1)
        batch = sample_z(default_params_l5, 1050, seed=9, chunk_size=100, workers=workers)
        np.testing.assert_array_equal(batch.z, reference.z)

    def test_prefix_stable(self, default_params):
        """Drawing more samples extends the stream without changing its start."""
        short = sample_z(default_params, 250, seed=3, chunk_size=100)
        longer = sample_z(default_params, 420, seed=3, chunk_size=100)
        np.testing.assert_array_equal(longer.z[:200], short.z[:200])

    def test_chunk_sizes(self, default_params):
        sizes = [chunk.size for chunk in iter_z_chunks(default_params, 250, seed=1, chunk_size=100, workers=2)]
        assert sizes == [100, 100, 50]

    def test_moments(self, default_params):
        """E[Z] = L sigma_x sigma_y mu and E|Z|^2 = L s^2 + L^2 s^2 |mu|^2."""
        params = default_params.with_order(3)
        batch = sample_z(params, 200_000, seed=2024)
        s = params.sigma_product
        expected_mean = 3 * s * params.mu
        se = batch.standard_error
        assert abs(batch.mean.real - expected_mean.real) < 5 * se.real
        assert abs(batch.mean.imag - expected_mean.imag) < 5 * se.imag
        second = float(np.mean(batch.amplitude ** 2))
        assert second == pytest.approx(3 * s * s + 9 * s * s * params.mu_abs ** 2, rel=2e-2)

    def test_budget_enforced(self, default_params, monkeypatch):
        monkeypatch.setenv("ZPD_MAX_SAMPLES", "100")
        with pytest.raises(ResourceError, match="ZPD_MAX_SAMPLES"):
            sample_z(default_params, 101, seed=1)
        assert sample_z(default_params, 100, seed=1).n == 100

    def test_resource_error_is_memory_error(self, default_params, monkeypatch):
        monkeypatch.setenv("ZPD_MAX_SAMPLES", "10")
        with pytest.raises(MemoryError):
            sample_z(default_params, 11, seed=1)

    @pytest.mark.parametrize("n", [0, -3, 2.5, True])
    def test_invalid_count(self, default_params, n):
        with pytest.raises(DomainError):
            sample_z(default_params, n, seed=1)

    def test_invalid_params(self):
        with pytest.raises(DomainError):
            sample_z(ModelParams(sigma_y=0.0), 10, seed=1)


class TestSampleBatch:
    """Tests for SampleBatch."""

    def test_projections(self, default_params):
        batch = sample_z(default_params, 2000, seed=8)
        assert np.all(batch.amplitude >= 0.0)
        assert np.all(batch.phase > -math.pi) and np.all(batch.phase <= math.pi)

    def test_read_only(self, default_params):
        batch = sample_z(default_params, 10, seed=8)
        with pytest.raises(ValueError):
            batch.z[0] = 0.0

    def test_size_checked(self, default_params):
        with pytest.raises(DomainError):
            SampleBatch(z=np.zeros(3, dtype=complex), params=default_params, seed=0, n=4)

    def test_summary(self, default_params_l5):
        summary = sample_z(default_params_l5, 1000, seed=4).summary()
        assert summary["n"] == 1000 and summary["seed"] == 4 and summary["L"] == 5
        assert set(summary) == {"n", "seed", "L", "mean_re", "mean_im", "se_re", "se_im", "mean_amplitude"}
        assert summary["se_re"] > 0.0


class TestHistograms:
    """Tests for the density histograms."""

    def test_unit_total(self):
        values = np.random.default_rng(0).standard_normal(5000)
        hist = histogram_1d(values, bins=40)
        assert hist.total() == pytest.approx(1.0)
        assert hist.clipped == 0
        assert hist.centers.shape == (40,)

    def test_clipping_counted_and_logged(self, caplog):
        values = np.array([-2.0, 0.1, 0.2, 0.3, 5.0])
        with caplog.at_level(logging.WARNING, logger="zpd.simulate"):
            hist = histogram_1d(values, bins=4, value_range=(0.0, 1.0))
        assert hist.clipped == 2
        assert "outside the histogram range" in caplog.text
        assert hist.total() == pytest.approx(1.0)

    def test_everything_clipped(self):
        with pytest.raises(DomainError):
            histogram_1d(np.array([5.0, 6.0]), value_range=(0.0, 1.0))

    def test_empty_rejected(self):
        with pytest.raises(DomainError):
            histogram_1d(np.array([]))

    def test_non_finite_rejected(self):
        with pytest.raises(DomainError):
            histogram_1d(np.array([1.0, float("nan")]))

    def test_bins_must_be_positive(self):
        with pytest.raises(DomainError):
            histogram_1d(np.array([1.0]), bins=0)

    def test_two_dimensional(self, default_params_l5):
        batch = sample_z(default_params_l5, 4000, seed=6)
        hist = histogram_2d(batch.z, bins=20, value_range=((-30.0, 30.0), (-30.0, 30.0)))
        assert hist.mass.shape == (20, 20)
        assert hist.total() == pytest.approx(1.0)
        assert hist.cell_areas().shape == (20, 20)

    def test_two_dimensional_clipping(self):
        z = np.array([0.1 + 0.1j, 0.2 + 0.3j, 5.0 + 0.0j])
        hist = histogram_2d(z, bins=2, value_range=((0.0, 1.0), (0.0, 1.0)))
        assert hist.clipped == 1

    def test_single_value(self):
        hist = histogram_1d(np.array([0.3]), bins=4, value_range=(0.0, 1.0))
        assert hist.mass.tolist() == [0.0, 4.0, 0.0, 0.0]

    def test_uniform_draws_are_flat(self):
        values = np.random.default_rng(12).uniform(0.0, 1.0, size=1_000_000)
        hist = histogram_1d(values, bins=10, value_range=(0.0, 1.0))
        np.testing.assert_allclose(hist.mass, 1.0, atol=0.02)
