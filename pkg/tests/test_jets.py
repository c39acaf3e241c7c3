"""Tests for truncated Taylor arithmetic at c = 1."""

import math

import numpy as np
import pytest

from zpd.domain.errors import DomainError
from zpd.services.jets import (
    TaylorJet,
    derivative_at_one,
    jet_arccos,
    jet_const,
    jet_derivative,
    jet_div,
    jet_mul,
    jet_pow,
    jet_shift,
    jet_sqrt_inv_arccos,
    jet_var,
)


def h_closed_form(c, d):
    """h(c) = 1/(c - d^2) + d (c - d^2)^(-3/2) arccos(-d / sqrt(c))."""
    return 1.0 / (c - d * d) + d * (c - d * d) ** -1.5 * math.acos(-d / math.sqrt(c))


def central_derivative(f, x, k, step=2e-3):
    """k-th derivative by a high-order finite-difference stencil (k <= 3)."""
    if k == 1:
        return (f(x - 2 * step) - 8 * f(x - step) + 8 * f(x + step) - f(x + 2 * step)) / (12 * step)
    if k == 2:
        return (-f(x - 2 * step) + 16 * f(x - step) - 30 * f(x) + 16 * f(x + step) - f(x + 2 * step)) / (12 * step ** 2)
    return (f(x + 2 * step) - 2 * f(x + step) + 2 * f(x - step) - f(x - 2 * step)) / (2 * step ** 3)


class TestConstruction:
    """Tests for building jets."""

    def test_variable(self):
        """c at c = 1 is [1, 1, 0, ...]."""
        np.testing.assert_array_equal(jet_var(3).coeffs, [1.0, 1.0, 0.0, 0.0])
        np.testing.assert_array_equal(jet_var(0).coeffs, [1.0])

    def test_constant(self):
        """Constants have no higher coefficients."""
        np.testing.assert_array_equal(jet_const(2.5, 2).coeffs, [2.5, 0.0, 0.0])

    def test_read_only(self):
        """Jets are immutable."""
        jet = jet_var(2)
        with pytest.raises(ValueError):
            jet.coeffs[0] = 3.0

    def test_negative_order_rejected(self):
        with pytest.raises(DomainError):
            jet_var(-1)


class TestArithmetic:
    """Tests for jet arithmetic against known expansions."""

    def test_reciprocal(self):
        """1/c = sum (-1)^k (c-1)^k."""
        jet = 1.0 / jet_var(6)
        np.testing.assert_allclose(jet.coeffs, [(-1.0) ** k for k in range(7)])

    def test_power_matches_binomial_series(self):
        """c^p has coefficients binom(p, k)."""
        p = -1.5
        jet = jet_pow(jet_var(5), p)
        expected = [1.0]
        for k in range(1, 6):
            expected.append(expected[-1] * (p - k + 1) / k)
        np.testing.assert_allclose(jet.coeffs, expected, rtol=1e-14)

    def test_product_and_quotient_invert(self):
        """(f g) / g = f."""
        f = jet_pow(jet_var(5), 0.5)
        g = jet_shift(jet_var(5), 2.0)
        np.testing.assert_allclose(jet_div(jet_mul(f, g), g).coeffs, f.coeffs, rtol=1e-13)

    @pytest.mark.parametrize("d", [0.0, 0.5, 0.9])
    def test_reciprocal_by_division_and_power(self, d):
        """1 / (c - d^2) through jet_div and through jet_pow(., -1)."""
        order = 10
        base = jet_shift(jet_var(order), -d * d)
        by_division = jet_div(jet_const(1.0, order), base)
        by_power = jet_pow(base, -1.0)
        np.testing.assert_allclose(by_division.coeffs, by_power.coeffs, rtol=1e-12, atol=0.0)

    @pytest.mark.parametrize("kernel", [False, True])
    def test_leibniz_rule(self, kernel):
        """(f g)^(k) = sum_j binom(k, j) f^(j) g^(k - j) up to order 12."""
        order = 12
        c = jet_var(order)
        if kernel:
            f = jet_sqrt_inv_arccos(0.5, order)
            g = jet_pow(jet_shift(c, -0.25), -1.5)
        else:
            f = jet_pow(3.0 - c, -1.5)
            g = jet_div(jet_const(1.0, order), 2.5 - c)
        product = jet_mul(f, g)
        for k in range(order + 1):
            terms = [math.comb(k, j) * derivative_at_one(f, j) * derivative_at_one(g, k - j) for j in range(k + 1)]
            scale = sum(abs(t) for t in terms)
            assert derivative_at_one(product, k) == pytest.approx(sum(terms), rel=1e-10, abs=1e-13 * scale)

    def test_operators(self):
        """Operators agree with the named functions."""
        c = jet_var(3)
        np.testing.assert_allclose((2.0 * c - 1.0).coeffs, [1.0, 2.0, 0.0, 0.0])
        np.testing.assert_allclose((c * c).coeffs, [1.0, 2.0, 1.0, 0.0])
        np.testing.assert_allclose((1.0 - c).coeffs, [0.0, -1.0, 0.0, 0.0])
        np.testing.assert_allclose((c ** 2.0).coeffs, [1.0, 2.0, 1.0, 0.0])

    def test_division_by_zero_constant(self):
        """Quotients need a nonzero constant term."""
        with pytest.raises(DomainError):
            jet_div(jet_var(2), jet_var(2) - 1.0)

    def test_pow_needs_positive_base(self):
        with pytest.raises(DomainError):
            jet_pow(jet_var(2) - 2.0, 0.5)

    def test_order_mismatch(self):
        with pytest.raises(DomainError):
            jet_mul(jet_var(2), jet_var(3))

    def test_derivative(self):
        """d/dc c^3 = 3 c^2."""
        cube = jet_pow(jet_var(4), 3.0)
        np.testing.assert_allclose(jet_derivative(cube).coeffs, [3.0, 6.0, 3.0, 0.0], atol=1e-14)


class TestArccos:
    """Tests for the arccos jets."""

    def test_arccos_of_scaled_variable(self):
        """Derivatives of arccos(c/2) at c = 1 by finite differences."""
        jet = jet_arccos(jet_var(3) * 0.5)
        f = lambda c: math.acos(0.5 * c)  # noqa: E731
        assert jet.coeffs[0] == pytest.approx(math.acos(0.5))
        for k in (1, 2, 3):
            assert derivative_at_one(jet, k) == pytest.approx(central_derivative(f, 1.0, k), rel=1e-4)

    def test_arccos_requires_open_interval(self):
        with pytest.raises(DomainError):
            jet_arccos(jet_var(2))

    @pytest.mark.parametrize("d", [-0.6, 0.0, 0.5, 0.9])
    def test_sqrt_inv_arccos(self, d):
        """g(c) = arccos(-d / sqrt(c)) against finite differences."""
        jet = jet_sqrt_inv_arccos(d, 3)
        f = lambda c: math.acos(-d / math.sqrt(c))  # noqa: E731
        assert jet.value == pytest.approx(math.acos(-d))
        for k in (1, 2):
            assert derivative_at_one(jet, k) == pytest.approx(central_derivative(f, 1.0, k, 1e-3), rel=1e-5, abs=1e-9)

    def test_batch_evaluation(self):
        """A vector of d values expands all at once."""
        d = np.array([-0.5, 0.0, 0.5])
        jet = jet_sqrt_inv_arccos(d, 4)
        assert jet.coeffs.shape == (5, 3)
        for i, value in enumerate(d):
            np.testing.assert_allclose(jet.coeffs[:, i], jet_sqrt_inv_arccos(value, 4).coeffs, rtol=1e-14)


class TestPhaseKernel:
    """The combination used by the phase density."""

    @pytest.mark.parametrize("d", [0.0, 0.3, 0.5, -0.45])
    def test_h_derivatives(self, d):
        """h and its first three derivatives against finite differences."""
        order = 3
        base = jet_shift(jet_var(order), -d * d)
        h = jet_pow(base, -1.0) + jet_mul(jet_pow(base, -1.5) * d, jet_sqrt_inv_arccos(d, order))
        f = lambda c: h_closed_form(c, d)  # noqa: E731
        assert h.value == pytest.approx(f(1.0), rel=1e-14)
        for k in (1, 2, 3):
            assert derivative_at_one(h, k) == pytest.approx(central_derivative(f, 1.0, k), rel=1e-4)

    def test_value_at_one_with_half_correlation(self):
        """h(1) = 1/0.75 + 0.5 arccos(-0.5) / 0.75^1.5."""
        expected = 1.0 / 0.75 + 0.5 * math.acos(-0.5) / 0.75 ** 1.5
        assert h_closed_form(1.0, 0.5) == pytest.approx(expected)
        assert expected == pytest.approx(2.9456, abs=1e-4)

    def test_derivative_out_of_range(self):
        with pytest.raises(DomainError):
            derivative_at_one(jet_var(2), 3)

    def test_taylor_jet_requires_coefficients(self):
        with pytest.raises(DomainError):
            TaylorJet(np.zeros(0))
