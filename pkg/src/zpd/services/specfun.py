"""
Integer-order special functions required by the densities.

Gamma at integers and half-integers, the modified Bessel functions I_0, I_1
and K_n, Lah numbers, the Lambda coefficients of the elementary K_n series and
the series itself. Bessel kernels come from scipy.special (exponentially
scaled variants); K_n for n >= 2 is built by upward recurrence, which is the
stable direction for K.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy import special

from zpd.domain.errors import DomainError
from zpd.domain.models import ArrayLike

LOG_2 = math.log(2.0)
LOG_4 = math.log(4.0)
LOG_PI = math.log(math.pi)
SQRT_PI = math.sqrt(math.pi)


def _require_int(name: str, value, minimum: int = 0) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise DomainError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise DomainError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def _as_array(x: ArrayLike) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _finish(values: np.ndarray, scalar: bool) -> ArrayLike:
    return float(values) if scalar else values


def _require_positive(x: np.ndarray, what: str) -> None:
    if not np.all(x > 0):
        raise DomainError(f"{what} requires x > 0")


# --- Gamma ---

def gamma_int(n: int) -> float:
    """Gamma(n) = (n-1)! for a positive integer n."""
    n = _require_int("n", n, minimum=1)
    try:
        return float(math.factorial(n - 1))
    except OverflowError:
        raise OverflowError(f"Gamma({n}) = {n - 1}! exceeds the double range") from None


def log_gamma_half(k: int) -> tuple[int, float]:
    """Return (sign, log|Gamma(k + 1/2)|) for any integer k."""
    k = _require_int("k", k, minimum=-(10 ** 9))
    if k >= 0:
        return 1, float(special.gammaln(k + 0.5))
    # Gamma(1/2 - n) = (-4)^n n! sqrt(pi) / (2n)!
    n = -k
    sign = -1 if n % 2 else 1
    log_abs = n * LOG_4 + special.gammaln(n + 1) + 0.5 * LOG_PI - special.gammaln(2 * n + 1)
    return sign, float(log_abs)


def gamma_half(k: int) -> float:
    """Gamma(k + 1/2); half-integers are never poles."""
    sign, log_abs = log_gamma_half(k)
    return sign * math.exp(log_abs)


# --- Modified Bessel functions ---

def bessel_i0(x: ArrayLike) -> ArrayLike:
    """I_0(x); even in x."""
    arr, scalar = _as_array(x)
    if not np.all(np.isfinite(arr)):
        raise DomainError("bessel_i0 requires a finite argument")
    values = special.i0(arr)
    if not np.all(np.isfinite(values)):
        raise OverflowError("I_0(x) exceeds the double range")
    return _finish(values, scalar)


def bessel_i1(x: ArrayLike) -> ArrayLike:
    """I_1(x); odd in x."""
    arr, scalar = _as_array(x)
    if not np.all(np.isfinite(arr)):
        raise DomainError("bessel_i1 requires a finite argument")
    values = special.i1(arr)
    if not np.all(np.isfinite(values)):
        raise OverflowError("I_1(x) exceeds the double range")
    return _finish(values, scalar)


def log_bessel_i0(x: ArrayLike) -> ArrayLike:
    """log I_0(x) without overflow."""
    arr, scalar = _as_array(x)
    values = np.log(special.i0e(arr)) + np.abs(arr)
    return _finish(values, scalar)


def _scaled_kn(n: int, x: np.ndarray) -> np.ndarray:
    """e^x K_n(x) by upward recurrence from the scaled K_0, K_1 kernels."""
    k_prev = special.k0e(x)
    if n == 0:
        return k_prev
    k_curr = special.k1e(x)
    for m in range(1, n):
        k_prev, k_curr = k_curr, k_prev + (2.0 * m / x) * k_curr
    return k_curr


def bessel_kn(n: int, x: ArrayLike) -> ArrayLike:
    """K_n(x) for integer n >= 0 and x > 0."""
    n = _require_int("n", n)
    arr, scalar = _as_array(x)
    _require_positive(arr, "bessel_kn")
    values = _scaled_kn(n, arr) * np.exp(-arr)
    return _finish(values, scalar)


def log_bessel_kn(n: int, x: ArrayLike) -> ArrayLike:
    """
    log K_n(x), accumulated from the ratios K_{m+1}/K_m so that neither the
    x -> 0 blow-up nor the x -> inf decay leaves the double range.
    """
    n = _require_int("n", n)
    arr, scalar = _as_array(x)
    _require_positive(arr, "log_bessel_kn")
    k0e = special.k0e(arr)
    total = np.log(k0e)
    if n >= 1:
        ratio = special.k1e(arr) / k0e
        total = total + np.log(ratio)
        for m in range(1, n):
            ratio = 1.0 / ratio + 2.0 * m / arr
            total = total + np.log(ratio)
    return _finish(total - arr, scalar)


# --- Lah numbers ---

def lah(l: int, q: int) -> float:
    """Lah number L(l, q) = binom(l-1, q-1) l!/q!, with L(0,0)=1 and L(l,0)=0."""
    l = _require_int("l", l)
    q = _require_int("q", q)
    if q > l:
        raise DomainError(f"Lah number requires q <= l, got l={l}, q={q}")
    if l == 0:
        return 1.0
    if q == 0:
        return 0.0
    return float(math.comb(l - 1, q - 1) * (math.factorial(l) // math.factorial(q)))


def log_lah(l: int, q: int) -> float:
    if l == 0 and q == 0:
        return 0.0
    if q == 0:
        return -math.inf
    return float(
        special.gammaln(l) - special.gammaln(q) - special.gammaln(l - q + 1)
        + special.gammaln(l + 1) - special.gammaln(q + 1)
    )


@dataclass(frozen=True)
class LahTable:
    """Lah numbers L(l, q) for 0 <= q <= l <= max_index; values[l, q]."""
    max_index: int
    values: np.ndarray = field(repr=False)

    def __call__(self, l: int, q: int) -> float:
        if not 0 <= q <= l <= self.max_index:
            raise DomainError(f"({l}, {q}) outside the table of order {self.max_index}")
        return float(self.values[l, q])


@lru_cache(maxsize=32)
def lah_table(max_index: int) -> LahTable:
    max_index = _require_int("max_index", max_index)
    values = np.zeros((max_index + 1, max_index + 1))
    for l in range(max_index + 1):
        for q in range(l + 1):
            values[l, q] = lah(l, q)
    values.flags.writeable = False
    return LahTable(max_index=max_index, values=values)


# --- Lambda coefficients and the elementary K_n series ---

def _signed_log_lambda(order: int, l: int, q: int) -> tuple[int, float]:
    """
    Sign and log-magnitude of

        (-1)^q sqrt(pi) Gamma(2L) Gamma(1/2 + l - L) L(l, q)
        ----------------------------------------------------
        2^(L-q) Gamma(1/2 - L) Gamma(1/2 + l + L) l!
    """
    if l > 0 and q == 0:
        return 0, -math.inf
    sign_num, log_num = log_gamma_half(l - order)
    sign_den, log_den = log_gamma_half(-order)
    _, log_top = log_gamma_half(l + order)
    sign = (-1 if q % 2 else 1) * sign_num * sign_den
    log_abs = (
        0.5 * LOG_PI
        + special.gammaln(2 * order)
        + log_num
        + log_lah(l, q)
        - (order - q) * LOG_2
        - log_den
        - log_top
        - special.gammaln(l + 1)
    )
    return sign, float(log_abs)


def lambda_coeff(order: int, l: int, q: int) -> float:
    """Lambda(order, l, q) weighting the e^-x x^(q-order) term of the K_order series."""
    order = _require_int("order", order)
    l = _require_int("l", l)
    q = _require_int("q", q)
    if q > l:
        raise DomainError(f"Lambda coefficient requires q <= l, got l={l}, q={q}")
    if order == 0:
        raise DomainError("Lambda coefficient is undefined for order 0 (Gamma(0) pole)")
    sign, log_abs = _signed_log_lambda(order, l, q)
    if sign == 0:
        return 0.0
    return sign * math.exp(log_abs)


@dataclass(frozen=True)
class LambdaCoeffs:
    """
    Lambda(order, l, q) for 0 <= q <= l <= t_terms (values[l, q], zero above
    the diagonal) and the per-power weights sum_{l >= q} Lambda(order, l, q).
    """
    order: int
    t_terms: int
    values: np.ndarray = field(repr=False)
    series_weights: np.ndarray = field(repr=False)


@lru_cache(maxsize=128)
def lambda_table(order: int, t_terms: int) -> LambdaCoeffs:
    t_terms = _require_int("t_terms", t_terms)
    values = np.zeros((t_terms + 1, t_terms + 1))
    for l in range(t_terms + 1):
        for q in range(l + 1):
            values[l, q] = lambda_coeff(order, l, q)
    weights = values.sum(axis=0)
    values.flags.writeable = False
    weights.flags.writeable = False
    return LambdaCoeffs(order=order, t_terms=t_terms, values=values, series_weights=weights)


def kl_series_approx(order: int, x: ArrayLike, t_terms: Optional[int] = None) -> ArrayLike:
    """
    K_order(x) ~ sum_{q=0}^{T} (sum_{l=q}^{T} Lambda(order, l, q)) e^-x x^(q - order).

    T defaults to the order itself.
    """
    order = _require_int("order", order)
    t_terms = order if t_terms is None else _require_int("t_terms", t_terms)
    arr, scalar = _as_array(x)
    _require_positive(arr, "kl_series_approx")
    weights = lambda_table(order, t_terms).series_weights
    values = np.polynomial.polynomial.polyval(arr, weights) * np.exp(-arr) * arr ** (-order)
    return _finish(values, scalar)


__all__ = [
    "LahTable",
    "LambdaCoeffs",
    "bessel_i0",
    "bessel_i1",
    "bessel_kn",
    "gamma_half",
    "gamma_int",
    "kl_series_approx",
    "lah",
    "lah_table",
    "lambda_coeff",
    "lambda_table",
    "log_bessel_i0",
    "log_bessel_kn",
    "log_gamma_half",
    "log_lah",
]
