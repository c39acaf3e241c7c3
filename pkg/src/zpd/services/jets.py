"""
Truncated Taylor arithmetic ("jets") around the expansion point c = 1.

A jet of order K stores a_0..a_K with a_k = f^(k)(1) / k!. Arithmetic on jets
propagates every derivative up to order K exactly (up to rounding), which is
how the phase density obtains its (L-1)-th derivative in c.

Coefficient arrays may carry trailing batch axes, shape (K + 1, *batch), so a
whole grid of expansion problems (one per phase angle) is advanced at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from zpd.domain.errors import DomainError

Scalar = Union[float, np.ndarray]


@dataclass(frozen=True)
class TaylorJet:
    """Taylor coefficients a_0..a_K of a function expanded at c = 1."""
    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=float)
        if arr.ndim == 0 or arr.shape[0] == 0:
            raise DomainError("A jet needs at least one coefficient")
        arr.flags.writeable = False
        object.__setattr__(self, "coeffs", arr)

    @property
    def order(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def value(self) -> Scalar:
        return self.coeffs[0]

    def __add__(self, other):
        if isinstance(other, TaylorJet):
            return jet_add(self, other)
        return jet_shift(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, TaylorJet):
            return jet_sub(self, other)
        return jet_shift(self, -np.asarray(other, dtype=float))

    def __rsub__(self, other):
        return jet_shift(jet_scale(self, -1.0), other)

    def __neg__(self):
        return jet_scale(self, -1.0)

    def __mul__(self, other):
        if isinstance(other, TaylorJet):
            return jet_mul(self, other)
        return jet_scale(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TaylorJet):
            return jet_div(self, other)
        return jet_scale(self, 1.0 / np.asarray(other, dtype=float))

    def __rtruediv__(self, other):
        return jet_div(jet_const(other, self.order), self)

    def __pow__(self, exponent: float):
        return jet_pow(self, exponent)


def _align(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Insert batch axes so (K+1, *batch) arrays broadcast against each other."""
    if a.ndim < b.ndim:
        a = a.reshape(a.shape + (1,) * (b.ndim - a.ndim))
    elif b.ndim < a.ndim:
        b = b.reshape(b.shape + (1,) * (a.ndim - b.ndim))
    return a, b


def _check_orders(f: TaylorJet, g: TaylorJet) -> None:
    if f.order != g.order:
        raise DomainError(f"Jet orders differ: {f.order} vs {g.order}")


# --- Construction ---

def jet_var(order: int) -> TaylorJet:
    """The identity c expanded at 1: [1, 1, 0, ..., 0]."""
    if order < 0:
        raise DomainError(f"Jet order must be >= 0, got {order}")
    coeffs = np.zeros(order + 1)
    coeffs[0] = 1.0
    if order >= 1:
        coeffs[1] = 1.0
    return TaylorJet(coeffs)


def jet_const(value: Scalar, order: int) -> TaylorJet:
    if order < 0:
        raise DomainError(f"Jet order must be >= 0, got {order}")
    value = np.asarray(value, dtype=float)
    coeffs = np.zeros((order + 1,) + value.shape)
    coeffs[0] = value
    return TaylorJet(coeffs)


# --- Arithmetic ---

def jet_add(f: TaylorJet, g: TaylorJet) -> TaylorJet:
    _check_orders(f, g)
    a, b = _align(f.coeffs, g.coeffs)
    return TaylorJet(a + b)


def jet_sub(f: TaylorJet, g: TaylorJet) -> TaylorJet:
    _check_orders(f, g)
    a, b = _align(f.coeffs, g.coeffs)
    return TaylorJet(a - b)


def jet_shift(f: TaylorJet, value: Scalar) -> TaylorJet:
    """f + value for a scalar (or per-batch) constant."""
    value = np.asarray(value, dtype=float)
    coeffs = f.coeffs
    if value.ndim > coeffs.ndim - 1:
        coeffs = coeffs.reshape(coeffs.shape + (1,) * (value.ndim - coeffs.ndim + 1))
    batch = np.broadcast_shapes(coeffs.shape[1:], value.shape)
    coeffs = np.broadcast_to(coeffs, (coeffs.shape[0],) + batch).copy()
    coeffs[0] = coeffs[0] + value
    return TaylorJet(coeffs)


def jet_scale(f: TaylorJet, value: Scalar) -> TaylorJet:
    """value * f for a scalar (or per-batch) factor."""
    value = np.asarray(value, dtype=float)
    coeffs = f.coeffs
    if value.ndim > coeffs.ndim - 1:
        coeffs = coeffs.reshape(coeffs.shape + (1,) * (value.ndim - coeffs.ndim + 1))
    return TaylorJet(coeffs * value)


def jet_mul(f: TaylorJet, g: TaylorJet) -> TaylorJet:
    """Cauchy product truncated to the common order."""
    _check_orders(f, g)
    a, b = _align(f.coeffs, g.coeffs)
    shape = (a.shape[0],) + np.broadcast_shapes(a.shape[1:], b.shape[1:])
    out = np.empty(shape)
    for k in range(shape[0]):
        out[k] = np.sum(a[: k + 1] * b[k::-1], axis=0)
    return TaylorJet(out)


def jet_div(f: TaylorJet, g: TaylorJet) -> TaylorJet:
    """f / g by the recursive division h_k = (f_k - sum_{j>=1} g_j h_{k-j}) / g_0."""
    _check_orders(f, g)
    a, b = _align(f.coeffs, g.coeffs)
    if np.any(b[0] == 0):
        raise DomainError("Division by a jet with zero constant term")
    shape = (a.shape[0],) + np.broadcast_shapes(a.shape[1:], b.shape[1:])
    out = np.empty(shape)
    for k in range(shape[0]):
        acc = a[k] - np.sum(b[1 : k + 1] * out[k - 1 :: -1][:k], axis=0) if k else a[0]
        out[k] = acc / b[0]
    return TaylorJet(out)


def jet_pow(base: TaylorJet, exponent: float) -> TaylorJet:
    """
    base ** exponent via the power-ODE recurrence
    g_k = 1/(k f_0) sum_{j=1}^{k} ((exponent + 1) j - k) f_j g_{k-j}.
    """
    f = base.coeffs
    if np.any(~(f[0] > 0)):
        raise DomainError("jet_pow requires a positive constant term")
    out = np.empty_like(f)
    out[0] = f[0] ** exponent
    for k in range(1, f.shape[0]):
        j = np.arange(1, k + 1).reshape((k,) + (1,) * (f.ndim - 1))
        weights = (exponent + 1.0) * j - k
        out[k] = np.sum(weights * f[1 : k + 1] * out[k - 1 :: -1][:k], axis=0) / (k * f[0])
    return TaylorJet(out)


def jet_derivative(f: TaylorJet) -> TaylorJet:
    """d/dc f as a jet of order K - 1."""
    if f.order == 0:
        raise DomainError("Cannot differentiate an order-0 jet")
    k = np.arange(1, f.order + 1).reshape((f.order,) + (1,) * (f.coeffs.ndim - 1))
    return TaylorJet(k * f.coeffs[1:])


def jet_arccos(u: TaylorJet) -> TaylorJet:
    """
    arccos(u): a_0 = arccos(u_0), and the remaining coefficients integrate
    g' = -u' / sqrt(1 - u^2) term by term.
    """
    u0 = u.coeffs[0]
    if np.any(~(np.abs(u0) < 1.0)):
        raise DomainError("jet_arccos requires |u_0| < 1")
    out = np.empty_like(u.coeffs)
    out[0] = np.arccos(u0)
    if u.order == 0:
        return TaylorJet(out)
    lower = TaylorJet(u.coeffs[:-1])
    inv_sqrt = jet_pow(1.0 - lower * lower, -0.5)
    slope = jet_mul(jet_scale(jet_derivative(u), -1.0), inv_sqrt)
    k = np.arange(1, u.order + 1).reshape((u.order,) + (1,) * (u.coeffs.ndim - 1))
    out[1:] = slope.coeffs / k
    return TaylorJet(out)


def jet_sqrt_inv_arccos(d: Scalar, order: int) -> TaylorJet:
    """Jet of g(c) = arccos(-d / sqrt(c)) at c = 1; d may be a batch array."""
    d = np.asarray(d, dtype=float)
    if np.any(~(np.abs(d) < 1.0)):
        raise DomainError("jet_sqrt_inv_arccos requires |d| < 1")
    inv_sqrt_c = jet_pow(jet_var(order), -0.5)
    return jet_arccos(jet_scale(inv_sqrt_c, -d))


def derivative_at_one(f: TaylorJet, k: int) -> Scalar:
    """f^(k)(1) = k! a_k."""
    if k < 0 or k > f.order:
        raise DomainError(f"Derivative order {k} outside 0..{f.order}")
    value = math.factorial(k) * f.coeffs[k]
    return float(value) if np.ndim(value) == 0 else value


__all__ = [
    "TaylorJet",
    "derivative_at_one",
    "jet_add",
    "jet_arccos",
    "jet_const",
    "jet_derivative",
    "jet_div",
    "jet_mul",
    "jet_pow",
    "jet_scale",
    "jet_shift",
    "jet_sqrt_inv_arccos",
    "jet_sub",
    "jet_var",
]
