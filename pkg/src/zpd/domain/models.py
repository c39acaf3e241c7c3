"""
Value objects describing the distribution of Z = sum_l X_l * Y_l.

All objects are frozen dataclasses: once built they can be shared between
threads freely.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass, replace
from typing import Any, Mapping, Union

import numpy as np

from .errors import DomainError

TWO_PI = 2.0 * math.pi

# The experiment every figure in the validation suite is built from.
DEFAULT_SIGMA_X = 0.7
DEFAULT_SIGMA_Y = 1.5
DEFAULT_MU_ABS = 0.5
DEFAULT_EPSILON = math.pi / 6.0
DEFAULT_REALIZATIONS = 100_000

ArrayLike = Union[float, np.ndarray]

_PARAM_KEYS = {"sigma_x", "sigma_y", "mu_abs", "epsilon", "L", "big_l"}


def wrap_angle(theta: ArrayLike) -> ArrayLike:
    """Map angles onto the principal range (-pi, pi]."""
    if np.ndim(theta) == 0:
        wrapped = math.remainder(float(theta), TWO_PI)
        return math.pi if wrapped <= -math.pi else wrapped
    wrapped = np.remainder(np.asarray(theta, dtype=float), TWO_PI)
    wrapped = np.where(wrapped > math.pi, wrapped - TWO_PI, wrapped)
    return np.where(wrapped <= -math.pi, math.pi, wrapped)


@dataclass(frozen=True)
class ComplexValue:
    """A finite complex number as a (re, im) pair."""
    re: float
    im: float

    def __post_init__(self):
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise DomainError(f"ComplexValue components must be finite, got ({self.re}, {self.im})")

    @classmethod
    def from_complex(cls, value: complex) -> "ComplexValue":
        return cls(float(value.real), float(value.imag))

    def __complex__(self) -> complex:
        return complex(self.re, self.im)

    @property
    def modulus(self) -> float:
        return math.hypot(self.re, self.im)


@dataclass(frozen=True)
class PolarPoint:
    """Amplitude/phase pair with theta in (-pi, pi]."""
    r: float
    theta: float

    def __post_init__(self):
        if not self.r >= 0.0:
            raise DomainError(f"Amplitude must be nonnegative, got {self.r}")
        object.__setattr__(self, "theta", wrap_angle(self.theta))

    @classmethod
    def from_complex(cls, value: complex) -> "PolarPoint":
        return cls(abs(value), math.atan2(value.imag, value.real))

    def to_complex(self) -> complex:
        return complex(self.r * math.cos(self.theta), self.r * math.sin(self.theta))


@dataclass(frozen=True)
class ModelParams:
    """
    Parameters of Z: standard deviations of X and Y, the correlation
    mu = mu_abs * exp(j * epsilon) and the number L of summed products.

    sigma_x and sigma_y are standard deviations (E|X|^2 = sigma_x^2), not
    variances. epsilon is normalized to (-pi, pi] on construction; every
    other invariant is checked by validate().
    """
    sigma_x: float = DEFAULT_SIGMA_X
    sigma_y: float = DEFAULT_SIGMA_Y
    mu_abs: float = DEFAULT_MU_ABS
    epsilon: float = DEFAULT_EPSILON
    big_l: int = 1

    def __post_init__(self):
        if math.isfinite(self.epsilon):
            object.__setattr__(self, "epsilon", wrap_angle(float(self.epsilon)))

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Any]) -> "ModelParams":
        """Build parameters from a flat key/value mapping (config file or flags)."""
        unknown = set(mapping) - _PARAM_KEYS
        if unknown:
            raise DomainError(f"Unknown parameter keys: {', '.join(sorted(unknown))}")
        values: dict[str, Any] = {}
        try:
            for key in ("sigma_x", "sigma_y", "mu_abs", "epsilon"):
                if key in mapping and mapping[key] is not None:
                    values[key] = float(mapping[key])
            big_l = mapping.get("L", mapping.get("big_l"))
            if big_l is not None:
                if isinstance(big_l, float) and not big_l.is_integer():
                    raise DomainError(f"L must be an integer, got {big_l}")
                values["big_l"] = int(big_l)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, DomainError):
                raise
            raise DomainError(f"Invalid parameter value: {exc}") from exc
        return cls(**values)

    @property
    def mu(self) -> complex:
        return self.mu_abs * complex(math.cos(self.epsilon), math.sin(self.epsilon))

    @property
    def sigma_product(self) -> float:
        return self.sigma_x * self.sigma_y

    @property
    def one_minus_mu2(self) -> float:
        return 1.0 - self.mu_abs * self.mu_abs

    @property
    def radial_rate(self) -> float:
        """B = 2 / (sigma_x sigma_y (1 - |mu|^2)), the argument scale of K_{L-1}."""
        return 2.0 / (self.sigma_product * self.one_minus_mu2)

    def with_order(self, big_l: int) -> "ModelParams":
        return replace(self, big_l=big_l)

    def legacy_equivalent(self) -> "ModelParams":
        """
        Parameters under which the corrected densities reduce to the legacy
        ones: the legacy formulas silently assume sigma_x sigma_y (1 - |mu|^2) = 2.
        """
        return replace(self, sigma_x=1.0, sigma_y=2.0 / self.one_minus_mu2)

    def as_dict(self) -> dict[str, float]:
        return {
            "sigma_x": self.sigma_x,
            "sigma_y": self.sigma_y,
            "mu_abs": self.mu_abs,
            "epsilon": self.epsilon,
            "L": self.big_l,
        }


def validate(params: ModelParams) -> ModelParams:
    """Return params unchanged if every invariant holds, else raise DomainError."""
    for name in ("sigma_x", "sigma_y", "mu_abs", "epsilon"):
        value = getattr(params, name)
        if not isinstance(value, numbers.Real) or not math.isfinite(value):
            raise DomainError(f"{name} must be a finite real, got {value!r}")
    if params.sigma_x <= 0:
        raise DomainError(f"sigma_x must be > 0, got {params.sigma_x}")
    if params.sigma_y <= 0:
        raise DomainError(f"sigma_y must be > 0, got {params.sigma_y}")
    if not 0.0 <= params.mu_abs < 1.0:
        raise DomainError(f"mu_abs must satisfy 0 <= mu_abs < 1, got {params.mu_abs}")
    if isinstance(params.big_l, bool) or not isinstance(params.big_l, numbers.Integral):
        raise DomainError(f"L must be an integer, got {params.big_l!r}")
    if params.big_l < 1:
        raise DomainError(f"L must be >= 1, got {params.big_l}")
    return params


def d_of_theta(params: ModelParams, theta: ArrayLike) -> ArrayLike:
    """D = |mu| cos(theta - epsilon); |D| <= |mu| < 1."""
    if np.ndim(theta) == 0:
        return params.mu_abs * math.cos(float(theta) - params.epsilon)
    return params.mu_abs * np.cos(np.asarray(theta, dtype=float) - params.epsilon)


__all__ = [
    "ArrayLike",
    "ComplexValue",
    "DEFAULT_EPSILON",
    "DEFAULT_MU_ABS",
    "DEFAULT_REALIZATIONS",
    "DEFAULT_SIGMA_X",
    "DEFAULT_SIGMA_Y",
    "ModelParams",
    "PolarPoint",
    "TWO_PI",
    "d_of_theta",
    "validate",
    "wrap_angle",
]
