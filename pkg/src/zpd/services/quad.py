"""
Deterministic adaptive quadrature.

Finite intervals go straight to QUADPACK (scipy.integrate.quad). Semi-infinite
integrals with an exponentially decaying envelope are truncated where the
envelope's closed-form tail (an upper incomplete Gamma) drops below the
absolute tolerance, and the remaining interval is integrated panel by panel.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from scipy import integrate, special

from zpd.domain.errors import ConvergenceError, DomainError

logger = logging.getLogger("zpd.quad")


@dataclass(frozen=True)
class QuadSpec:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("Quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")


@dataclass(frozen=True)
class QuadResult:
    value: float
    abs_error: float
    n_evals: int = 0


DEFAULT_SPEC = QuadSpec()


def integrate_finite(
    f: Callable[[float], float],
    a: float,
    b: float,
    spec: QuadSpec = DEFAULT_SPEC,
    points: Optional[Sequence[float]] = None,
) -> QuadResult:
    """Adaptive Gauss-Kronrod estimate of the integral of f over [a, b]."""
    if a == b:
        return QuadResult(0.0, 0.0, 0)
    out = integrate.quad(
        f,
        a,
        b,
        epsabs=spec.abs_tol,
        epsrel=spec.rel_tol,
        limit=spec.max_subdivisions,
        points=points,
        full_output=1,
    )
    value, abs_error, info = out[0], out[1], out[2]
    if not math.isfinite(value):
        raise ConvergenceError(f"Quadrature on [{a}, {b}] produced a non-finite value")
    if len(out) > 3:
        # flagged by QUADPACK; accepted only when the estimate still meets the tolerance
        target = max(spec.abs_tol, spec.rel_tol * abs(value))
        if abs_error > target:
            raise ConvergenceError(
                f"Quadrature on [{a}, {b}] missed tolerance "
                f"(error {abs_error:.3g} > {target:.3g}): {out[3]}"
            )
        logger.debug("Accepted flagged quadrature on [%g, %g]: %s", a, b, out[3])
    return QuadResult(float(value), float(abs_error), int(info.get("neval", 0)))


def envelope_tail(cutoff: float, decay_scale: float, power: float = 0.0, scale: float = 1.0) -> float:
    """scale * integral_{cutoff}^inf t^power e^(-t/decay_scale) dt."""
    shape = power + 1.0
    upper = special.gammaincc(shape, cutoff / decay_scale)
    if upper <= 0.0:
        return 0.0
    log_tail = (
        math.log(scale)
        + shape * math.log(decay_scale)
        + special.gammaln(shape)
        + math.log(upper)
    )
    return math.exp(log_tail)


def integrate_semi_infinite(
    f: Callable[[float], float],
    a: float,
    decay_scale: float,
    spec: QuadSpec = DEFAULT_SPEC,
    *,
    power: float = 0.0,
    scale: float = 1.0,
    max_span: float = 1e5,
) -> QuadResult:
    """
    Integral of f over [a, inf) for |f(t)| <= scale * t^power * e^(-t/decay_scale).

    The cutoff b doubles until the envelope tail beyond b is below abs_tol / 10;
    [a, b] is then split at a + decay_scale * {1, 2, 4, ...} and each panel is
    integrated with integrate_finite. The reported error includes the tail bound.
    """
    if not decay_scale > 0:
        raise DomainError(f"decay_scale must be > 0, got {decay_scale}")
    if a < 0:
        raise DomainError(f"Lower limit must be >= 0, got {a}")

    span = decay_scale * max(1.0, power + 1.0)
    while envelope_tail(a + span, decay_scale, power, scale) > 0.1 * spec.abs_tol:
        span *= 2.0
        if span > max_span:
            raise ConvergenceError(
                f"Envelope tail does not fall below {spec.abs_tol:g} within {max_span:g} "
                f"(decay scale {decay_scale:g})"
            )
    cutoff = a + span
    tail = envelope_tail(cutoff, decay_scale, power, scale)
    logger.debug("Semi-infinite cutoff %g (decay scale %g, tail %.3g)", cutoff, decay_scale, tail)

    edges = [a]
    width = decay_scale
    while a + width < cutoff:
        edges.append(a + width)
        width *= 2.0
    edges.append(cutoff)

    value = 0.0
    error = tail
    n_evals = 0
    for lo, hi in zip(edges[:-1], edges[1:]):
        panel = integrate_finite(f, lo, hi, spec)
        value += panel.value
        error += panel.abs_error
        n_evals += panel.n_evals
    return QuadResult(value, error, n_evals)


__all__ = [
    "DEFAULT_SPEC",
    "QuadResult",
    "QuadSpec",
    "envelope_tail",
    "integrate_finite",
    "integrate_semi_infinite",
]
