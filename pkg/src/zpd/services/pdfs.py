"""
Analytic densities of Z = sum_{l=1}^{L} X_l * Y_l.

With s = sigma_x * sigma_y, a = 1 - |mu|^2 and B = 2 / (s a), the joint
characteristic function is (4 / (s^2 a))^L / ((w - j c)^2 + B^2)^L with the
drift vector c = (2 |mu| / (s a)) (cos eps, sin eps). Inverting it gives

    f(z) = (4 / (s^2 a))^L e^(c.z) (|z| / 2B)^(L-1) K_{L-1}(B |z|) / (2 pi Gamma(L))

from which the polar, amplitude and phase densities follow. Everything is
evaluated in log-space and exponentiated once: r^L K_{L-1}(B r) over- or
underflows for L = 10 well inside the plotted range.

The legacy densities are the ones obtained when the product s * a is silently
taken to be 2; they are kept for comparison plots and negative controls.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from scipy import integrate, special

from zpd.domain.errors import ConvergenceError, DomainError
from zpd.domain.models import ArrayLike, ComplexValue, ModelParams, TWO_PI, d_of_theta, validate
from zpd.domain.types import CurveKind, PhaseMethod
from zpd.services import jets
from zpd.services.quad import DEFAULT_SPEC, QuadSpec, integrate_finite, integrate_semi_infinite
from zpd.services.specfun import lambda_table, log_bessel_i0, log_bessel_kn

logger = logging.getLogger("zpd.pdfs")

LOG_2 = math.log(2.0)
LOG_2PI = math.log(TWO_PI)
# sup_{t >= 1} sqrt(t) e^t K_n(t) is max(sqrt(pi/2), e K_n(1)).
_SQRT_HALF_PI = math.sqrt(math.pi / 2.0)


def _as_array(x: ArrayLike) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _finish(values: np.ndarray, scalar: bool) -> ArrayLike:
    return float(values) if scalar else values


def _radial_envelope_scale(order: int) -> float:
    """C with K_order(t) <= C e^-t / sqrt(t) for every t >= 1."""
    return max(_SQRT_HALF_PI, math.e * math.exp(log_bessel_kn(order, 1.0)))


def _drift(params: ModelParams) -> float:
    """|c| = 2 |mu| / (s a); equals |mu| B."""
    return params.mu_abs * params.radial_rate


def _log_joint_norm(params: ModelParams) -> float:
    """log of (4 / (s^2 a))^L / (2 pi Gamma(L))."""
    big_l = params.big_l
    s, a = params.sigma_product, params.one_minus_mu2
    return big_l * math.log(4.0 / (s * s * a)) - LOG_2PI - float(special.gammaln(big_l))


# --- Characteristic function ---

def joint_cf_grid(params: ModelParams, w1: ArrayLike, w2: ArrayLike) -> np.ndarray:
    """Characteristic function E[exp(j (w1 Z_R + w2 Z_I))] on broadcast arrays."""
    validate(params)
    w1 = np.asarray(w1, dtype=float)
    w2 = np.asarray(w2, dtype=float)
    s, a, mu_abs = params.sigma_product, params.one_minus_mu2, params.mu_abs
    drift = s * mu_abs * (w1 * math.cos(params.epsilon) + w2 * math.sin(params.epsilon))
    base = 1.0 - 1j * drift + 0.25 * s * s * a * (w1 * w1 + w2 * w2)
    return base ** (-params.big_l)


def joint_cf(params: ModelParams, w1: float, w2: float) -> ComplexValue:
    return ComplexValue.from_complex(complex(joint_cf_grid(params, w1, w2)))


# --- Joint and polar densities ---

def _log_joint(params: ModelParams, z_r: np.ndarray, z_i: np.ndarray) -> np.ndarray:
    big_l = params.big_l
    rate = params.radial_rate
    r = np.hypot(z_r, z_i)
    proj = z_r * math.cos(params.epsilon) + z_i * math.sin(params.epsilon)
    log_norm = _log_joint_norm(params)

    at_origin = r == 0.0
    if big_l == 1 and np.any(at_origin):
        raise DomainError("The joint density diverges at z = 0 when L = 1")
    r_safe = np.where(at_origin, 1.0, r)
    log_f = (
        log_norm
        + _drift(params) * proj
        + (big_l - 1) * (np.log(r_safe) - math.log(2.0 * rate))
        + log_bessel_kn(big_l - 1, rate * r_safe)
    )
    if np.any(at_origin):
        # r^(L-1) K_{L-1}(B r) -> Gamma(L-1) 2^(L-2) / B^(L-1)
        log_origin = (
            log_norm
            - (big_l - 1) * math.log(2.0 * rate)
            + float(special.gammaln(big_l - 1))
            + (big_l - 2) * LOG_2
            - (big_l - 1) * math.log(rate)
        )
        log_f = np.where(at_origin, log_origin, log_f)
    return log_f


def joint_pdf(params: ModelParams, z_r: ArrayLike, z_i: ArrayLike) -> ArrayLike:
    """Joint density of (Re Z, Im Z)."""
    validate(params)
    z_r, scalar_r = _as_array(z_r)
    z_i, scalar_i = _as_array(z_i)
    if not (np.all(np.isfinite(z_r)) and np.all(np.isfinite(z_i))):
        raise DomainError("joint_pdf requires finite coordinates")
    values = np.exp(_log_joint(params, *np.broadcast_arrays(z_r, z_i)))
    return _finish(values, scalar_r and scalar_i)


def joint_pdf_legacy(params: ModelParams, z_r: ArrayLike, z_i: ArrayLike) -> ArrayLike:
    """Legacy joint density: the corrected one with s (1 - |mu|^2) forced to 2."""
    return joint_pdf(validate(params).legacy_equivalent(), z_r, z_i)


def joint_pdf_polar(params: ModelParams, r: ArrayLike, theta: ArrayLike) -> ArrayLike:
    """Density of (R, Theta): r * f(r cos theta, r sin theta)."""
    r_arr, scalar_r = _as_array(r)
    theta_arr, scalar_t = _as_array(theta)
    if np.any(~(r_arr >= 0.0)):
        raise DomainError("Amplitude must be nonnegative")
    r_arr, theta_arr = np.broadcast_arrays(r_arr, theta_arr)
    density = joint_pdf(params, r_arr * np.cos(theta_arr), r_arr * np.sin(theta_arr))
    return _finish(r_arr * density, scalar_r and scalar_t)


# --- Amplitude ---

def _positive_part(r: ArrayLike, log_density: Callable[[np.ndarray], np.ndarray]) -> ArrayLike:
    """exp(log_density(r)) for r > 0 and the limit 0 at r = 0."""
    arr, scalar = _as_array(r)
    if np.any(~(arr >= 0.0)) or not np.all(np.isfinite(arr)):
        raise DomainError("Amplitude must be finite and nonnegative")
    out = np.zeros(arr.shape)
    mask = arr > 0.0
    if np.any(mask):
        out[mask] = np.exp(log_density(arr[mask]))
    return _finish(out, scalar)


def amplitude_pdf(params: ModelParams, r: ArrayLike) -> ArrayLike:
    """
    Density of R = |Z|:

        4 r^L / (Gamma(L) s^(L+1) a) * I_0(2 |mu| r / (s a)) * K_{L-1}(2 r / (s a))
    """
    validate(params)
    big_l = params.big_l
    s, a, rate = params.sigma_product, params.one_minus_mu2, params.radial_rate
    drift = _drift(params)
    log_norm = math.log(4.0) - float(special.gammaln(big_l)) - (big_l + 1) * math.log(s) - math.log(a)

    def log_density(x: np.ndarray) -> np.ndarray:
        return log_norm + big_l * np.log(x) + log_bessel_i0(drift * x) + log_bessel_kn(big_l - 1, rate * x)

    return _positive_part(r, log_density)


def amplitude_pdf_legacy(params: ModelParams, r: ArrayLike) -> ArrayLike:
    """
    Legacy amplitude density

        (1 - |mu|^2)^L r^L / (2^(L-1) (L-1)!) * I_0(|mu| r) * K_{L-1}(r)

    It does not depend on sigma_x or sigma_y.
    """
    validate(params)
    big_l, mu_abs = params.big_l, params.mu_abs
    log_norm = big_l * math.log(params.one_minus_mu2) - (big_l - 1) * LOG_2 - float(special.gammaln(big_l))

    def log_density(x: np.ndarray) -> np.ndarray:
        return log_norm + big_l * np.log(x) + log_bessel_i0(mu_abs * x) + log_bessel_kn(big_l - 1, x)

    return _positive_part(r, log_density)


@dataclass(frozen=True)
class Envelope:
    """scale * t^power * e^(-t / decay_scale) bounds a density's tail."""
    decay_scale: float
    power: float
    scale: float


def amplitude_envelope(params: ModelParams) -> Envelope:
    """Tail envelope of amplitude_pdf, valid for r >= 1 / B."""
    validate(params)
    big_l = params.big_l
    s, a, rate = params.sigma_product, params.one_minus_mu2, params.radial_rate
    prefactor = 4.0 / (math.gamma(big_l) * s ** (big_l + 1) * a)
    scale = prefactor * _radial_envelope_scale(big_l - 1) / math.sqrt(rate)
    return Envelope(decay_scale=1.0 / (rate - _drift(params)), power=big_l - 0.5, scale=scale)


def amplitude_tail(params: ModelParams, r: float, spec: QuadSpec = DEFAULT_SPEC) -> float:
    """P(R > r)."""
    env = amplitude_envelope(params)
    result = integrate_semi_infinite(
        lambda x: amplitude_pdf(params, x),
        r,
        env.decay_scale,
        spec,
        power=env.power,
        scale=env.scale,
    )
    return max(result.value, 0.0)


def amplitude_cdf(params: ModelParams, r: float, spec: QuadSpec = DEFAULT_SPEC) -> float:
    """P(R <= r) by finite quadrature from the origin."""
    if not r >= 0.0:
        raise DomainError(f"Amplitude must be nonnegative, got {r}")
    result = integrate_finite(lambda x: amplitude_pdf(params, x), 0.0, r, spec)
    return min(max(result.value, 0.0), 1.0)


def amplitude_radius(params: ModelParams, tail: float = 1e-9, max_radius: float = 1e5) -> float:
    """Radius beyond which the amplitude carries less than `tail` probability."""
    if not 0.0 < tail < 1.0:
        raise DomainError(f"tail must lie in (0, 1), got {tail}")
    env = amplitude_envelope(params)
    hi = env.decay_scale
    while amplitude_tail(params, hi) > tail:
        hi *= 2.0
        if hi > max_radius:
            raise ConvergenceError(f"Amplitude tail stays above {tail:g} beyond r = {max_radius:g}")
    lo = 0.0
    while hi - lo > 1e-3 * hi:
        mid = 0.5 * (lo + hi)
        if amplitude_tail(params, mid) > tail:
            lo = mid
        else:
            hi = mid
    logger.debug("Amplitude radius %.6g for tail %g (L=%d)", hi, tail, params.big_l)
    return hi


# --- Phase ---

def _log_phase_prefactor(params: ModelParams) -> float:
    """log of (1 - |mu|^2)^L / (2 pi Gamma(L) 2^(L-1))."""
    big_l = params.big_l
    return (
        big_l * math.log(params.one_minus_mu2)
        - LOG_2PI
        - float(special.gammaln(big_l))
        - (big_l - 1) * LOG_2
    )


def phase_pdf_exact(params: ModelParams, theta: ArrayLike) -> ArrayLike:
    """
    Phase density from the (L-1)-th derivative at c = 1 of

        h(c) = 1 / (c - D^2) + D (c - D^2)^(-3/2) arccos(-D / sqrt(c)),

    scaled by (1 - |mu|^2)^L (-1)^(L-1) / (2 pi (L-1)!). The jets carry one
    batch axis per phase angle, so a whole grid is differentiated at once.
    """
    validate(params)
    theta_arr, scalar = _as_array(theta)
    d = np.asarray(d_of_theta(params, theta_arr), dtype=float).reshape(-1)
    order = params.big_l - 1

    base = jets.jet_shift(jets.jet_var(order), -d * d)
    h = jets.jet_pow(base, -1.0) + jets.jet_mul(
        jets.jet_scale(jets.jet_pow(base, -1.5), d),
        jets.jet_sqrt_inv_arccos(d, order),
    )
    h_top = np.broadcast_to(h.coeffs[order], d.shape)
    sign = -1.0 if order % 2 else 1.0
    values = sign * params.one_minus_mu2 ** params.big_l * h_top / TWO_PI
    values = np.maximum(values, 0.0).reshape(theta_arr.shape)
    return _finish(values, scalar)


def phase_envelope(params: ModelParams, d: float) -> Envelope:
    """Envelope of the scaled phase integrand t^L e^(D t) K_{L-1}(t), t >= 1."""
    scale = math.exp(_log_phase_prefactor(params)) * _radial_envelope_scale(params.big_l - 1)
    return Envelope(decay_scale=1.0 / (1.0 - d), power=params.big_l - 0.5, scale=scale)


def phase_pdf_quadrature(
    params: ModelParams,
    theta: ArrayLike,
    spec: QuadSpec = DEFAULT_SPEC,
) -> ArrayLike:
    """
    Phase density as the semi-infinite integral

        (1 - |mu|^2)^L / (2 pi Gamma(L) 2^(L-1)) * int_0^inf t^L e^(D t) K_{L-1}(t) dt.
    """
    validate(params)
    theta_arr, scalar = _as_array(theta)
    big_l = params.big_l
    log_prefactor = _log_phase_prefactor(params)

    def integrate_at(d: float) -> float:
        def integrand(t: float) -> float:
            if t <= 0.0:
                return 0.0
            return math.exp(log_prefactor + big_l * math.log(t) + d * t + log_bessel_kn(big_l - 1, t))

        env = phase_envelope(params, d)
        return integrate_semi_infinite(
            integrand, 0.0, env.decay_scale, spec, power=env.power, scale=env.scale
        ).value

    flat = np.asarray(d_of_theta(params, theta_arr), dtype=float).reshape(-1)
    values = np.array([integrate_at(float(d)) for d in flat]).reshape(theta_arr.shape)
    return _finish(np.maximum(values, 0.0), scalar)


def phase_pdf_approx(params: ModelParams, theta: ArrayLike, t_terms: Optional[int] = None) -> ArrayLike:
    """
    Elementary approximation for L >= 2, from the truncated series of K_{L-1}:

        (1 - |mu|^2)^L / (pi 2^L Gamma(L)) * sum_q S_q Gamma(q + 2) / (1 - D)^(q + 2)

    with S_q = sum_{l=q}^{T} Lambda(L-1, l, q). Truncation can make the value
    slightly negative; it is returned unclamped.
    """
    validate(params)
    big_l = params.big_l
    if big_l < 2:
        raise DomainError(f"Series approximation: L >= 2 required, got L={big_l}")
    t_terms = big_l if t_terms is None else t_terms
    if isinstance(t_terms, bool) or not isinstance(t_terms, int) or t_terms < 0:
        raise DomainError(f"t_terms must be a nonnegative integer, got {t_terms!r}")

    theta_arr, scalar = _as_array(theta)
    d = np.asarray(d_of_theta(params, theta_arr), dtype=float)
    weights = lambda_table(big_l - 1, t_terms).series_weights
    q = np.arange(t_terms + 1)
    gammas = special.gamma(q + 2.0)
    inv = 1.0 / (1.0 - d)
    # sum_q w_q Gamma(q+2) inv^(q+2)
    total = inv * inv * np.polynomial.polynomial.polyval(inv, weights * gammas)
    prefactor = math.exp(
        big_l * math.log(params.one_minus_mu2)
        - math.log(math.pi)
        - big_l * LOG_2
        - float(special.gammaln(big_l))
    )
    return _finish(prefactor * total, scalar)


# --- Engines and curves ---

@dataclass(frozen=True)
class PhaseEngine:
    """A phase evaluator fixed to one method; immutable and thread-safe."""
    params: ModelParams
    method: PhaseMethod = PhaseMethod.EXACT
    t_terms: Optional[int] = None

    def __post_init__(self):
        validate(self.params)
        object.__setattr__(self, "method", PhaseMethod(self.method))
        if self.method is PhaseMethod.APPROX:
            if self.params.big_l < 2:
                raise DomainError(f"Series approximation: L >= 2 required, got L={self.params.big_l}")
            if self.t_terms is None:
                object.__setattr__(self, "t_terms", self.params.big_l)

    @property
    def kind(self) -> CurveKind:
        return CurveKind.PHASE

    def evaluate(self, theta: ArrayLike) -> ArrayLike:
        if self.method is PhaseMethod.EXACT:
            return phase_pdf_exact(self.params, theta)
        if self.method is PhaseMethod.QUADRATURE:
            return phase_pdf_quadrature(self.params, theta)
        return phase_pdf_approx(self.params, theta, self.t_terms)


@dataclass(frozen=True)
class AmplitudeEngine:
    params: ModelParams
    legacy: bool = False

    def __post_init__(self):
        validate(self.params)

    @property
    def kind(self) -> CurveKind:
        return CurveKind.AMPLITUDE

    def evaluate(self, r: ArrayLike) -> ArrayLike:
        if self.legacy:
            return amplitude_pdf_legacy(self.params, r)
        return amplitude_pdf(self.params, r)


@dataclass(frozen=True)
class JointSliceEngine:
    """The joint density along z_r at a fixed z_i."""
    params: ModelParams
    z_i: float = 0.0
    legacy: bool = False

    def __post_init__(self):
        validate(self.params)

    @property
    def kind(self) -> CurveKind:
        return CurveKind.JOINT_SLICE

    def evaluate(self, z_r: ArrayLike) -> ArrayLike:
        density = joint_pdf_legacy if self.legacy else joint_pdf
        return density(self.params, z_r, np.full(np.shape(z_r), self.z_i))


Engine = Union[PhaseEngine, AmplitudeEngine, JointSliceEngine]


@dataclass(frozen=True)
class PdfCurve:
    """A density sampled on a strictly increasing grid."""
    grid: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    kind: CurveKind

    def __post_init__(self):
        grid = np.array(self.grid, dtype=float)
        values = np.array(self.values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape:
            raise DomainError("Curve grid and values must be 1-D arrays of equal length")
        if grid.size > 1 and not np.all(np.diff(grid) > 0):
            raise DomainError("Curve grid must be strictly increasing")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise DomainError("Curve values must be finite and nonnegative")
        grid.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "kind", CurveKind(self.kind))

    def __len__(self) -> int:
        return int(self.grid.size)

    def trapezoid_mass(self) -> float:
        return float(integrate.trapezoid(self.values, self.grid))

    def periodic_mass(self) -> float:
        """Mass of a phase curve on a uniform (-pi, pi] grid (periodic trapezoid)."""
        return float(np.sum(self.values) * TWO_PI / self.values.size)


def make_curve(engine: Engine, grid: ArrayLike) -> PdfCurve:
    """Evaluate an engine on a grid; series-approx values are clamped at 0."""
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(engine.evaluate(grid), dtype=float)
    if isinstance(engine, PhaseEngine) and engine.method is PhaseMethod.APPROX:
        values = np.maximum(values, 0.0)
    return PdfCurve(grid=grid, values=values, kind=engine.kind)


def phase_grid(n: int) -> np.ndarray:
    """n uniform points on (-pi, pi]: -pi + 2 pi (k + 1) / n."""
    if n < 1:
        raise DomainError(f"Grid size must be >= 1, got {n}")
    return -math.pi + TWO_PI * np.arange(1, n + 1) / n


def amplitude_grid(r_max: float, n: int, *, positive: bool = False) -> np.ndarray:
    """n uniform points on [0, r_max], or on (0, r_max] when positive is set."""
    if n < 2 or not r_max > 0:
        raise DomainError(f"Amplitude grid needs n >= 2 and r_max > 0, got n={n}, r_max={r_max}")
    if positive:
        return np.linspace(0.0, r_max, n + 1)[1:]
    return np.linspace(0.0, r_max, n)


def joint_grid(half_width: float, n: int) -> tuple[np.ndarray, float]:
    """
    Centers of n x n square cells tiling [-half_width, half_width]^2 (per axis)
    and the cell side. n must be even so no center sits on the origin.
    """
    if n < 2 or n % 2 or not half_width > 0:
        raise DomainError(f"Joint grid needs an even n >= 2 and half_width > 0, got n={n}")
    step = 2.0 * half_width / n
    return -half_width + step * (np.arange(n) + 0.5), step


ORIGIN_CELL_SPEC = QuadSpec(rel_tol=1e-8, abs_tol=1e-13)


def _origin_quadrant_mass(params: ModelParams, step: float, quadrant: int) -> float:
    """Mass of the step x step square in one quadrant with a corner at the origin, in polar form."""
    start = quadrant * 0.5 * math.pi

    def along_ray(theta: float) -> float:
        reach = step / max(abs(math.cos(theta)), abs(math.sin(theta)))
        return integrate_finite(lambda r: joint_pdf_polar(params, r, theta), 0.0, reach).value

    # the ray length has a kink on the diagonal
    return integrate_finite(
        along_ray, start, start + 0.5 * math.pi, ORIGIN_CELL_SPEC, points=[start + 0.25 * math.pi]
    ).value


def joint_cell_masses(params: ModelParams, centers: np.ndarray, step: float, gauss_points: int = 4) -> np.ndarray:
    """
    Probability mass of each cell of a joint_grid tiling, indexed [z_r, z_i].

    Cells use a tensor Gauss-Legendre rule. The four cells that meet at the
    origin, where the L = 1 density has a logarithmic singularity, are
    integrated adaptively in polar coordinates instead.
    """
    centers = np.asarray(centers, dtype=float)
    n = centers.size
    if n < 2 or n % 2 or not step > 0 or gauss_points < 1:
        raise DomainError(f"Cell masses need an even joint_grid tiling, got n={n}, step={step}")
    nodes, weights = np.polynomial.legendre.leggauss(gauss_points)
    points = (centers[:, None] + 0.5 * step * nodes[None, :]).reshape(-1)
    density = joint_pdf(params, points[:, None], points[None, :])
    half_weights = 0.5 * step * weights
    masses = np.einsum("igjh,g,h->ij", density.reshape(n, gauss_points, n, gauss_points), half_weights, half_weights)

    below, above = n // 2 - 1, n // 2
    for quadrant, cell in enumerate([(above, above), (below, above), (below, below), (above, below)]):
        masses[cell] = _origin_quadrant_mass(params, step, quadrant)
    return masses


__all__ = [
    "AmplitudeEngine",
    "Envelope",
    "JointSliceEngine",
    "PdfCurve",
    "PhaseEngine",
    "amplitude_cdf",
    "amplitude_envelope",
    "amplitude_grid",
    "amplitude_pdf",
    "amplitude_pdf_legacy",
    "amplitude_radius",
    "amplitude_tail",
    "joint_cf",
    "joint_cf_grid",
    "joint_cell_masses",
    "joint_grid",
    "joint_pdf",
    "joint_pdf_legacy",
    "joint_pdf_polar",
    "make_curve",
    "phase_envelope",
    "phase_grid",
    "phase_pdf_approx",
    "phase_pdf_exact",
    "phase_pdf_quadrature",
]
