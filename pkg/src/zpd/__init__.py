"""zpd package public API."""

from .domain import (
    Command,
    ComplexValue,
    ConvergenceError,
    CurveKind,
    DensityTarget,
    DomainError,
    FormatError,
    ModelParams,
    OutputFormat,
    PhaseMethod,
    PolarPoint,
    ResourceError,
    ZpdError,
    d_of_theta,
    validate,
    wrap_angle,
)
from .services.gof import AnalyticCdf, GofReport, gof, gof_against
from .services.pdfs import (
    AmplitudeEngine,
    JointSliceEngine,
    PdfCurve,
    PhaseEngine,
    amplitude_grid,
    amplitude_pdf,
    amplitude_pdf_legacy,
    amplitude_radius,
    joint_cf,
    joint_cf_grid,
    joint_pdf,
    joint_pdf_legacy,
    joint_pdf_polar,
    make_curve,
    phase_grid,
    phase_pdf_approx,
    phase_pdf_exact,
    phase_pdf_quadrature,
)
from .services.quad import QuadResult, QuadSpec, integrate_finite, integrate_semi_infinite
from .services.simulate import (
    Histogram1D,
    Histogram2D,
    SampleBatch,
    histogram_1d,
    histogram_2d,
    iter_z_chunks,
    sample_pair,
    sample_pairs,
    sample_z,
)
from .services.specfun import (
    bessel_i0,
    bessel_kn,
    gamma_half,
    gamma_int,
    kl_series_approx,
    lah,
    lambda_coeff,
)

__version__ = "0.3.0"

__all__ = [
    "AmplitudeEngine",
    "AnalyticCdf",
    "Command",
    "ComplexValue",
    "ConvergenceError",
    "CurveKind",
    "DensityTarget",
    "DomainError",
    "FormatError",
    "GofReport",
    "Histogram1D",
    "Histogram2D",
    "JointSliceEngine",
    "ModelParams",
    "OutputFormat",
    "PdfCurve",
    "PhaseEngine",
    "PhaseMethod",
    "PolarPoint",
    "QuadResult",
    "QuadSpec",
    "ResourceError",
    "SampleBatch",
    "ZpdError",
    "amplitude_grid",
    "amplitude_pdf",
    "amplitude_pdf_legacy",
    "amplitude_radius",
    "bessel_i0",
    "bessel_kn",
    "d_of_theta",
    "gamma_half",
    "gamma_int",
    "gof",
    "gof_against",
    "histogram_1d",
    "histogram_2d",
    "integrate_finite",
    "integrate_semi_infinite",
    "iter_z_chunks",
    "joint_cf",
    "joint_cf_grid",
    "joint_pdf",
    "joint_pdf_legacy",
    "joint_pdf_polar",
    "kl_series_approx",
    "lah",
    "lambda_coeff",
    "make_curve",
    "phase_grid",
    "phase_pdf_approx",
    "phase_pdf_exact",
    "phase_pdf_quadrature",
    "sample_pair",
    "sample_pairs",
    "sample_z",
    "validate",
    "wrap_angle",
]
