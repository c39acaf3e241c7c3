"""Domain value objects, enumerations and errors for zpd."""

from .errors import ConvergenceError, DomainError, FormatError, ResourceError, ZpdError
from .models import (
    ComplexValue,
    ModelParams,
    PolarPoint,
    d_of_theta,
    validate,
    wrap_angle,
)
from .types import Command, CurveKind, DensityTarget, OutputFormat, PhaseMethod

__all__ = [
    "Command",
    "ComplexValue",
    "ConvergenceError",
    "CurveKind",
    "DensityTarget",
    "DomainError",
    "FormatError",
    "ModelParams",
    "OutputFormat",
    "PhaseMethod",
    "PolarPoint",
    "ResourceError",
    "ZpdError",
    "d_of_theta",
    "validate",
    "wrap_angle",
]
