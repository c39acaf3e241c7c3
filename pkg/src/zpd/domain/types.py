"""Enumerations used across services, storage and the CLI."""

from __future__ import annotations

from enum import Enum


class PhaseMethod(str, Enum):
    """How the phase density is evaluated."""

    EXACT = "exact"            # (L-1)-th derivative of h(c) through Taylor jets
    APPROX = "approx"          # elementary series, L >= 2
    QUADRATURE = "quadrature"  # semi-infinite integral, used as oracle


class CurveKind(str, Enum):
    AMPLITUDE = "amplitude"
    PHASE = "phase"
    JOINT_SLICE = "joint-slice"


class DensityTarget(str, Enum):
    """Analytic densities a sample projection can be tested against."""

    AMPLITUDE = "amplitude"
    AMPLITUDE_LEGACY = "amplitude-legacy"
    PHASE_EXACT = "phase-exact"
    PHASE_APPROX = "phase-approx"

    @property
    def projection(self) -> str:
        return "amplitude" if self.value.startswith("amplitude") else "phase"


class OutputFormat(str, Enum):
    CSV = "csv"
    BINARY = "binary"


class Command(str, Enum):
    EVAL = "eval"
    SAMPLE = "sample"
    GOF = "gof"
    COMPARE = "compare"
    REPRODUCE_FIGURES = "reproduce-figures"


__all__ = [
    "Command",
    "CurveKind",
    "DensityTarget",
    "OutputFormat",
    "PhaseMethod",
]
