"""Error hierarchy shared by every zpd layer."""

from __future__ import annotations


class ZpdError(Exception):
    """Base class for errors raised by zpd."""


class DomainError(ZpdError, ValueError):
    """An argument lies outside the domain where a formula is defined."""


class ConvergenceError(ZpdError, ArithmeticError):
    """A numerical procedure did not reach its requested tolerance."""


class ResourceError(ZpdError, MemoryError):
    """A request exceeds the configured in-memory budget."""


class FormatError(ZpdError, ValueError):
    """A sample or curve file is malformed."""


__all__ = [
    "ConvergenceError",
    "DomainError",
    "FormatError",
    "ResourceError",
    "ZpdError",
]
