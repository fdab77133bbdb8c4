"""Exception hierarchy.

Errors are split by how a command-line caller should react: bad inputs or
failed constructions exit with code 2, I/O problems with 3, and verification
failures are ordinary report data (exit 1), never exceptions.
"""
from __future__ import annotations


class WarpcurvError(Exception):
    """Base class for all library errors."""


class ParameterError(WarpcurvError):
    """Invalid numeric parameter, flag, or configuration value."""


class DomainError(WarpcurvError):
    """Evaluation outside a function's domain, or a window reaching past it."""


class ConstructionError(WarpcurvError):
    """A builder could not realize its target invariants."""


class ConvexityError(ConstructionError):
    """One-sided slopes at a splice point are ordered the wrong way."""


class ContinuityError(ConstructionError):
    """Spliced pieces disagree in value at the splice point."""


class ComplexStructureError(ParameterError):
    """Matrix is not an orthogonal anti-involution (J^T J = I, J^2 = -I)."""
