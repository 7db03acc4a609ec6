"""Exception hierarchy. Each class carries the CLI exit code it maps to."""

from __future__ import annotations


class RulsifError(Exception):
    """Base class for all errors raised by this package."""

    code = "error"
    exit_code = 1


class DataError(RulsifError, ValueError):
    """Malformed, empty or dimensionally inconsistent input data."""

    code = "data"
    exit_code = 3


class DimensionMismatchError(DataError):
    code = "dimension_mismatch"


class NumericalError(RulsifError, ArithmeticError):
    code = "numerical"
    exit_code = 4


class DegenerateGeometryError(NumericalError):
    """All points coincide, so no distance scale can be derived."""

    code = "degenerate_geometry"


class SingularSystemError(NumericalError, ArithmeticError):
    code = "singular_system"
