"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`QaoaSatError`
(itself a ``ValueError``), so callers can catch one type at the boundary.
"""

from __future__ import annotations


class QaoaSatError(ValueError):
    """Base class for all package errors."""

    code = "error"


class InvalidArityError(QaoaSatError):
    code = "invalid-arity"


class EmptyInstanceError(QaoaSatError):
    code = "empty-instance"


class SizeGuardError(QaoaSatError):
    code = "size-guard"


class MalformedInputError(QaoaSatError):
    code = "malformed-input"


class MixedArityError(MalformedInputError):
    code = "mixed-arity"


class InvalidClauseError(MalformedInputError):
    code = "invalid-clause"


class NumericInputError(QaoaSatError):
    code = "numeric-input"


class DimensionMismatchError(QaoaSatError):
    code = "dimension-mismatch"


class InvalidMixerError(QaoaSatError):
    code = "invalid-mixer"


class InvalidThresholdError(QaoaSatError):
    code = "invalid-threshold"


class UndefinedRatioError(QaoaSatError):
    code = "undefined-ratio"
