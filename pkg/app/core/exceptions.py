"""
Domain exceptions raised by the services
"""

from typing import Any, Dict, Optional


class DSPKitError(Exception):
    """Base class for toolkit errors"""

    error_code = "DSPKIT_ERROR"

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}


# Input-shaped errors


class InvalidPartition(DSPKitError, ValueError):
    error_code = "INVALID_PARTITION"


class InvalidTuple(DSPKitError, ValueError):
    error_code = "INVALID_TUPLE"


class SizeMismatch(DSPKitError, ValueError):
    error_code = "SIZE_MISMATCH"


class MissingEigenvalues(DSPKitError, ValueError):
    error_code = "MISSING_EIGENVALUES"


class NonSimplePMV(DSPKitError, ValueError):
    error_code = "NON_SIMPLE_PMV"


class PsiUndefined(DSPKitError, ValueError):
    error_code = "PSI_UNDEFINED"


class PartsAbsent(DSPKitError, ValueError):
    error_code = "PARTS_ABSENT"


class NotComparable(DSPKitError, ValueError):
    error_code = "NOT_COMPARABLE"


class KTooLarge(DSPKitError, ValueError):
    error_code = "K_TOO_LARGE"


class SpectrumMismatch(DSPKitError, ValueError):
    error_code = "SPECTRUM_MISMATCH"


class CentralizerNotTrivial(DSPKitError, ValueError):
    error_code = "CENTRALIZER_NOT_TRIVIAL"


class DecidedUnsolvable(DSPKitError, ValueError):
    error_code = "DECIDED_UNSOLVABLE"


# Resource and solver errors


class BudgetExceeded(DSPKitError, RuntimeError):
    error_code = "BUDGET_EXCEEDED"


class RetriesExhausted(DSPKitError, RuntimeError):
    error_code = "RETRIES_EXHAUSTED"


class SolverFailed(DSPKitError, RuntimeError):
    """No witness found; this is never a non-existence claim"""

    error_code = "SOLVER_FAILED"


class ContinuationDiverged(DSPKitError, RuntimeError):
    error_code = "CONTINUATION_DIVERGED"
