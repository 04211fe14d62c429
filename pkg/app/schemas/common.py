"""
Shared enums and small schemas
"""

from enum import Enum
from typing import List
from pydantic import BaseModel, Field


class Flavor(str, Enum):
    """Sum-zero matrices A_j or product-identity matrices M_j"""

    ADDITIVE = "additive"
    MULTIPLICATIVE = "multiplicative"


class Mode(str, Enum):
    """Decision mode"""

    GENERIC = "generic"
    ANY_WEAK = "any_weak"


class Verdict(str, Enum):
    SOLVABLE = "Solvable"
    NOT_SOLVABLE = "NotSolvable"
    WEAKLY_SOLVABLE = "WeaklySolvable"
    NOT_WEAKLY_SOLVABLE = "NotWeaklySolvable"
    OUT_OF_THEOREM_SCOPE = "OutOfTheoremScope"


class StopReason(str, Enum):
    OMEGA_HOLDS = "omega_holds"
    BETA_FAILS = "beta_fails"
    SIZE_ONE = "size_one"


class JordanBlockEntry(BaseModel):
    """Blocks of one eigenvalue label"""
    label: int = Field(..., ge=0, description="Opaque eigenvalue label")
    blocks: List[int] = Field(..., description="Block sizes, weakly decreasing")


class JordanFormModel(BaseModel):
    """Wire form of a Jordan normal form"""
    n: int = Field(..., ge=1, description="Matrix size")
    entries: List[JordanBlockEntry] = Field(..., description="Per-label block sizes")


class HealthResponse(BaseModel):
    """Health check response schema"""
    status: str = Field(..., description="Health status")
    service: str = Field(..., description="Service name")
    version: str = Field(..., description="Service version")
    timestamp: str = Field(..., description="Check timestamp")
    uptime_seconds: float = Field(..., description="Service uptime in seconds")


class ErrorResponse(BaseModel):
    """Error response schema"""
    status: str = Field(default="error", description="Response status")
    error_code: str = Field(..., description="Error code")
    error_message: str = Field(..., description="Error message")
