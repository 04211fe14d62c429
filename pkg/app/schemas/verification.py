"""
Schemas for numerical verification and matrix tuple files
"""

from typing import List, Optional, Tuple
from pydantic import BaseModel, Field

from app.schemas.common import Flavor, JordanFormModel


class VerificationReport(BaseModel):
    """Numerical certificate of a matrix tuple"""
    residual: float = Field(..., ge=0.0)
    identified_forms: List[Optional[JordanFormModel]] = Field(
        ..., description="Form of matrix i, null where its spectrum missed the candidates"
    )
    algebra_dimension: int
    centralizer_dimension: int
    irreducible: bool = Field(..., description="algebra_dimension == n^2")
    trivial_centralizer: bool = Field(..., description="centralizer_dimension == 1")
    forms_match: bool = Field(..., description="Identified forms equal the declared ones")
    centralizer_gap: Optional[float] = Field(
        None, description="Singular-value ratio at the centralizer cut"
    )


class MatrixTupleDocument(BaseModel):
    """Row-major complex entries [re, im]"""
    flavor: Flavor
    n: int
    matrices: List[List[List[Tuple[float, float]]]]
    residual: float
    report: Optional[VerificationReport] = None


class DiagonalLimitEntry(BaseModel):
    epsilon: float
    identified: Optional[JordanFormModel] = None
    expected: JordanFormModel
    matches: bool
    error: Optional[str] = Field(None, description="Identification failure, if any")


class DiagonalLimitReport(BaseModel):
    entries: List[DiagonalLimitEntry]
    failures: int
