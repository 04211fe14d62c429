"""
Schemas for eigenvalue genericity checks
"""

from typing import List, Optional
from pydantic import BaseModel, Field

from app.schemas.decision import ShiftedRankBound


class RelationWitness(BaseModel):
    """A non-genericity relation that holds"""
    s: int = Field(..., description="Subset size")
    choices: List[List[int]] = Field(
        ..., description="Per matrix, sub-multiplicity chosen of each eigenvalue"
    )
    total: str = Field(..., description="Exact sum of the chosen eigenvalues")

    def key(self) -> tuple:
        return (self.s, tuple(tuple(c) for c in self.choices))


class GenericityClass(BaseModel):
    generic: bool
    strongly_generic: Optional[bool] = Field(
        None, description="Additive flavor only"
    )
    non_resonant: Optional[bool] = Field(None, description="Additive flavor only")


class GenericityReport(BaseModel):
    """Output of check-generic"""
    sum_condition: bool
    s_min: int
    s_max: int
    classification: GenericityClass
    witnesses: List[RelationWitness]
    rank_bound: Optional[ShiftedRankBound] = None
