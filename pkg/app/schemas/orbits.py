"""
Schemas for nilpotent orbit results
"""

from typing import List
from pydantic import BaseModel, Field


class SLStep(BaseModel):
    s: int
    l: int
    result: List[int] = Field(..., description="Partition after the operation")


class OrbitChainResponse(BaseModel):
    source: List[int]
    target: List[int]
    comparable: bool
    steps: List[SLStep]


class OrbitChainRequest(BaseModel):
    """Two nilpotent orbits given by their block sizes"""
    source: List[int] = Field(..., min_length=1)
    target: List[int] = Field(..., min_length=1)


class NilpotentCheckRequest(BaseModel):
    """Nilpotent (or unipotent) classes by block sizes"""
    n: int = Field(..., ge=1)
    partitions: List[List[int]] = Field(..., min_length=2)
