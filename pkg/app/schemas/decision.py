"""
Schemas produced by the decision engine
"""

from typing import List, Optional
from pydantic import BaseModel, Field

from app.schemas.common import JordanFormModel, StopReason, Verdict


class ConditionsReport(BaseModel):
    """Conditions (alpha_n), (beta_n), (omega_n) and the index of rigidity"""
    n: int = Field(..., description="Matrix size")
    r: List[int] = Field(..., description="Rank defects r_j")
    d: List[int] = Field(..., description="Orbit dimensions d_j")
    alpha_holds: bool = Field(..., description="sum d_j >= 2n^2 - 2")
    alpha_strict: bool = Field(..., description="sum d_j > 2n^2 - 2")
    beta_holds: bool = Field(..., description="every p-subset of r sums to >= n")
    omega_holds: bool = Field(..., description="sum r_j >= 2n")
    kappa: int = Field(..., description="Index of rigidity 2n^2 - sum d_j")
    rigid: bool = Field(..., description="kappa == 2")


class PsiStage(BaseModel):
    """One tuple of the reduction chain"""
    n: int
    forms: List[JordanFormModel]
    report: ConditionsReport


class PsiTrace(BaseModel):
    """Chain n_0 > n_1 > ... > n_s of the reduction"""
    stages: List[PsiStage]
    stop_reason: StopReason

    @property
    def n_s(self) -> int:
        return self.stages[-1].n

    @property
    def criterion_holds(self) -> bool:
        """(beta_n) at the start and either (omega_{n_s}) or n_s = 1"""
        return self.stages[0].report.beta_holds and self.stop_reason in (
            StopReason.OMEGA_HOLDS,
            StopReason.SIZE_ONE,
        )


class Decision(BaseModel):
    """Verdict with the theorem it rests on and the full trace"""
    verdict: Verdict
    theorem_used: str
    trace: PsiTrace
    notes: List[str] = Field(default_factory=list)
    eigenvalues_generic: Optional[bool] = Field(
        None, description="Genericity of attached eigenvalues, when checked"
    )


class ShiftedRankBound(BaseModel):
    """Minimum of sum rank(A_j - b_j I) over balanced shifts"""
    min_value: int
    witness: List[str] = Field(..., description="Minimizing shifts b_j")
    necessary_condition_holds: bool = Field(..., description="min_value >= 2n")
