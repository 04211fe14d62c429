"""
Problem file and solver option schemas
"""

from typing import List, Optional, Union
from pydantic import BaseModel, Field, field_validator, model_validator

from app.core.config import settings
from app.schemas.common import Flavor, Mode


class ComplexValue(BaseModel):
    """Gaussian rational written as two rational strings"""
    re: str = Field(..., description="Real part, 'p/q'")
    im: str = Field("0", description="Imaginary part, 'p/q'")


class EigenvalueEntry(BaseModel):
    """One eigenvalue of one class"""
    value: Union[str, ComplexValue] = Field(
        ...,
        description=(
            "Exact value 'p/q' or {re, im}; for the multiplicative flavor this "
            "is the exponent mu with sigma = exp(2 pi i mu)"
        ),
    )
    mult: int = Field(..., ge=1, description="Total multiplicity")
    blocks: Optional[List[int]] = Field(
        None, description="Jordan block sizes summing to mult; omitted means diagonal"
    )

    @model_validator(mode="after")
    def check_blocks(self) -> "EigenvalueEntry":
        if self.blocks is None:
            self.blocks = [1] * self.mult
        if any(b < 1 for b in self.blocks):
            raise ValueError("block sizes must be positive")
        if sum(self.blocks) != self.mult:
            raise ValueError(
                f"blocks {self.blocks} do not sum to multiplicity {self.mult}"
            )
        self.blocks = sorted(self.blocks, reverse=True)
        return self


class ClassEntry(BaseModel):
    """One conjugacy class"""
    eigenvalues: List[EigenvalueEntry] = Field(..., min_length=1)


class SolverOptions(BaseModel):
    """Realizer options"""
    seed: int = Field(0, description="Master seed")
    max_restarts: int = Field(default_factory=lambda: settings.MAX_RESTARTS, ge=1)
    max_newton_iters: int = Field(
        default_factory=lambda: settings.MAX_NEWTON_ITERS, ge=1
    )
    residual_target: Optional[float] = Field(
        None, description="Defaults to the flavor's target from settings"
    )
    continuation_steps: int = Field(
        default_factory=lambda: settings.CONTINUATION_STEPS, ge=1
    )
    rank_tolerance: float = Field(default_factory=lambda: settings.RANK_TOLERANCE)
    threads: int = Field(1, ge=1, description="Parallel restarts")

    @field_validator("residual_target")
    @classmethod
    def positive_target(cls, value: Optional[float]) -> Optional[float]:
        if value is not None and value <= 0:
            raise ValueError("residual_target must be positive")
        return value

    def target_for(self, flavor: Flavor) -> float:
        if self.residual_target is not None:
            return self.residual_target
        return settings.get_residual_target(flavor.value)


class ProblemFile(BaseModel):
    """The single input format of decide/realize/verify"""
    flavor: Flavor = Field(..., description="additive or multiplicative")
    n: int = Field(..., ge=1, description="Matrix size")
    classes: List[ClassEntry] = Field(..., min_length=2)
    mode: Mode = Field(Mode.GENERIC, description="Decision mode")
    solver: Optional[SolverOptions] = None

    @model_validator(mode="after")
    def check_sizes(self) -> "ProblemFile":
        for j, entry in enumerate(self.classes):
            total = sum(ev.mult for ev in entry.eigenvalues)
            if total != self.n:
                raise ValueError(
                    f"class {j}: multiplicities sum to {total}, expected n={self.n}"
                )
        return self
