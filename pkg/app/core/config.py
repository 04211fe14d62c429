"""
Core configuration settings for the Deligne-Simpson toolkit
"""

from typing import List, Optional
from pydantic_settings import BaseSettings
from pydantic import field_validator


class Settings(BaseSettings):
    """Application settings"""

    # Application
    APP_NAME: str = "Deligne-Simpson Toolkit"
    APP_VERSION: str = "1.0.0"
    APP_DESCRIPTION: str = (
        "Decision and construction toolkit for the Deligne-Simpson problem"
    )

    # Server
    HOST: str = "0.0.0.0"
    PORT: int = 8000
    DEBUG: bool = False
    ALLOWED_ORIGINS: str = "*"
    ALLOWED_METHODS: List[str] = ["GET", "POST"]
    ALLOWED_HEADERS: List[str] = ["*"]

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    LOG_JSON: bool = False

    # Parallelism (DSPKIT_THREADS overrides --threads when set)
    THREADS: Optional[int] = None

    # Genericity
    ENUMERATION_BUDGET: int = 10**8
    SAMPLER_MAX_RETRIES: int = 64
    SAMPLER_MIN_PRIME: int = 1009
    SAMPLER_MAX_PRIME: int = 9973

    # Realizer
    REALIZER_MAX_SIZE: int = 12
    MAX_RESTARTS: int = 50
    MAX_NEWTON_ITERS: int = 200
    RESIDUAL_TARGET_ADDITIVE: float = 1e-10
    RESIDUAL_TARGET_MULTIPLICATIVE: float = 1e-9
    CONTINUATION_STEPS: int = 20
    CONDITION_CAP: float = 1e6

    # Numerical oracles
    RANK_TOLERANCE: float = 1e-8
    SPECTRUM_TOLERANCE: float = 1e-4

    @field_validator("DEBUG", "LOG_JSON", mode="before")
    @classmethod
    def parse_flag(cls, value):
        if isinstance(value, str):
            return value.lower() in ("true", "1", "on", "yes")
        return value

    def get_allowed_origins(self) -> List[str]:
        """Parse allowed origins from string to list"""
        if self.ALLOWED_ORIGINS == "*":
            return ["*"]
        return [origin.strip() for origin in self.ALLOWED_ORIGINS.split(",")]

    def get_residual_target(self, flavor: str) -> float:
        """Default residual target for the given flavor"""
        if getattr(flavor, "value", flavor) == "multiplicative":
            return self.RESIDUAL_TARGET_MULTIPLICATIVE
        return self.RESIDUAL_TARGET_ADDITIVE

    def get_threads(self, requested: Optional[int] = None) -> int:
        """Effective worker count; the environment wins over the flag"""
        if self.THREADS is not None:
            return max(1, self.THREADS)
        return max(1, requested or 1)

    class Config:
        env_file = ".env"
        env_prefix = "DSPKIT_"
        case_sensitive = True


# Global settings instance
settings = Settings()
