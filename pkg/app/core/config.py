"""
Application configuration settings.
"""
from typing import Optional
from pydantic_settings import BaseSettings
from pydantic import Field, field_validator


class Settings(BaseSettings):
    """Application settings."""

    # Project
    PROJECT_NAME: str = "Secant Equations Toolkit"
    VERSION: str = "0.1.0"

    # Environment
    DEBUG: bool = Field(default=False)
    LOG_LEVEL: str = Field(default="INFO")

    # Sampling
    SECANT_HEIGHT: int = Field(default=10)
    GENERIC_HEIGHT: int = Field(default=100)
    DEFAULT_SEED: int = Field(default=0)

    # Invariant evaluation
    ENUMERATION_MAX_M: int = Field(default=4)  # larger m goes through elimination
    PRIME_BITS: int = Field(default=60)
    FAST_PRIME_BITS: int = Field(default=31)  # int64 path, products must fit in 63 bits

    # Equation search
    POINT_MARGIN: int = Field(default=6)
    CANDIDATE_FACTOR: int = Field(default=50)
    FRESH_POINTS: int = Field(default=10)
    MODULAR_CHECK_PRIMES: int = Field(default=3)
    MODULAR_RETRY_ATTEMPTS: int = Field(default=3)
    AUTO_EXACT_MAX_DEGREE: int = Field(default=10)
    EXTENDED_MIN_DEGREE: int = Field(default=12)
    SMOKE_TIME_BUDGET_SECONDS: int = Field(default=3600)
    INTERPOLATION_MAX_DEGREE: int = Field(default=6)

    # Concurrency
    WORKER_THREADS: Optional[int] = Field(default=None)  # overrides --threads when set
    WORKER_BACKEND: str = Field(default="thread")

    # Character tables
    MAX_DIMS_DEGREE: int = Field(default=32)

    @field_validator("WORKER_BACKEND", mode="before")
    @classmethod
    def parse_worker_backend(cls, v: str) -> str:
        """Normalize the executor backend name."""
        value = str(v).strip().lower()
        if value not in ("thread", "process"):
            raise ValueError(f"WORKER_BACKEND must be 'thread' or 'process', got {v!r}")
        return value

    @field_validator("FAST_PRIME_BITS")
    @classmethod
    def check_fast_prime_bits(cls, v: int) -> int:
        if not 8 <= v <= 31:
            raise ValueError("FAST_PRIME_BITS must lie in [8, 31]")
        return v

    class Config:
        env_file = ".env"
        case_sensitive = True


settings = Settings()
