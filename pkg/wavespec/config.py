"""
Configuration Management
"""

from functools import lru_cache
from pathlib import Path
from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Library and CLI settings.

    Every value can be overridden with a ``WAVESPEC_``-prefixed environment
    variable or a ``.env`` file.
    """
    # Application
    app_name: str = Field(default="wavespec")
    environment: str = Field(default="development")
    log_level: str = Field(default="INFO")
    log_json: bool = Field(default=False)

    # Wavelet analysis
    wavelet_filter: str = Field(default="symmlet8")
    grid_j: Optional[int] = Field(default=None, ge=6, le=20)
    psi_sup_resolution: int = Field(default=14, ge=8, le=18)

    # Thresholding
    delta: float = Field(default=6.0, ge=0.0)
    b_const: float = Field(default=0.841)
    threshold_scale: float = Field(default=1.0, gt=0.0)
    kappa: float = Field(default=1.0 / 36.0, gt=0.0)
    poly_degree: int = Field(default=0, ge=0)
    eta: float = Field(default=1e-4, gt=0.0)

    # Information projection solver
    solver_tol: float = Field(default=1e-6, gt=0.0)
    solver_max_iters: int = Field(default=50000, ge=1)
    solver_initial_step: float = Field(default=0.1, gt=0.0)
    solver_step_growth: float = Field(default=1.2, ge=1.0)
    solver_step_cap: float = Field(default=10.0, gt=0.0)
    solver_min_step: float = Field(default=1e-16, gt=0.0)

    # Simulation
    burn_in: int = Field(default=1000, ge=0)
    covariance_quadrature_j: int = Field(default=16, ge=8, le=22)

    # Monte Carlo
    workers: int = Field(default=1, ge=1)

    # Artifacts and monitoring
    output_dir: Path = Field(default=Path("runs"))
    enable_telemetry: bool = Field(default=True)

    @field_validator("environment")
    @classmethod
    def validate_environment(cls, v: str) -> str:
        """Validate environment value"""
        allowed = ["development", "testing", "production"]
        if v not in allowed:
            raise ValueError(f"Environment must be one of: {allowed}")
        return v

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate log level"""
        allowed = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        v = v.upper()
        if v not in allowed:
            raise ValueError(f"Log level must be one of: {allowed}")
        return v

    model_config = SettingsConfigDict(
        env_prefix="WAVESPEC_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    @property
    def is_production(self) -> bool:
        """Check if running in production mode"""
        return self.environment == "production"

    @property
    def is_testing(self) -> bool:
        """Check if running in testing mode"""
        return self.environment == "testing"


@lru_cache()
def get_settings() -> Settings:
    """
    Get cached settings instance
    """
    return Settings()
