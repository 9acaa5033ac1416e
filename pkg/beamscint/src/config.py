"""
Configuration settings for the scintillation toolkit.
"""

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings."""

    model_config = SettingsConfigDict(env_prefix="SCINT_", env_file=".env", extra="ignore")

    rel_tol: float = 1e-6
    mc_samples: int = 1_000_000
    seed: int = 20240601
    threads: int = 1
    cache_dir: str = ".scint-cache"
    cache_enabled: bool = True
    max_evaluations: int = 1_000_000
    log_level: str = "WARNING"
    log_json: bool = False
    logfire_enabled: bool = False
    logfire_console: bool = False


settings = Settings()
