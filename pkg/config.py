import os
from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="TORUSFOLD_",
        extra="ignore",
    )

    log_level: str = "INFO"
    cycle_search_budget: int = Field(default=1_000_000, gt=0)
    assignment_budget: int = Field(default=100_000, gt=0)
    oracle_max_nodes: int = Field(default=24, gt=0)
    workers: int = Field(default_factory=lambda: os.cpu_count() or 1, gt=0)
    debug_invariants: bool = False


@lru_cache
def get_settings():
    return Settings()
