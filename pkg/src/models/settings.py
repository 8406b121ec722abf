"""Process-level settings read from the environment"""

from typing import Optional

import numba
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class RuntimeSettings(BaseSettings):
    """PPRL_* environment variables"""
    model_config = SettingsConfigDict(env_prefix="PPRL_", extra="ignore")

    threads: Optional[int] = Field(default=None, ge=1, description="Cap on numba worker threads")
    log_level: str = Field(default="INFO", description="Default log level for the CLI")


def apply_thread_cap(settings: RuntimeSettings) -> int:
    """Apply PPRL_THREADS to numba; returns the thread count in effect"""
    if settings.threads is None:
        return numba.get_num_threads()
    count = min(settings.threads, numba.config.NUMBA_NUM_THREADS)
    numba.set_num_threads(count)
    return count
