"""Resource limits and runner options read from the environment (and a local .env)."""

import os
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field

load_dotenv()


def _flag(name: str, default: str) -> bool:
    return os.getenv(name, default).lower() in ("1", "true", "yes")


class Settings(BaseModel):
    """Desk-scale resource guards; a scenario's [limits] section overrides them per run."""

    max_coefficients: int = Field(default=10**8, ge=1)
    max_seconds: float = Field(default=120.0, gt=0)
    max_injectivity_m: int = Field(default=5, ge=1)
    parallel: bool = False
    abort_on_resource_limit: bool = False
    log_file: Optional[str] = None

    def merged(self, overrides: dict) -> "Settings":
        return self.model_copy(update={key: value for key, value in overrides.items() if value is not None})


def load_settings() -> Settings:
    return Settings(
        max_coefficients=int(float(os.getenv("FANO_MCK_MAX_COEFFICIENTS", "1e8"))),
        max_seconds=float(os.getenv("FANO_MCK_MAX_SECONDS", "120")),
        max_injectivity_m=int(os.getenv("FANO_MCK_MAX_INJECTIVITY_M", "5")),
        parallel=_flag("FANO_MCK_PARALLEL", "false"),
        abort_on_resource_limit=_flag("FANO_MCK_ABORT_ON_RESOURCE_LIMIT", "false"),
        log_file=os.getenv("FANO_MCK_LOG_FILE") or None,
    )
