"""
Runtime Lab Settings

Loads environment variables (prefix SSGA_) and an optional .env file using Pydantic Settings.
"""

from pathlib import Path
from typing import Literal, Optional

from pydantic_settings import BaseSettings, SettingsConfigDict

# Get the backend directory path (where .env should be)
BACKEND_DIR = Path(__file__).resolve().parent.parent.parent
ENV_FILE = BACKEND_DIR / ".env"

BoundMode = Literal["leading-order", "conservative"]


class Settings(BaseSettings):
    """
    Application Settings

    Environment Variables:
    - SSGA_DATABASE_URL: SQLAlchemy URL where experiment tables are recorded
    - SSGA_RESULTS_DIR: Default directory for figure / table datasets
    - SSGA_WORKERS: Worker pool size; overrides the --workers flag when set
    - SSGA_BOUND_MODE: How O(1/n) terms are instantiated in bound formulas
    - SSGA_KAPPA: Constant of the conservative mode (term = kappa/n)
    - SSGA_MAX_EVALUATIONS_FACTOR: Evaluation cap is factor * e * n * ln n
    - SSGA_CHAIN_STEP_CAP: Per-episode step cap of the Markov chain simulator
    - SSGA_MASTER_SEED: Master seed of the builtin experiment specs
    - SSGA_LOG_LEVEL: Root logging level
    """

    model_config = SettingsConfigDict(
        env_prefix="SSGA_",
        env_file=str(ENV_FILE),
        env_file_encoding="utf-8",
        extra="ignore",
        case_sensitive=False,
    )

    # Experiment history storage
    DATABASE_URL: str = f"sqlite:///{BACKEND_DIR / 'storage' / 'ssga.db'}"
    RESULTS_DIR: str = "results"

    # None means "use --workers or the available cores"
    WORKERS: Optional[int] = None

    # Bound formulas
    BOUND_MODE: BoundMode = "leading-order"
    KAPPA: float = 16.0

    # Budgets
    MAX_EVALUATIONS_FACTOR: float = 100.0
    CHAIN_STEP_CAP: int = 10**9

    MASTER_SEED: int = 20170101
    LOG_LEVEL: str = "INFO"


# Global settings instance
settings = Settings()
