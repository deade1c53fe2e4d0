"""
Configuration settings for the near-field beamforming toolkit
"""
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Runtime settings"""

    # Application
    PROJECT_TITLE: str = "nearfield-uca"
    PROJECT_VERSION: str = "1.0.0"
    ENVIRONMENT: str = "development"
    LOG_LEVEL: str = "INFO"

    # Experiment files
    DEFAULT_CONFIG_PATH: str = "presets/reference.toml"
    GOLDEN_DIR: str = "tests/fixtures/golden"

    # Numerics
    BISECTION_TOL: float = 1e-10
    FRESNEL_TOL: float = 1e-10
    ERD_GRID_POINTS: int = 400
    ERD_SEARCH_SPAN: float = 4.0  # upper search bound in units of 2D^2/lambda

    # Codebooks
    CODEBOOK_CHUNK_SIZE: int = 2048
    NEIGHBOR_TOLERANCE: float = 0.02
    MAX_ALL_PAIRS: int = 20000
    PHASE_SIGNIFICANT_DIGITS: int = 12

    class Config:
        env_file = ".env"
        case_sensitive = True


settings = Settings()
