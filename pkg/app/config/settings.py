from dotenv import load_dotenv
load_dotenv()

"""Настройки приложения."""
from functools import lru_cache
from pydantic_settings import BaseSettings
from pydantic import Field

from app.core import constants


class Settings(BaseSettings):
    log_level: str = Field("INFO", alias="LOG_LEVEL")
    log_json: bool = Field(False, alias="LOG_JSON")
    output_dir: str = Field("output", alias="OUTPUT_DIR")

    # Численные допуски
    quad_tol: float = Field(constants.QUAD_TOL, alias="QUAD_TOL")

    # Кросс-валидация
    cv_grid_points: int = Field(constants.CV_GRID_POINTS, alias="CV_GRID_POINTS")
    cv_rel_tol: float = Field(constants.CV_REL_TOL, alias="CV_REL_TOL")

    # Сетки и проверки свойств
    grid_points: int = Field(constants.GRID_POINTS, alias="GRID_POINTS")
    monotone_tol: float = Field(constants.MONOTONE_TOL, alias="MONOTONE_TOL")
    log_concave_probes: int = Field(constants.LOG_CONCAVE_PROBES, alias="LOG_CONCAVE_PROBES")
    log_concave_slack: float = Field(constants.LOG_CONCAVE_SLACK, alias="LOG_CONCAVE_SLACK")
    pc_search_points: int = Field(constants.PC_SEARCH_POINTS, alias="PC_SEARCH_POINTS")
    pc_search_passes: int = Field(constants.PC_SEARCH_PASSES, alias="PC_SEARCH_PASSES")

    # Фаззинг
    fuzz_seed: int = Field(constants.FUZZ_SEED, alias="FUZZ_SEED")
    fuzz_cases: int = Field(constants.FUZZ_CASES, alias="FUZZ_CASES")

    model_config = {
        "env_file": ".env",
        "env_file_encoding": "utf-8",
        "case_sensitive": True,
        "extra": "ignore",
    }


@lru_cache()
def get_settings() -> Settings:
    return Settings()
