"""
Конфигурация каталога для результатов.
"""
import pathlib
from typing import Optional

from app.config.settings import get_settings


def get_output_dir(override: Optional[str] = None) -> pathlib.Path:
    """
    Возвращает путь к директории для CSV/JSON результатов.
    Использует явный путь, если он передан, иначе значение из настроек.
    """
    output_dir = pathlib.Path(override or get_settings().output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    return output_dir
