"""Утилиты для логирования."""

import logging
import sys
from typing import Optional

import structlog
from structlog._config import BoundLoggerLazyProxy

from app.config.settings import get_settings


def setup_logging(level: Optional[str] = None, json: Optional[bool] = None) -> None:
    """Настраивает structlog для CLI.

    Args:
        level: Уровень логирования (по умолчанию LOG_LEVEL из настроек)
        json: JSON-вывод вместо консольного (по умолчанию LOG_JSON)

    Логи пишутся в stderr, stdout остаётся свободным для результатов.
    """
    settings = get_settings()
    level_name = (level or settings.log_level).upper()
    numeric_level = logging.getLevelName(level_name)
    if not isinstance(numeric_level, int):
        numeric_level = logging.INFO
    use_json = settings.log_json if json is None else json

    renderer = (
        structlog.processors.JSONRenderer()
        if use_json
        else structlog.dev.ConsoleRenderer(colors=False)
    )
    structlog.configure(
        processors=[
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            renderer,
        ],
        wrapper_class=structlog.make_filtering_bound_logger(numeric_level),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=False,
    )


def get_logger(name: str):
    """Получает логгер по имени.

    Args:
        name: Имя логгера

    Returns:
        Ленивый логгер structlog с полем ``logger``; конфигурация
        читается при каждом вызове, поэтому setup_logging действует и на него
    """
    return BoundLoggerLazyProxy(None, initial_values={"logger": name})
