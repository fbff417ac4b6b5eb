"""
Основной модуль приложения monokernel.

Этот модуль:
* Инициализирует логгер (stderr, уровень из настроек)
* Загружает конфигурацию
"""

# --- Логирование --------------------------------------------------------
import sys

import structlog

structlog.configure(
    processors=[
        structlog.processors.add_log_level,
        structlog.processors.TimeStamper(fmt="iso"),
        structlog.dev.ConsoleRenderer(colors=False),
    ],
    logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
)

# --- Конфигурация ------------------------------------------------------
from app.config.settings import get_settings  # noqa: E402

settings = get_settings()
