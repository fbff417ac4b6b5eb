"""Модели приложения."""

from app.models.run_config import AppKind, Command, RunConfig

__all__ = [
    "AppKind",
    "Command",
    "RunConfig",
]
