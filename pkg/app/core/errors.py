"""
Иерархия исключений.

У каждой ошибки есть машиночитаемая ``category`` и код завершения CLI.
"""

from __future__ import annotations

from typing import Optional

from app.core.constants import EXIT_CONFIG, EXIT_IO, EXIT_NUMERIC, EXIT_PARSE


class MonokernelError(Exception):
    category = "error"
    exit_code = 1


class InvalidConfigError(MonokernelError, ValueError):
    category = "invalid-config"
    exit_code = EXIT_CONFIG


class PreconditionError(InvalidConfigError):
    """Операция вызвана вне своей области определения."""


class DatasetParseError(MonokernelError, ValueError):
    category = "parse-error"
    exit_code = EXIT_PARSE

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{where}{message}")


class EmptyInputError(DatasetParseError):
    pass


class NumericError(MonokernelError, ArithmeticError):
    category = "numeric"
    exit_code = EXIT_NUMERIC


class QuadratureToleranceError(NumericError):
    category = "quadrature"


class AllInfiniteCVError(NumericError):
    category = "all-infinite-cv"


class ViolationNotFoundError(NumericError):
    """Бюджет поиска исчерпан; о монотонности это ничего не говорит."""

    category = "not-found"


class InputNotFoundError(MonokernelError, FileNotFoundError):
    category = "file-not-found"
    exit_code = EXIT_IO
