"""
Модуль для загрузки входных данных.

Вход это путь к CSV или ``fixture:<name>`` для набора из ``app/data``.
"""
from __future__ import annotations

import json
from functools import lru_cache
from pathlib import Path
from typing import Dict, Sequence

import numpy as np
import structlog
from rapidfuzz import process

from app.core.applications import OrderedSample
from app.core.constants import FIXTURE_PREFIX
from app.core.csv_storage import parse_dataset_csv, parse_sample_csv
from app.core.errors import InputNotFoundError, InvalidConfigError
from app.core.estimators import Dataset

logger = structlog.get_logger()

FIXTURES_FILE = Path(__file__).resolve().parent.parent / "data" / "paper_fixture.json"


@lru_cache()
def _fixtures() -> Dict[str, dict]:
    with open(FIXTURES_FILE, encoding="utf-8") as f:
        return json.load(f)


def fixture_names() -> Sequence[str]:
    return tuple(sorted(_fixtures()))


def load_fixture(name: str) -> Dataset:
    """
    Встроенный набор данных по имени.

    Raises:
        InvalidConfigError: неизвестное имя (с ближайшим известным в подсказке).
    """
    fixtures = _fixtures()
    if name not in fixtures:
        suggestion = process.extractOne(name, list(fixtures))
        hint = f"; did you mean {suggestion[0]!r}?" if suggestion and suggestion[1] >= 60 else ""
        raise InvalidConfigError(f"unknown fixture {name!r}{hint}")
    entry = fixtures[name]
    return Dataset(np.asarray(entry["xs"], dtype=float), np.asarray(entry["ys"], dtype=float))


def _existing(path: str) -> Path:
    resolved = Path(path)
    if not resolved.is_file():
        raise InputNotFoundError(f"input file not found: {path}")
    return resolved


def load_dataset(source: str, shift: float = 0.0) -> Dataset:
    """
    Набор из ``fixture:<name>`` или CSV, к ``ys`` прибавлен ``shift``.

    Raises:
        InputNotFoundError: CSV не существует.
        DatasetParseError: CSV некорректен.
    """
    if source.startswith(FIXTURE_PREFIX):
        d = load_fixture(source[len(FIXTURE_PREFIX):])
    else:
        d = parse_dataset_csv(_existing(source))
    if shift:
        d = d.shifted(shift)
    logger.info("dataset_ready", source=source, n=d.n, shift=shift, comonotone=d.comonotone)
    return d


def load_sample(source: str) -> OrderedSample:
    """Порядковые статистики из CSV с одним столбцом."""
    return OrderedSample(parse_sample_csv(_existing(source)))
