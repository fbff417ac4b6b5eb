"""
Конфигурация тестов для monokernel.
"""

import os
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from app.core.data_loader import load_fixture
from app.core.estimators import Dataset
from app.core.kernels import builtin_kernels, make_gaussian, make_rectangular


@pytest.fixture(scope="session", autouse=True)
def setup_test_environment(tmp_path_factory):
    """Настраивает тестовое окружение."""
    output_dir = tmp_path_factory.mktemp("output")
    os.environ["OUTPUT_DIR"] = str(output_dir)
    os.environ["LOG_LEVEL"] = "WARNING"

    # get_settings кеширует Settings, поэтому сбрасываем кеш
    from app.config.settings import get_settings
    get_settings.cache_clear()

    yield

    get_settings.cache_clear()


@pytest.fixture
def paper_dataset() -> Dataset:
    """20 пар из встроенного набора fixture:paper."""
    return load_fixture("paper")


@pytest.fixture
def gaussian():
    return make_gaussian()


@pytest.fixture
def rectangular():
    return make_rectangular()


@pytest.fixture(scope="session")
def kernels():
    """Встроенные лог-вогнутые ядра."""
    return builtin_kernels()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def write_csv(tmp_path: Path):
    """Записывает строки в CSV во временной директории и возвращает путь."""
    def _write(name: str, text: str) -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path
    return _write


@pytest.fixture
def sample_csv(tmp_path: Path) -> Path:
    """Одноколоночный CSV с выборкой."""
    path = tmp_path / "sample.csv"
    pd.DataFrame({"value": [3.5, 0.25, 1.0, 2.0, 0.75]}).to_csv(path, index=False)
    return path
