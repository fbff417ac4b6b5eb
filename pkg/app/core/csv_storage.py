"""
Модуль для работы с данными в формате CSV / JSON.

Вход: строки ``x,y`` через запятую (наборы) или один столбец (выборки),
десятичная точка, необязательный заголовок распознаётся по нечисловой первой
строке. Выход: числа пишутся с 17 значащими цифрами, записанный файл читается
обратно в те же значения binary64.
"""
from __future__ import annotations

import csv
import json
import math
import pathlib
from typing import Any, List

import numpy as np
import pandas as pd
import structlog

from app.core.constants import FLOAT_FORMAT
from app.core.errors import DatasetParseError, EmptyInputError
from app.core.estimators import CurveSample, Dataset
from app.core.model_selection import CvProfile

logger = structlog.get_logger()


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def _read_rows(path: pathlib.Path, columns: int) -> List[List[float]]:
    """Числовые строки CSV; пустые строки пропускаются, заголовок необязателен."""
    rows: List[List[float]] = []
    seen_content = False
    with open(path, newline="", encoding="utf-8") as f:
        for line_no, row in enumerate(csv.reader(f), start=1):
            cells = [cell.strip() for cell in row]
            if not any(cells):
                continue
            if not seen_content:
                seen_content = True
                if not all(_is_number(cell) for cell in cells if cell):
                    logger.debug("csv_header_detected", path=str(path), header=cells)
                    continue
            if len(cells) != columns:
                raise DatasetParseError(
                    f"expected {columns} column(s), found {len(cells)}", str(path), line_no
                )
            values: List[float] = []
            for cell in cells:
                try:
                    value = float(cell)
                except ValueError:
                    raise DatasetParseError(f"not a number: {cell!r}", str(path), line_no) from None
                if not math.isfinite(value):
                    raise DatasetParseError(f"non-finite value {cell!r}", str(path), line_no)
                values.append(value)
            rows.append(values)
    if not rows:
        raise EmptyInputError("no data rows", str(path))
    return rows


def parse_dataset_csv(path) -> Dataset:
    """
    Читает пары ``x,y`` из CSV.

    Raises:
        DatasetParseError: некорректная строка, с её номером.
        EmptyInputError: нет строк с данными.
    """
    path = pathlib.Path(path)
    rows = np.asarray(_read_rows(path, 2), dtype=float)
    d = Dataset(rows[:, 0], rows[:, 1])
    logger.info(
        "dataset_loaded",
        path=str(path),
        n=d.n,
        duplicate_xs=d.duplicate_xs,
        comonotone=d.comonotone,
    )
    if d.duplicate_xs:
        logger.warning("duplicate_abscissae", path=str(path), count=d.duplicate_xs)
    if not d.comonotone:
        logger.warning("dataset_not_comonotone", path=str(path))
    return d


def parse_sample_csv(path) -> np.ndarray:
    """CSV из одного столбца со значениями выборки (без сортировки)."""
    path = pathlib.Path(path)
    values = np.asarray(_read_rows(path, 1), dtype=float)[:, 0]
    logger.info("sample_loaded", path=str(path), n=int(values.size))
    return values


class CSVStorage:
    """Пишет файлы результатов в один выходной каталог."""

    def __init__(self, output_dir: pathlib.Path):
        self.output_dir = pathlib.Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def _write_frame(self, frame: pd.DataFrame, name: str) -> pathlib.Path:
        path = self.output_dir / name
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        logger.info("saved_csv", file=str(path), rows=len(frame))
        return path

    def write_dataset(self, d: Dataset, name: str = "dataset.csv") -> pathlib.Path:
        return self._write_frame(pd.DataFrame({"x": d.xs, "y": d.ys}), name)

    def write_curve(self, c: CurveSample, name: str = "curve.csv") -> pathlib.Path:
        """Столбцы ``x, value, defined``; неопределённые значения остаются пустыми."""
        frame = pd.DataFrame({
            "x": c.grid,
            "value": c.values,
            "defined": np.where(c.defined, "true", "false"),
        })
        return self._write_frame(frame, name)

    def write_profile(self, profile: CvProfile, name: str = "cv_profile.csv") -> pathlib.Path:
        """Строки сетки ``(grid, h, cw)`` и затем одна строка ``(star, h_star, cw_star)``."""
        frame = profile.to_frame()
        frame.insert(0, "kind", "grid")
        star = pd.DataFrame({"kind": ["star"], "h": [profile.h_star], "cw": [profile.cw_star]})
        return self._write_frame(pd.concat([frame, star], ignore_index=True), name)

    def write_json(self, payload: Any, name: str) -> pathlib.Path:
        path = self.output_dir / name
        path.write_text(
            json.dumps(payload, indent=2, ensure_ascii=False, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        logger.info("saved_json", file=str(path))
        return path
