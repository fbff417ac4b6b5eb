"""
Изотонизация: pool-adjacent-violators и конвейеры IS / SI.

* IS (сначала изотонизация): PAVA по исходным ``ys``, затем оценка.
* SI (сначала сглаживание): оценка по исходным данным, затем PAVA по значениям
  кривой на сетке. Неопределённые точки NW в пулинг не входят и остаются
  неопределёнными.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import structlog
from scipy import optimize

from app.core.constants import QUAD_TOL
from app.core.errors import PreconditionError
from app.core.estimators import CurveSample, Dataset, EstimatorSpec, eval_grid

logger = structlog.get_logger()


@dataclass(frozen=True, eq=False)
class IsotonicFit:
    """
    Результат изотонической проекции по методу наименьших квадратов.

    ``blocks`` хранит ``(start, end, value)``, индексы с нуля, концы включены.
    """

    xs: Optional[np.ndarray]
    ys_iso: np.ndarray
    blocks: list[tuple[int, int, float]]


def _blocks(fitted: np.ndarray, starts: np.ndarray) -> list[tuple[int, int, float]]:
    """Максимальные серии равных значений в виде ``(start, end, value)``."""
    blocks: list[tuple[int, int, float]] = []
    bounds = list(starts) + [fitted.size]
    for start, stop in zip(bounds[:-1], bounds[1:]):
        value = float(fitted[start])
        if blocks and blocks[-1][2] == value:
            blocks[-1] = (blocks[-1][0], int(stop) - 1, value)
        else:
            blocks.append((int(start), int(stop) - 1, value))
    return blocks


def pava(
    ys: Sequence[float],
    weights: Optional[Sequence[float]] = None,
    xs: Optional[Sequence[float]] = None,
) -> IsotonicFit:
    """
    Взвешенная L2-проекция ``ys`` на неубывающие последовательности.

    Пулинг делает ``scipy.optimize.isotonic_regression``; уже неубывающий вход
    возвращается без изменений, поэтому ``pava(pava(y))`` совпадает с
    ``pava(y)`` побитово. Блоки в ``IsotonicFit`` максимальны: соседние блоки с
    равным значением объединяются.

    Raises:
        PreconditionError: пустой вход, разные длины или неположительные веса.
    """
    y = np.asarray(ys, dtype=float).ravel()
    if y.size == 0:
        raise PreconditionError("pava needs at least one value")
    w = np.ones_like(y) if weights is None else np.asarray(weights, dtype=float).ravel()
    if w.shape != y.shape:
        raise PreconditionError(f"ys and weights differ in length: {y.size} vs {w.size}")
    if not np.all(w > 0):
        raise PreconditionError("pava weights must be positive")

    if np.all(np.diff(y) >= 0):
        fitted, starts = y.copy(), np.arange(y.size)
    else:
        result = optimize.isotonic_regression(y, weights=w)
        # result.blocks: начала блоков и завершающий n
        fitted, starts = np.asarray(result.x, dtype=float), np.asarray(result.blocks[:-1])
    return IsotonicFit(
        xs=None if xs is None else np.asarray(xs, dtype=float),
        ys_iso=fitted,
        blocks=_blocks(fitted, starts),
    )


def isotonize(d: Dataset) -> Dataset:
    """Набор данных, в котором ``ys`` заменены проекцией PAVA."""
    if d.comonotone:
        return d
    return d.with_ys(pava(d.ys, xs=d.xs).ys_iso)


def is_pipeline(d: Dataset, spec: EstimatorSpec, grid, tol: float = QUAD_TOL) -> CurveSample:
    """Изотонизация данных, затем сглаживание."""
    fitted = isotonize(d)
    logger.info(
        "is_pipeline",
        method=spec.method.value,
        kernel=spec.kernel.name,
        pooled=int(np.count_nonzero(fitted.ys != d.ys)),
    )
    return eval_grid(fitted, spec, grid, tol)


def si_pipeline(d: Dataset, spec: EstimatorSpec, grid, tol: float = QUAD_TOL) -> CurveSample:
    """Сглаживание исходных данных, затем изотонизация определённых значений кривой."""
    curve = eval_grid(d, spec, grid, tol)
    values = curve.values.copy()
    if curve.defined.any():
        values[curve.defined] = pava(curve.defined_values).ys_iso
    logger.info(
        "si_pipeline",
        method=spec.method.value,
        kernel=spec.kernel.name,
        undefined=int(np.count_nonzero(~curve.defined)),
    )
    return CurveSample(curve.grid, values, curve.defined)
