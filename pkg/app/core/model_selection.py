"""
Выбор ширины окна по кросс-валидации (leave-one-out).

``cw`` это сумма квадратов ошибок прогноза отложенной точки при одной ширине
окна; ``minimize_cw`` просматривает логарифмическую сетку ширин и уточняет
минимум сетки методом золотого сечения.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
import pandas as pd
import structlog
from scipy.optimize import minimize_scalar

from app.core.constants import (
    CV_GRID_POINTS,
    CV_MIN_GRID_POINTS,
    CV_REL_TOL,
    NW_DENOMINATOR_FLOOR,
    PC_X0_SENTINEL,
    QUAD_TOL,
)
from app.core.errors import AllInfiniteCVError, PreconditionError
from app.core.estimators import Dataset, EstimatorSpec, Method, curve_values
from app.core.kernels import Kernel, scale

logger = structlog.get_logger()


@dataclass(frozen=True, eq=False)
class CvProfile:
    """CW(h) на логарифмической сетке ширин и уточнённый минимум."""

    hs: np.ndarray
    cw: np.ndarray
    h_star: float
    cw_star: float

    @property
    def grid_argmin(self) -> int:
        return int(np.argmin(self.cw))

    def to_frame(self) -> pd.DataFrame:
        """Строки ``(h, cw)`` для каждой ширины сетки."""
        return pd.DataFrame({"h": self.hs, "cw": self.cw})

    def summary(self) -> dict:
        return {
            "h_star": self.h_star,
            "cw_star": self.cw_star,
            "grid_points": int(self.hs.size),
            "h_lo": float(self.hs[0]),
            "h_hi": float(self.hs[-1]),
        }


def _nw_cw(d: Dataset, mother: Kernel, h: float, floor: float) -> float:
    k = scale(mother, h)
    weights = np.asarray(k.pdf(d.xs[:, None] - d.xs[None, :]), dtype=float)
    np.fill_diagonal(weights, 0.0)
    denominator = weights.sum(axis=1)
    if np.any(denominator < floor):
        return math.inf
    predictions = (weights @ d.ys) / denominator
    return float(np.sum((d.ys - predictions) ** 2))


def cw(
    d: Dataset,
    method: Union[Method, str],
    mother: Kernel,
    h: float,
    pc_x0: Union[float, str] = PC_X0_SENTINEL,
    tol: float = QUAD_TOL,
    floor: float = NW_DENOMINATOR_FLOOR,
) -> float:
    """
    Leave-one-out функционал ``sum_j (y_j - f_hat^{(j)}(x_j))^2``.

    Возвращает ``math.inf``, как только один прогноз не определён.

    Raises:
        PreconditionError: меньше двух точек или ``h <= 0``.
    """
    method = Method.parse(method)
    if d.n < 2:
        raise PreconditionError(f"cross-validation needs n >= 2, got {d.n}")
    if not h > 0:
        raise PreconditionError(f"bandwidth must be positive, got {h}")
    if method is Method.NW:
        return _nw_cw(d, mother, h, floor)

    spec = EstimatorSpec(method, scale(mother, h), pc_x0)
    total = 0.0
    for j in range(d.n):
        values, defined = curve_values(d.without(j), spec, [d.xs[j]], tol)
        if not defined[0]:
            return math.inf
        total += (d.ys[j] - values[0]) ** 2
    return float(total)


def default_h_range(d: Dataset) -> tuple[float, float]:
    """``(span / (2n), 2 * span)``."""
    if d.span <= 0:
        raise PreconditionError("default bandwidth range needs at least two distinct abscissae")
    return d.span / (2 * d.n), 2.0 * d.span


def minimize_cw(
    d: Dataset,
    method: Union[Method, str],
    mother: Kernel,
    h_lo: Optional[float] = None,
    h_hi: Optional[float] = None,
    grid_points: int = CV_GRID_POINTS,
    pc_x0: Union[float, str] = PC_X0_SENTINEL,
    rel_tol: float = CV_REL_TOL,
    tol: float = QUAD_TOL,
) -> CvProfile:
    """
    CW на логарифмической сетке по ``[h_lo, h_hi]`` с уточнением около минимума.

    При равенстве на сетке берётся меньшая ширина. Уточнение запускается только
    если оба соседа минимума строго больше; ``cw_star`` не превышает минимум
    сетки.

    Raises:
        PreconditionError: неверный диапазон или слишком мало точек сетки.
        AllInfiniteCVError: CW бесконечна во всех точках сетки.
    """
    method = Method.parse(method)
    if h_lo is None or h_hi is None:
        default_lo, default_hi = default_h_range(d)
        h_lo = default_lo if h_lo is None else h_lo
        h_hi = default_hi if h_hi is None else h_hi
    if not 0 < h_lo < h_hi:
        raise PreconditionError(f"need 0 < h_lo < h_hi, got h_lo={h_lo}, h_hi={h_hi}")
    if grid_points < CV_MIN_GRID_POINTS:
        raise PreconditionError(
            f"grid_points must be at least {CV_MIN_GRID_POINTS}, got {grid_points}"
        )

    def score(h: float) -> float:
        return cw(d, method, mother, h, pc_x0=pc_x0, tol=tol)

    hs = np.geomspace(h_lo, h_hi, int(grid_points))
    values = np.array([score(h) for h in hs])
    if not np.any(np.isfinite(values)):
        raise AllInfiniteCVError(
            f"CW is infinite on the whole range [{h_lo:.6g}, {h_hi:.6g}] "
            f"for {method.value} with kernel {mother.name}"
        )

    i = int(np.argmin(values))
    h_star, cw_star = float(hs[i]), float(values[i])
    interior = 0 < i < hs.size - 1
    if interior and values[i - 1] > values[i] < values[i + 1]:
        result = minimize_scalar(
            score, bracket=(hs[i - 1], hs[i], hs[i + 1]), method="golden", tol=rel_tol
        )
        if np.isfinite(result.fun) and result.fun < cw_star:
            h_star, cw_star = float(result.x), float(result.fun)
    else:
        logger.warning(
            "cv_refinement_skipped",
            method=method.value,
            kernel=mother.name,
            reason="edge" if not interior else "flat",
            h=h_star,
        )

    logger.info(
        "cv_minimized",
        method=method.value,
        kernel=mother.name,
        h_star=h_star,
        cw_star=cw_star,
        grid_points=int(hs.size),
    )
    return CvProfile(hs=hs, cw=values, h_star=h_star, cw_star=cw_star)
