"""
Ядерные оценки регрессии Надарая–Уотсона, Пристли–Чао и Гассера–Мюллера.

Точечные функции (``nw_eval``, ``pc_eval``, ``gm_eval``) считают по
определению; ``eval_grid`` считает всю сетку векторно через numpy.
GM вычисляется в телескопической форме

    y_1 + sum_{j=2..n} (y_j - y_{j-1}) F(x - s_{j-1}),   s_j = (x_j + x_{j+1}) / 2,

где F это cdf масштабированного ядра; форма по определению оставлена в
``gm_eval_definitional`` для сверки.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence, Union

import numpy as np
import structlog

from app.core.constants import GRID_WIDTHS, NW_DENOMINATOR_FLOOR, PC_X0_SENTINEL, QUAD_TOL
from app.core.errors import InvalidConfigError, PreconditionError
from app.core.kernels import ScaledKernel, kernel_cdf, kernel_cdf_many, open_interval
from app.core.quadrature import adaptive_simpson

logger = structlog.get_logger()


class Method(str, Enum):
    NW = "nw"
    PC = "pc"
    GM = "gm"

    @classmethod
    def parse(cls, value: Union[str, "Method"]) -> "Method":
        if isinstance(value, Method):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise InvalidConfigError(
                f"unknown method {value!r}; expected one of nw, pc, gm"
            ) from None


def _frozen(values: np.ndarray) -> np.ndarray:
    values.setflags(write=False)
    return values


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Упорядоченные пары ``(x, y)``.

    Неотсортированный вход сортируется по ``x`` (устойчиво при равенствах).
    ``comonotone`` истинно, когда ``ys`` не убывают после сортировки.
    """

    xs: np.ndarray
    ys: np.ndarray
    comonotone: bool = field(init=False)

    def __post_init__(self) -> None:
        xs = np.array(self.xs, dtype=float).ravel()
        ys = np.array(self.ys, dtype=float).ravel()
        if xs.size == 0:
            raise PreconditionError("dataset must contain at least one point")
        if xs.shape != ys.shape:
            raise PreconditionError(f"xs and ys differ in length: {xs.size} vs {ys.size}")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
            raise PreconditionError("dataset values must be finite")
        if np.any(np.diff(xs) < 0):
            order = np.argsort(xs, kind="stable")
            xs, ys = xs[order], ys[order]
        object.__setattr__(self, "xs", _frozen(xs))
        object.__setattr__(self, "ys", _frozen(ys))
        object.__setattr__(self, "comonotone", bool(np.all(np.diff(ys) >= 0)))

    @property
    def n(self) -> int:
        return int(self.xs.size)

    @property
    def span(self) -> float:
        return float(self.xs[-1] - self.xs[0])

    @property
    def duplicate_xs(self) -> int:
        return int(np.count_nonzero(np.diff(self.xs) == 0))

    def with_ys(self, ys: Sequence[float]) -> "Dataset":
        return Dataset(self.xs, np.asarray(ys, dtype=float))

    def shifted(self, c: float) -> "Dataset":
        return Dataset(self.xs, self.ys + c)

    def without(self, j: int) -> "Dataset":
        """Копия без ``j``-й пары (с нуля) для leave-one-out."""
        return Dataset(np.delete(self.xs, j), np.delete(self.ys, j))

    def midpoints(self) -> np.ndarray:
        """Внутренние точки разбиения GM ``s_1 .. s_{n-1}``."""
        return 0.5 * (self.xs[:-1] + self.xs[1:])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return np.array_equal(self.xs, other.xs) and np.array_equal(self.ys, other.ys)


@dataclass(frozen=True)
class EstimatorSpec:
    """Оценщик, масштабированное ядро и соглашение о ``x0`` для PC."""

    method: Method
    kernel: ScaledKernel
    pc_x0: Union[float, str] = PC_X0_SENTINEL

    def __post_init__(self) -> None:
        object.__setattr__(self, "method", Method.parse(self.method))
        if isinstance(self.pc_x0, str) and self.pc_x0 != PC_X0_SENTINEL:
            raise InvalidConfigError(
                f"pc_x0 must be a number or {PC_X0_SENTINEL!r}, got {self.pc_x0!r}"
            )

    @property
    def h(self) -> float:
        return self.kernel.h

    def resolve_x0(self, d: Dataset) -> float:
        """``x0`` для PC на ``d``: ``x_1 - h`` при метке, иначе заданное число."""
        if isinstance(self.pc_x0, str):
            return float(d.xs[0] - self.kernel.h)
        x0 = float(self.pc_x0)
        if x0 > d.xs[0]:
            raise PreconditionError(f"pc_x0={x0} exceeds the first abscissa {d.xs[0]}")
        return x0


@dataclass(frozen=True, eq=False)
class CurveSample:
    """Значения оценки на строго возрастающей сетке; ``defined`` ложно вне области NW."""

    grid: np.ndarray
    values: np.ndarray
    defined: np.ndarray

    def __post_init__(self) -> None:
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        defined = np.asarray(self.defined, dtype=bool)
        if not (grid.shape == values.shape == defined.shape):
            raise PreconditionError("grid, values and defined must have the same shape")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", np.where(defined, values, np.nan))
        object.__setattr__(self, "defined", defined)

    @property
    def defined_values(self) -> np.ndarray:
        return self.values[self.defined]


# --------------------------------------------------------------------------- #
#  Точечные оценщики
# --------------------------------------------------------------------------- #
def nw_eval(d: Dataset, k: ScaledKernel, x: float) -> Optional[float]:
    """Значение NW в ``x`` или ``None`` вне области определения."""
    weights = np.asarray(k.pdf(x - d.xs), dtype=float)
    denominator = float(weights.sum())
    if not denominator >= NW_DENOMINATOR_FLOOR:
        return None
    return float(weights @ d.ys) / denominator


def pc_weights(d: Dataset, x0: float) -> np.ndarray:
    gaps = np.diff(d.xs, prepend=x0)
    return d.ys * gaps


def pc_eval(d: Dataset, k: ScaledKernel, x0: float, x: float) -> float:
    """``sum_i y_i (x_i - x_{i-1}) K(x - x_i)``, где ``x_0 = x0``."""
    if x0 > d.xs[0]:
        raise PreconditionError(f"x0={x0} exceeds the first abscissa {d.xs[0]}")
    return float(pc_weights(d, x0) @ np.asarray(k.pdf(x - d.xs), dtype=float))


def gm_eval(d: Dataset, k: ScaledKernel, x: float, tol: float = QUAD_TOL) -> float:
    """Значение GM в ``x`` через телескопическую форму; одна cdf на каждую точку разбиения."""
    if tol <= 0:
        raise PreconditionError(f"tol must be positive, got {tol}")
    value = float(d.ys[0])
    if d.n == 1:
        return value
    cdf_at: dict[float, float] = {}
    for s, dy in zip(d.midpoints(), np.diff(d.ys)):
        if s not in cdf_at:
            cdf_at[s] = kernel_cdf(k, x - s, tol)
        value += dy * cdf_at[s]
    return value


def gm_eval_definitional(d: Dataset, k: ScaledKernel, x: float, tol: float = QUAD_TOL) -> float:
    """
    GM по определению: ``sum_i y_i int_{s_{i-1}}^{s_i} K(x - t) dt``.

    Интегралы берутся в координатах материнского ядра ``v = (x - t) / h`` и
    обрезаются открытым эффективным носителем; разрывы ядра не попадают внутрь
    отрезка интегрирования.
    """
    lo, hi = open_interval(k.mother.effective_support())
    cuts = np.concatenate([[-math.inf], d.midpoints(), [math.inf]])
    total = 0.0
    for i, y in enumerate(d.ys):
        v_lo = max((x - cuts[i + 1]) / k.h, lo)
        v_hi = min((x - cuts[i]) / k.h, hi)
        if v_lo < v_hi:
            total += y * adaptive_simpson(k.mother.pdf, v_lo, v_hi, tol)
    return total


# --------------------------------------------------------------------------- #
#  Векторные вычисления на сетке
# --------------------------------------------------------------------------- #
def nw_values(
    d: Dataset, k: ScaledKernel, grid: np.ndarray, floor: float = NW_DENOMINATOR_FLOOR
) -> tuple[np.ndarray, np.ndarray]:
    weights = k.pdf(grid[:, None] - d.xs[None, :])
    denominator = weights.sum(axis=1)
    defined = denominator >= floor
    safe = np.where(defined, denominator, 1.0)
    return np.where(defined, (weights @ d.ys) / safe, np.nan), defined


def pc_values(d: Dataset, k: ScaledKernel, x0: float, grid: np.ndarray) -> np.ndarray:
    if x0 > d.xs[0]:
        raise PreconditionError(f"x0={x0} exceeds the first abscissa {d.xs[0]}")
    return k.pdf(grid[:, None] - d.xs[None, :]) @ pc_weights(d, x0)


def gm_values(d: Dataset, k: ScaledKernel, grid: np.ndarray, tol: float = QUAD_TOL) -> np.ndarray:
    values = np.full(grid.shape, float(d.ys[0]))
    if d.n == 1:
        return values
    steps = np.diff(d.ys)
    cdf = kernel_cdf_many(k, grid[:, None] - d.midpoints()[None, :], tol)
    # накопление по столбцам: порядок суммирования одинаков во всех точках сетки
    for j, dy in enumerate(steps):
        values = values + dy * cdf[:, j]
    return values


def curve_values(
    d: Dataset, spec: EstimatorSpec, grid, tol: float = QUAD_TOL
) -> tuple[np.ndarray, np.ndarray]:
    """Значения и маска определённости оценки ``spec`` на ``grid``."""
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if spec.method is Method.NW:
        return nw_values(d, spec.kernel, grid)
    if spec.method is Method.PC:
        values = pc_values(d, spec.kernel, spec.resolve_x0(d), grid)
    else:
        values = gm_values(d, spec.kernel, grid, tol)
    return values, np.ones(grid.shape, dtype=bool)


def eval_grid(d: Dataset, spec: EstimatorSpec, grid, tol: float = QUAD_TOL) -> CurveSample:
    """Оценка во всех точках строго возрастающей сетки."""
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or np.any(np.diff(grid) <= 0):
        raise PreconditionError("grid must be a strictly increasing 1-d array")
    values, defined = curve_values(d, spec, grid, tol)
    if not defined.all():
        logger.debug("nw_undefined_points", count=int(np.count_nonzero(~defined)))
    return CurveSample(grid, values, defined)


def default_grid(d: Dataset, k: ScaledKernel, points: int) -> np.ndarray:
    """Равномерная сетка на ``[x_1 - 3w, x_n + 3w]``, ``w`` это эффективная ширина ядра."""
    if points < 2:
        raise PreconditionError(f"grid needs at least 2 points, got {points}")
    width = GRID_WIDTHS * k.effective_width
    return np.linspace(d.xs[0] - width, d.xs[-1] + width, int(points))
