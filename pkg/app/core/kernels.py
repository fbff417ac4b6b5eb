"""
Ядра: базовый тип, встроенные семейства и масштабирование по ширине окна.

Ядро здесь это плотность вероятности на прямой. Встроенные семейства:
стандартная нормальная плотность, равномерная на (-1/2, 1/2), финитная
«шапочка» (bump), экспоненциально-степенное семейство, смесь двух гауссиан
(пример ядра без лог-вогнутости) и сдвинутые к нулевому среднему гамма / бета
плотности (асимметричные лог-вогнутые ядра).

Example:
    >>> k = scale(make_gaussian(), 2.0)
    >>> float(k.pdf(0.0))
    0.19947114020071635
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Union

import numpy as np
import structlog
from rapidfuzz import process
from scipy import special
from scipy.optimize import brentq

from app.core.constants import INTEGRATION_TAIL_MASS, QUAD_MAX_DEPTH, QUAD_TOL
from app.core.errors import InvalidConfigError, PreconditionError
from app.core.quadrature import adaptive_simpson, piecewise_integrals

logger = structlog.get_logger()

ArrayFunction = Callable[[np.ndarray], np.ndarray]

_SQRT_2PI = math.sqrt(2.0 * math.pi)
_NORMALIZATION_TOL = 1e-8


def _as_array(u) -> np.ndarray:
    return np.asarray(u, dtype=float)


def _unwrap(value: np.ndarray):
    """0-мерный массив возвращается как float."""
    return float(value) if np.ndim(value) == 0 else value


@dataclass(frozen=True)
class Kernel:
    """
    Плотность вероятности на прямой.

    Attributes:
        name: идентификатор, например ``"gaussian"`` или ``"exp_power:p=2"``
        density: векторизованная плотность, ноль вне ``support``
        support: ``(lo, hi)``, концы могут быть бесконечными
        distribution: функция распределения в явном виде, если есть
    """

    name: str
    density: ArrayFunction = field(repr=False)
    support: tuple[float, float]
    distribution: Optional[ArrayFunction] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        lo, hi = self.support
        if not lo < hi:
            raise InvalidConfigError(f"kernel {self.name}: empty support {self.support}")
        if not (math.isfinite(lo) and math.isfinite(hi)) and self.distribution is None:
            raise InvalidConfigError(
                f"kernel {self.name}: infinite support requires a closed-form cdf"
            )

    @property
    def has_cdf(self) -> bool:
        return self.distribution is not None

    @property
    def is_compact(self) -> bool:
        lo, hi = self.support
        return math.isfinite(lo) and math.isfinite(hi)

    def pdf(self, u):
        return _unwrap(self.density(_as_array(u)))

    def cdf(self, u):
        if self.distribution is None:
            raise AttributeError(f"kernel {self.name} has no closed-form cdf")
        return _unwrap(np.clip(self.distribution(_as_array(u)), 0.0, 1.0))

    def effective_support(self, tail_mass: float = INTEGRATION_TAIL_MASS) -> tuple[float, float]:
        """Носитель, у которого бесконечные концы обрезаны по массе хвоста ``tail_mass``."""
        return _effective_support(self, tail_mass)


@dataclass(frozen=True)
class ScaledKernel:
    """``pdf(u) = mother.pdf(u / h) / h``."""

    mother: Kernel
    h: float

    def __post_init__(self) -> None:
        if not (self.h > 0 and math.isfinite(self.h)):
            raise PreconditionError(f"bandwidth must be positive and finite, got {self.h}")

    @property
    def name(self) -> str:
        return self.mother.name

    @property
    def support(self) -> tuple[float, float]:
        lo, hi = self.mother.support
        return lo * self.h, hi * self.h

    @property
    def has_cdf(self) -> bool:
        return self.mother.has_cdf

    @property
    def is_compact(self) -> bool:
        return self.mother.is_compact

    @property
    def effective_width(self) -> float:
        """``h`` для ядер с бесконечным носителем, иначе половина ширины масштабированного носителя."""
        if self.mother.is_compact:
            lo, hi = self.support
            return 0.5 * (hi - lo)
        return self.h

    def pdf(self, u):
        return _unwrap(self.mother.density(_as_array(u) / self.h) / self.h)

    def cdf(self, u):
        return self.mother.cdf(_as_array(u) / self.h)

    def effective_support(self, tail_mass: float = INTEGRATION_TAIL_MASS) -> tuple[float, float]:
        lo, hi = self.mother.effective_support(tail_mass)
        return lo * self.h, hi * self.h


AnyKernel = Union[Kernel, ScaledKernel]


@lru_cache(maxsize=256)
def _effective_support(kernel: Kernel, tail_mass: float) -> tuple[float, float]:
    lo, hi = kernel.support
    if math.isfinite(lo) and math.isfinite(hi):
        return lo, hi

    def lower_tail(u: float) -> float:
        return float(kernel.distribution(np.array(u))) - tail_mass

    def upper_tail(u: float) -> float:
        return (1.0 - float(kernel.distribution(np.array(u)))) - tail_mass

    if not math.isfinite(lo):
        lo = brentq(lower_tail, *_bracket(lower_tail, increasing=True))
    if not math.isfinite(hi):
        hi = brentq(upper_tail, *_bracket(upper_tail, increasing=False))
    return float(lo), float(hi)


def _bracket(g: Callable[[float], float], increasing: bool) -> tuple[float, float]:
    """Находит ``a < b``, между которыми монотонная ``g`` меняет знак."""
    a, b = -1.0, 1.0
    below, above = (a, b) if increasing else (b, a)
    while g(below) >= 0:
        below *= 2.0
    while g(above) <= 0:
        above *= 2.0
    return (below, above) if increasing else (above, below)


def open_interval(support: tuple[float, float]) -> tuple[float, float]:
    """Сдвигает конечные концы внутрь: подынтегральные функции считаются на открытом носителе."""
    lo, hi = support
    return float(np.nextafter(lo, hi)), float(np.nextafter(hi, lo))


def _check_normalized(kernel: Kernel) -> Kernel:
    lo, hi = open_interval(kernel.effective_support())
    mass = adaptive_simpson(kernel.pdf, lo, hi, QUAD_TOL, QUAD_MAX_DEPTH)
    if abs(mass - 1.0) > _NORMALIZATION_TOL:
        raise InvalidConfigError(f"kernel {kernel.name} integrates to {mass!r}, not 1")
    logger.debug("kernel_normalized", kernel=kernel.name, mass=mass)
    return kernel


# --------------------------------------------------------------------------- #
#  Встроенные ядра
# --------------------------------------------------------------------------- #
def _gaussian_density(u: np.ndarray) -> np.ndarray:
    return np.exp(-0.5 * u * u) / _SQRT_2PI


@lru_cache()
def make_gaussian() -> Kernel:
    """Стандартная нормальная плотность; cdf через функцию ошибок."""
    return _check_normalized(Kernel(
        name="gaussian",
        density=_gaussian_density,
        support=(-math.inf, math.inf),
        distribution=special.ndtr,
    ))


def _rectangular_density(u: np.ndarray) -> np.ndarray:
    # открытый интервал: на самих концах 0
    return np.where(np.abs(u) < 0.5, 1.0, 0.0)


def _rectangular_distribution(u: np.ndarray) -> np.ndarray:
    return np.clip(u + 0.5, 0.0, 1.0)


@lru_cache()
def make_rectangular() -> Kernel:
    """Равномерная плотность на (-1/2, 1/2)."""
    return _check_normalized(Kernel(
        name="rectangular",
        density=_rectangular_density,
        support=(-0.5, 0.5),
        distribution=_rectangular_distribution,
    ))


def _bump_shape(u: np.ndarray) -> np.ndarray:
    inside = np.abs(u) < 1.0
    safe = np.where(inside, u, 0.0)
    return np.where(inside, np.exp(-1.0 / (1.0 - safe * safe)), 0.0)


@lru_cache()
def bump_normalizer() -> float:
    """``b = 1 / int_{-1}^{1} exp(-1 / (1 - u^2)) du``."""
    area = adaptive_simpson(lambda u: float(_bump_shape(np.asarray(u))), -1.0, 1.0, QUAD_TOL)
    return 1.0 / area


@lru_cache()
def make_bump() -> Kernel:
    """``b * exp(-1 / (1 - u^2))`` на (-1, 1); cdf только квадратурой."""
    b = bump_normalizer()
    return _check_normalized(Kernel(
        name="bump",
        density=lambda u: b * _bump_shape(u),
        support=(-1.0, 1.0),
    ))


@lru_cache(maxsize=64)
def make_exp_power(p: float) -> Kernel:
    """
    ``c_p * exp(-|u|^p)`` with ``c_p = 1 / (2 Gamma(1 + 1/p))``.

    cdf через регуляризованную неполную гамма-функцию; нижний хвост считается
    через ``gammaincc``, чтобы малые массы хвоста не теряли точность.
    """
    if not p >= 1:
        raise PreconditionError(f"exp_power requires p >= 1, got {p}")
    c_p = 1.0 / (2.0 * special.gamma(1.0 + 1.0 / p))
    shape = 1.0 / p

    def density(u: np.ndarray) -> np.ndarray:
        return c_p * np.exp(-np.abs(u) ** p)

    def distribution(u: np.ndarray) -> np.ndarray:
        tail = 0.5 * special.gammaincc(shape, np.abs(u) ** p)
        return np.where(u < 0, tail, 1.0 - tail)

    return _check_normalized(Kernel(
        name=f"exp_power:p={p:g}",
        density=density,
        support=(-math.inf, math.inf),
        distribution=distribution,
    ))


@lru_cache(maxsize=64)
def make_gaussian_mixture(mu1: float, mu2: float, w: float) -> Kernel:
    """``w * phi(u - mu1) + (1 - w) * phi(u - mu2)``."""
    if not 0.0 < w < 1.0:
        raise PreconditionError(f"mixture weight must lie in (0, 1), got {w}")
    if mu1 == mu2:
        raise PreconditionError("mixture components must have distinct means")

    def density(u: np.ndarray) -> np.ndarray:
        return w * _gaussian_density(u - mu1) + (1.0 - w) * _gaussian_density(u - mu2)

    def distribution(u: np.ndarray) -> np.ndarray:
        return w * special.ndtr(u - mu1) + (1.0 - w) * special.ndtr(u - mu2)

    return _check_normalized(Kernel(
        name=f"gauss_mix:mu1={mu1:g},mu2={mu2:g},w={w:g}",
        density=density,
        support=(-math.inf, math.inf),
        distribution=distribution,
    ))


@lru_cache(maxsize=64)
def make_shifted_gamma(shape: float) -> Kernel:
    """Плотность Gamma(shape, 1), сдвинутая к нулевому среднему; лог-вогнута при shape >= 1."""
    if not shape >= 1:
        raise PreconditionError(f"gamma kernel requires shape >= 1, got {shape}")
    log_norm = special.gammaln(shape)

    def density(u: np.ndarray) -> np.ndarray:
        t = u + shape
        inside = t >= 0
        safe = np.where(inside, t, 1.0)
        return np.where(inside, np.exp(special.xlogy(shape - 1.0, safe) - safe - log_norm), 0.0)

    def distribution(u: np.ndarray) -> np.ndarray:
        return special.gammainc(shape, np.maximum(u + shape, 0.0))

    return _check_normalized(Kernel(
        name=f"gamma:shape={shape:g}",
        density=density,
        support=(-shape, math.inf),
        distribution=distribution,
    ))


@lru_cache(maxsize=64)
def make_shifted_beta(a: float, b: float) -> Kernel:
    """Плотность Beta(a, b), сдвинутая к нулевому среднему; лог-вогнута при a, b >= 1."""
    if not (a >= 1 and b >= 1):
        raise PreconditionError(f"beta kernel requires a, b >= 1, got a={a}, b={b}")
    mean = a / (a + b)
    log_norm = special.betaln(a, b)

    def density(u: np.ndarray) -> np.ndarray:
        t = u + mean
        inside = (t >= 0) & (t <= 1)
        safe = np.where(inside, t, 0.5)
        log_pdf = special.xlogy(a - 1.0, safe) + special.xlog1py(b - 1.0, -safe) - log_norm
        return np.where(inside, np.exp(log_pdf), 0.0)

    def distribution(u: np.ndarray) -> np.ndarray:
        return special.betainc(a, b, np.clip(u + mean, 0.0, 1.0))

    return _check_normalized(Kernel(
        name=f"beta:a={a:g},b={b:g}",
        density=density,
        support=(-mean, 1.0 - mean),
        distribution=distribution,
    ))


# --------------------------------------------------------------------------- #
#  Масштабирование и функция распределения
# --------------------------------------------------------------------------- #
def scale(k: Kernel, h: float) -> ScaledKernel:
    """Масштабирует материнское ядро к ширине окна ``h``."""
    if isinstance(k, ScaledKernel):
        return ScaledKernel(k.mother, k.h * h)
    return ScaledKernel(k, float(h))


def _mother_and_scale(k: AnyKernel) -> tuple[Kernel, float]:
    if isinstance(k, ScaledKernel):
        return k.mother, k.h
    return k, 1.0


def kernel_cdf(k: AnyKernel, x: float, tol: float = QUAD_TOL) -> float:
    """
    ``F(x) = int_{-inf}^{x} K(u) du``, clamped to ``[0, 1]``.

    Явная формула, если она есть у ядра, иначе адаптивный Симпсон от нижнего
    конца носителя с абсолютной точностью ``tol``.

    Raises:
        QuadratureToleranceError: квадратура не достигла ``tol``.
    """
    if tol <= 0:
        raise PreconditionError(f"tol must be positive, got {tol}")
    mother, h = _mother_and_scale(k)
    u = float(x) / h
    if mother.has_cdf:
        return float(mother.cdf(u))
    lo, hi = mother.support
    if u <= lo:
        return 0.0
    if u >= hi:
        return 1.0
    start, _ = open_interval((lo, hi))
    value = adaptive_simpson(mother.pdf, start, u, tol, QUAD_MAX_DEPTH)
    return min(max(value, 0.0), 1.0)


def kernel_cdf_many(k: AnyKernel, xs, tol: float = QUAD_TOL) -> np.ndarray:
    """
    Векторный вариант ``kernel_cdf``.

    Без явной формулы значения накапливаются по отсортированным абсциссам,
    поэтому результат точно не убывает по ``xs``.
    """
    if tol <= 0:
        raise PreconditionError(f"tol must be positive, got {tol}")
    mother, h = _mother_and_scale(k)
    u = np.asarray(xs, dtype=float) / h
    if mother.has_cdf:
        return np.clip(mother.distribution(u), 0.0, 1.0)

    lo, hi = mother.support
    flat = u.ravel()
    inside = (flat > lo) & (flat < hi)
    result = np.where(flat >= hi, 1.0, 0.0)
    if inside.any():
        points, inverse = np.unique(flat[inside], return_inverse=True)
        start, _ = open_interval((lo, hi))
        edges = np.concatenate([[start], np.maximum(points, start)])
        cumulative = np.cumsum(piecewise_integrals(mother.density, edges, tol, QUAD_MAX_DEPTH))
        result[inside] = cumulative[inverse]
    return np.clip(result, 0.0, 1.0).reshape(u.shape)


# --------------------------------------------------------------------------- #
#  Выбор ядра по имени
# --------------------------------------------------------------------------- #
KERNEL_FAMILIES = ("gaussian", "rectangular", "bump", "exp_power", "gauss_mix", "gamma", "beta")

_PARAMS: dict[str, tuple[str, ...]] = {
    "gaussian": (),
    "rectangular": (),
    "bump": (),
    "exp_power": ("p",),
    "gauss_mix": ("mu1", "mu2", "w"),
    "gamma": ("shape",),
    "beta": ("a", "b"),
}

_KEY_VALUE = re.compile(r"^\s*([a-z_0-9]+)\s*=\s*(\S+)\s*$")


def kernel_from_name(spec: str) -> Kernel:
    """
    Строит ядро по строке выбора.

    Формы: ``gaussian``, ``rectangular``, ``bump``, ``exp_power:p=<v>``,
    ``gauss_mix:mu1=<v>,mu2=<v>,w=<v>``, ``gamma:shape=<v>``, ``beta:a=<v>,b=<v>``.

    Raises:
        InvalidConfigError: неизвестное семейство (с подсказкой ближайшего имени)
            или неверные параметры.
    """
    family, _, arguments = spec.strip().partition(":")
    family = family.strip().lower()
    if family not in _PARAMS:
        suggestion = process.extractOne(family, KERNEL_FAMILIES)
        hint = f"; did you mean {suggestion[0]!r}?" if suggestion and suggestion[1] >= 60 else ""
        raise InvalidConfigError(f"unknown kernel {family!r}{hint}")

    params: dict[str, float] = {}
    if arguments.strip():
        for chunk in arguments.split(","):
            match = _KEY_VALUE.match(chunk)
            if not match:
                raise InvalidConfigError(f"malformed kernel parameter {chunk!r} in {spec!r}")
            key, raw = match.groups()
            try:
                params[key] = float(raw)
            except ValueError:
                raise InvalidConfigError(f"kernel parameter {key}={raw!r} is not a number") from None

    expected = set(_PARAMS[family])
    if set(params) != expected:
        raise InvalidConfigError(
            f"kernel {family!r} expects parameters {sorted(expected)}, got {sorted(params)}"
        )

    if family == "gaussian":
        return make_gaussian()
    if family == "rectangular":
        return make_rectangular()
    if family == "bump":
        return make_bump()
    if family == "exp_power":
        return make_exp_power(params["p"])
    if family == "gauss_mix":
        return make_gaussian_mixture(params["mu1"], params["mu2"], params["w"])
    if family == "gamma":
        return make_shifted_gamma(params["shape"])
    return make_shifted_beta(params["a"], params["b"])


def builtin_kernels() -> dict[str, Kernel]:
    """Встроенные лог-вогнутые ядра для проверок свойств."""
    return {
        "gaussian": make_gaussian(),
        "rectangular": make_rectangular(),
        "bump": make_bump(),
        "exp_power:p=1": make_exp_power(1.0),
        "exp_power:p=2": make_exp_power(2.0),
        "exp_power:p=3": make_exp_power(3.0),
    }
