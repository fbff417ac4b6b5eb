"""
Проверки свойств оценщиков.

* ``check_monotone`` ищет падения кривой между соседними определёнными точками.
* ``check_log_concave`` проверяет ``K((u+v)/2)^2 >= K(u) K(v)`` на точках
  Халтона; ``find_nw_violation`` строит из нарушающей пары набор из двух
  точек, на котором кривая NW убывает.
* ``find_pc_violation`` ищет участок убывания кривой PC на комонотонных данных.
* ``check_shift_preservation`` измеряет ``|f(ys + c) - (f(ys) + c)|``.
* ``fuzz_monotonicity`` / ``fuzz_pc_violations`` гоняют проверки на случайных
  комонотонных наборах с фиксированным seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional, Sequence, Union

import numpy as np
import structlog
from scipy.stats import qmc

from app.core.constants import (
    FUZZ_CASES,
    FUZZ_MAX_N,
    FUZZ_SEED,
    GRID_POINTS,
    LOG_CONCAVE_PDF_FLOOR,
    LOG_CONCAVE_PROBES,
    LOG_CONCAVE_SLACK,
    MONOTONE_TOL,
    NW_VIOLATION_MARGIN,
    PC_DROP_THRESHOLD,
    PC_SEARCH_PASSES,
    PC_SEARCH_POINTS,
    PC_SEARCH_START_WIDTHS,
    PROBE_TAIL_MASS,
    QUAD_TOL,
    SYNTH_INTERVAL,
)
from app.core.errors import PreconditionError, ViolationNotFoundError
from app.core.estimators import (
    CurveSample,
    Dataset,
    EstimatorSpec,
    Method,
    curve_values,
    default_grid,
    eval_grid,
    nw_eval,
    pc_values,
    pc_weights,
)
from app.core.kernels import Kernel, ScaledKernel, scale

logger = structlog.get_logger()


# --------------------------------------------------------------------------- #
#  Отчёты
# --------------------------------------------------------------------------- #
@dataclass(frozen=True)
class MonotonicityReport:
    is_nondecreasing: bool
    worst_violation: float
    witness: Optional[tuple[float, float]] = None
    tolerance: float = MONOTONE_TOL

    def to_dict(self) -> dict[str, Any]:
        return {
            "is_nondecreasing": self.is_nondecreasing,
            "worst_violation": self.worst_violation,
            "witness": list(self.witness) if self.witness else None,
            "tolerance": self.tolerance,
        }


@dataclass(frozen=True)
class LogConcavityReport:
    """``witness`` это ``(u, v, (u + v) / 2)`` для худшего нарушения в середине."""

    kernel: str
    passed: bool
    probes: int
    witness: Optional[tuple[float, float, float]] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "kernel": self.kernel,
            "passed": self.passed,
            "probes": self.probes,
            "witness": list(self.witness) if self.witness else None,
        }


@dataclass(frozen=True, eq=False)
class NwViolation:
    """Набор из двух точек, на котором NW (ширина 1) падает от ``x`` к ``z > x``."""

    dataset: Dataset
    bandwidth: float
    x: float
    z: float
    value_x: float
    value_z: float

    @property
    def drop(self) -> float:
        return self.value_x - self.value_z

    def to_dict(self) -> dict[str, Any]:
        return {
            "xs": self.dataset.xs.tolist(),
            "ys": self.dataset.ys.tolist(),
            "bandwidth": self.bandwidth,
            "x": self.x,
            "z": self.z,
            "value_x": self.value_x,
            "value_z": self.value_z,
        }


@dataclass(frozen=True)
class PcViolation:
    """Соседние абсциссы ``left < right``, где ``pc(left) - pc(right) = drop``."""

    left: float
    right: float
    drop: float
    passes: int

    def to_dict(self) -> dict[str, Any]:
        return {"witness": [self.left, self.right], "drop": self.drop, "passes": self.passes}


@dataclass
class FuzzSummary:
    suite: str
    cases: int = 0
    checks: int = 0
    failures: int = 0
    not_found: int = 0
    worst_violation: float = 0.0
    first_failure: Optional[dict[str, Any]] = None
    per_kernel: dict[str, int] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    @property
    def failure_rate(self) -> float:
        return self.failures / self.checks if self.checks else 0.0

    def record_failure(self, kernel: str, detail: dict[str, Any]) -> None:
        self.failures += 1
        self.per_kernel[kernel] = self.per_kernel.get(kernel, 0) + 1
        if self.first_failure is None:
            self.first_failure = {"kernel": kernel, **detail}

    def to_dict(self) -> dict[str, Any]:
        return {
            "suite": self.suite,
            "cases": self.cases,
            "checks": self.checks,
            "failures": self.failures,
            "not_found": self.not_found,
            "worst_violation": self.worst_violation,
            "first_failure": self.first_failure,
            "failures_per_kernel": dict(self.per_kernel),
        }


# --------------------------------------------------------------------------- #
#  Монотонность и сдвиг
# --------------------------------------------------------------------------- #
def check_monotone(c: CurveSample, tol: float = MONOTONE_TOL) -> MonotonicityReport:
    """Наибольшее падение между соседними определёнными точками; пропуски не учитываются."""
    if tol < 0:
        raise PreconditionError(f"tol must be nonnegative, got {tol}")
    grid = c.grid[c.defined]
    values = c.values[c.defined]
    if values.size < 2:
        return MonotonicityReport(True, 0.0, None, tol)
    drops = values[:-1] - values[1:]
    i = int(np.argmax(drops))
    worst = max(float(drops[i]), 0.0)
    witness = (float(grid[i]), float(grid[i + 1])) if worst > 0 else None
    return MonotonicityReport(worst <= tol, worst, witness, tol)


def check_shift_preservation(
    d: Dataset, spec: EstimatorSpec, c: float, grid, tol: float = QUAD_TOL
) -> float:
    """``max |f(ys + c) - (f(ys) + c)|`` по точкам сетки, где определены обе оценки."""
    base, base_defined = curve_values(d, spec, grid, tol)
    moved, moved_defined = curve_values(d.shifted(c), spec, grid, tol)
    both = base_defined & moved_defined
    if not both.any():
        return 0.0
    return float(np.max(np.abs(moved[both] - (base[both] + c))))


# --------------------------------------------------------------------------- #
#  Логарифмическая вогнутость
# --------------------------------------------------------------------------- #
def check_log_concave(
    k: Kernel,
    probes: int = LOG_CONCAVE_PROBES,
    slack: float = LOG_CONCAVE_SLACK,
    tail_mass: float = PROBE_TAIL_MASS,
) -> LogConcavityReport:
    """
    Неравенство для середины на ``probes`` парах из последовательности Халтона.

    Сравнение идёт в логарифмах с мультипликативным запасом; пары, где плотность
    на одном из концов ниже порога underflow, пропускаются. Прохождение
    проверки свидетельствует, но не доказывает.
    """
    if probes < 2:
        raise PreconditionError(f"probes must be at least 2, got {probes}")
    lo, hi = k.effective_support(tail_mass)
    points = qmc.scale(qmc.Halton(d=2, scramble=False).random(probes), [lo, lo], [hi, hi])
    u = np.minimum(points[:, 0], points[:, 1])
    v = np.maximum(points[:, 0], points[:, 1])
    m = 0.5 * (u + v)

    ku, kv, km = (np.asarray(k.density(t), dtype=float) for t in (u, v, m))
    usable = (u < v) & (ku >= LOG_CONCAVE_PDF_FLOOR) & (kv >= LOG_CONCAVE_PDF_FLOOR)
    with np.errstate(divide="ignore"):
        log_mid = 2.0 * np.log(km)
    bound = np.log(ku, where=usable, out=np.zeros_like(ku)) + np.log(
        kv, where=usable, out=np.zeros_like(kv)
    ) + math.log1p(-slack)
    failing = usable & (log_mid < bound)

    if not failing.any():
        logger.debug("log_concave_passed", kernel=k.name, probes=probes)
        return LogConcavityReport(k.name, True, probes)

    excess = np.where(failing, ku * kv - km * km, -np.inf)
    i = int(np.argmax(excess))
    witness = (float(u[i]), float(v[i]), float(m[i]))
    logger.info("log_concave_failed", kernel=k.name, witness=witness)
    return LogConcavityReport(k.name, False, probes, witness)


def find_nw_violation(
    k: Kernel,
    report: Optional[LogConcavityReport] = None,
    margin: float = NW_VIOLATION_MARGIN,
) -> Optional[NwViolation]:
    """
    Контрпример для NW из двух точек по свидетелю ``(u, v)``.

    Берёт ``xs = (0, (v - u) / 2)``, ``ys = (0, 1)``, ширину 1 и сравнивает
    кривую в ``x = (u + v) / 2`` и ``z = v``. Возвращает ``None``, если падение
    не больше ``margin``.

    Raises:
        PreconditionError: ядро проходит проверку лог-вогнутости.
    """
    if report is None:
        report = check_log_concave(k)
    if report.passed or report.witness is None:
        raise PreconditionError(f"kernel {k.name} passed the log-concavity check")
    u, v, _ = report.witness
    d = Dataset(np.array([0.0, 0.5 * (v - u)]), np.array([0.0, 1.0]))
    scaled = scale(k, 1.0)
    x, z = 0.5 * (u + v), v
    value_x, value_z = nw_eval(d, scaled, x), nw_eval(d, scaled, z)
    if value_x is None or value_z is None or not value_z < value_x - margin:
        logger.warning("nw_violation_not_reproduced", kernel=k.name, witness=report.witness)
        return None
    return NwViolation(d, 1.0, x, z, value_x, value_z)


# --------------------------------------------------------------------------- #
#  Поиск нарушения для Priestley–Chao
# --------------------------------------------------------------------------- #
def is_pc_nontrivial(d: Dataset, x0: float) -> bool:
    return bool(np.any(pc_weights(d, x0) != 0))


def find_pc_violation(
    d: Dataset,
    k: ScaledKernel,
    x0: float,
    points: int = PC_SEARCH_POINTS,
    passes: int = PC_SEARCH_PASSES,
    start_widths: float = PC_SEARCH_START_WIDTHS,
    threshold: float = PC_DROP_THRESHOLD,
) -> PcViolation:
    """
    Первая пара соседних точек сетки, где PC падает больше чем на ``threshold``.

    Сетка покрывает данные с запасом ``start_widths`` эффективных ширин ядра;
    запас удваивается на каждом проходе.

    Raises:
        PreconditionError: ``d`` не комонотонен или все ``y_i (x_i - x_{i-1})`` равны 0.
        ViolationNotFoundError: в пределах бюджета поиска ничего не найдено.
    """
    if not d.comonotone:
        raise PreconditionError("find_pc_violation expects co-monotone data")
    if not is_pc_nontrivial(d, x0):
        raise PreconditionError("all PC weights y_i (x_i - x_{i-1}) are zero")
    margin = start_widths * k.effective_width
    for attempt in range(1, passes + 1):
        grid = np.linspace(d.xs[0] - margin, d.xs[-1] + margin, int(points))
        values = pc_values(d, k, x0, grid)
        hits = np.flatnonzero(values[:-1] - values[1:] > threshold)
        if hits.size:
            i = int(hits[0])
            witness = PcViolation(
                float(grid[i]), float(grid[i + 1]), float(values[i] - values[i + 1]), attempt
            )
            logger.debug("pc_violation_found", kernel=k.name, h=k.h, **witness.to_dict())
            return witness
        margin *= 2.0
    raise ViolationNotFoundError(
        f"no PC decrease above {threshold:g} within {passes} passes for kernel {k.name}, h={k.h:g}"
    )


# --------------------------------------------------------------------------- #
#  Фаззинг
# --------------------------------------------------------------------------- #
def random_comonotone_dataset(
    rng: np.random.Generator,
    max_n: int = FUZZ_MAX_N,
    interval: tuple[float, float] = SYNTH_INTERVAL,
    tie_probability: float = 0.15,
) -> Dataset:
    """Случайные отсортированные ``xs`` и ``ys`` с редкими совпадениями в обеих координатах."""
    n = int(rng.integers(1, max_n + 1))
    lo, hi = interval
    xs = np.sort(rng.uniform(lo, hi, n))
    ys = np.sort(rng.uniform(lo, hi, n))
    for values in (xs, ys):
        ties = np.flatnonzero(rng.random(n - 1) < tie_probability) + 1
        for i in ties:
            values[i] = values[i - 1]
    return Dataset(xs, ys)


def _case_generators(cases: int, seed: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(cases)]


def fuzz_monotonicity(
    method: Union[Method, str],
    kernels: Mapping[str, Kernel],
    bandwidths: Sequence[float] = (0.5, 1.0, 2.0),
    cases: int = FUZZ_CASES,
    seed: int = FUZZ_SEED,
    grid_points: int = GRID_POINTS,
    tol: float = MONOTONE_TOL,
    quad_tol: float = QUAD_TOL,
) -> FuzzSummary:
    """``check_monotone`` на случайных комонотонных наборах для каждого ядра и ширины."""
    method = Method.parse(method)
    summary = FuzzSummary(suite=f"monotonicity:{method.value}")
    for case, rng in enumerate(_case_generators(cases, seed)):
        d = random_comonotone_dataset(rng)
        summary.cases += 1
        for name, mother in kernels.items():
            for h in bandwidths:
                spec = EstimatorSpec(method, scale(mother, h))
                curve = eval_grid(d, spec, default_grid(d, spec.kernel, grid_points), quad_tol)
                report = check_monotone(curve, tol)
                summary.checks += 1
                summary.worst_violation = max(summary.worst_violation, report.worst_violation)
                if not report.is_nondecreasing:
                    summary.record_failure(
                        name, {"case": case, "h": h, "n": d.n, **report.to_dict()}
                    )
    logger.info("fuzz_finished", **summary.to_dict())
    return summary


def fuzz_pc_violations(
    kernels: Mapping[str, Kernel],
    bandwidth: float = 1.0,
    cases: int = FUZZ_CASES,
    seed: int = FUZZ_SEED,
    points: int = PC_SEARCH_POINTS,
    passes: int = PC_SEARCH_PASSES,
) -> FuzzSummary:
    """
    ``find_pc_violation`` на случайных нетривиальных комонотонных наборах.

    Неудача: поиск исчерпал бюджет (считается ещё и в ``not_found``) или
    свидетель не подтвердился; ``worst_violation`` это наибольшее расхождение
    при повторной проверке.
    """
    summary = FuzzSummary(suite="pc-violation")
    for case, rng in enumerate(_case_generators(cases, seed)):
        d = random_comonotone_dataset(rng)
        while not is_pc_nontrivial(d, d.xs[0] - bandwidth):
            d = random_comonotone_dataset(rng)
        summary.cases += 1
        for name, mother in kernels.items():
            k = scale(mother, bandwidth)
            x0 = float(d.xs[0] - k.h)
            summary.checks += 1
            try:
                witness = find_pc_violation(d, k, x0, points=points, passes=passes)
            except ViolationNotFoundError as e:
                summary.not_found += 1
                summary.record_failure(name, {"case": case, "n": d.n, "reason": str(e)})
                continue
            left, right = pc_values(d, k, x0, np.array([witness.left, witness.right]))
            mismatch = abs((left - right) - witness.drop)
            summary.worst_violation = max(summary.worst_violation, float(mismatch))
            if not left - right > PC_DROP_THRESHOLD:
                summary.record_failure(name, {"case": case, "n": d.n, **witness.to_dict()})
    logger.info("fuzz_finished", **summary.to_dict())
    return summary
