"""
Главный модуль приложения monokernel.

Разбирает командную строку в ``RunConfig`` и выполняет одну из команд:

    fit       estimator curve on a grid                 -> curve.csv, fit.json
    cv        leave-one-out bandwidth search            -> cv_profile.csv, cv_summary.json
    check     property reports for the fitted curve     -> check.json
    isotonic  IS and SI pipelines                       -> is_curve.csv, si_curve.csv
    app       ECDF / quantile / Q-Q / counting fits     -> app_dataset.csv, app_curve.csv

Ошибки выводятся одной строкой JSON в stderr и отображаются в коды завершения.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Optional, Sequence

from pydantic import ValidationError

from app.config.settings import Settings, get_settings
from app.config.storage import get_output_dir
from app.core import constants
from app.core.applications import (
    counting_dataset,
    ecdf_dataset,
    intensity_curve,
    qq_dataset,
    quantile_dataset,
)
from app.core.csv_storage import CSVStorage
from app.core.data_loader import load_dataset, load_sample
from app.core.errors import MonokernelError
from app.core.estimators import Dataset, EstimatorSpec, Method, default_grid, eval_grid
from app.core.isotonic import is_pipeline, isotonize, si_pipeline
from app.core.kernels import Kernel, kernel_from_name, scale
from app.core.model_selection import minimize_cw
from app.core.properties import (
    check_log_concave,
    check_monotone,
    check_shift_preservation,
    find_nw_violation,
    find_pc_violation,
    fuzz_monotonicity,
    fuzz_pc_violations,
)
from app.models.run_config import AppKind, Command, RunConfig
from app.utils.logger import get_logger, setup_logging

logger = get_logger(__name__)


# --------------------------------------------------------------------------- #
#  Командная строка
# --------------------------------------------------------------------------- #
def _bandwidth(value: str):
    if value == "cv":
        return value
    try:
        return float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bandwidth must be a number or 'cv', got {value!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", dest="input_path", default=constants.FIXTURE_PREFIX + "paper",
                        help="CSV file with x,y rows or fixture:<name>")
    common.add_argument("--method", default="gm", help="nw, pc or gm")
    common.add_argument("--kernel", default="gaussian",
                        help="gaussian, rectangular, bump, exp_power:p=<v>, gauss_mix:mu1=..,mu2=..,w=.., "
                             "gamma:shape=<v>, beta:a=<v>,b=<v>")
    common.add_argument("--bandwidth", type=_bandwidth, default="cv", help="positive number or 'cv'")
    common.add_argument("--grid-points", type=int, default=None)
    common.add_argument("--cv-grid-points", type=int, default=None)
    common.add_argument("--h-lo", type=float, default=None)
    common.add_argument("--h-hi", type=float, default=None)
    common.add_argument("--pc-x0", default=constants.PC_X0_SENTINEL,
                        help=f"number or {constants.PC_X0_SENTINEL}")
    common.add_argument("--shift", dest="shift_c", type=float, default=0.0, help="add c to every y")
    common.add_argument("--output", dest="output_path", default=None, help="output directory")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--tol", type=float, default=None, help="quadrature tolerance")
    common.add_argument("--log-level", default=None)
    common.add_argument("--log-json", action="store_true", default=None)

    parser = argparse.ArgumentParser(prog=constants.APP_NAME, description=constants.APP_DESCRIPTION)
    parser.add_argument("--version", action="version", version=f"%(prog)s {constants.APP_VERSION}")
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("fit", parents=[common], help="evaluate the estimator on a grid")
    commands.add_parser("cv", parents=[common], help="cross-validated bandwidth search")
    check = commands.add_parser("check", parents=[common], help="property reports")
    check.add_argument("--fuzz", type=int, nargs="?", const=-1, default=0,
                       help="also run N random cases (FUZZ_CASES when N is omitted)")
    commands.add_parser("isotonic", parents=[common], help="IS and SI pipelines")
    app = commands.add_parser("app", parents=[common], help="ECDF / quantile / Q-Q / counting fits")
    app.add_argument("--app", required=True, choices=[kind.value for kind in AppKind])
    app.add_argument("--second-input", default=None, help="second sample for --app qq")
    app.add_argument("--horizon", type=float, default=None, help="observation window T for counting")
    return parser


def config_from_args(args: argparse.Namespace, settings: Settings) -> RunConfig:
    """Namespace + настройки -> проверенный RunConfig; флаги важнее настроек."""
    fuzz = getattr(args, "fuzz", 0)
    return RunConfig(
        command=args.command,
        input_path=args.input_path,
        method=args.method,
        kernel=args.kernel,
        bandwidth=args.bandwidth,
        grid_points=settings.grid_points if args.grid_points is None else args.grid_points,
        cv_grid_points=settings.cv_grid_points if args.cv_grid_points is None else args.cv_grid_points,
        h_lo=args.h_lo,
        h_hi=args.h_hi,
        pc_x0=args.pc_x0,
        shift_c=args.shift_c,
        output_path=args.output_path,
        seed=settings.fuzz_seed if args.seed is None else args.seed,
        tol=settings.quad_tol if args.tol is None else args.tol,
        monotone_tol=settings.monotone_tol,
        probes=settings.log_concave_probes,
        log_concave_slack=settings.log_concave_slack,
        cv_rel_tol=settings.cv_rel_tol,
        pc_search_points=settings.pc_search_points,
        pc_search_passes=settings.pc_search_passes,
        fuzz=settings.fuzz_cases if fuzz == -1 else fuzz,
        app=getattr(args, "app", None),
        second_input=getattr(args, "second_input", None),
        horizon=getattr(args, "horizon", None),
    )


# --------------------------------------------------------------------------- #
#  Команды
# --------------------------------------------------------------------------- #
def _fit_spec(config: RunConfig, d: Dataset, mother: Kernel) -> tuple[EstimatorSpec, Optional[dict]]:
    """Спецификация оценщика с заданной или подобранной кросс-валидацией шириной."""
    if config.bandwidth == "cv":
        profile = minimize_cw(
            d, config.method, mother,
            h_lo=config.h_lo, h_hi=config.h_hi,
            grid_points=config.cv_grid_points,
            pc_x0=config.pc_x0,
            rel_tol=config.cv_rel_tol,
            tol=config.tol,
        )
        return EstimatorSpec(config.method, scale(mother, profile.h_star), config.pc_x0), profile.summary()
    return EstimatorSpec(config.method, scale(mother, float(config.bandwidth)), config.pc_x0), None


def _describe(config: RunConfig, d: Dataset, spec: EstimatorSpec) -> dict[str, Any]:
    return {
        "input": config.input_path,
        "shift": config.shift_c,
        "method": spec.method.value,
        "kernel": spec.kernel.name,
        "h": spec.h,
        "n": d.n,
        "comonotone": d.comonotone,
    }


def _run_fit(config: RunConfig, d: Dataset, mother: Kernel, storage: CSVStorage) -> dict[str, Any]:
    spec, cv_summary = _fit_spec(config, d, mother)
    curve = eval_grid(d, spec, default_grid(d, spec.kernel, config.grid_points), config.tol)
    storage.write_curve(curve, "curve.csv")
    summary = {**_describe(config, d, spec), "defined_points": int(curve.defined.sum()), "cv": cv_summary}
    storage.write_json(summary, "fit.json")
    return summary


def _run_cv(config: RunConfig, d: Dataset, mother: Kernel, storage: CSVStorage) -> dict[str, Any]:
    profile = minimize_cw(
        d, config.method, mother,
        h_lo=config.h_lo, h_hi=config.h_hi,
        grid_points=config.cv_grid_points,
        pc_x0=config.pc_x0,
        rel_tol=config.cv_rel_tol,
        tol=config.tol,
    )
    storage.write_profile(profile, "cv_profile.csv")
    summary = {
        "input": config.input_path,
        "shift": config.shift_c,
        "method": config.method.value,
        "kernel": mother.name,
        **profile.summary(),
    }
    storage.write_json(summary, "cv_summary.json")
    return summary


def _run_check(config: RunConfig, d: Dataset, mother: Kernel, storage: CSVStorage) -> dict[str, Any]:
    spec, _ = _fit_spec(config, d, mother)
    grid = default_grid(d, spec.kernel, config.grid_points)
    curve = eval_grid(d, spec, grid, config.tol)
    log_concavity = check_log_concave(mother, config.probes, config.log_concave_slack)
    report: dict[str, Any] = {
        **_describe(config, d, spec),
        "monotonicity": check_monotone(curve, config.monotone_tol).to_dict(),
        "shift_deviation": {
            "c": constants.SHIFT_CHECK_C,
            "max_abs": check_shift_preservation(d, spec, constants.SHIFT_CHECK_C, grid, config.tol),
        },
        "log_concavity": log_concavity.to_dict(),
    }

    if spec.method is Method.PC:
        try:
            witness = find_pc_violation(
                d, spec.kernel, spec.resolve_x0(d),
                points=config.pc_search_points, passes=config.pc_search_passes,
            )
            report["pc_violation"] = witness.to_dict()
        except MonokernelError as e:
            report["pc_violation"] = {"witness": None, "error": e.category, "message": str(e)}
    if spec.method is Method.NW and not log_concavity.passed:
        violation = find_nw_violation(mother, log_concavity)
        report["nw_violation"] = violation.to_dict() if violation else None

    if config.fuzz:
        kernels = {mother.name: mother}
        if spec.method is Method.PC:
            summary = fuzz_pc_violations(
                kernels, bandwidth=spec.h, cases=config.fuzz, seed=config.seed,
                points=config.pc_search_points, passes=config.pc_search_passes,
            )
        else:
            summary = fuzz_monotonicity(
                spec.method, kernels, bandwidths=(spec.h,), cases=config.fuzz, seed=config.seed,
                grid_points=config.grid_points, tol=config.monotone_tol, quad_tol=config.tol,
            )
        report["fuzz"] = summary.to_dict()

    storage.write_json(report, "check.json")
    return report


def _run_isotonic(config: RunConfig, d: Dataset, mother: Kernel, storage: CSVStorage) -> dict[str, Any]:
    spec, cv_summary = _fit_spec(config, d, mother)
    grid = default_grid(d, spec.kernel, config.grid_points)
    storage.write_dataset(isotonize(d), "isotonic_dataset.csv")
    is_curve = is_pipeline(d, spec, grid, config.tol)
    si_curve = si_pipeline(d, spec, grid, config.tol)
    storage.write_curve(is_curve, "is_curve.csv")
    storage.write_curve(si_curve, "si_curve.csv")
    summary = {
        **_describe(config, d, spec),
        "cv": cv_summary,
        "is_monotonicity": check_monotone(is_curve, config.monotone_tol).to_dict(),
        "si_monotonicity": check_monotone(si_curve, config.monotone_tol).to_dict(),
    }
    storage.write_json(summary, "isotonic.json")
    return summary


def _app_dataset(config: RunConfig) -> Dataset:
    sample = load_sample(config.input_path)
    if config.app is AppKind.ECDF:
        return ecdf_dataset(sample)
    if config.app is AppKind.QUANTILE:
        return quantile_dataset(sample)
    if config.app is AppKind.QQ:
        return qq_dataset(sample, load_sample(config.second_input))
    return counting_dataset(sample, config.horizon)


def _run_app(config: RunConfig, mother: Kernel, storage: CSVStorage) -> dict[str, Any]:
    d = _app_dataset(config)
    if config.shift_c:
        d = d.shifted(config.shift_c)
    spec, cv_summary = _fit_spec(config, d, mother)
    grid = default_grid(d, spec.kernel, config.grid_points)
    storage.write_dataset(d, "app_dataset.csv")
    curve = eval_grid(d, spec, grid, config.tol)
    storage.write_curve(curve, "app_curve.csv")
    summary = {
        **_describe(config, d, spec),
        "app": config.app.value,
        "cv": cv_summary,
        "monotonicity": check_monotone(curve, config.monotone_tol).to_dict(),
    }
    if config.app is AppKind.COUNTING:
        if spec.method is not Method.GM:
            logger.warning("intensity_uses_gm", method=spec.method.value)
        storage.write_curve(intensity_curve(d, spec.kernel, grid), "intensity.csv")
    storage.write_json(summary, "app.json")
    return summary


def run(config: RunConfig) -> int:
    """
    Выполняет одну команду и возвращает код завершения процесса.

    Ошибки библиотеки логируются, пишутся в stderr как ``{"error": ..., "message": ...}``
    и отображаются в свой код; любая другая ошибка даёт код 1.
    """
    logger.info("run_started", command=config.command.value, input=config.input_path)
    try:
        storage = CSVStorage(get_output_dir(config.output_path))
        mother = kernel_from_name(config.kernel)
        if config.command is Command.APP:
            summary = _run_app(config, mother, storage)
        else:
            d = load_dataset(config.input_path, config.shift_c)
            handler = {
                Command.FIT: _run_fit,
                Command.CV: _run_cv,
                Command.CHECK: _run_check,
                Command.ISOTONIC: _run_isotonic,
            }[config.command]
            summary = handler(config, d, mother, storage)
    except MonokernelError as e:
        logger.error("run_failed", category=e.category, message=str(e))
        _report_error(e.category, str(e))
        return e.exit_code
    except Exception as e:
        logger.exception("run_crashed")
        _report_error("unexpected", str(e))
        return constants.EXIT_UNEXPECTED

    print(json.dumps(summary, sort_keys=True))
    logger.info("run_finished", command=config.command.value, output=str(storage.output_dir))
    return constants.EXIT_OK


def _report_error(category: str, message: str) -> None:
    print(json.dumps({"error": category, "message": message}), file=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level, args.log_json)
    try:
        config = config_from_args(args, get_settings())
    except ValidationError as e:
        logger.error("invalid_config", errors=e.errors(include_url=False, include_context=False))
        message = "; ".join(err["msg"] for err in e.errors(include_url=False, include_context=False))
        _report_error("invalid-config", message)
        return constants.EXIT_CONFIG
    return run(config)
