"""
Параметры одного запуска CLI.

``RunConfig`` собирается из аргументов командной строки и значений ``Settings``
и проверяется pydantic до начала вычислений.
"""

from __future__ import annotations

from enum import Enum
from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.core import constants
from app.core.errors import MonokernelError
from app.core.estimators import Method
from app.core.kernels import kernel_from_name


class Command(str, Enum):
    """Команды CLI."""

    FIT = "fit"
    CV = "cv"
    CHECK = "check"
    ISOTONIC = "isotonic"
    APP = "app"


class AppKind(str, Enum):
    ECDF = "ecdf"
    QUANTILE = "quantile"
    QQ = "qq"
    COUNTING = "counting"


class RunConfig(BaseModel):
    """
    Attributes:
        command: команда
        input_path: путь к CSV или ``fixture:<name>``
        bandwidth: положительное число или ``"cv"`` для подбора кросс-валидацией
        pc_x0: левая граница PC, число или ``"x1_minus_h"``
        shift_c: прибавляется к каждому ``y`` после загрузки
        second_input: вторая выборка для ``app --app qq``
        fuzz: число случайных наборов для ``check`` (0 отключает)
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    command: Command
    input_path: str = constants.FIXTURE_PREFIX + "paper"
    method: Method = Method.GM
    kernel: str = "gaussian"
    bandwidth: Union[float, Literal["cv"]] = "cv"
    grid_points: int = Field(constants.GRID_POINTS, ge=2)
    cv_grid_points: int = Field(constants.CV_GRID_POINTS, ge=constants.CV_MIN_GRID_POINTS)
    h_lo: Optional[float] = Field(None, gt=0)
    h_hi: Optional[float] = Field(None, gt=0)
    pc_x0: Union[float, str] = constants.PC_X0_SENTINEL
    shift_c: float = 0.0
    output_path: Optional[str] = None
    seed: int = constants.FUZZ_SEED
    tol: float = Field(constants.QUAD_TOL, gt=0)
    monotone_tol: float = Field(constants.MONOTONE_TOL, ge=0)
    probes: int = Field(constants.LOG_CONCAVE_PROBES, ge=2)
    log_concave_slack: float = Field(constants.LOG_CONCAVE_SLACK, ge=0, lt=1)
    cv_rel_tol: float = Field(constants.CV_REL_TOL, gt=0)
    pc_search_points: int = Field(constants.PC_SEARCH_POINTS, ge=2)
    pc_search_passes: int = Field(constants.PC_SEARCH_PASSES, ge=1)
    fuzz: int = Field(0, ge=0)
    app: Optional[AppKind] = None
    second_input: Optional[str] = None
    horizon: Optional[float] = Field(None, gt=0)

    @field_validator("method", mode="before")
    @classmethod
    def _parse_method(cls, value):
        return Method.parse(value)

    @field_validator("kernel")
    @classmethod
    def _check_kernel(cls, value: str) -> str:
        try:
            kernel_from_name(value)
        except MonokernelError as e:
            # QuadratureToleranceError не наследует ValueError
            raise ValueError(str(e)) from e
        return value

    @field_validator("bandwidth")
    @classmethod
    def _check_bandwidth(cls, value):
        if value != "cv" and not value > 0:
            raise ValueError(f"bandwidth must be positive or 'cv', got {value}")
        return value

    @field_validator("pc_x0")
    @classmethod
    def _check_pc_x0(cls, value):
        if isinstance(value, str) and value != constants.PC_X0_SENTINEL:
            return float(value)
        return value

    @model_validator(mode="after")
    def _check_command_options(self) -> "RunConfig":
        if self.h_lo is not None and self.h_hi is not None and not self.h_lo < self.h_hi:
            raise ValueError(f"need h_lo < h_hi, got {self.h_lo} and {self.h_hi}")
        if self.command is Command.APP:
            if self.app is None:
                raise ValueError("the app command needs --app")
            if self.app is AppKind.QQ and self.second_input is None:
                raise ValueError("--app qq needs --second-input")
        return self
