"""
Интеграционные тесты CLI.
"""
import json
import sys

import pandas as pd
import pytest
import structlog

from app.config.settings import get_settings
from app.core import constants
from app.main import build_parser, config_from_args, main
from app.models.run_config import AppKind, Command


@pytest.fixture(autouse=True)
def restore_log_stream():
    """main() привязывает логгер к перехваченному stderr; возвращаем настоящий."""
    yield
    structlog.configure(logger_factory=structlog.PrintLoggerFactory(file=sys.__stderr__))


@pytest.fixture
def out(tmp_path):
    return tmp_path / "out"


def _last_error(capsys) -> dict:
    err = capsys.readouterr().err
    return json.loads(err.strip().splitlines()[-1])


def test_config_from_args_uses_settings():
    args = build_parser().parse_args(["check", "--fuzz", "--method", "NW"])
    config = config_from_args(args, get_settings())
    assert config.command is Command.CHECK
    assert config.fuzz == get_settings().fuzz_cases
    assert config.method.value == "nw"
    assert config.bandwidth == "cv"
    assert config.input_path == "fixture:paper"
    assert config.grid_points == get_settings().grid_points


def test_fit(out, capsys):
    code = main(["fit", "--bandwidth", "1.5", "--grid-points", "101", "--output", str(out)])
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["method"] == "gm"
    assert summary["h"] == 1.5
    assert summary["n"] == 20
    assert summary["defined_points"] == 101
    assert summary["cv"] is None
    curve = pd.read_csv(out / "curve.csv")
    assert list(curve.columns) == ["x", "value", "defined"]
    assert len(curve) == 101
    assert (out / "fit.json").exists()


def test_fit_with_cv_bandwidth(out, capsys):
    code = main(["fit", "--method", "nw", "--cv-grid-points", "8", "--grid-points", "51", "--output", str(out)])
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["cv"]["grid_points"] == 8
    assert summary["h"] == summary["cv"]["h_star"]


def test_cv(out, capsys):
    code = main(["cv", "--method", "gm", "--cv-grid-points", "8", "--shift", "10", "--output", str(out)])
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["shift"] == 10.0
    assert summary["cw_star"] > 0
    profile = pd.read_csv(out / "cv_profile.csv")
    assert profile["kind"].tolist() == ["grid"] * 8 + ["star"]
    assert json.loads((out / "cv_summary.json").read_text())["h_star"] == summary["h_star"]


def test_check_pc(out, capsys):
    code = main(["check", "--method", "pc", "--kernel", "rectangular", "--bandwidth", "1",
                 "--grid-points", "201", "--output", str(out)])
    assert code == 0
    report = json.loads((out / "check.json").read_text())
    assert report["log_concavity"]["passed"] is True
    assert report["shift_deviation"]["max_abs"] > 1.0
    left, right = report["pc_violation"]["witness"]
    assert left < right
    assert report["pc_violation"]["drop"] > 0


def test_check_nw_with_bimodal_kernel(out, capsys):
    code = main(["check", "--method", "nw", "--kernel", "gauss_mix:mu1=-3,mu2=3,w=0.5",
                 "--bandwidth", "1", "--grid-points", "201", "--output", str(out)])
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert report["log_concavity"]["passed"] is False
    assert report["nw_violation"]["value_x"] > report["nw_violation"]["value_z"]
    assert report["shift_deviation"]["max_abs"] <= 1e-9


def test_check_with_fuzz(out, capsys):
    code = main(["check", "--method", "gm", "--bandwidth", "1", "--grid-points", "201",
                 "--fuzz", "3", "--seed", "5", "--output", str(out)])
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert report["monotonicity"]["is_nondecreasing"] is True
    assert report["fuzz"]["cases"] == 3
    assert report["fuzz"]["failures"] == 0


def test_isotonic(out, capsys):
    code = main(["isotonic", "--method", "pc", "--bandwidth", "1", "--grid-points", "201", "--output", str(out)])
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["si_monotonicity"]["is_nondecreasing"] is True
    for name in ("isotonic_dataset.csv", "is_curve.csv", "si_curve.csv", "isotonic.json"):
        assert (out / name).exists()


@pytest.mark.parametrize("kind", [AppKind.ECDF, AppKind.QUANTILE, AppKind.COUNTING])
def test_app(kind, sample_csv, out, capsys):
    code = main(["app", "--app", kind.value, "--input", str(sample_csv), "--bandwidth", "0.5",
                 "--grid-points", "101", "--output", str(out)])
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["app"] == kind.value
    assert summary["n"] == 5
    assert summary["monotonicity"]["is_nondecreasing"] is True
    assert (out / "app_curve.csv").exists()
    assert (out / "intensity.csv").exists() == (kind is AppKind.COUNTING)


def test_app_qq(sample_csv, out, capsys):
    code = main(["app", "--app", "qq", "--input", str(sample_csv), "--second-input", str(sample_csv),
                 "--bandwidth", "0.5", "--grid-points", "51", "--output", str(out)])
    assert code == 0
    dataset = pd.read_csv(out / "app_dataset.csv")
    assert dataset["x"].tolist() == dataset["y"].tolist()


# --------------------------------------------------------------------------- #
#  Ошибки и коды завершения
# --------------------------------------------------------------------------- #
@pytest.mark.parametrize("argv", [
    ["fit", "--kernel", "gausian"],
    ["fit", "--method", "loess"],
    ["fit", "--bandwidth", "-1"],
    ["fit", "--kernel", "exp_power:p=0.5"],
    ["cv", "--h-lo", "2", "--h-hi", "1"],
    ["app", "--app", "qq"],
    ["fit", "--grid-points", "0"],
    ["cv", "--cv-grid-points", "0"],
    ["fit", "--tol", "0"],
    ["fit", "--kernel", "beta:a=1e6,b=1e6", "--bandwidth", "1"],
])
def test_invalid_config(argv, out, capsys):
    assert main(argv + ["--output", str(out)]) == 2
    assert _last_error(capsys)["error"] == "invalid-config"


def test_unknown_kernel_message_has_hint(out, capsys):
    assert main(["fit", "--kernel", "gausian", "--output", str(out)]) == 2
    assert "gaussian" in _last_error(capsys)["message"]


def test_missing_input(tmp_path, out, capsys):
    assert main(["fit", "--input", str(tmp_path / "nope.csv"), "--bandwidth", "1", "--output", str(out)]) == 5
    assert _last_error(capsys)["error"] == "file-not-found"


def test_malformed_input(write_csv, out, capsys):
    path = write_csv("bad.csv", "x,y\n1,2\n3,oops\n")
    assert main(["fit", "--input", str(path), "--bandwidth", "1", "--output", str(out)]) == 3
    error = _last_error(capsys)
    assert error["error"] == "parse-error"
    assert ":3:" in error["message"]


def test_all_infinite_cv(out, capsys):
    code = main(["cv", "--method", "nw", "--kernel", "rectangular", "--h-lo", "0.01", "--h-hi", "0.1",
                 "--cv-grid-points", "8", "--output", str(out)])
    assert code == 4
    assert _last_error(capsys)["error"] == "all-infinite-cv"


def test_unknown_fixture(out, capsys):
    assert main(["fit", "--input", "fixture:papr", "--bandwidth", "1", "--output", str(out)]) == 2
    assert "paper" in _last_error(capsys)["message"]


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert capsys.readouterr().out.strip() == f"{constants.APP_NAME} {constants.APP_VERSION}"


# --------------------------------------------------------------------------- #
#  Воспроизводимость и значения CW через CLI
# --------------------------------------------------------------------------- #
@pytest.mark.parametrize("argv", [
    ["fit", "--method", "nw", "--cv-grid-points", "8", "--grid-points", "101"],
    ["check", "--method", "pc", "--kernel", "rectangular", "--bandwidth", "1", "--grid-points", "201",
     "--fuzz", "2", "--seed", "3"],
    ["isotonic", "--method", "pc", "--bandwidth", "1", "--grid-points", "101"],
])
def test_same_config_gives_identical_files(argv, tmp_path, capsys):
    first, second = tmp_path / "first", tmp_path / "second"
    assert main(argv + ["--output", str(first)]) == 0
    assert main(argv + ["--output", str(second)]) == 0
    names = sorted(p.name for p in first.iterdir())
    assert names == sorted(p.name for p in second.iterdir())
    assert names
    for name in names:
        assert (first / name).read_bytes() == (second / name).read_bytes(), name


@pytest.mark.slow
@pytest.mark.parametrize("method, expected", [("nw", 27.1), ("pc", 71.7), ("gm", 20.7)])
def test_cv_command_gaussian_minimum(method, expected, out, capsys):
    code = main(["cv", "--input", "fixture:paper", "--method", method, "--kernel", "gaussian",
                 "--output", str(out)])
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["cw_star"] == pytest.approx(expected, rel=0.02)
    profile = pd.read_csv(out / "cv_profile.csv")
    assert profile["cw"].iloc[-1] == pytest.approx(summary["cw_star"], rel=1e-15)
