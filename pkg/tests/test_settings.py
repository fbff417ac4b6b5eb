"""Настройки для тестов."""

from app.config.settings import Settings, get_settings
from app.config.storage import get_output_dir
from app.core import constants


def test_defaults(monkeypatch):
    for name in ("QUAD_TOL", "CV_GRID_POINTS", "GRID_POINTS", "FUZZ_CASES", "LOG_JSON"):
        monkeypatch.delenv(name, raising=False)
    s = Settings(_env_file=None)
    assert s.quad_tol == constants.QUAD_TOL
    assert s.cv_grid_points == constants.CV_GRID_POINTS
    assert s.grid_points == constants.GRID_POINTS
    assert s.fuzz_cases == constants.FUZZ_CASES
    assert s.log_json is False


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("CV_GRID_POINTS", "32")
    monkeypatch.setenv("QUAD_TOL", "1e-8")
    monkeypatch.setenv("LOG_JSON", "true")
    s = Settings(_env_file=None)
    assert s.cv_grid_points == 32
    assert s.quad_tol == 1e-8
    assert s.log_json is True


def test_get_settings_is_cached(monkeypatch):
    get_settings.cache_clear()
    first = get_settings()
    monkeypatch.setenv("GRID_POINTS", "11")
    assert get_settings() is first
    get_settings.cache_clear()
    try:
        assert get_settings().grid_points == 11
    finally:
        monkeypatch.delenv("GRID_POINTS")
        get_settings.cache_clear()


def test_output_dir(tmp_path):
    target = tmp_path / "nested" / "out"
    assert get_output_dir(str(target)) == target
    assert target.is_dir()
    assert get_output_dir().is_dir()
