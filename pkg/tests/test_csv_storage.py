"""
Тесты для модуля работы с CSV.
"""
import json
import math
import pathlib

import numpy as np
import pandas as pd
import pytest

from app.core.csv_storage import CSVStorage, parse_dataset_csv, parse_sample_csv
from app.core.errors import DatasetParseError, EmptyInputError
from app.core.estimators import CurveSample, Dataset
from app.core.model_selection import CvProfile


@pytest.fixture
def storage(tmp_path: pathlib.Path) -> CSVStorage:
    """Создает временное хранилище для тестов."""
    return CSVStorage(tmp_path / "out")


def test_parse_dataset_with_header(write_csv):
    d = parse_dataset_csv(write_csv("data.csv", "x,y\n1.5,2\n0,1\n\n-2,-3.25\n"))
    np.testing.assert_array_equal(d.xs, [-2.0, 0.0, 1.5])
    np.testing.assert_array_equal(d.ys, [-3.25, 1.0, 2.0])


def test_parse_dataset_without_header(write_csv):
    d = parse_dataset_csv(write_csv("data.csv", "0, 1\n1 ,1e-3\n"))
    np.testing.assert_array_equal(d.xs, [0.0, 1.0])
    np.testing.assert_array_equal(d.ys, [1.0, 1e-3])


@pytest.mark.parametrize("text, line", [
    ("x,y\n1,2\n3\n", 3),
    ("1,2\n3,4,5\n", 2),
    ("x,y\n1,2\n3,abc\n", 3),
    ("x,y\n\n1,inf\n", 3),
    ("1,2\n2,nan\n", 2),
])
def test_parse_errors_carry_line_numbers(text, line, write_csv):
    path = write_csv("bad.csv", text)
    with pytest.raises(DatasetParseError) as excinfo:
        parse_dataset_csv(path)
    assert excinfo.value.line == line
    assert f"{path}:{line}:" in str(excinfo.value)
    assert excinfo.value.exit_code == 3


@pytest.mark.parametrize("text", ["", "\n\n", "x,y\n"])
def test_empty_input(text, write_csv):
    with pytest.raises(EmptyInputError):
        parse_dataset_csv(write_csv("empty.csv", text))


def test_parse_sample(sample_csv, write_csv):
    np.testing.assert_array_equal(parse_sample_csv(sample_csv), [3.5, 0.25, 1.0, 2.0, 0.75])
    with pytest.raises(DatasetParseError):
        parse_sample_csv(write_csv("two.csv", "1,2\n"))


def test_dataset_round_trip_is_exact(storage, rng):
    d = Dataset(np.sort(rng.normal(size=50)), rng.normal(size=50) / 3.0)
    path = storage.write_dataset(d, "dataset.csv")
    assert path.read_text(encoding="utf-8").splitlines()[0] == "x,y"
    assert parse_dataset_csv(path) == d


def test_write_curve(storage):
    curve = CurveSample(np.array([0.0, 5.0, 10.0]), np.array([0.0, 123.0, 1.0]), np.array([True, False, True]))
    lines = storage.write_curve(curve, "curve.csv").read_text(encoding="utf-8").splitlines()
    assert lines == ["x,value,defined", "0,0,true", "5,,false", "10,1,true"]


def test_write_profile(storage):
    profile = CvProfile(
        hs=np.array([0.5, 1.0, 2.0]), cw=np.array([math.inf, 2.5, 3.0]), h_star=1.0 / 3.0, cw_star=2.4
    )
    frame = pd.read_csv(storage.write_profile(profile))
    assert list(frame.columns) == ["kind", "h", "cw"]
    assert frame["kind"].tolist() == ["grid", "grid", "grid", "star"]
    assert math.isinf(frame["cw"][0])
    assert frame["h"].iloc[-1] == pytest.approx(1.0 / 3.0, rel=1e-15)
    assert frame["cw"].iloc[-1] == pytest.approx(2.4, rel=1e-15)


def test_write_json(storage):
    path = storage.write_json({"b": 1, "a": [0.1, None]}, "summary.json")
    text = path.read_text(encoding="utf-8")
    assert text.endswith("\n")
    assert text.index('"a"') < text.index('"b"')
    assert json.loads(text) == {"a": [0.1, None], "b": 1}
