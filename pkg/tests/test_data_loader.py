"""
Тесты для модуля data_loader.
"""
import numpy as np
import pytest

from app.core.data_loader import fixture_names, load_dataset, load_fixture, load_sample
from app.core.errors import InputNotFoundError, InvalidConfigError


def test_paper_fixture(paper_dataset):
    """20 пар, x и y по возрастанию, два совпадающих x."""
    assert paper_dataset.n == 20
    assert paper_dataset.xs[0] == -8.8 and paper_dataset.xs[-1] == 10.0
    assert paper_dataset.ys[0] == -7.1 and paper_dataset.ys[-1] == 9.3
    assert paper_dataset.duplicate_xs == 2
    assert paper_dataset.comonotone
    assert "paper" in fixture_names()


def test_load_dataset_from_fixture_with_shift():
    d = load_dataset("fixture:paper", shift=10.0)
    np.testing.assert_array_equal(d.ys, load_fixture("paper").ys + 10.0)
    np.testing.assert_array_equal(d.xs, load_fixture("paper").xs)


def test_load_dataset_from_csv(write_csv):
    d = load_dataset(str(write_csv("d.csv", "x,y\n2,1\n1,0\n")), shift=-1.0)
    np.testing.assert_array_equal(d.xs, [1.0, 2.0])
    np.testing.assert_array_equal(d.ys, [-1.0, 0.0])


def test_unknown_fixture_suggests_name():
    with pytest.raises(InvalidConfigError, match="did you mean 'paper'"):
        load_fixture("papr")
    with pytest.raises(InvalidConfigError) as excinfo:
        load_dataset("fixture:zzzzzz")
    assert "did you mean" not in str(excinfo.value)


def test_missing_file(tmp_path):
    with pytest.raises(InputNotFoundError) as excinfo:
        load_dataset(str(tmp_path / "missing.csv"))
    assert excinfo.value.exit_code == 5
    with pytest.raises(InputNotFoundError):
        load_sample(str(tmp_path / "missing.csv"))


def test_load_sample(sample_csv):
    sample = load_sample(str(sample_csv))
    assert sample.n == 5
    np.testing.assert_array_equal(sample.values, [0.25, 0.75, 1.0, 2.0, 3.5])
