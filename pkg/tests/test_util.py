"""Tests for grids and CSV export."""
import math

import numpy
import pandas
import pytest
from qdturnstile.lib.exceptions import DomainError
from qdturnstile.schema.models import SpectrumLine
from qdturnstile.util.export import write_frame
from qdturnstile.util.grids import frequency_grid, sweep_grid, theta_grid


def test_sweep_grid():
    numpy.testing.assert_allclose(sweep_grid(1e-2, 1e2, 5), [1e-2, 1e-1, 1, 10, 100])
    numpy.testing.assert_allclose(sweep_grid(0, 1, 3, "linear"), [0, 0.5, 1])


@pytest.mark.parametrize(
    "args", [(1, 1, 5), (2, 1, 5), (0, 1, 5), (1, 2, 1), (1, 2, 3, "cubic")]
)
def test_sweep_grid_rejects(args):
    with pytest.raises(DomainError):
        sweep_grid(*args)


def test_theta_grid_excludes_right_angle():
    grid = theta_grid(50)
    assert grid.size == 50
    assert grid[0] == 0.0
    assert grid[-1] == pytest.approx(49 / 50 * math.pi / 2)


def test_frequency_grid():
    lines = [SpectrumLine("1", 10.0, 1.0, 0.5), SpectrumLine("2", 20.0, 1.0, 0.5)]
    grid = frequency_grid(lines, 11)
    assert grid[0] == 0.0 and grid[-1] == 30.0
    assert frequency_grid(lines, 3, start=5.0)[0] == 5.0


def test_write_frame(tmp_path):
    frame = pandas.DataFrame({"a": [1.0, 0.5], "b": ["x", "y"]})
    path = write_frame(frame, tmp_path / "out" / "table.csv")
    assert path.read_bytes() == b"a,b\n1,x\n0.5,y\n"
