"""Test cases for the command line interface."""
import pandas
import pytest
from qdturnstile.cli import cli
from qdturnstile.lib.validation import Check
from typer.testing import CliRunner


@pytest.fixture
def runner() -> CliRunner:
    """Fixture for invoking command-line interfaces."""
    return CliRunner()


def test_cascade(runner, config_file, tmp_path):
    config = config_file(
        "schemes = flat\nsweep_min = 0.01\nsweep_max = 100\nsweep_steps = 9\n"
    )
    result = runner.invoke(cli, ["cascade", "--config", str(config), "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    frame = pandas.read_csv(tmp_path / "cascade.csv")
    assert len(frame) == 9
    assert frame.P12.iloc[0] > 0.9
    assert frame.P12.iloc[-1] == pytest.approx(0.25, abs=0.01)


def test_entangle(runner, config_file, tmp_path):
    config = config_file("deltas = 0.4\nsweep_steps = 4\n")
    result = runner.invoke(cli, ["entangle", "-c", str(config), "-o", str(tmp_path)])
    assert result.exit_code == 0, result.output
    frame = pandas.read_csv(tmp_path / "entangle.csv")
    assert set(frame["mode"]) == {"filtered", "unfiltered"}
    assert set(frame.Delta_over_Gamma) == {0.4}
    assert len(frame) == 2 * 4 * 2


def test_spectrum(runner, tmp_path):
    result = runner.invoke(cli, ["spectrum", "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    lines = pandas.read_csv(tmp_path / "spectrum_lines.csv", dtype={"label": str})
    assert list(lines.label) == ["1", "2", "3", "4"]
    assert len(pandas.read_csv(tmp_path / "spectrum.csv")) == 2001


def test_spectrum_tall_labels(runner, config_file, tmp_path):
    config = config_file("m_h = 0.5\n")
    result = runner.invoke(cli, ["spectrum", "-c", str(config), "-o", str(tmp_path)])
    assert result.exit_code == 0, result.output
    lines = pandas.read_csv(tmp_path / "spectrum_lines.csv", dtype={"label": str})
    assert list(lines.label) == ["1", "1'", "2", "2'", "3", "4"]
    assert (lines.strength >= 0).all()


def test_cavity(runner, config_file, tmp_path):
    config = config_file("cavity_theta_steps = 4\ncavity_deltas = 0.1, 0.4\n")
    result = runner.invoke(cli, ["cavity", "-c", str(config), "-o", str(tmp_path)])
    assert result.exit_code == 0, result.output
    assert len(pandas.read_csv(tmp_path / "cavity.csv")) == 8


def test_simulate_is_reproducible(runner, tmp_path):
    outputs = []
    for name in ("first", "second"):
        out = tmp_path / name
        args = ["simulate", "-o", str(out), "--seed", "3", "--trajectories", "300"]
        result = runner.invoke(cli, args)
        assert result.exit_code == 0, result.output
        outputs.append(
            ((out / "photons.csv").read_bytes(), (out / "estimators.csv").read_bytes())
        )
    assert outputs[0] == outputs[1]
    estimators = pandas.read_csv(tmp_path / "first" / "estimators.csv")
    assert "P12" in set(estimators.estimator)


def test_validate_reports(runner, mocker, tmp_path):
    mocker.patch(
        "qdturnstile.cli.run_validation",
        return_value=[Check("sum rule", True, "fine"), Check("order", True, "fine")],
    )
    result = runner.invoke(cli, ["validate", "--trajectories", "10", "-o", str(tmp_path)])
    assert result.exit_code == 0
    assert "2/2 checks passed" in result.output
    table = pandas.read_csv(tmp_path / "validation.csv")
    assert list(table.columns) == ["name", "passed", "detail"]
    assert list(table.name) == ["sum rule", "order"]
    assert table.passed.all()


def test_validate_fails(runner, mocker, tmp_path):
    mocker.patch(
        "qdturnstile.cli.run_validation",
        return_value=[Check("sum rule", False, "off by one")],
    )
    result = runner.invoke(cli, ["validate", "--out", str(tmp_path)])
    assert result.exit_code == 1
    assert "FAIL" in result.output
    assert not pandas.read_csv(tmp_path / "validation.csv").passed.any()


def test_config_errors_exit_with_two(runner, config_file, tmp_path):
    config = config_file("gama = 1\n")
    result = runner.invoke(cli, ["cascade", "-c", str(config), "-o", str(tmp_path)])
    assert result.exit_code == 2
    assert "did you mean 'gamma'" in result.output


def test_domain_errors_exit_with_two(runner, config_file, tmp_path):
    config = config_file("m_e = 1.5\nm_h = 1.5\n")
    result = runner.invoke(cli, ["simulate", "-c", str(config), "-o", str(tmp_path)])
    assert result.exit_code == 2
    assert "flat and tall" in result.output


def test_physical_warnings(runner, config_file, tmp_path):
    config = config_file("V_hh = 10\n")
    result = runner.invoke(cli, ["cascade", "-c", str(config), "-o", str(tmp_path)])
    assert result.exit_code == 0
    assert "warning: expected V_hh > V_ee > 0" in result.output
