"""Tests for the run configuration."""
import math

import pytest
from qdturnstile.core.config import RunConfig, load_config
from qdturnstile.lib.exceptions import ConfigError
from qdturnstile.schema.models import Level, SchedulePhase, SchemeClass


def test_defaults():
    config = load_config()
    p = config.dot()
    assert p.V_bias == 1400.0
    assert p.Phi_gate == 300.0
    assert p.Gamma == 1.0 and p.gamma == 0.01
    assert p.rate_1 == p.rate_2 == 1.0
    assert config.scheme().scheme_class is SchemeClass.FLAT_CYLINDRICAL
    assert config.deltas == [0.0, 0.2, 0.4]
    assert config.initial_level is Level.BIEXCITON
    assert config.schedule() is None
    assert len(config.ratios()) == 61
    assert config.thetas()[-1] < math.pi / 2


def test_load_file(config_file):
    path = config_file(
        "# tall dot\n"
        "m_h = 0.5\n"
        "gamma = 0.1\n"
        "schemes = flat, tall\n"
        "deltas = 0, 0.5\n"
        "V_bias = 1450\n"
        "prepare_time = 2.5\n"
        "prepare_outward = 0\n"
    )
    config = load_config(path)
    assert config.scheme().scheme_class is SchemeClass.TALL_CYLINDRICAL
    assert config.gamma == 0.1
    assert config.schemes == ["flat", "tall"]
    assert config.deltas == [0.0, 0.5]
    assert config.dot().V_bias == 1450.0
    assert config.schedule() == [SchedulePhase(2.5, 1.0, 0.0)]


def test_unknown_key_names_line_and_nearest_key(config_file):
    path = config_file("gamma = 0.1\ngama = 0.2\n")
    with pytest.raises(ConfigError, match=r":2: unknown key 'gama', did you mean 'gamma'\?"):
        load_config(path)


def test_unknown_key_without_suggestion(config_file):
    with pytest.raises(ConfigError) as err:
        load_config(config_file("zzzzzz = 1\n"))
    assert "did you mean" not in str(err.value)


def test_malformed_number_names_line(config_file):
    path = config_file("# header\nT = 5\nGamma = fast\n")
    with pytest.raises(ConfigError, match=r":3: invalid value for Gamma"):
        load_config(path)


@pytest.mark.parametrize(
    "text",
    [
        "sweep_min = 10\nsweep_max = 1\n",
        "sweep_steps = 1\n",
        "sweep_scale = log\nsweep_min = 0\n",
        "omega_steps = 1\n",
        "schemes = flat, round\n",
        "omega_min = 5\nomega_max = 4\n",
        "photons = 0\n",
    ],
)
def test_invalid_ranges(config_file, text):
    with pytest.raises(ConfigError, match="invalid value"):
        load_config(config_file(text))


def test_key_without_value(config_file):
    with pytest.raises(ConfigError, match="has no value"):
        load_config(config_file("gamma\n"))


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "absent.conf")


def test_later_value_wins(config_file):
    assert load_config(config_file("gamma = 0.1\ngamma = 0.3\n")).gamma == 0.3


def test_extra_fields_are_rejected():
    with pytest.raises(ValueError):
        RunConfig(colour="blue")


def test_unparsable_line(config_file):
    with pytest.raises(ConfigError, match=r":2: cannot parse '= 1'"):
        load_config(config_file("gamma = 0.1\n= 1\n"))


def test_lists_and_explicit_voltages():
    config = RunConfig(deltas=[0.1, 0.3], schemes=["tall"], V_bias=1.0, Phi_gate=2.0)
    assert config.deltas == [0.1, 0.3]
    assert config.schemes == ["tall"]
    p = config.dot()
    assert (p.V_bias, p.Phi_gate) == (1.0, 2.0)
    assert RunConfig(photons=1).photons == 1
