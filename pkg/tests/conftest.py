"""Module config for pytest."""

from pathlib import Path

import pytest

mp = pytest.MonkeyPatch()
mp.setenv("QDTURNSTILE_LOG_LEVEL", "DEBUG")
mp.setenv("QDTURNSTILE_SEED", "12345")
mp.setenv("QDTURNSTILE_TRAJECTORIES", "20000")
mp.setenv("QDTURNSTILE_BATCH_SIZE", "5000")

from qdturnstile.lib.scheme import flat_scheme, tall_scheme  # noqa: E402
from qdturnstile.schema.models import DotParameters, LevelScheme  # noqa: E402


def dot(**changes: float) -> DotParameters:
    """Parameters with V_hh > V_ee > 0, attractive direct terms and resonant voltages."""
    values = dict(
        E_e=1000.0,
        E_h=400.0,
        V_ee=20.0,
        V_hh=30.0,
        V_eh_s=-20.0,
        V_eh_a=-15.0,
        V_x1=0.5,
        V_x2=0.25,
        Gamma=1.0,
        gamma=1.0,
        T=5.0,
        V_bias=1400.0,
        Phi_gate=300.0,
    )
    values.update(changes)
    return DotParameters(**values)


@pytest.fixture
def make_dot():
    return dot


@pytest.fixture
def params() -> DotParameters:
    return dot()


@pytest.fixture
def flat() -> LevelScheme:
    return flat_scheme()


@pytest.fixture
def tall() -> LevelScheme:
    return tall_scheme()


@pytest.fixture
def config_file(tmp_path: Path):
    """Write a config file and return its path."""

    def write(text: str) -> Path:
        path = tmp_path / "run.conf"
        path.write_text(text, encoding="utf-8")
        return path

    return write
