"""Flat ``key = value`` run configuration.

Files are read with python-dotenv's parser, which keeps line numbers, and
validated by the pydantic model ``RunConfig``.
"""

import io
import math
from difflib import get_close_matches
from pathlib import Path
from typing import Any, Literal

import numpy
from dotenv.parser import parse_stream
from loguru import logger
from pydantic import BaseModel, ValidationError, root_validator, validator

from qdturnstile.lib.cavity import CavityMethod
from qdturnstile.lib.exceptions import ConfigError
from qdturnstile.lib.scheme import Symmetry, classify_scheme
from qdturnstile.schema.models import (
    DotParameters,
    Level,
    LevelScheme,
    SchedulePhase,
)
from qdturnstile.util.grids import sweep_grid, theta_grid

DOT_FIELDS = tuple(DotParameters.__dataclass_fields__)


class RunConfig(BaseModel):
    """Validated run configuration.

    Energies are in units of Gamma. Bias and gate default to the resonance
    where both reservoir occupations are one half.
    """

    # dot
    E_e: float = 1000.0
    E_h: float = 400.0
    V_ee: float = 20.0
    V_hh: float = 30.0
    V_eh_s: float = -20.0
    V_eh_a: float = -15.0
    V_x1: float = 0.0
    V_x2: float = 0.0
    Gamma: float = 1.0
    gamma: float = 0.01
    T: float = 5.0
    V_bias: float | None = None
    Phi_gate: float | None = None
    Gamma_1: float | None = None
    Gamma_2: float | None = None
    gamma_e: float | None = None
    gamma_h: float | None = None

    # scheme
    m_e: float = 0.5
    m_h: float = 1.5
    spin_orbit: bool = True
    symmetry: Symmetry = Symmetry.AXIAL

    # gamma/Gamma sweep
    sweep_min: float = 1e-3
    sweep_max: float = 1e3
    sweep_steps: int = 61
    sweep_scale: Literal["log", "linear"] = "log"
    schemes: list[Literal["flat", "tall"]] = ["flat", "tall"]
    deltas: list[float] = [0.0, 0.2, 0.4]

    # spectrum
    omega_min: float | None = None
    omega_max: float | None = None
    omega_steps: int = 2001

    # cavity
    cavity_phi: float = math.pi / 4
    cavity_theta_steps: int = 50
    cavity_deltas: list[float] = [0.1, 0.2, 0.4]
    cavity_gamma: float = 0.01
    cavity_method: CavityMethod = CavityMethod.EIGEN

    # simulation
    seed: int | None = None
    trajectories: int | None = None
    photons: int = 2
    initial_level: Level = Level.BIEXCITON
    prepare_time: float = 0.0
    prepare_inward: float = 1.0
    prepare_outward: float = 1.0

    # display
    energy_unit: str = "Gamma"
    unit_scale: float = 1.0

    class Config:
        extra = "forbid"
        validate_assignment = True

    @validator("schemes", "deltas", "cavity_deltas", pre=True)
    def split_list(cls, value: Any) -> Any:  # noqa: N805
        """Accept comma separated lists."""
        if isinstance(value, str):
            return [item.strip() for item in value.split(",") if item.strip()]
        return value

    @validator("omega_steps", "cavity_theta_steps", "photons")
    def at_least_two(cls, value: int, field: Any) -> int:  # noqa: N805
        """Counts that define grids or streams."""
        minimum = 1 if field.name == "photons" else 2
        if value < minimum:
            raise ValueError(f"must be >= {minimum}")
        return value

    @root_validator(skip_on_failure=True)
    def check_ranges(cls, values: dict[str, Any]) -> dict[str, Any]:  # noqa: N805
        """Sweep bounds must be ordered."""
        if not values["sweep_min"] < values["sweep_max"]:
            raise ValueError("sweep_min must be < sweep_max")
        if values["sweep_steps"] < 2:
            raise ValueError("sweep_steps must be >= 2")
        if values["sweep_scale"] == "log" and values["sweep_min"] <= 0:
            raise ValueError("log sweeps need sweep_min > 0")
        lo, hi = values["omega_min"], values["omega_max"]
        if lo is not None and hi is not None and not lo < hi:
            raise ValueError("omega_min must be < omega_max")
        return values

    def dot(self) -> DotParameters:
        """Dot parameters, resonant bias and gate unless given."""
        values = {name: getattr(self, name) for name in DOT_FIELDS}
        if values["V_bias"] is None:
            values["V_bias"] = self.E_e + self.E_h
        if values["Phi_gate"] is None:
            values["Phi_gate"] = (self.E_e - self.E_h) / 2
        return DotParameters(**values)

    def scheme(self) -> LevelScheme:
        """Scheme classified from m_e, m_h, spin_orbit and symmetry."""
        return classify_scheme(self.m_e, self.m_h, self.spin_orbit, self.symmetry)

    def ratios(self) -> numpy.ndarray:
        """gamma/Gamma values of the sweep."""
        return sweep_grid(self.sweep_min, self.sweep_max, self.sweep_steps, self.sweep_scale)

    def thetas(self) -> numpy.ndarray:
        """Cavity misalignment angles."""
        return theta_grid(self.cavity_theta_steps)

    def schedule(self) -> list[SchedulePhase] | None:
        """Preparation phase followed by resonant tunneling, if configured."""
        if self.prepare_time <= 0:
            return None
        return [
            SchedulePhase(self.prepare_time, self.prepare_inward, self.prepare_outward)
        ]


FIELDS = tuple(RunConfig.__fields__)


def load_config(path: Path | None = None) -> RunConfig:
    """Read and validate a configuration file.

    Args:
        path (Path | None): File to read, defaults only when None.

    Raises:
        ConfigError: Unreadable file, unknown key or invalid value. The message
            names the line and, for unknown keys, the nearest valid key.

    Returns:
        RunConfig: Validated configuration.
    """
    if path is None:
        return RunConfig()
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err

    values: dict[str, str] = {}
    lines: dict[str, int] = {}
    for binding in parse_stream(io.StringIO(text)):
        line = binding.original.line
        if binding.error:
            raise ConfigError(f"{path}:{line}: cannot parse {binding.original.string.strip()!r}")
        if binding.key is None:
            continue
        if binding.key not in FIELDS:
            nearest = get_close_matches(binding.key, FIELDS, n=1)
            hint = f", did you mean {nearest[0]!r}?" if nearest else ""
            raise ConfigError(f"{path}:{line}: unknown key {binding.key!r}{hint}")
        if binding.value is None:
            raise ConfigError(f"{path}:{line}: key {binding.key!r} has no value")
        if binding.key in values:
            logger.warning(f"{path}:{line}: {binding.key} set again, later value wins")
        values[binding.key] = binding.value
        lines[binding.key] = line

    try:
        config = RunConfig.parse_obj(values)
    except ValidationError as err:
        first = err.errors()[0]
        key = str(first["loc"][0])
        where = f"{path}:{lines[key]}" if key in lines else str(path)
        raise ConfigError(f"{where}: invalid value for {key}: {first['msg']}") from err
    logger.debug(f"loaded {len(values)} keys from {path}")
    return config
