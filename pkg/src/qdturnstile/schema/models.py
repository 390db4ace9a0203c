"""Models for qdturnstile.

Value types shared between the numerical modules. Energies are dimensionless in
units of the radiative rate Gamma unless a display unit is configured.
"""

import math
from dataclasses import dataclass
from enum import Enum, StrEnum

import numpy
from loguru import logger

from qdturnstile.lib.exceptions import DomainError


@dataclass(frozen=True)
class DotParameters:
    """Dot parameters: single-particle energies, Coulomb elements, rates and voltages.

    Attributes:
        E_e (float): Quasi-particle electron level.
        E_h (float): Quasi-particle hole level.
        V_ee (float): Electron-electron repulsion.
        V_hh (float): Hole-hole repulsion.
        V_eh_s (float): Direct electron-hole element of a parallel pair (attractive, <= 0).
        V_eh_a (float): Direct electron-hole element of an antiparallel pair (attractive, <= 0).
        V_x1 (float): Exchange element coupling |eh> and |e-bar h-bar>.
        V_x2 (float): Exchange element coupling |e h-bar> and |e-bar h>.
        Gamma (float): Spontaneous emission rate.
        gamma (float): Single-channel tunneling rate.
        T (float): Thermal energy k_B T.
        V_bias (float): Bias energy eV.
        Phi_gate (float): Gate energy e Phi.
        Gamma_1 (float | None): Tall-dot rate of the bright doublet, defaults to Gamma.
        Gamma_2 (float | None): Tall-dot rate of the bright singlet, defaults to Gamma.
        gamma_e (float | None): Electron tunneling rate, defaults to gamma.
        gamma_h (float | None): Hole tunneling rate, defaults to gamma.
    """

    E_e: float
    E_h: float
    V_ee: float
    V_hh: float
    V_eh_s: float
    V_eh_a: float
    V_x1: float
    V_x2: float
    Gamma: float
    gamma: float
    T: float
    V_bias: float
    Phi_gate: float
    Gamma_1: float | None = None
    Gamma_2: float | None = None
    gamma_e: float | None = None
    gamma_h: float | None = None

    def __post_init__(self) -> None:
        """Reject negative or non-finite rates."""
        for name in ("Gamma", "gamma", "Gamma_1", "Gamma_2", "gamma_e", "gamma_h"):
            value = getattr(self, name)
            if value is None:
                continue
            if not math.isfinite(value) or value < 0:
                raise DomainError(f"{name} must be a finite rate >= 0, got {value}")

    @property
    def rate_1(self) -> float:
        """Emission rate of each member of the tall-dot bright doublet."""
        return self.Gamma if self.Gamma_1 is None else self.Gamma_1

    @property
    def rate_2(self) -> float:
        """Emission rate parameter of the tall-dot bright singlet."""
        return self.Gamma if self.Gamma_2 is None else self.Gamma_2

    @property
    def Gamma_t(self) -> float:  # noqa: N802
        """Total tall-dot rate Gamma_1 + Gamma_2."""
        return self.rate_1 + self.rate_2

    @property
    def tunnel_e(self) -> float:
        """Electron tunneling rate."""
        return self.gamma if self.gamma_e is None else self.gamma_e

    @property
    def tunnel_h(self) -> float:
        """Hole tunneling rate."""
        return self.gamma if self.gamma_h is None else self.gamma_h

    def physical_warnings(self) -> list[str]:
        """List the soft physical invariants these parameters violate.

        Returns:
            list[str]: Human readable messages, empty when all hold.
        """
        warnings = []
        if not self.V_hh > self.V_ee > 0:
            warnings.append(
                f"expected V_hh > V_ee > 0, got V_hh={self.V_hh}, V_ee={self.V_ee}"
            )
        if self.V_eh_s > 0 or self.V_eh_a > 0:
            warnings.append(
                "electron-hole direct elements should be attractive (<= 0), "
                f"got V_eh_s={self.V_eh_s}, V_eh_a={self.V_eh_a}"
            )
        for message in warnings:
            logger.warning(message)
        return warnings


@dataclass(frozen=True)
class DotState:
    """One of the sixteen basis states of the dot.

    Attributes:
        n_e (int): Electrons in the upper level, 0..2.
        n_h (int): Holes in the lower level, 0..2.
        s (int): +1 for |eh t>, -1 for |e h-bar t>, 0 outside the exciton manifold.
        t (int): +1 time-even, -1 time-odd, 0 outside the exciton manifold.
        member (int): Index inside a charge +-1 doublet (0 or 1), 0 otherwise.
    """

    n_e: int
    n_h: int
    s: int = 0
    t: int = 0
    member: int = 0

    def __post_init__(self) -> None:
        """Validate the quantum numbers."""
        if self.n_e not in (0, 1, 2) or self.n_h not in (0, 1, 2):
            raise DomainError(f"occupations must be 0..2, got {self.n_e}, {self.n_h}")
        if self.s not in (-1, 0, 1) or self.t not in (-1, 0, 1):
            raise DomainError(f"s and t must be in (-1, 0, 1), got {self.s}, {self.t}")
        exciton = self.n_e == 1 and self.n_h == 1
        if exciton and (self.s == 0 or self.t == 0):
            raise DomainError("exciton states need s != 0 and t != 0")
        if not exciton and (self.s != 0 or self.t != 0):
            raise DomainError(
                f"s = t = 0 is required outside the exciton manifold, got {self}"
            )
        if self.member not in (0, 1) or (self.member == 1 and not self.is_doublet):
            raise DomainError(f"invalid doublet member {self.member} for {self}")

    @property
    def is_doublet(self) -> bool:
        """Charge +-1 states come in time-reversal doublets."""
        return (self.n_e + self.n_h) % 2 == 1

    @property
    def manifold(self) -> tuple[int, int]:
        """The (n_e, n_h) charge configuration of the state."""
        return (self.n_e, self.n_h)


class SchemeClass(Enum):
    """Level scheme classes of the one-exciton multiplet."""

    FLAT_CYLINDRICAL = "FlatCylindrical"
    TALL_CYLINDRICAL = "TallCylindrical"
    HIGH_M = "HighM"
    NO_SPIN_ORBIT = "NoSpinOrbit"
    GENERIC_TIME_REVERSAL = "GenericTimeReversal"
    ALL_DARK = "AllDark"


class Level(StrEnum):
    """Lumped levels of the rate graph."""

    GROUND = "G"
    ELECTRON = "e"
    HOLE = "h"
    ELECTRON_PAIR = "ee"
    HOLE_PAIR = "hh"
    BRIGHT = "X_bright"
    DARK = "X_dark"
    NEGATIVE_TRION = "T-"
    POSITIVE_TRION = "T+"
    BIEXCITON = "XX"


@dataclass(frozen=True)
class LevelScheme:
    """Classified one-exciton multiplet.

    ``bright_excitons`` starts with the cascade exciton, followed by its bright
    time-reversal partner when the scheme has a bright doublet.
    """

    scheme_class: SchemeClass
    m_e: float
    m_h: float
    bright_excitons: tuple[str, ...]
    dark_excitons: tuple[str, ...]
    entanglement_capable: bool
    cascade_members: tuple[str, ...] = ()

    @property
    def cascade_exciton(self) -> str:
        """Exciton whose energy defines omega_2."""
        if not self.bright_excitons:
            raise DomainError(f"{self.scheme_class.value} has no bright exciton")
        return self.bright_excitons[0]


@dataclass(frozen=True)
class TransitionTable:
    """Photon frequencies of the four transitions with their source and target levels."""

    omega_1: float
    omega_2: float
    omega_3: float
    omega_4: float
    transitions: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class Occupations:
    """Fermi-Dirac occupations of the electron and hole reservoirs."""

    p_e: float
    p_h: float

    def __post_init__(self) -> None:
        """Occupations are probabilities."""
        for name in ("p_e", "p_h"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class SpectrumLine:
    """A single emission line."""

    label: str
    omega: float
    intensity: float
    width: float


@dataclass(frozen=True)
class CascadeProbabilities:
    """Emission probabilities of the first photon (P_k) and of the photon after transition 1 (P_1k)."""

    P1: float
    P2: float
    P3: float
    P4: float
    P11: float
    P12: float
    P13: float
    P14: float

    def as_dict(self) -> dict[str, float]:
        """Probabilities keyed by name, in transition order."""
        return {
            "P1": self.P1,
            "P2": self.P2,
            "P3": self.P3,
            "P4": self.P4,
            "P11": self.P11,
            "P12": self.P12,
            "P13": self.P13,
            "P14": self.P14,
        }


@dataclass(frozen=True)
class PhotonRecord:
    """Time stamped emission event of one trajectory."""

    time: float
    transition: int
    polarization: str | None = None


@dataclass(frozen=True)
class SchedulePhase:
    """Piecewise-constant tunneling phase.

    Attributes:
        duration (float): Phase length, ``math.inf`` for an open-ended phase.
        inward (float): Multiplier on tunneling into the dot.
        outward (float): Multiplier on tunneling out of the dot.
    """

    duration: float
    inward: float = 1.0
    outward: float = 1.0

    def __post_init__(self) -> None:
        """Durations are positive, multipliers non-negative."""
        if not self.duration > 0:
            raise DomainError(f"phase duration must be > 0, got {self.duration}")
        if self.inward < 0 or self.outward < 0:
            raise DomainError("tunneling multipliers must be >= 0")


@dataclass(frozen=True)
class Estimate:
    """Monte Carlo estimate with its standard error and sample count."""

    value: float
    stderr: float
    samples: int

    def within(self, expected: float, sigmas: float = 3.0) -> bool:
        """Whether ``expected`` lies within ``sigmas`` standard errors."""
        return abs(self.value - expected) <= sigmas * self.stderr


@dataclass(frozen=True, eq=False)
class PolarizationDensity:
    """Two-photon polarization density operator in the basis xx, xy, yx, yy."""

    rho: numpy.ndarray

    def __post_init__(self) -> None:
        """The operator is a 4x4 matrix."""
        if self.rho.shape != (4, 4):
            raise DomainError(f"expected a 4x4 density operator, got {self.rho.shape}")

    @property
    def trace(self) -> float:
        """Real part of the trace."""
        return float(numpy.trace(self.rho).real)

    @property
    def hermitian_error(self) -> float:
        """Largest deviation from Hermiticity."""
        return float(numpy.abs(self.rho - self.rho.conj().T).max())

    @property
    def min_eigenvalue(self) -> float:
        """Smallest eigenvalue of the Hermitian part."""
        hermitian = (self.rho + self.rho.conj().T) / 2
        return float(numpy.linalg.eigvalsh(hermitian).min())

    @property
    def correlation(self) -> float:
        """Populations of the matching polarizations, <xx> + <yy>."""
        return float((self.rho[0, 0] + self.rho[3, 3]).real)

    def check(self, tol: float = 1e-10) -> None:
        """Raise if the operator is not a valid density operator.

        Args:
            tol (float): Tolerance on Hermiticity, trace and positivity.

        Raises:
            DomainError: When an invariant is violated.
        """
        if self.hermitian_error > tol:
            raise DomainError(f"density not Hermitian (error {self.hermitian_error})")
        if abs(self.trace - 1.0) > tol:
            raise DomainError(f"density trace is {self.trace}, expected 1")
        if self.min_eigenvalue < -tol:
            raise DomainError(
                f"density not positive semidefinite (min eigenvalue {self.min_eigenvalue})"
            )


@dataclass(frozen=True)
class EntanglementReport:
    """Concurrence, base-2 entanglement entropy and the pair fraction used."""

    concurrence: float
    entropy: float
    pair_fraction: float


@dataclass(frozen=True)
class CavityGeometry:
    """Misaligned cavity acting on the second cascade photon.

    Attributes:
        theta (float): Polar misalignment angle in [0, pi/2].
        phi (float): Azimuth of the misalignment.
        Gamma (float): Unmodified emission rate.
        Delta (float): Exchange splitting of the bright doublet.
        gamma (float): Tunneling rate.
    """

    theta: float
    phi: float
    Gamma: float
    Delta: float
    gamma: float = 0.0

    def __post_init__(self) -> None:
        """Check the angle range and rates."""
        if not 0.0 <= self.theta <= math.pi / 2:
            raise DomainError(f"theta must lie in [0, pi/2], got {self.theta}")
        if self.Gamma < 0 or self.gamma < 0:
            raise DomainError("cavity rates must be >= 0")

    @property
    def decay_rates(self) -> tuple[float, float]:
        """Decay operator eigenvalues for the u and v polarizations."""
        return (self.Gamma * math.cos(self.theta) ** 2, self.Gamma)
