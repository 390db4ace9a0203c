"""Strong-tunneling thermal populations, emission spectra and mean emission time."""

import math
from dataclasses import dataclass

import numpy
import pandas
from loguru import logger
from scipy.special import expit

from qdturnstile.lib.exceptions import DomainError
from qdturnstile.lib.scheme import (
    exciton_state,
    level_energy,
    radiative_rates,
    transition_frequencies,
)
from qdturnstile.schema.models import (
    DotParameters,
    DotState,
    Level,
    LevelScheme,
    Occupations,
    SchemeClass,
    SpectrumLine,
)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Emission lines and the Lorentzian curve sampled on a frequency grid."""

    lines: list[SpectrumLine]
    omega: numpy.ndarray
    intensity: numpy.ndarray


def fermi_occupations(p: DotParameters) -> Occupations:
    """Fermi-Dirac occupations of the electron and hole levels.

    Args:
        p (DotParameters): Dot parameters.

    Raises:
        DomainError: T <= 0.

    Returns:
        Occupations: p_e and p_h.
    """
    if not p.T > 0:
        raise DomainError(f"temperature k_B T must be > 0, got {p.T}")
    p_e = expit(-(p.E_e - p.Phi_gate - p.V_bias / 2) / p.T)
    p_h = expit(-(p.E_h + p.Phi_gate - p.V_bias / 2) / p.T)
    return Occupations(p_e=float(p_e), p_h=float(p_h))


def level_populations(occ: Occupations, sch: LevelScheme) -> dict[Level, float]:
    """Independent-occupation populations of the lumped levels.

    The exciton manifold is split into its bright and dark parts by the number
    of bright excitons of the scheme.

    Args:
        occ (Occupations): Reservoir occupations.
        sch (LevelScheme): Scheme.

    Returns:
        dict[Level, float]: Population per level, summing to one.
    """
    pe, ph = occ.p_e, occ.p_h
    qe, qh = 1.0 - pe, 1.0 - ph
    exciton = 4 * pe * qe * ph * qh
    bright_share = len(sch.bright_excitons) / 4
    return {
        Level.GROUND: qe**2 * qh**2,
        Level.ELECTRON: 2 * pe * qe * qh**2,
        Level.HOLE: 2 * ph * qh * qe**2,
        Level.ELECTRON_PAIR: pe**2 * qh**2,
        Level.HOLE_PAIR: ph**2 * qe**2,
        Level.BRIGHT: bright_share * exciton,
        Level.DARK: (1 - bright_share) * exciton,
        Level.NEGATIVE_TRION: 2 * pe**2 * ph * qh,
        Level.POSITIVE_TRION: 2 * pe * qe * ph**2,
        Level.BIEXCITON: pe**2 * ph**2,
    }


def _line_groups(sch: LevelScheme) -> list[tuple[str, ...]]:
    """Cascade doublet first, then every other bright exciton on its own."""
    primary = tuple(x for x in sch.cascade_members if x in sch.bright_excitons)
    rest = [(x,) for x in sch.bright_excitons if x not in primary]
    return [primary, *rest]


def emission_lines(
    p: DotParameters, sch: LevelScheme, occ: Occupations | None = None
) -> list[SpectrumLine]:
    """Emission lines in the strong-tunneling regime.

    Strength is the population of the source level times the radiative rate of
    the transition. Lines of the cascade exciton are labelled ``1`` and ``2``,
    further bright excitons get primed labels.

    Args:
        p (DotParameters): Dot parameters.
        sch (LevelScheme): Scheme with at least one bright exciton.
        occ (Occupations | None): Occupations, from ``fermi_occupations`` by default.

    Returns:
        list[SpectrumLine]: One line per bright transition.
    """
    occ = fermi_occupations(p) if occ is None else occ
    pops = level_populations(occ, sch)
    table = transition_frequencies(p, sch)
    rates = radiative_rates(p, sch)
    member_pop = (pops[Level.BRIGHT] + pops[Level.DARK]) / 4
    e_xx = level_energy(p, DotState(2, 2))
    trion_rate = sum(rates.values()) / 2

    lines = []
    for prime, group in enumerate(_line_groups(sch)):
        suffix = "'" * prime
        e_x = level_energy(p, exciton_state(group[0]))
        group_rate = sum(rates[x] for x in group)
        lines.append(
            SpectrumLine(f"1{suffix}", e_xx - e_x, pops[Level.BIEXCITON] * group_rate, p.Gamma)
        )
        lines.append(SpectrumLine(f"2{suffix}", e_x, member_pop * group_rate, p.Gamma))
    lines.append(
        SpectrumLine("3", table.omega_3, pops[Level.POSITIVE_TRION] * trion_rate, p.Gamma)
    )
    lines.append(
        SpectrumLine("4", table.omega_4, pops[Level.NEGATIVE_TRION] * trion_rate, p.Gamma)
    )
    return sorted(lines, key=lambda line: line.label)


def emission_spectrum(
    p: DotParameters, sch: LevelScheme, omega: numpy.ndarray
) -> Spectrum:
    """Emission lines plus their sum of Lorentzians of FWHM Gamma.

    Args:
        p (DotParameters): Dot parameters.
        sch (LevelScheme): Scheme.
        omega (numpy.ndarray): Frequency grid.

    Raises:
        DomainError: Empty grid or zero line width.

    Returns:
        Spectrum: Lines and sampled curve.
    """
    omega = numpy.asarray(omega, dtype=float)
    if omega.size == 0:
        raise DomainError("spectrum needs a non-empty frequency grid")
    if not p.Gamma > 0:
        raise DomainError("Lorentzian rendering needs a line width Gamma > 0")
    lines = emission_lines(p, sch)
    curve = numpy.zeros_like(omega)
    for line in lines:
        half = line.width / 2
        curve += line.intensity * half / (math.pi * ((omega - line.omega) ** 2 + half**2))
    logger.debug(f"rendered {len(lines)} lines on {omega.size} frequencies")
    return Spectrum(lines=lines, omega=omega, intensity=curve)


def mean_emission_time_thermal(p: DotParameters, sch: LevelScheme) -> float:
    """Average emission time of a photon in thermal equilibrium.

    Args:
        p (DotParameters): Dot parameters.
        sch (LevelScheme): Flat or tall scheme.

    Raises:
        DomainError: Scheme is neither flat nor tall.

    Returns:
        float: 1/(2 Gamma p_e p_h) or 1/(2 Gamma_t p_e p_h), ``math.inf`` when
        nothing is emitted.
    """
    occ = fermi_occupations(p)
    match sch.scheme_class:
        case SchemeClass.FLAT_CYLINDRICAL:
            rate = p.Gamma
        case SchemeClass.TALL_CYLINDRICAL:
            rate = p.Gamma_t
        case _:
            raise DomainError(
                f"no mean emission time for {sch.scheme_class.value} schemes"
            )
    denominator = 2 * rate * occ.p_e * occ.p_h
    if denominator == 0:
        return math.inf
    return 1 / denominator


def spectrum_frames(
    spectrum: Spectrum, unit_scale: float = 1.0
) -> tuple[pandas.DataFrame, pandas.DataFrame]:
    """Line table and sampled curve as data frames.

    Args:
        spectrum (Spectrum): Result of ``emission_spectrum``.
        unit_scale (float): Display factor applied to frequencies.

    Returns:
        tuple[pandas.DataFrame, pandas.DataFrame]: ``label,omega,strength`` and
        ``omega,intensity`` tables.
    """
    lines = pandas.DataFrame(
        {
            "label": [line.label for line in spectrum.lines],
            "omega": [line.omega * unit_scale for line in spectrum.lines],
            "strength": [line.intensity for line in spectrum.lines],
        }
    )
    curve = pandas.DataFrame(
        {"omega": spectrum.omega * unit_scale, "intensity": spectrum.intensity}
    )
    return lines, curve
