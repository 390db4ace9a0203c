"""Sixteen-state dot model: level energies, transition frequencies and scheme classification."""

import itertools
from collections import defaultdict
from enum import StrEnum

from loguru import logger

from qdturnstile.lib.exceptions import DomainError
from qdturnstile.schema.models import (
    DotParameters,
    DotState,
    LevelScheme,
    SchemeClass,
    TransitionTable,
)

# (s, t) of the time-reversal exciton basis
EXCITONS: dict[str, tuple[int, int]] = {
    "eh+": (1, 1),
    "eh-": (1, -1),
    "ehbar+": (-1, 1),
    "ehbar-": (-1, -1),
}


class Symmetry(StrEnum):
    """Spatial symmetry of the confinement potential."""

    AXIAL = "axial"
    NONE = "none"


def level_energy(p: DotParameters, st: DotState) -> float:
    """Energy of a dot state relative to the quasi-particle vacuum.

    The closed expression is evaluated as written, including the s = -1 branch
    of the exciton manifold.

    Args:
        p (DotParameters): Dot parameters.
        st (DotState): State, validated on construction.

    Returns:
        float: Level energy.
    """
    n_e, n_h, s, t = st.n_e, st.n_h, st.s, st.t
    direct = p.V_eh_s + p.V_eh_a
    return (
        p.E_e * n_e
        + p.E_h * n_h
        + 0.5 * (n_e - 1) * n_e * p.V_ee
        + 0.5 * (n_h - 1) * n_h * p.V_hh
        + (s - 0.5 * n_e * n_h) * direct
        + 0.5 * s**2 * (p.V_eh_s - p.V_eh_a)
        + 0.5 * (1 + s) * t * p.V_x1
        + 0.5 * (1 - s) * t * p.V_x2
    )


def exciton_state(label: str) -> DotState:
    """DotState of an exciton label such as ``"ehbar+"``.

    Args:
        label (str): One of ``eh+``, ``eh-``, ``ehbar+``, ``ehbar-``.

    Raises:
        DomainError: Unknown label.

    Returns:
        DotState: The exciton state.
    """
    try:
        s, t = EXCITONS[label]
    except KeyError:
        raise DomainError(
            f"unknown exciton {label!r}, expected one of {sorted(EXCITONS)}"
        ) from None
    return DotState(n_e=1, n_h=1, s=s, t=t)


def enumerate_states() -> list[DotState]:
    """All sixteen basis states, doublet members listed separately."""
    states = []
    for n_e, n_h in itertools.product(range(3), repeat=2):
        if (n_e, n_h) == (1, 1):
            states.extend(exciton_state(label) for label in EXCITONS)
        elif (n_e + n_h) % 2:
            states.extend(DotState(n_e, n_h, member=m) for m in (0, 1))
        else:
            states.append(DotState(n_e, n_h))
    return states


def manifolds() -> dict[tuple[int, int], list[DotState]]:
    """Group the basis states into the nine (n_e, n_h) charge configurations."""
    grouped: dict[tuple[int, int], list[DotState]] = defaultdict(list)
    for state in enumerate_states():
        grouped[state.manifold].append(state)
    return dict(grouped)


def degeneracy(st: DotState) -> int:
    """Time-reversal degeneracy of a state (2 for charge +-1, else 1)."""
    return 2 if st.is_doublet else 1


def _check_half_integer(name: str, m: float) -> None:
    twice = 2 * m
    if twice < 1 or not float(twice).is_integer() or int(twice) % 2 != 1:
        raise DomainError(f"{name} must be a positive half-integer, got {m}")


def classify_scheme(
    m_e: float,
    m_h: float,
    spin_orbit: bool = True,
    symmetry: Symmetry | str = Symmetry.AXIAL,
) -> LevelScheme:
    """Classify the exciton multiplet of a dot.

    For axial symmetry the exciton |eh> carries M = m_e + m_h and |e h-bar>
    carries M = m_e - m_h. Dipole transitions need |M| <= 1 and the time-odd
    M = 0 exciton is dark.

    Args:
        m_e (float): Electron magnetic quantum number (half-integer >= 1/2).
        m_h (float): Hole magnetic quantum number (half-integer >= 1/2).
        spin_orbit (bool): Whether spin-orbit coupling is relevant.
        symmetry (Symmetry | str): ``axial`` or ``none``.

    Raises:
        DomainError: m_e or m_h is not a positive half-integer.

    Returns:
        LevelScheme: Classified scheme.
    """
    _check_half_integer("m_e", m_e)
    _check_half_integer("m_h", m_h)
    symmetry = Symmetry(symmetry)

    if symmetry is Symmetry.NONE:
        if spin_orbit:
            scheme = LevelScheme(
                SchemeClass.GENERIC_TIME_REVERSAL,
                m_e,
                m_h,
                bright_excitons=("eh+", "eh-", "ehbar+", "ehbar-"),
                dark_excitons=(),
                entanglement_capable=False,
                cascade_members=("eh+",),
            )
        else:
            # spin singlet |e h-bar +> is the only bright state
            scheme = LevelScheme(
                SchemeClass.NO_SPIN_ORBIT,
                m_e,
                m_h,
                bright_excitons=("ehbar+",),
                dark_excitons=("eh+", "eh-", "ehbar-"),
                entanglement_capable=False,
                cascade_members=("ehbar+",),
            )
    elif abs(m_e - m_h) == 1:
        scheme = LevelScheme(
            SchemeClass.FLAT_CYLINDRICAL,
            m_e,
            m_h,
            bright_excitons=("ehbar+", "ehbar-"),
            dark_excitons=("eh+", "eh-"),
            entanglement_capable=True,
            cascade_members=("ehbar+", "ehbar-"),
        )
    elif m_e == m_h == 0.5:
        scheme = LevelScheme(
            SchemeClass.TALL_CYLINDRICAL,
            m_e,
            m_h,
            bright_excitons=("eh+", "eh-", "ehbar+"),
            dark_excitons=("ehbar-",),
            entanglement_capable=True,
            cascade_members=("eh+", "eh-"),
        )
    elif m_e == m_h:
        scheme = LevelScheme(
            SchemeClass.HIGH_M,
            m_e,
            m_h,
            bright_excitons=("ehbar+",),
            dark_excitons=("eh+", "eh-", "ehbar-"),
            entanglement_capable=False,
            cascade_members=("ehbar+",),
        )
    else:
        scheme = LevelScheme(
            SchemeClass.ALL_DARK,
            m_e,
            m_h,
            bright_excitons=(),
            dark_excitons=tuple(EXCITONS),
            entanglement_capable=False,
        )
    logger.debug(
        f"m_e={m_e}, m_h={m_h}, spin_orbit={spin_orbit}, symmetry={symmetry.value}"
        f" -> {scheme.scheme_class.value}"
    )
    return scheme


def flat_scheme() -> LevelScheme:
    """Scheme of a flat (lens-shaped) cylindrical dot, m_e = 1/2, m_h = 3/2."""
    return classify_scheme(0.5, 1.5)


def tall_scheme() -> LevelScheme:
    """Scheme of a tall cylindrical dot, m_e = m_h = 1/2."""
    return classify_scheme(0.5, 0.5)


def named_scheme(name: str) -> LevelScheme:
    """Look up ``flat`` or ``tall``.

    Args:
        name (str): Scheme name.

    Raises:
        DomainError: Unknown name.

    Returns:
        LevelScheme: The scheme.
    """
    match name:
        case "flat":
            return flat_scheme()
        case "tall":
            return tall_scheme()
    raise DomainError(f"unknown scheme {name!r}, expected 'flat' or 'tall'")


def radiative_rates(p: DotParameters, sch: LevelScheme) -> dict[str, float]:
    """Decay rate of each bright exciton to the ground state.

    The tall-dot doublet members decay with Gamma_1 each and the bright M = 0
    singlet with 2 Gamma_2, so that the biexciton decays with 2 Gamma_t.

    Args:
        p (DotParameters): Dot parameters.
        sch (LevelScheme): Scheme.

    Returns:
        dict[str, float]: Rate per bright exciton label.
    """
    if sch.scheme_class is SchemeClass.TALL_CYLINDRICAL:
        return {"eh+": p.rate_1, "eh-": p.rate_1, "ehbar+": 2 * p.rate_2}
    return {label: p.Gamma for label in sch.bright_excitons}


def transition_frequencies(p: DotParameters, sch: LevelScheme) -> TransitionTable:
    """Photon frequencies of the cascade and of the charged-exciton decays.

    omega_3 belongs to the positive trion (e h h-bar -> h) and omega_4 to the
    negative trion (e e-bar h -> e).

    Args:
        p (DotParameters): Dot parameters.
        sch (LevelScheme): Scheme with at least one bright exciton.

    Returns:
        TransitionTable: The four frequencies.
    """
    exciton = sch.cascade_exciton
    e_x = level_energy(p, exciton_state(exciton))
    e_xx = level_energy(p, DotState(2, 2))
    omega_3 = level_energy(p, DotState(1, 2)) - level_energy(p, DotState(0, 1))
    omega_4 = level_energy(p, DotState(2, 1)) - level_energy(p, DotState(1, 0))
    return TransitionTable(
        omega_1=e_xx - e_x,
        omega_2=e_x,
        omega_3=omega_3,
        omega_4=omega_4,
        transitions=(("XX", exciton), (exciton, "G"), ("T+", "h"), ("T-", "e")),
    )


def exciton_splitting(p: DotParameters, sch: LevelScheme) -> float:
    """Splitting Delta of the bright doublet.

    Args:
        p (DotParameters): Dot parameters.
        sch (LevelScheme): Flat or tall scheme.

    Raises:
        DomainError: Scheme cannot produce entangled pairs.

    Returns:
        float: 2 V_x1 for flat dots, 2 V_x2 for tall dots.
    """
    match sch.scheme_class:
        case SchemeClass.FLAT_CYLINDRICAL:
            return 2 * p.V_x1
        case SchemeClass.TALL_CYLINDRICAL:
            return 2 * p.V_x2
    raise DomainError(
        f"{sch.scheme_class.value} has no bright doublet for entangled pairs"
    )
