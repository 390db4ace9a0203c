"""Two-photon polarization density operators, concurrence and entanglement entropy."""

import dataclasses
import math
from collections.abc import Sequence
from enum import StrEnum

import numpy
import pandas
from loguru import logger
from scipy.special import entr

from qdturnstile.lib.exceptions import DomainError
from qdturnstile.lib.kinetics import (
    build_rate_graph,
    cascade_probabilities,
    no_tunnel_pair_fraction,
)
from qdturnstile.lib.scheme import named_scheme
from qdturnstile.schema.models import (
    DotParameters,
    EntanglementReport,
    LevelScheme,
    PolarizationDensity,
    SchemeClass,
)

# basis order xx, xy, yx, yy
SIGMA_Y = numpy.array([[0, -1j], [1j, 0]])
SPIN_FLIP = numpy.kron(SIGMA_Y, SIGMA_Y)


class PairMode(StrEnum):
    """Whether photons of transitions 3 and 4 are rejected."""

    UNFILTERED = "unfiltered"
    FILTERED = "filtered"


def _check_inputs(Gamma: float, gamma: float, P: float) -> None:  # noqa: N803
    if Gamma < 0 or gamma < 0:
        raise DomainError("rates must be >= 0")
    if Gamma + 4 * gamma == 0:
        raise DomainError("Gamma + 4 gamma must be > 0")
    if not 0.0 <= P <= 1.0:
        raise DomainError(f"pair fraction must lie in [0, 1], got {P}")


def _coherence(Delta: float, Gamma: float, gamma: float) -> complex:  # noqa: N803
    return 1 / (1 + 1j * Delta / (Gamma + 4 * gamma))


def cascade_density(
    Delta: float, Gamma: float, gamma: float, P: float  # noqa: N803
) -> PolarizationDensity:
    """Polarization density of the cascade pair.

    A fraction P of the pairs is the dephased Bell pair, the rest is fully mixed.

    Args:
        Delta (float): Exchange splitting of the bright doublet.
        Gamma (float): Emission rate of transition 2.
        gamma (float): Tunneling rate.
        P (float): Pair fraction.

    Returns:
        PolarizationDensity: The two-photon density operator.
    """
    _check_inputs(Gamma, gamma, P)
    rho = numpy.eye(4, dtype=complex) * (1 - P) / 4
    rho[0, 0] += P / 2
    rho[3, 3] += P / 2
    rho[0, 3] = P / 2 * _coherence(Delta, Gamma, gamma)
    rho[3, 0] = numpy.conj(rho[0, 3])
    return PolarizationDensity(rho)


def entanglement_entropy(C: float) -> float:  # noqa: N803
    """Entanglement of formation in ebits for a concurrence C."""
    x = 0.5 + 0.5 * math.sqrt(max(0.0, 1.0 - C**2))
    return float((entr(x) + entr(1 - x)) / math.log(2))


def closed_concurrence_entropy(
    Delta: float, Gamma: float, gamma: float, P: float  # noqa: N803
) -> EntanglementReport:
    """Closed-form concurrence and entropy of ``cascade_density``.

    Negative concurrences are clipped to zero.

    Args:
        Delta (float): Exchange splitting.
        Gamma (float): Emission rate of transition 2.
        gamma (float): Tunneling rate.
        P (float): Pair fraction.

    Returns:
        EntanglementReport: C, E and P.
    """
    _check_inputs(Gamma, gamma, P)
    magnitude = 1 / math.hypot(1.0, Delta / (Gamma + 4 * gamma))
    C = max(0.0, (P * (2 * magnitude + 1) - 1) / 2)
    return EntanglementReport(
        concurrence=C, entropy=entanglement_entropy(C), pair_fraction=P
    )


def wootters_concurrence(rho: PolarizationDensity) -> float:
    """Concurrence of a two-qubit density operator.

    With rho = W W^dagger the square roots of the eigenvalues of
    rho (Y rho* Y) are the singular values of W^T Y W.

    Args:
        rho (PolarizationDensity): Valid density operator.

    Returns:
        float: Concurrence in [0, 1].
    """
    rho.check()
    hermitian = (rho.rho + rho.rho.conj().T) / 2
    w, v = numpy.linalg.eigh(hermitian)
    root = v * numpy.sqrt(numpy.clip(w, 0.0, None))
    lam = numpy.linalg.svd(root.T @ SPIN_FLIP @ root, compute_uv=False)
    return float(max(0.0, lam[0] - lam[1:].sum()))


def pair_fraction(
    mode: PairMode | str, sch: LevelScheme, p: DotParameters
) -> float:
    """Pair fraction entering the density operator.

    Unfiltered pairs use the no-tunneling fraction P*. Filtered pairs condition
    on the second photon being on transition 2: P*/P12 for flat dots and
    3 P*/(2 P12 + P*) for tall dots (horizontal detection).

    Args:
        mode (PairMode | str): ``unfiltered`` or ``filtered``.
        sch (LevelScheme): Flat or tall scheme.
        p (DotParameters): Dot parameters.

    Raises:
        DomainError: Scheme cannot entangle, or no emission rate.

    Returns:
        float: Pair fraction.
    """
    if not sch.entanglement_capable:
        raise DomainError(f"{sch.scheme_class.value} does not produce entangled pairs")
    star = no_tunnel_pair_fraction(p, sch)
    if PairMode(mode) is PairMode.UNFILTERED:
        return star
    p12 = cascade_probabilities(build_rate_graph(p, sch)).P12
    if sch.scheme_class is SchemeClass.TALL_CYLINDRICAL:
        fraction = 3 * star / (2 * p12 + star)
    else:
        fraction = star / p12
    # P12 >= P* up to rounding
    return min(1.0, fraction)


def entanglement_sweep(
    p: DotParameters,
    schemes: Sequence[str],
    ratios: Sequence[float],
    deltas: Sequence[float],
    modes: Sequence[PairMode | str] = tuple(PairMode),
) -> pandas.DataFrame:
    """Entanglement against gamma/Gamma for several splittings.

    Gamma is the emission rate of the cascade exciton: Gamma for flat dots and
    Gamma_1 for tall dots.

    Args:
        p (DotParameters): Base parameters.
        schemes (Sequence[str]): ``flat`` and/or ``tall``.
        ratios (Sequence[float]): gamma/Gamma values.
        deltas (Sequence[float]): Delta/Gamma values.
        modes (Sequence[PairMode | str]): Pair fraction modes.

    Returns:
        pandas.DataFrame: Columns gamma_over_Gamma, Delta_over_Gamma, mode,
        scheme, P, C, E.
    """
    rows = []
    for name in schemes:
        sch = named_scheme(name)
        rate = p.rate_1 if sch.scheme_class is SchemeClass.TALL_CYLINDRICAL else p.Gamma
        logger.info(f"entanglement sweep, {name} dot, {len(ratios)} x {len(deltas)} points")
        for ratio in ratios:
            q = dataclasses.replace(p, gamma=ratio * rate, gamma_e=None, gamma_h=None)
            for mode in modes:
                P = pair_fraction(mode, sch, q)
                for delta in deltas:
                    report = closed_concurrence_entropy(delta * rate, rate, q.gamma, P)
                    rows.append(
                        {
                            "gamma_over_Gamma": ratio,
                            "Delta_over_Gamma": delta,
                            "mode": PairMode(mode).value,
                            "scheme": name,
                            "P": P,
                            "C": report.concurrence,
                            "E": report.entropy,
                        }
                    )
    return pandas.DataFrame(rows)
