"""Cascade density operator with transition 2 coupled to a misaligned cavity.

The cavity acts on the second photon through H = Delta |x><x| and the decay
operator G = Gamma cos^2(theta) |u><u| + Gamma |v><v|. Writing
sigma = 1/2 sum_ab |a><b| (x) |a><b|, the weighted part of the density is

    K = 1/2 sum_ab |a><b| (x) sqrt(G) J_ab sqrt(G),
    J_ab = int_0^inf exp(-4 gamma t) exp(M t) |a><b| exp(M^dagger t) dt,

with M = -i H - G/2.
"""

import math
from collections.abc import Iterable, Sequence
from enum import StrEnum

import numpy
import pandas
from loguru import logger
from scipy.integrate import quad_vec
from scipy.linalg import eig, expm, inv, solve_continuous_lyapunov

from qdturnstile.lib.entangle import entanglement_entropy, wootters_concurrence
from qdturnstile.lib.exceptions import DegenerateModeError, DomainError
from qdturnstile.schema.models import CavityGeometry, PolarizationDensity

# eigenvector bases worse than this fall back to the Lyapunov solve
CONDITION_LIMIT = 1e8


class CavityMethod(StrEnum):
    """Evaluation path of the time integral."""

    EIGEN = "eigen"
    LYAPUNOV = "lyapunov"
    QUADRATURE = "quadrature"


def _operators(geo: CavityGeometry) -> tuple[numpy.ndarray, numpy.ndarray]:
    """Return M = -iH - G/2 and sqrt(G) on the second photon."""
    u = numpy.array([math.cos(geo.phi), math.sin(geo.phi)])
    v = numpy.array([-math.sin(geo.phi), math.cos(geo.phi)])
    g_u, g_v = geo.decay_rates
    decay = g_u * numpy.outer(u, u) + g_v * numpy.outer(v, v)
    root = math.sqrt(g_u) * numpy.outer(u, u) + math.sqrt(g_v) * numpy.outer(v, v)
    hamiltonian = numpy.diag([geo.Delta, 0.0])
    return -1j * hamiltonian - decay / 2, root.astype(complex)


def _unit(a: int, b: int) -> numpy.ndarray:
    x = numpy.zeros((2, 2), dtype=complex)
    x[a, b] = 1.0
    return x


def _integral_eigen(
    m: numpy.ndarray, x: numpy.ndarray, gamma: float
) -> numpy.ndarray | None:
    mu, s = eig(m)
    if numpy.linalg.cond(s) > CONDITION_LIMIT:
        return None
    s_inv = inv(s)
    y = s_inv @ x @ s_inv.conj().T
    return s @ (y / (4 * gamma - mu[:, None] - mu.conj()[None, :])) @ s.conj().T


def _integral_lyapunov(m: numpy.ndarray, x: numpy.ndarray, gamma: float) -> numpy.ndarray:
    a = m - 2 * gamma * numpy.eye(2)
    return solve_continuous_lyapunov(a, -x)


def _weighted_part(geo: CavityGeometry, method: CavityMethod) -> numpy.ndarray:
    m, root = _operators(geo)
    if method is CavityMethod.QUADRATURE:
        sigma = numpy.zeros((4, 4), dtype=complex)
        sigma[numpy.ix_([0, 3], [0, 3])] = 0.5
        eye = numpy.eye(2)

        def integrand(t: float) -> numpy.ndarray:
            a = numpy.kron(eye, root @ expm(m * t))
            k = math.exp(-4 * geo.gamma * t) * (a @ sigma @ a.conj().T)
            return numpy.concatenate([k.real.ravel(), k.imag.ravel()])

        flat, error = quad_vec(integrand, 0, numpy.inf, epsabs=1e-13, epsrel=1e-11)
        logger.debug(f"quadrature error estimate {error:.2e}")
        return (flat[:16] + 1j * flat[16:]).reshape(4, 4)

    k = numpy.zeros((4, 4), dtype=complex)
    for a in range(2):
        for b in range(2):
            x = _unit(a, b)
            j = None
            if method is CavityMethod.EIGEN:
                j = _integral_eigen(m, x, geo.gamma)
                if j is None:
                    logger.debug(f"ill-conditioned eigenbasis at theta={geo.theta}, using Lyapunov")
            if j is None:
                j = _integral_lyapunov(m, x, geo.gamma)
            k += 0.5 * numpy.kron(x, root @ j @ root)
    return k


def cavity_density(
    geo: CavityGeometry, method: CavityMethod | str = CavityMethod.EIGEN
) -> PolarizationDensity:
    """Two-photon density operator with a misaligned cavity on transition 2.

    The pair fraction P is the trace of the weighted part and the remainder is
    filled with the maximally mixed state.

    Args:
        geo (CavityGeometry): Cavity geometry and rates.
        method (CavityMethod | str): ``eigen`` (closed form, default),
            ``lyapunov`` or ``quadrature``.

    Raises:
        DegenerateModeError: theta = pi/2 leaves the u mode without decay.
        DomainError: Gamma <= 0.

    Returns:
        PolarizationDensity: The density operator.
    """
    return _density_and_pair(geo, CavityMethod(method))[0]


def _density_and_pair(
    geo: CavityGeometry, method: CavityMethod
) -> tuple[PolarizationDensity, float]:
    if geo.theta >= math.pi / 2:
        raise DegenerateModeError(
            "theta = pi/2 leaves the u-polarized channel without decay, "
            "so the cascade never completes"
        )
    if not geo.Gamma > 0:
        raise DomainError("cavity density needs Gamma > 0")
    k = _weighted_part(geo, method)
    pair = float(numpy.trace(k).real)
    rho = k + (1 - pair) * numpy.eye(4) / 4
    return PolarizationDensity((rho + rho.conj().T) / 2), pair


def cavity_geometries(
    thetas: Sequence[float],
    phi: float,
    deltas: Sequence[float],
    Gamma: float = 1.0,  # noqa: N803
    gamma: float = 0.01,
) -> list[CavityGeometry]:
    """Grid of geometries with Delta given in units of Gamma."""
    return [
        CavityGeometry(theta=theta, phi=phi, Gamma=Gamma, Delta=delta * Gamma, gamma=gamma)
        for delta in deltas
        for theta in thetas
    ]


def cavity_entanglement_sweep(
    geometries: Iterable[CavityGeometry],
    method: CavityMethod | str = CavityMethod.EIGEN,
) -> pandas.DataFrame:
    """Concurrence and entropy over a grid of cavity geometries.

    Args:
        geometries (Iterable[CavityGeometry]): Grid points.
        method (CavityMethod | str): Evaluation path.

    Returns:
        pandas.DataFrame: Columns theta, phi, Delta_over_Gamma,
        gamma_over_Gamma, P, C, E.
    """
    rows = []
    for geo in geometries:
        rho, pair = _density_and_pair(geo, CavityMethod(method))
        C = wootters_concurrence(rho)
        rows.append(
            {
                "theta": geo.theta,
                "phi": geo.phi,
                "Delta_over_Gamma": geo.Delta / geo.Gamma,
                "gamma_over_Gamma": geo.gamma / geo.Gamma,
                "P": pair,
                "C": C,
                "E": entanglement_entropy(C),
            }
        )
    logger.info(f"cavity sweep finished, {len(rows)} geometries")
    return pandas.DataFrame(rows)
