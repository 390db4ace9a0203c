"""Rate graph of the lumped dot levels and its linear-algebra solutions.

The graph is built from single-carrier moves between the sixteen product
states. An exciton product state such as |e h-bar> belongs with weight 1/2 to
each of its two time-reversal combinations, which is how the tall-dot rates
3/2 gamma and 1/2 gamma arise. Rates into and out of a lumped level are
averaged over its members.
"""

import dataclasses
import math
from collections import defaultdict
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy
import pandas
from loguru import logger
from scipy.linalg import lu_factor, lu_solve, solve
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components

from qdturnstile.lib.exceptions import DomainError, SingularGeneratorError
from qdturnstile.lib.scheme import named_scheme, radiative_rates
from qdturnstile.lib.thermal import fermi_occupations
from qdturnstile.schema.models import (
    CascadeProbabilities,
    DotParameters,
    Level,
    LevelScheme,
    SchemeClass,
)

ELECTRONS = ("e", "ebar")
HOLES = ("h", "hbar")
LEVELS: tuple[Level, ...] = tuple(Level)

# time-reversal combinations reached from an exciton product state
_PRODUCT_EXCITONS = {
    frozenset({"e", "h"}): ("eh+", "eh-"),
    frozenset({"ebar", "hbar"}): ("eh+", "eh-"),
    frozenset({"e", "hbar"}): ("ehbar+", "ehbar-"),
    frozenset({"ebar", "h"}): ("ehbar+", "ehbar-"),
}

_CHARGED_LEVELS = {
    (0, 0): Level.GROUND,
    (1, 0): Level.ELECTRON,
    (0, 1): Level.HOLE,
    (2, 0): Level.ELECTRON_PAIR,
    (0, 2): Level.HOLE_PAIR,
    (2, 1): Level.NEGATIVE_TRION,
    (1, 2): Level.POSITIVE_TRION,
    (2, 2): Level.BIEXCITON,
}


@dataclass(frozen=True)
class Edge:
    """Directed edge of the rate graph.

    Attributes:
        source (Level): Origin.
        target (Level): Destination.
        rate (float): Transition rate.
        transition (int): Photon transition 1..4, 0 for tunneling.
        inward (bool): Tunneling of a carrier into the dot.
    """

    source: Level
    target: Level
    rate: float
    transition: int = 0
    inward: bool = False

    @property
    def kind(self) -> str:
        """``tunnel`` or ``photon:k``."""
        return f"photon:{self.transition}" if self.transition else "tunnel"


@dataclass(frozen=True)
class RateGraph:
    """Continuous-time Markov generator over the lumped levels.

    The generator uses the column convention Q[j, i] = rate i -> j, so columns
    sum to zero.
    """

    levels: tuple[Level, ...]
    multiplicity: dict[Level, int]
    edges: tuple[Edge, ...]
    scheme: SchemeClass

    def index(self, label: Level | str) -> int:
        """Position of a level in ``levels``."""
        return self.levels.index(Level(label))

    def photon_edges(self, transition: int | None = None) -> list[Edge]:
        """Photon edges, optionally of one transition only."""
        return [
            edge
            for edge in self.edges
            if edge.transition and transition in (None, edge.transition)
        ]

    def generator(self) -> numpy.ndarray:
        """Full generator including photon gain terms."""
        q = numpy.zeros((len(self.levels), len(self.levels)))
        for edge in self.edges:
            i, j = self.index(edge.source), self.index(edge.target)
            q[j, i] += edge.rate
            q[i, i] -= edge.rate
        return q

    def loss_generator(self) -> numpy.ndarray:
        """Generator with photon emission as pure loss."""
        q = self.generator()
        for edge in self.photon_edges():
            q[self.index(edge.target), self.index(edge.source)] -= edge.rate
        return q

    def adjacency(self, photons: bool = False) -> csr_matrix:
        """Sparse adjacency of tunneling edges (and photon edges if asked)."""
        size = len(self.levels)
        rows, cols = [], []
        for edge in self.edges:
            if edge.transition and not photons:
                continue
            rows.append(self.index(edge.source))
            cols.append(self.index(edge.target))
        return csr_matrix(
            (
                numpy.ones(len(rows)),
                (numpy.array(rows, dtype=int), numpy.array(cols, dtype=int)),
            ),
            shape=(size, size),
        )


def _product_level(carriers: frozenset[str]) -> tuple[Level | str, ...]:
    n_e = sum(c in carriers for c in ELECTRONS)
    n_h = sum(c in carriers for c in HOLES)
    if (n_e, n_h) == (1, 1):
        return _PRODUCT_EXCITONS[carriers]
    return (_CHARGED_LEVELS[(n_e, n_h)],)


def _level_of(member: Level | str, sch: LevelScheme) -> Level:
    if isinstance(member, Level):
        return member
    return Level.BRIGHT if member in sch.bright_excitons else Level.DARK


def _members(sch: LevelScheme) -> dict[Level, list[list[frozenset[str]]]]:
    """Product-state components of every member of every lumped level."""
    members: dict[Level, list[list[frozenset[str]]]] = defaultdict(list)
    carriers = (*ELECTRONS, *HOLES)
    states = [
        frozenset(c for c, on in zip(carriers, bits, strict=True) if on)
        for bits in numpy.ndindex(2, 2, 2, 2)
    ]
    excitons: dict[str, list[frozenset[str]]] = defaultdict(list)
    for state in states:
        targets = _product_level(state)
        if isinstance(targets[0], Level):
            members[targets[0]].append([state])
        else:
            for label in targets:
                excitons[label].append(state)
    for label in sorted(excitons):
        members[_level_of(label, sch)].append(excitons[label])
    return members


def _move_rates(
    p: DotParameters, at_resonance: bool
) -> dict[tuple[str, bool], float]:
    """Rate of one carrier move keyed by (carrier kind, inward)."""
    if at_resonance:
        p_e = p_h = 0.5
    else:
        occ = fermi_occupations(p)
        p_e, p_h = occ.p_e, occ.p_h
    return {
        ("e", True): 2 * p.tunnel_e * p_e,
        ("e", False): 2 * p.tunnel_e * (1 - p_e),
        ("h", True): 2 * p.tunnel_h * p_h,
        ("h", False): 2 * p.tunnel_h * (1 - p_h),
    }


def _tunnel_edges(
    sch: LevelScheme, moves: dict[tuple[str, bool], float]
) -> list[Edge]:
    members = _members(sch)
    rates: dict[tuple[Level, Level, bool], float] = defaultdict(float)
    for source, source_members in members.items():
        weight = 1 / len(source_members)
        for components in source_members:
            share = weight / len(components)
            for state in components:
                for carrier in (*ELECTRONS, *HOLES):
                    inward = carrier not in state
                    moved = state | {carrier} if inward else state - {carrier}
                    rate = moves[(carrier[0], inward)]
                    targets = _product_level(frozenset(moved))
                    for target in targets:
                        level = _level_of(target, sch)
                        rates[(source, level, inward)] += share * rate / len(targets)
    return [
        Edge(source, target, rate, inward=inward)
        for (source, target, inward), rate in rates.items()
        if rate > 0
    ]


def _photon_edges(p: DotParameters, sch: LevelScheme) -> list[Edge]:
    rates = radiative_rates(p, sch)
    total = sum(rates.values())
    candidates = [
        Edge(Level.BIEXCITON, Level.BRIGHT, total, transition=1),
        Edge(Level.BRIGHT, Level.GROUND, total / len(rates), transition=2),
        Edge(Level.POSITIVE_TRION, Level.HOLE, total / 2, transition=3),
        Edge(Level.NEGATIVE_TRION, Level.ELECTRON, total / 2, transition=4),
    ]
    return [edge for edge in candidates if edge.rate > 0]


def build_rate_graph(
    p: DotParameters, sch: LevelScheme, at_resonance: bool = True
) -> RateGraph:
    """Rate graph over the lumped levels of a flat or tall dot.

    At resonance every single-carrier move has rate gamma. Off resonance an
    inward move has rate 2 gamma p and an outward move 2 gamma (1 - p), with p
    the reservoir occupation.

    Args:
        p (DotParameters): Dot parameters.
        sch (LevelScheme): Flat or tall scheme.
        at_resonance (bool): Use resonant tunneling rates.

    Raises:
        DomainError: Unsupported scheme.

    Returns:
        RateGraph: Graph with tunneling and photon edges.
    """
    if sch.scheme_class not in (
        SchemeClass.FLAT_CYLINDRICAL,
        SchemeClass.TALL_CYLINDRICAL,
    ):
        raise DomainError(
            f"rate graphs are built for flat and tall dots, not {sch.scheme_class.value}"
        )
    edges = _tunnel_edges(sch, _move_rates(p, at_resonance)) + _photon_edges(p, sch)
    multiplicity = {level: len(m) for level, m in _members(sch).items()}
    logger.debug(
        f"{sch.scheme_class.value} rate graph: {len(edges)} edges, "
        f"gamma_e={p.tunnel_e}, gamma_h={p.tunnel_h}, resonance={at_resonance}"
    )
    return RateGraph(
        levels=LEVELS,
        multiplicity=multiplicity,
        edges=tuple(edges),
        scheme=sch.scheme_class,
    )


def _reachable(g: RateGraph, starts: Iterable[int], photons: bool = False) -> set[int]:
    adjacency = g.adjacency(photons=photons)
    found: set[int] = set()
    for start in starts:
        found.update(
            int(i)
            for i in breadth_first_order(
                adjacency, start, directed=True, return_predecessors=False
            )
        )
    return found


def _closed_levels(g: RateGraph, levels: Iterable[int]) -> list[Level]:
    """Levels from which no photon can ever be emitted by tunneling alone."""
    sources = {g.index(edge.source) for edge in g.photon_edges()}
    reverse = g.adjacency().T.tocsr()
    leaking: set[int] = set()
    for source in sources:
        leaking.update(
            int(i)
            for i in breadth_first_order(
                reverse, source, directed=True, return_predecessors=False
            )
        )
    return [g.levels[i] for i in levels if i not in leaking]


def cascade_probabilities(
    g: RateGraph, initial: Level | str = Level.BIEXCITON
) -> CascadeProbabilities:
    """Probabilities that the next photon is on transition k.

    P_k starts from ``initial``, P_1k from the exciton level reached by
    transition 1. Both come out of one LU factorization of the loss-only
    generator restricted to the levels reachable by tunneling.

    Args:
        g (RateGraph): Rate graph.
        initial (Level | str): Starting level, the biexciton by default.

    Raises:
        SingularGeneratorError: A reachable level never emits a photon.

    Returns:
        CascadeProbabilities: P1..P4 and P11..P14.
    """
    starts = [g.index(initial), g.index(Level.BRIGHT)]
    reachable = sorted(_reachable(g, starts))
    closed = _closed_levels(g, reachable)
    if closed:
        raise SingularGeneratorError(
            "transient generator is singular: no photon loss from "
            + ", ".join(level.value for level in closed)
        )
    q = g.loss_generator()[numpy.ix_(reachable, reachable)]
    rhs = numpy.zeros((len(reachable), 2))
    for column, start in enumerate(starts):
        rhs[reachable.index(start), column] = -1.0
    occupancy = lu_solve(lu_factor(q), rhs)
    logger.debug(f"occupancy solve on {len(reachable)} levels from {Level(initial).value}")

    probabilities = numpy.zeros((2, 5))
    for edge in g.photon_edges():
        i = g.index(edge.source)
        if i in reachable:
            probabilities[:, edge.transition] += edge.rate * occupancy[reachable.index(i)]
    first, after = probabilities
    return CascadeProbabilities(
        P1=first[1],
        P2=first[2],
        P3=first[3],
        P4=first[4],
        P11=after[1],
        P12=after[2],
        P13=after[3],
        P14=after[4],
    )


def closed_cascade_probabilities(
    p: DotParameters, sch: LevelScheme
) -> CascadeProbabilities:
    """Closed-form emission probabilities after preparation of the biexciton.

    Args:
        p (DotParameters): Dot parameters, electron and hole rates equal to gamma.
        sch (LevelScheme): Flat or tall scheme.

    Raises:
        DomainError: Other schemes, or no rates at all.

    Returns:
        CascadeProbabilities: P1..P4 and P11..P14.
    """
    g = p.gamma
    match sch.scheme_class:
        case SchemeClass.FLAT_CYLINDRICAL:
            G = p.Gamma
            d = 2 * G**2 + 15 * G * g + 24 * g**2
            p2 = p11 = 6 * g**2
            p3 = 2 * G * g + 6 * g**2
            p13 = 3 * G * g + 6 * g**2
        case SchemeClass.TALL_CYLINDRICAL:
            G = p.Gamma_t
            d = G**2 + 9 * G * g + 16 * g**2
            p2 = p11 = 4 * g**2
            p3 = G * g + 4 * g**2
            p13 = 2 * G * g + 4 * g**2
        case _:
            raise DomainError(f"no closed form for {sch.scheme_class.value} schemes")
    if d == 0:
        raise DomainError("closed forms need Gamma > 0 or gamma > 0")
    return CascadeProbabilities(
        P1=1 - p2 / d - 2 * p3 / d,
        P2=p2 / d,
        P3=p3 / d,
        P4=p3 / d,
        P11=p11 / d,
        P12=1 - p11 / d - 2 * p13 / d,
        P13=p13 / d,
        P14=p13 / d,
    )


def no_tunnel_pair_fraction(
    p: DotParameters, sch: LevelScheme | None = None
) -> float:
    """Probability that photon 2 follows photon 1 without a tunneling event.

    Args:
        p (DotParameters): Dot parameters.
        sch (LevelScheme | None): Scheme; tall dots use Gamma_1.

    Raises:
        DomainError: Gamma = 0.

    Returns:
        float: Gamma / (Gamma + 4 gamma).
    """
    tall = sch is not None and sch.scheme_class is SchemeClass.TALL_CYLINDRICAL
    rate = p.rate_1 if tall else p.Gamma
    if not rate > 0:
        raise DomainError("pair fraction needs an emission rate > 0")
    return rate / (rate + 2 * p.tunnel_e + 2 * p.tunnel_h)


def mean_interphoton_time(p: DotParameters, sch: LevelScheme) -> float:
    """Closed-form steady-state mean time between photons.

    Args:
        p (DotParameters): Dot parameters.
        sch (LevelScheme): Flat or tall scheme.

    Raises:
        DomainError: Other schemes.

    Returns:
        float: Mean interphoton time, ``math.inf`` without tunneling.
    """
    g = p.gamma
    if sch.scheme_class not in (
        SchemeClass.FLAT_CYLINDRICAL,
        SchemeClass.TALL_CYLINDRICAL,
    ):
        raise DomainError(f"no closed form for {sch.scheme_class.value} schemes")
    if g == 0 or p.Gamma == 0:
        return math.inf
    if sch.scheme_class is SchemeClass.FLAT_CYLINDRICAL:
        return 1 / g + 2 / p.Gamma
    Gt = p.Gamma_t
    return (
        8 / (9 * g)
        + 2 / Gt
        + (2 / 9) * (5 * Gt + 24 * g) / (3 * Gt**2 + 28 * Gt * g + 48 * g**2)
    )


def stationary_distribution(g: RateGraph) -> numpy.ndarray:
    """Stationary distribution of the full generator.

    Args:
        g (RateGraph): Rate graph.

    Raises:
        SingularGeneratorError: The chain is not irreducible.

    Returns:
        numpy.ndarray: Probabilities in ``g.levels`` order.
    """
    n_components, _ = connected_components(
        g.adjacency(photons=True), directed=True, connection="strong"
    )
    if n_components != 1:
        raise SingularGeneratorError(
            f"no unique stationary state: {n_components} strongly connected components"
        )
    a = g.generator()
    a[-1, :] = 1.0
    b = numpy.zeros(len(g.levels))
    b[-1] = 1.0
    return solve(a, b)


def _photon_flux(g: RateGraph, pi: numpy.ndarray) -> float:
    return float(sum(edge.rate * pi[g.index(edge.source)] for edge in g.photon_edges()))


def stationary_interphoton_time(g: RateGraph) -> float:
    """Mean time between photons from the stationary photon flux.

    Args:
        g (RateGraph): Rate graph.

    Returns:
        float: 1 / flux, ``math.inf`` when no stationary emission exists.
    """
    try:
        pi = stationary_distribution(g)
    except SingularGeneratorError as err:
        logger.debug(f"interphoton time is infinite: {err}")
        return math.inf
    flux = _photon_flux(g, pi)
    return math.inf if flux == 0 else 1 / flux


def post_emission_distribution(g: RateGraph) -> numpy.ndarray:
    """Distribution of the level right after a photon in the steady state.

    Args:
        g (RateGraph): Rate graph with a unique stationary state.

    Returns:
        numpy.ndarray: Probabilities in ``g.levels`` order.
    """
    pi = stationary_distribution(g)
    nu = numpy.zeros(len(g.levels))
    for edge in g.photon_edges():
        nu[g.index(edge.target)] += edge.rate * pi[g.index(edge.source)]
    return nu / nu.sum()


def cascade_sweep(
    p: DotParameters, schemes: Sequence[str], ratios: Sequence[float]
) -> pandas.DataFrame:
    """Cascade probabilities and the no-tunneling fraction against gamma/Gamma.

    Args:
        p (DotParameters): Base parameters; gamma is replaced by ratio * Gamma.
        schemes (Sequence[str]): ``flat`` and/or ``tall``.
        ratios (Sequence[float]): gamma/Gamma values.

    Returns:
        pandas.DataFrame: One row per scheme and ratio.
    """
    rows = []
    for name in schemes:
        sch = named_scheme(name)
        logger.info(f"cascade sweep over {len(ratios)} points, {name} dot")
        for ratio in ratios:
            q = dataclasses.replace(
                p, gamma=ratio * p.Gamma, gamma_e=None, gamma_h=None
            )
            probabilities = cascade_probabilities(build_rate_graph(q, sch))
            rows.append(
                {
                    "scheme": name,
                    "gamma_over_Gamma": ratio,
                    **probabilities.as_dict(),
                    "P_star": no_tunnel_pair_fraction(q, sch),
                }
            )
    return pandas.DataFrame(rows)
