"""Self-test suite: closed forms against the linear solver and the Monte Carlo oracle."""

import dataclasses
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy
import pandas
from loguru import logger

from qdturnstile.core.config import RunConfig
from qdturnstile.core.settings import settings
from qdturnstile.lib.cavity import (
    CavityMethod,
    cavity_density,
    cavity_entanglement_sweep,
    cavity_geometries,
)
from qdturnstile.lib.entangle import (
    PairMode,
    cascade_density,
    closed_concurrence_entropy,
    pair_fraction,
    wootters_concurrence,
)
from qdturnstile.lib.exceptions import TurnstileError
from qdturnstile.lib.kinetics import (
    build_rate_graph,
    cascade_probabilities,
    closed_cascade_probabilities,
    mean_interphoton_time,
    no_tunnel_pair_fraction,
    stationary_interphoton_time,
)
from qdturnstile.lib.scheme import (
    classify_scheme,
    enumerate_states,
    flat_scheme,
    level_energy,
    manifolds,
    tall_scheme,
    transition_frequencies,
)
from qdturnstile.lib.thermal import (
    emission_lines,
    fermi_occupations,
    level_populations,
    mean_emission_time_thermal,
)
from qdturnstile.lib.trajectories import simulate_trajectories
from qdturnstile.schema.models import (
    CavityGeometry,
    DotParameters,
    Level,
    Occupations,
    SchemeClass,
)
from qdturnstile.util.grids import sweep_grid, theta_grid


@dataclass(frozen=True)
class Check:
    """Outcome of one validated identity."""

    name: str
    passed: bool
    detail: str


Outcome = tuple[bool, str]


class Validator:
    """Runs the registered checks against one configuration."""

    checks: list[tuple[str, Callable[["Validator"], Outcome]]] = []

    def __init__(self, config: RunConfig, trajectories: int, seed: int) -> None:
        """Initialize Validator.

        Args:
            config (RunConfig): Configuration providing the base dot parameters.
            trajectories (int): Monte Carlo trajectories per estimate.
            seed (int): Master seed.
        """
        self.p = dataclasses.replace(config.dot(), gamma_e=None, gamma_h=None)
        self.trajectories = trajectories
        self.seed = seed
        self.rng = numpy.random.default_rng(seed)

    def with_gamma(self, gamma: float, **changes: float) -> DotParameters:
        """Base parameters with Gamma = 1 and the given gamma."""
        return dataclasses.replace(
            self.p, Gamma=1.0, gamma=gamma, Gamma_1=None, Gamma_2=None, **changes
        )

    def random_parameters(self, count: int) -> list[DotParameters]:
        """Random parameters with V_hh > V_ee > 0 and attractive direct elements."""
        rng = self.rng
        samples = []
        for _ in range(count):
            v_ee = rng.uniform(1, 20)
            samples.append(
                DotParameters(
                    E_e=rng.uniform(100, 1000),
                    E_h=rng.uniform(100, 1000),
                    V_ee=v_ee,
                    V_hh=v_ee + rng.uniform(0.01, 20),
                    V_eh_s=rng.uniform(-30, 0),
                    V_eh_a=rng.uniform(-30, 0),
                    V_x1=rng.uniform(-v_ee / 2, v_ee / 2),
                    V_x2=rng.uniform(-v_ee / 2, v_ee / 2),
                    Gamma=1.0,
                    gamma=0.01,
                    T=1.0,
                    V_bias=0.0,
                    Phi_gate=0.0,
                )
            )
        return samples

    def run(self) -> list[Check]:
        """Run every registered check.

        Returns:
            list[Check]: One result per check, in registration order.
        """
        results = []
        for name, check in self.checks:
            try:
                passed, detail = check(self)
            except TurnstileError as err:
                passed, detail = False, f"{type(err).__name__}: {err}"
            logger.info(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
            results.append(Check(name, bool(passed), detail))
        return results


CheckFunc = Callable[[Validator], Outcome]


def check(name: str) -> Callable[[CheckFunc], CheckFunc]:
    """Register a check under ``name``."""

    def register(func: CheckFunc) -> CheckFunc:
        Validator.checks.append((name, func))
        return func

    return register


# scheme


@check("state space has 16 states in 9 charge configurations")
def _state_space(v: Validator) -> Outcome:
    states = enumerate_states()
    p = v.random_parameters(1)[0]
    energies = {round(level_energy(p, st), 9) for st in states}
    ok = len(states) == 16 and len(manifolds()) == 9
    return ok, f"{len(states)} states, {len(manifolds())} configurations, {len(energies)} energies"


@check("omega_1 + omega_2 = omega_3 + omega_4")
def _sum_rule(v: Validator) -> Outcome:
    worst = 0.0
    schemes = (flat_scheme(), tall_scheme(), classify_scheme(0.5, 0.5, True, "none"))
    for p in v.random_parameters(1000):
        for sch in schemes:
            t = transition_frequencies(p, sch)
            scale = max(abs(t.omega_1), abs(t.omega_2), abs(t.omega_3), abs(t.omega_4))
            worst = max(worst, abs(t.omega_1 + t.omega_2 - t.omega_3 - t.omega_4) / scale)
    return worst <= 1e-12, f"max relative deviation {worst:.1e}"


@check("omega_1 - omega_2 > omega_3 - omega_4 > 0")
def _ordering(v: Validator) -> Outcome:
    tested = failed = 0
    for p in v.random_parameters(1000):
        for sch in (flat_scheme(), tall_scheme()):
            flat = sch.scheme_class is SchemeClass.FLAT_CYLINDRICAL
            # flat cascade exciton sits on the s = -1 branch
            if flat and not p.V_ee + p.V_eh_a - p.V_x2 > 0:
                continue
            t = transition_frequencies(p, sch)
            tested += 1
            failed += not t.omega_1 - t.omega_2 > t.omega_3 - t.omega_4 > 0
    return failed == 0, f"{tested - failed}/{tested} parameter sets ordered"


@check("charge +-1 doublets are degenerate")
def _doublets(v: Validator) -> Outcome:
    p = v.random_parameters(1)[0]
    spread = max(
        abs(level_energy(p, states[0]) - level_energy(p, states[1]))
        for states in manifolds().values()
        if states[0].is_doublet
    )
    return spread == 0.0, f"max splitting {spread}"


@check("excitons with |M| = m_e + m_h > 1 are dark")
def _dark_rule(v: Validator) -> Outcome:
    halves = [0.5, 1.5, 2.5, 3.5]
    bad = [
        (m_e, m_h)
        for m_e in halves
        for m_h in halves
        if m_e + m_h > 1
        and not {"eh+", "eh-"} <= set(classify_scheme(m_e, m_h).dark_excitons)
    ]
    return not bad, f"violations: {bad}" if bad else "15 axial schemes"


@check("cylindrical scheme classification")
def _classification(v: Validator) -> Outcome:
    flat, tall, high = flat_scheme(), tall_scheme(), classify_scheme(1.5, 1.5)
    ok = (
        flat.scheme_class is SchemeClass.FLAT_CYLINDRICAL
        and len(flat.bright_excitons) == 2
        and tall.scheme_class is SchemeClass.TALL_CYLINDRICAL
        and len(tall.bright_excitons) == 3
        and high.scheme_class is SchemeClass.HIGH_M
        and len(high.bright_excitons) == 1
    )
    return ok, "flat 2 bright, tall 3 bright, high-M 1 bright"


# thermal


@check("occupations are one half at resonance")
def _resonance(v: Validator) -> Outcome:
    p = dataclasses.replace(
        v.p, V_bias=v.p.E_e + v.p.E_h, Phi_gate=(v.p.E_e - v.p.E_h) / 2
    )
    occ = fermi_occupations(p)
    return (occ.p_e, occ.p_h) == (0.5, 0.5), f"p_e={occ.p_e}, p_h={occ.p_h}"


@check("level populations sum to one")
def _population_sum(v: Validator) -> Outcome:
    grid = numpy.linspace(0, 1, 21)
    worst = max(
        abs(sum(level_populations(Occupations(pe, ph), sch).values()) - 1)
        for pe in grid
        for ph in grid
        for sch in (flat_scheme(), tall_scheme())
    )
    return worst <= 1e-12, f"max deviation {worst:.1e}"


@check("occupations are monotone in bias and gate")
def _monotone_occupations(v: Validator) -> Outcome:
    step = 1e-3 * v.p.T
    base = fermi_occupations(v.p)
    bias = fermi_occupations(dataclasses.replace(v.p, V_bias=v.p.V_bias + step))
    gate = fermi_occupations(dataclasses.replace(v.p, Phi_gate=v.p.Phi_gate + step))
    ok = (
        bias.p_e > base.p_e
        and bias.p_h > base.p_h
        and gate.p_e > base.p_e
        and gate.p_h < base.p_h
    )
    return ok, "dp/dV > 0, dp_e/dPhi > 0, dp_h/dPhi < 0"


@check("saturated dot emits only on omega_1")
def _saturated_spectrum(v: Validator) -> Outcome:
    lines = emission_lines(v.p, flat_scheme(), Occupations(1.0, 1.0))
    shining = [line.label for line in lines if line.intensity > 0]
    return shining == ["1"], f"nonzero lines {shining}"


@check("line strengths do not depend on an energy offset")
def _offset_invariance(v: Validator) -> Outcome:
    occ = Occupations(0.3, 0.7)
    shifted = dataclasses.replace(v.p, E_e=v.p.E_e + 37.0, E_h=v.p.E_h + 37.0)
    ok = True
    for sch in (flat_scheme(), tall_scheme()):
        a, b = emission_lines(v.p, sch, occ), emission_lines(shifted, sch, occ)
        ok &= all(x.intensity == y.intensity for x, y in zip(a, b, strict=True))
        ok &= all(
            math.isclose(y.omega - x.omega, 74.0, rel_tol=1e-9) for x, y in zip(a, b, strict=True)
        )
    return ok, "strengths equal, frequencies shifted uniformly"


@check("thermal emission time equals the inverse total line strength")
def _emission_time(v: Validator) -> Outcome:
    worst = 0.0
    for sch in (flat_scheme(), tall_scheme()):
        for shift in (-2.0, 0.0, 3.0):
            p = dataclasses.replace(v.p, V_bias=v.p.V_bias + shift * v.p.T)
            total = sum(line.intensity for line in emission_lines(p, sch))
            worst = max(worst, abs(mean_emission_time_thermal(p, sch) * total - 1))
    return worst <= 1e-12, f"max relative deviation {worst:.1e}"


# kinetics


@check("closed-form cascade probabilities match the linear solve")
def _closed_forms(v: Validator) -> Outcome:
    worst = 0.0
    for sch in (flat_scheme(), tall_scheme()):
        for ratio in sweep_grid(1e-3, 1e3, 20):
            p = v.with_gamma(ratio)
            solved = cascade_probabilities(build_rate_graph(p, sch)).as_dict()
            closed = closed_cascade_probabilities(p, sch).as_dict()
            worst = max(worst, max(abs(solved[k] - closed[k]) for k in solved))
    return worst <= 1e-10, f"max deviation {worst:.1e} on 20 points, flat and tall"


@check("flat tunneling edges have rates gamma or 2 gamma")
def _channel_rule(v: Validator) -> Outcome:
    g = build_rate_graph(v.with_gamma(0.3), flat_scheme())
    tunnel = {round(edge.rate, 12) for edge in g.edges if not edge.transition}
    photon = {round(edge.rate, 12) for edge in g.photon_edges()}
    ok = tunnel == {0.3, 0.6} and photon <= {1.0, 2.0}
    return ok, f"tunneling {sorted(tunnel)}, photons {sorted(photon)}"


@check("generator columns sum to zero and its spectrum is stable")
def _generator(v: Validator) -> Outcome:
    worst_sum = worst_eig = -math.inf
    for sch in (flat_scheme(), tall_scheme()):
        for ratio in (0.01, 1.0, 100.0):
            q = build_rate_graph(v.with_gamma(ratio), sch).generator()
            scale = float(numpy.abs(q).max())
            worst_sum = max(worst_sum, float(numpy.abs(q.sum(axis=0)).max()) / scale)
            worst_eig = max(worst_eig, float(numpy.linalg.eigvals(q).real.max()) / scale)
    ok = worst_sum <= 1e-12 and worst_eig <= 1e-12
    return ok, (
        f"max column sum {worst_sum:.1e}, max Re(eigenvalue) {worst_eig:.1e}, "
        "relative to the largest rate"
    )


@check("P12 exceeds 0.9 for weak and tends to 1/4 for strong tunneling")
def _plateau(v: Validator) -> Outcome:
    weak = cascade_probabilities(build_rate_graph(v.with_gamma(0.01), flat_scheme())).P12
    strong = cascade_probabilities(build_rate_graph(v.with_gamma(1e3), flat_scheme())).P12
    return weak > 0.9 and abs(strong - 0.25) < 0.01, f"P12={weak:.4f} at 1e-2, {strong:.4f} at 1e3"


@check("stationary photon flux reproduces the mean interphoton time")
def _stationary_time(v: Validator) -> Outcome:
    worst = 0.0
    for sch in (flat_scheme(), tall_scheme()):
        for ratio in (0.1, 1.0, 10.0):
            p = v.with_gamma(ratio)
            solved = stationary_interphoton_time(build_rate_graph(p, sch))
            worst = max(worst, abs(solved - mean_interphoton_time(p, sch)))
    return worst <= 1e-8, f"max deviation {worst:.1e}"


@check("Monte Carlo cascade probabilities within 3 standard errors")
def _monte_carlo_cascade(v: Validator) -> Outcome:
    p = v.with_gamma(1.0)
    stats = simulate_trajectories(
        build_rate_graph(p, flat_scheme()), Level.BIEXCITON, v.trajectories, v.seed, renewal=0
    )
    expected = {"P2": 6 / 41, "P3": 8 / 41, "P4": 8 / 41, "P12": 17 / 41}
    within = {k: stats.estimates[k].within(x) for k, x in expected.items()}
    detail = ", ".join(
        f"{k}={stats.estimates[k].value:.5f}+-{stats.estimates[k].stderr:.5f}" for k in expected
    )
    return all(within.values()), detail


@check("Monte Carlo interphoton time within 3 standard errors")
def _monte_carlo_interphoton(v: Validator) -> Outcome:
    samples = max(2, v.trajectories // 10)
    results = []
    for name, sch in (("flat", flat_scheme()), ("tall", tall_scheme())):
        for ratio in (0.1, 1.0, 10.0):
            p = v.with_gamma(ratio)
            stats = simulate_trajectories(
                build_rate_graph(p, sch), Level.BIEXCITON, 1, v.seed, renewal=samples
            )
            est = stats.estimates["interphoton_time"]
            results.append((name, ratio, est.within(mean_interphoton_time(p, sch))))
    failed = [(n, r) for n, r, ok in results if not ok]
    return not failed, f"outside 3 sigma: {failed}" if failed else f"{len(results)} points"


# entangle


def _entangle_grid() -> list[tuple[float, float, float]]:
    return [
        (delta, gamma, P)
        for delta in numpy.linspace(0, 2, 5)
        for gamma in numpy.linspace(0, 1, 5)
        for P in numpy.linspace(0, 1, 5)
    ]


@check("Wootters concurrence equals the closed form")
def _wootters(v: Validator) -> Outcome:
    worst = max(
        abs(
            wootters_concurrence(cascade_density(d, 1.0, g, P))
            - closed_concurrence_entropy(d, 1.0, g, P).concurrence
        )
        for d, g, P in _entangle_grid()
    )
    return worst <= 1e-10, f"max deviation {worst:.1e} on 125 points"


@check("cascade densities are valid density operators")
def _density_invariants(v: Validator) -> Outcome:
    for d, g, P in _entangle_grid():
        cascade_density(d, 1.0, g, P).check(1e-12)
    return True, "Hermitian, unit trace, positive semidefinite"


@check("tunneling destroys entanglement at 2 gamma = Gamma")
def _threshold(v: Validator) -> Outcome:
    def concurrence(gamma: float) -> float:
        P = no_tunnel_pair_fraction(v.with_gamma(gamma))
        return closed_concurrence_entropy(0.0, 1.0, gamma, P).concurrence

    below = all(concurrence(g) > 0 for g in numpy.linspace(0, 0.5, 50, endpoint=False))
    at = concurrence(0.5)
    return at <= 1e-12 and below, f"C(Gamma/2)={at:.1e}, C>0 below: {below}"


@check("entropy decreases with gamma and Delta")
def _monotone_entropy(v: Validator) -> Outcome:
    ratios = sweep_grid(1e-3, 10, 40)
    deltas = (0.0, 0.2, 0.4)
    table = numpy.array(
        [
            [
                closed_concurrence_entropy(
                    d, 1.0, r, no_tunnel_pair_fraction(v.with_gamma(r))
                ).entropy
                for r in ratios
            ]
            for d in deltas
        ]
    )
    ok = bool((numpy.diff(table, axis=1) <= 0).all() and (numpy.diff(table, axis=0) <= 0).all())
    return ok, "unfiltered flat entropy on 40 x 3 grid"


@check("polarization correlation does not depend on Delta")
def _correlation(v: Validator) -> Outcome:
    worst = max(
        abs(cascade_density(d, 1.0, g, P).correlation - (P + (1 - P) / 2))
        for d, g, P in _entangle_grid()
    )
    return worst <= 1e-12, f"max deviation {worst:.1e}"


@check("filtered pair fraction exceeds the unfiltered one")
def _filtered(v: Validator) -> Outcome:
    sch = flat_scheme()
    ok = all(
        pair_fraction(PairMode.FILTERED, sch, v.with_gamma(r))
        >= pair_fraction(PairMode.UNFILTERED, sch, v.with_gamma(r))
        for r in sweep_grid(1e-3, 1e3, 25)
    )
    value = pair_fraction(PairMode.FILTERED, sch, v.with_gamma(1.0))
    ok &= abs(value - 41 / 85) <= 1e-10
    return ok, f"filtered P at gamma = Gamma is {value:.6f}"


# cavity


@check("aligned cavity reproduces the cascade density")
def _aligned_cavity(v: Validator) -> Outcome:
    worst = 0.0
    for delta in (0.0, 0.1, 0.4, 1.0):
        for gamma in (0.0, 0.01, 0.3):
            rho = cavity_density(CavityGeometry(0.0, math.pi / 4, 1.0, delta, gamma))
            P = 1 / (1 + 4 * gamma)
            expected = cascade_density(delta, 1.0, gamma, P).rho
            worst = max(worst, float(numpy.abs(rho.rho - expected).max()))
    return worst <= 1e-9, f"max deviation {worst:.1e}"


@check("cavity densities are valid density operators")
def _cavity_invariants(v: Validator) -> Outcome:
    for geo in cavity_geometries(theta_grid(50), math.pi / 4, (0.1, 0.2, 0.4)):
        cavity_density(geo).check(1e-10)
    return True, "50 angles x 3 splittings"


@check("cavity integrators agree")
def _cavity_methods(v: Validator) -> Outcome:
    worst = 0.0
    for theta in (0.0, math.pi / 8, math.pi / 4, 3 * math.pi / 8):
        geo = CavityGeometry(theta, math.pi / 4, 1.0, 0.2, 0.01)
        eigen = cavity_density(geo).rho
        for method in (CavityMethod.LYAPUNOV, CavityMethod.QUADRATURE):
            worst = max(worst, float(numpy.abs(cavity_density(geo, method).rho - eigen).max()))
    return worst <= 1e-8, f"max deviation {worst:.1e}"


@check("cavity entropy ordered by Delta")
def _cavity_ordering(v: Validator) -> Outcome:
    frame = cavity_entanglement_sweep(
        cavity_geometries(theta_grid(50), math.pi / 4, (0.1, 0.2, 0.4))
    )
    table = frame.pivot(index="theta", columns="Delta_over_Gamma", values="E")
    entangled = table[0.4] > 1e-12
    strict = (table[0.1] > table[0.2]) & (table[0.2] > table[0.4])
    weak = (table[0.1] >= table[0.2]) & (table[0.2] >= table[0.4])
    moderate = table.index <= math.pi / 4
    ok = bool(
        strict[entangled].all() and weak[~entangled].all() and entangled[moderate].all()
    )
    return ok, (
        f"strict order on {int(strict[entangled].sum())}/{int(entangled.sum())} "
        f"entangled angles, {int((~entangled).sum())} with E(0.4) = 0"
    )


def run_validation(
    config: RunConfig, trajectories: int | None = None, seed: int | None = None
) -> list[Check]:
    """Run the full invariant suite.

    Args:
        config (RunConfig): Configuration with the base dot parameters.
        trajectories (int | None): Monte Carlo trajectories, from settings by default.
        seed (int | None): Master seed, from settings by default.

    Returns:
        list[Check]: Results in a fixed order.
    """
    trajectories = trajectories or config.trajectories or settings.TRAJECTORIES
    if seed is None:
        seed = settings.SEED if config.seed is None else config.seed
    logger.info(f"validating with {trajectories} trajectories, seed {seed}")
    return Validator(config, trajectories, int(seed)).run()


def validation_frame(checks: list[Check]) -> pandas.DataFrame:
    """One row per check: name, passed, detail."""
    return pandas.DataFrame(
        [dataclasses.astuple(check) for check in checks],
        columns=["name", "passed", "detail"],
    )
