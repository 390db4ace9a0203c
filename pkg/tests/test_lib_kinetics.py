"""Tests for the rate graph and its solutions."""
import math

import numpy
import pytest
from qdturnstile.lib.exceptions import DomainError, SingularGeneratorError
from qdturnstile.lib.kinetics import (
    build_rate_graph,
    cascade_probabilities,
    cascade_sweep,
    closed_cascade_probabilities,
    mean_interphoton_time,
    no_tunnel_pair_fraction,
    post_emission_distribution,
    stationary_distribution,
    stationary_interphoton_time,
)
from qdturnstile.lib.scheme import classify_scheme
from qdturnstile.schema.models import Level
from scipy.special import expit


def test_flat_oracle_at_equal_rates(params, flat):
    probabilities = cascade_probabilities(build_rate_graph(params, flat))
    assert probabilities.P2 == pytest.approx(6 / 41, abs=1e-12)
    assert probabilities.P3 == pytest.approx(8 / 41, abs=1e-12)
    assert probabilities.P4 == pytest.approx(8 / 41, abs=1e-12)
    assert probabilities.P12 == pytest.approx(17 / 41, abs=1e-12)


def test_tall_oracles(make_dot, tall):
    default = cascade_probabilities(build_rate_graph(make_dot(), tall))
    assert default.P2 == pytest.approx(2 / 19, abs=1e-12)
    halves = make_dot(Gamma_1=0.5, Gamma_2=0.5)
    assert cascade_probabilities(build_rate_graph(halves, tall)).P12 == pytest.approx(
        5 / 13, abs=1e-12
    )


@pytest.mark.parametrize("ratio", numpy.geomspace(1e-3, 1e3, 13))
@pytest.mark.parametrize("name", ["flat", "tall"])
def test_closed_forms_match_solver(make_dot, ratio, name, flat, tall):
    sch = flat if name == "flat" else tall
    p = make_dot(gamma=ratio)
    solved = cascade_probabilities(build_rate_graph(p, sch)).as_dict()
    closed = closed_cascade_probabilities(p, sch).as_dict()
    for key, value in closed.items():
        assert solved[key] == pytest.approx(value, abs=1e-10)
    assert sum(solved[f"P{k}"] for k in range(1, 5)) == pytest.approx(1.0)
    assert sum(solved[f"P1{k}"] for k in range(1, 5)) == pytest.approx(1.0)


def test_no_tunneling_cascade(make_dot, flat):
    probabilities = cascade_probabilities(build_rate_graph(make_dot(gamma=0.0), flat))
    assert probabilities.P1 == 1.0
    assert probabilities.P12 == 1.0


def test_p12_plateau(make_dot, flat):
    weak = cascade_probabilities(build_rate_graph(make_dot(gamma=0.01), flat))
    strong = cascade_probabilities(build_rate_graph(make_dot(gamma=1e3), flat))
    assert weak.P12 > 0.9
    assert strong.P12 == pytest.approx(0.25, abs=0.01)


def test_p12_below_plateau_at_one_twentieth(make_dot, flat):
    p = make_dot(gamma=0.05)
    solved = cascade_probabilities(build_rate_graph(p, flat)).P12
    assert solved == pytest.approx(closed_cascade_probabilities(p, flat).P12, abs=1e-12)
    assert solved == pytest.approx(0.8772241992882562, abs=1e-12)


def test_flat_edge_rates(make_dot, flat):
    g = build_rate_graph(make_dot(gamma=0.25, Gamma=1.5), flat)
    tunnel = {round(edge.rate, 12) for edge in g.edges if edge.kind == "tunnel"}
    assert tunnel == {0.25, 0.5}
    assert {edge.transition: edge.rate for edge in g.photon_edges()} == {
        1: 3.0,
        2: 1.5,
        3: 1.5,
        4: 1.5,
    }


def test_tall_tunneling_into_bright_levels(make_dot, tall):
    g = build_rate_graph(make_dot(gamma=1.0), tall)
    rates = {
        (edge.source, edge.target): edge.rate for edge in g.edges if edge.kind == "tunnel"
    }
    assert rates[(Level.ELECTRON, Level.BRIGHT)] == pytest.approx(1.5)
    assert rates[(Level.ELECTRON, Level.DARK)] == pytest.approx(0.5)


def test_generator_conserves_probability(params, flat, tall):
    for sch in (flat, tall):
        q = build_rate_graph(params, sch).generator()
        assert numpy.abs(q.sum(axis=0)).max() < 1e-12
        assert numpy.linalg.eigvals(q).real.max() < 1e-12


def test_unsupported_scheme(params):
    with pytest.raises(DomainError, match="flat and tall"):
        build_rate_graph(params, classify_scheme(1.5, 1.5))


def test_closed_level_is_singular(make_dot, flat):
    g = build_rate_graph(make_dot(gamma=0.0), flat)
    with pytest.raises(SingularGeneratorError, match="X_dark"):
        cascade_probabilities(g, initial=Level.DARK)


def test_closed_forms_need_rates(make_dot, flat):
    with pytest.raises(DomainError):
        closed_cascade_probabilities(make_dot(Gamma=0.0, gamma=0.0), flat)
    with pytest.raises(DomainError):
        closed_cascade_probabilities(make_dot(), classify_scheme(1.5, 1.5))


def test_no_tunnel_pair_fraction(make_dot, tall):
    assert no_tunnel_pair_fraction(make_dot(gamma=0.25)) == pytest.approx(0.5)
    assert no_tunnel_pair_fraction(make_dot(gamma=0.1, gamma_e=0.2)) == pytest.approx(
        1 / 1.6
    )
    assert no_tunnel_pair_fraction(make_dot(Gamma_1=4.0), tall) == pytest.approx(0.5)
    with pytest.raises(DomainError):
        no_tunnel_pair_fraction(make_dot(Gamma=0.0))


def test_mean_interphoton_time_oracles(make_dot, flat, tall):
    assert mean_interphoton_time(make_dot(), flat) == pytest.approx(3.0)
    assert mean_interphoton_time(make_dot(), tall) == pytest.approx(170 / 87)
    assert mean_interphoton_time(make_dot(gamma=0.0), flat) == math.inf


@pytest.mark.parametrize("ratio", [0.1, 1.0, 10.0])
def test_stationary_interphoton_time(make_dot, flat, tall, ratio):
    for sch in (flat, tall):
        p = make_dot(gamma=ratio)
        g = build_rate_graph(p, sch)
        assert stationary_interphoton_time(g) == pytest.approx(
            mean_interphoton_time(p, sch), abs=1e-8
        )
        pi = stationary_distribution(g)
        assert pi.sum() == pytest.approx(1.0)
        assert (pi > 0).all()


def test_stationary_state_needs_tunneling(make_dot, flat):
    g = build_rate_graph(make_dot(gamma=0.0), flat)
    with pytest.raises(SingularGeneratorError):
        stationary_distribution(g)
    assert stationary_interphoton_time(g) == math.inf


def test_post_emission_distribution(params, flat):
    g = build_rate_graph(params, flat)
    nu = post_emission_distribution(g)
    assert nu.sum() == pytest.approx(1.0)
    targets = {g.index(edge.target) for edge in g.photon_edges()}
    assert set(numpy.flatnonzero(nu)) == targets


def test_off_resonance_rates(make_dot, flat):
    p = make_dot(gamma=1.0, V_bias=1450.0)
    resonant = build_rate_graph(p, flat)
    shifted = build_rate_graph(p, flat, at_resonance=False)
    into = {
        (e.source, e.target): e.rate for e in shifted.edges if e.kind == "tunnel" and e.inward
    }
    assert into[(Level.GROUND, Level.ELECTRON)] == pytest.approx(4 * expit(5.0))
    assert resonant.edges != shifted.edges


def test_cascade_sweep(params):
    frame = cascade_sweep(params, ["flat", "tall"], [0.1, 1.0])
    assert len(frame) == 4
    assert list(frame.columns[:2]) == ["scheme", "gamma_over_Gamma"]
    assert "P_star" in frame.columns
    flat_row = frame[(frame.scheme == "flat") & (frame.gamma_over_Gamma == 1.0)].iloc[0]
    assert flat_row.P12 == pytest.approx(17 / 41)
    assert flat_row.P_star == pytest.approx(0.2)


def test_loss_generator_drops_photon_rates(params, flat):
    g = build_rate_graph(params, flat)
    loss = g.loss_generator().sum(axis=0)
    assert -loss.sum() == pytest.approx(sum(edge.rate for edge in g.photon_edges()))
    assert (loss <= 1e-12).all()


def test_dark_dot_has_no_photon_edges(make_dot, flat):
    g = build_rate_graph(make_dot(Gamma=0.0), flat)
    assert g.photon_edges() == []
    assert stationary_interphoton_time(g) == math.inf


def test_mean_interphoton_time_other_schemes(params):
    with pytest.raises(DomainError, match="no closed form"):
        mean_interphoton_time(params, classify_scheme(1.5, 1.5))
