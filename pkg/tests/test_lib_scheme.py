"""Tests for the level scheme."""
import pytest
from qdturnstile.lib.exceptions import DomainError
from qdturnstile.lib.scheme import (
    classify_scheme,
    degeneracy,
    enumerate_states,
    exciton_splitting,
    exciton_state,
    level_energy,
    manifolds,
    named_scheme,
    radiative_rates,
    transition_frequencies,
)
from qdturnstile.schema.models import DotState, SchemeClass


def test_state_space():
    states = enumerate_states()
    assert len(states) == 16
    assert len(set(states)) == 16
    groups = manifolds()
    assert len(groups) == 9
    assert len(groups[(1, 1)]) == 4
    assert [len(groups[m]) for m in ((1, 0), (0, 1), (2, 1), (1, 2))] == [2, 2, 2, 2]


@pytest.mark.parametrize(
    "state, energy",
    [
        (DotState(0, 0), 0.0),
        (DotState(1, 0), 1000.0),
        (DotState(0, 1, member=1), 400.0),
        (DotState(1, 2), 1865.0),
        (DotState(2, 1), 2455.0),
        (DotState(2, 2), 2920.0),
        (exciton_state("ehbar+"), 1450.25),
        (exciton_state("eh+"), 1380.5),
    ],
)
def test_level_energy(params, state, energy):
    assert level_energy(params, state) == pytest.approx(energy, abs=1e-12)


def test_doublet_members_are_degenerate(params):
    for states in manifolds().values():
        if states[0].is_doublet:
            assert level_energy(params, states[0]) == level_energy(params, states[1])


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(n_e=3, n_h=0),
        dict(n_e=1, n_h=1),
        dict(n_e=0, n_h=0, s=1, t=1),
        dict(n_e=2, n_h=2, member=1),
    ],
)
def test_invalid_states(kwargs):
    with pytest.raises(DomainError):
        DotState(**kwargs)


def test_unknown_exciton():
    with pytest.raises(DomainError, match="unknown exciton"):
        exciton_state("hh+")


@pytest.mark.parametrize(
    "m_e, m_h, spin_orbit, symmetry, expected, bright",
    [
        (0.5, 1.5, True, "axial", SchemeClass.FLAT_CYLINDRICAL, 2),
        (1.5, 0.5, True, "axial", SchemeClass.FLAT_CYLINDRICAL, 2),
        (0.5, 0.5, True, "axial", SchemeClass.TALL_CYLINDRICAL, 3),
        (1.5, 1.5, True, "axial", SchemeClass.HIGH_M, 1),
        (0.5, 2.5, True, "axial", SchemeClass.ALL_DARK, 0),
        (0.5, 1.5, False, "none", SchemeClass.NO_SPIN_ORBIT, 1),
        (0.5, 1.5, True, "none", SchemeClass.GENERIC_TIME_REVERSAL, 4),
    ],
)
def test_classify_scheme(m_e, m_h, spin_orbit, symmetry, expected, bright):
    sch = classify_scheme(m_e, m_h, spin_orbit, symmetry)
    assert sch.scheme_class is expected
    assert len(sch.bright_excitons) == bright
    assert len(sch.bright_excitons) + len(sch.dark_excitons) == 4
    assert sch.entanglement_capable is (
        expected in (SchemeClass.FLAT_CYLINDRICAL, SchemeClass.TALL_CYLINDRICAL)
    )


@pytest.mark.parametrize("m_e, m_h", [(1.5, 1.5), (0.5, 1.5), (2.5, 0.5), (3.5, 3.5)])
def test_large_angular_momentum_excitons_are_dark(m_e, m_h):
    assert {"eh+", "eh-"} <= set(classify_scheme(m_e, m_h).dark_excitons)


@pytest.mark.parametrize("m", [0.0, 1.0, -0.5, 0.25])
def test_classify_rejects_non_half_integers(m):
    with pytest.raises(DomainError, match="half-integer"):
        classify_scheme(m, 0.5)


def test_all_dark_has_no_frequencies(params):
    sch = classify_scheme(0.5, 2.5)
    with pytest.raises(DomainError, match="no bright exciton"):
        transition_frequencies(params, sch)


def test_flat_frequencies(params, flat):
    table = transition_frequencies(params, flat)
    assert table.omega_2 == pytest.approx(1450.25)
    assert table.omega_1 == pytest.approx(1469.75)
    assert table.omega_3 == pytest.approx(1465.0)
    assert table.omega_4 == pytest.approx(1455.0)
    assert table.transitions[0] == ("XX", "ehbar+")


def test_tall_frequencies(params, tall):
    table = transition_frequencies(params, tall)
    assert table.omega_2 == pytest.approx(1380.5)
    assert table.omega_1 - table.omega_2 == pytest.approx(159.0)
    assert table.omega_3 - table.omega_4 == pytest.approx(params.V_hh - params.V_ee)


@pytest.mark.parametrize("name", ["flat", "tall"])
def test_sum_rule_and_ordering(params, name):
    table = transition_frequencies(params, named_scheme(name))
    assert table.omega_1 + table.omega_2 == pytest.approx(table.omega_3 + table.omega_4)
    assert table.omega_1 - table.omega_2 > table.omega_3 - table.omega_4 > 0


def test_named_scheme_unknown():
    with pytest.raises(DomainError, match="unknown scheme"):
        named_scheme("pyramid")


def test_radiative_rates(make_dot, flat, tall):
    p = make_dot(Gamma_1=2.0, Gamma_2=3.0)
    assert radiative_rates(p, flat) == {"ehbar+": 1.0, "ehbar-": 1.0}
    assert radiative_rates(p, tall) == {"eh+": 2.0, "eh-": 2.0, "ehbar+": 6.0}
    assert sum(radiative_rates(p, tall).values()) == 2 * p.Gamma_t


def test_exciton_splitting(params, flat, tall):
    assert exciton_splitting(params, flat) == 1.0
    assert exciton_splitting(params, tall) == 0.5
    with pytest.raises(DomainError):
        exciton_splitting(params, classify_scheme(1.5, 1.5))


def test_degeneracy():
    groups = manifolds()
    assert sum(degeneracy(st) for st in enumerate_states()) == 24
    assert degeneracy(groups[(1, 0)][0]) == 2
    assert degeneracy(groups[(1, 1)][0]) == 1
