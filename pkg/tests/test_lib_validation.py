"""Tests for the self-test suite."""
import pytest
from qdturnstile.core.config import RunConfig
from qdturnstile.lib import validation
from qdturnstile.lib.exceptions import DomainError
from qdturnstile.lib.validation import Check, Validator, run_validation


@pytest.fixture(scope="module")
def checks() -> list[Check]:
    return run_validation(RunConfig(), trajectories=20000, seed=2024)


def test_every_check_reports(checks):
    assert len(checks) == len(Validator.checks)
    assert len({check.name for check in checks}) == len(checks)
    assert all(check.detail for check in checks)


def test_deterministic_checks_pass(checks):
    failed = [c for c in checks if not c.passed and "Monte Carlo" not in c.name]
    assert failed == []


def test_monte_carlo_checks_run(checks):
    names = [check.name for check in checks if "Monte Carlo" in check.name]
    assert len(names) == 2


def test_errors_become_failures(mocker):
    def broken(v):
        raise DomainError("no bright exciton")

    mocker.patch.object(
        Validator, "checks", [("broken", broken), ("fine", lambda v: (True, "ok"))]
    )
    results = run_validation(RunConfig(), trajectories=10, seed=1)
    assert results == [
        Check("broken", False, "DomainError: no bright exciton"),
        Check("fine", True, "ok"),
    ]


def test_defaults_come_from_settings(mocker):
    validator = mocker.patch.object(validation, "Validator")
    config = RunConfig()
    run_validation(config)
    validator.assert_called_once_with(config, 20000, 12345)
    run_validation(RunConfig(seed=5, trajectories=30))
    assert validator.call_args.args[1:] == (30, 5)
