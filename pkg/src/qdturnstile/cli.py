"""Command line interface for qdturnstile."""

import functools
from collections.abc import Callable
from importlib import metadata
from pathlib import Path
from typing import Annotated, Any, Optional, TypeVar

import typer
from loguru import logger as logger

from qdturnstile.core.config import RunConfig, load_config
from qdturnstile.core.settings import settings
from qdturnstile.lib.cavity import cavity_entanglement_sweep, cavity_geometries
from qdturnstile.lib.entangle import entanglement_sweep
from qdturnstile.lib.exceptions import TurnstileError
from qdturnstile.lib.kinetics import build_rate_graph, cascade_sweep
from qdturnstile.lib.thermal import emission_lines, emission_spectrum, spectrum_frames
from qdturnstile.lib.trajectories import (
    estimator_frame,
    photon_frame,
    simulate_trajectories,
)
from qdturnstile.lib.validation import run_validation, validation_frame
from qdturnstile.util.export import write_frame
from qdturnstile.util.grids import frequency_grid

cli = typer.Typer()

__version__ = metadata.version(__package__)

F = TypeVar("F", bound=Callable[..., Any])

CONFIG_OPTION = typer.Option(
    None, "--config", "-c", help="Flat key = value configuration file."
)
OUT_OPTION = typer.Option(
    None, "--out", "-o", help="Output directory, QDTURNSTILE_OUTPUT_DIR by default."
)
SEED_OPTION = typer.Option(None, "--seed", help="Master random seed.")
TRAJECTORIES_OPTION = typer.Option(
    None, "--trajectories", help="Number of Monte Carlo trajectories."
)


def version_callback(value: bool):
    """Print version information.

    Args:
        value (bool): typer expects callback to accept bool
    """
    if value:
        typer.echo(f"{__version__}")


def reports_errors(command: F) -> F:
    """Turn library errors into a message on stderr and exit code 2."""

    @functools.wraps(command)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return command(*args, **kwargs)
        except TurnstileError as err:
            logger.debug(f"{type(err).__name__}: {err}")
            typer.secho(f"error: {err}", err=True, fg=typer.colors.RED)
            raise typer.Exit(code=2) from err

    return wrapper  # type: ignore[return-value]


def _prepare(config: Path | None, out: Path | None) -> tuple[RunConfig, Path]:
    run_config = load_config(config)
    for warning in run_config.dot().physical_warnings():
        typer.secho(f"warning: {warning}", err=True, fg=typer.colors.YELLOW)
    return run_config, out or settings.OUTPUT_DIR


def _seed(run_config: RunConfig, seed: int | None) -> int:
    if seed is not None:
        return seed
    return settings.SEED if run_config.seed is None else run_config.seed


def _trajectories(run_config: RunConfig, trajectories: int | None) -> int:
    if trajectories is not None:
        return trajectories
    return run_config.trajectories or settings.TRAJECTORIES


@cli.command()
@reports_errors
def spectrum(
    config: Optional[Path] = CONFIG_OPTION,
    out: Optional[Path] = OUT_OPTION,
):
    """Emission lines and spectrum in the strong-tunneling regime."""
    run_config, out_dir = _prepare(config, out)
    p, sch = run_config.dot(), run_config.scheme()
    omega = frequency_grid(
        emission_lines(p, sch),
        run_config.omega_steps,
        run_config.omega_min,
        run_config.omega_max,
    )
    lines, curve = spectrum_frames(
        emission_spectrum(p, sch, omega), run_config.unit_scale
    )
    write_frame(lines, out_dir / "spectrum_lines.csv")
    write_frame(curve, out_dir / "spectrum.csv")
    for row in lines.itertuples():
        typer.echo(
            f"{row.label:>3}  {row.omega:14.6f} {run_config.energy_unit}  {row.strength:.6g}"
        )


@cli.command()
@reports_errors
def cascade(
    config: Optional[Path] = CONFIG_OPTION,
    out: Optional[Path] = OUT_OPTION,
):
    """Cascade probabilities against gamma/Gamma."""
    run_config, out_dir = _prepare(config, out)
    frame = cascade_sweep(run_config.dot(), run_config.schemes, run_config.ratios())
    write_frame(frame, out_dir / "cascade.csv")
    typer.echo(f"{len(frame)} points written to {out_dir / 'cascade.csv'}")


@cli.command()
@reports_errors
def entangle(
    config: Optional[Path] = CONFIG_OPTION,
    out: Optional[Path] = OUT_OPTION,
):
    """Concurrence and entanglement entropy against gamma/Gamma."""
    run_config, out_dir = _prepare(config, out)
    frame = entanglement_sweep(
        run_config.dot(), run_config.schemes, run_config.ratios(), run_config.deltas
    )
    write_frame(frame, out_dir / "entangle.csv")
    typer.echo(f"{len(frame)} points written to {out_dir / 'entangle.csv'}")


@cli.command()
@reports_errors
def cavity(
    config: Optional[Path] = CONFIG_OPTION,
    out: Optional[Path] = OUT_OPTION,
):
    """Entanglement against the misalignment of a cavity on transition 2."""
    run_config, out_dir = _prepare(config, out)
    p = run_config.dot()
    geometries = cavity_geometries(
        run_config.thetas(),
        run_config.cavity_phi,
        run_config.cavity_deltas,
        Gamma=p.Gamma,
        gamma=run_config.cavity_gamma * p.Gamma,
    )
    frame = cavity_entanglement_sweep(geometries, run_config.cavity_method)
    write_frame(frame, out_dir / "cavity.csv")
    typer.echo(f"{len(frame)} points written to {out_dir / 'cavity.csv'}")


@cli.command()
@reports_errors
def simulate(
    config: Optional[Path] = CONFIG_OPTION,
    out: Optional[Path] = OUT_OPTION,
    seed: Optional[int] = SEED_OPTION,
    trajectories: Optional[int] = TRAJECTORIES_OPTION,
):
    """Monte Carlo photon streams and their estimators."""
    run_config, out_dir = _prepare(config, out)
    p = run_config.dot()
    resonant = run_config.V_bias is None and run_config.Phi_gate is None
    g = build_rate_graph(p, run_config.scheme(), at_resonance=resonant)
    stats = simulate_trajectories(
        g,
        run_config.initial_level,
        _trajectories(run_config, trajectories),
        _seed(run_config, seed),
        schedule=run_config.schedule(),
        photons=run_config.photons,
    )
    write_frame(photon_frame(stats), out_dir / "photons.csv")
    estimators = estimator_frame(stats)
    write_frame(estimators, out_dir / "estimators.csv")
    for row in estimators.itertuples():
        typer.echo(f"{row.estimator:>16}  {row.value:.6f} +- {row.stderr:.6f}")


@cli.command()
@reports_errors
def validate(
    config: Optional[Path] = CONFIG_OPTION,
    out: Optional[Path] = OUT_OPTION,
    seed: Optional[int] = SEED_OPTION,
    trajectories: Optional[int] = TRAJECTORIES_OPTION,
):
    """Check closed forms, solvers and the Monte Carlo oracle against each other."""
    run_config, out_dir = _prepare(config, out)
    checks = run_validation(
        run_config,
        trajectories=_trajectories(run_config, trajectories),
        seed=_seed(run_config, seed),
    )
    write_frame(validation_frame(checks), out_dir / "validation.csv")
    for result in checks:
        status = typer.style(
            "PASS" if result.passed else "FAIL",
            fg=typer.colors.GREEN if result.passed else typer.colors.RED,
        )
        typer.echo(f"{status}  {result.name}: {result.detail}")
    failed = sum(not result.passed for result in checks)
    typer.echo(f"{len(checks) - failed}/{len(checks)} checks passed")
    if failed:
        raise typer.Exit(code=1)


@cli.callback(invoke_without_command=True)
def main(
    version: Annotated[
        Optional[bool],
        typer.Option("--version", callback=version_callback, is_eager=True),
    ] = None,
):
    """Callback for main function to allow --version option without any subcommands."""
    pass


# click object for docs
typer_click_object = typer.main.get_command(cli)
