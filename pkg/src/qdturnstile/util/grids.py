"""Functions for generating sweep, angle and frequency grids."""

import math
from collections.abc import Sequence

import numpy

from qdturnstile.lib.exceptions import DomainError
from qdturnstile.schema.models import SpectrumLine


def sweep_grid(start: float, stop: float, steps: int, scale: str = "log") -> numpy.ndarray:
    """Create a sweep grid of ``steps`` points from start to stop, both included.

    Args:
        start (float): First value.
        stop (float): Last value.
        steps (int): Number of points, at least 2.
        scale (str): ``log`` or ``linear`` spacing.

    Raises:
        DomainError: Empty or reversed range, or non-positive log bounds.

    Returns:
        numpy.ndarray: Grid values.
    """
    if steps < 2 or not start < stop:
        raise DomainError(f"need start < stop and steps >= 2, got {start}, {stop}, {steps}")
    match scale:
        case "log":
            if start <= 0:
                raise DomainError("log sweeps need a positive start")
            return numpy.geomspace(start, stop, steps)
        case "linear":
            return numpy.linspace(start, stop, steps)
    raise DomainError(f"unknown sweep scale {scale!r}")


def theta_grid(steps: int) -> numpy.ndarray:
    """Misalignment angles on [0, pi/2), excluding the degenerate end point."""
    return numpy.linspace(0.0, math.pi / 2, steps, endpoint=False)


def frequency_grid(
    lines: Sequence[SpectrumLine],
    steps: int,
    start: float | None = None,
    stop: float | None = None,
) -> numpy.ndarray:
    """Frequency grid covering every line with a margin of twenty line widths.

    Args:
        lines (Sequence[SpectrumLine]): Lines to cover.
        steps (int): Number of samples.
        start (float | None): Lower bound, overrides the automatic one.
        stop (float | None): Upper bound, overrides the automatic one.

    Returns:
        numpy.ndarray: Frequencies.
    """
    margin = 20 * max((line.width for line in lines), default=1.0)
    omegas = [line.omega for line in lines]
    lo = min(omegas) - margin if start is None else start
    hi = max(omegas) + margin if stop is None else stop
    return sweep_grid(lo, hi, steps, scale="linear")
