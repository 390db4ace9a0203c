"""Exact-jump Monte Carlo over a rate graph.

Trajectories are advanced together with numpy: every step draws a holding
time for each active trajectory and picks the outgoing edge from a padded
cumulative probability table. A schedule of piecewise-constant tunneling
multipliers is honoured by stopping at phase boundaries and redrawing, which
is exact because holding times are memoryless.
"""

import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import numpy
import pandas
from loguru import logger

from qdturnstile.core.settings import settings
from qdturnstile.lib.exceptions import DomainError, StalledTrajectoryError
from qdturnstile.lib.kinetics import (
    RateGraph,
    post_emission_distribution,
    stationary_interphoton_time,
)
from qdturnstile.schema.models import Estimate, Level, PhotonRecord, SchedulePhase


@dataclass(frozen=True, eq=False)
class _JumpTables:
    """Per-phase jump tables, indexed [phase, level, edge]."""

    targets: numpy.ndarray
    transitions: numpy.ndarray
    total: numpy.ndarray
    cumulative: numpy.ndarray
    last: numpy.ndarray
    ends: numpy.ndarray
    absorbing: numpy.ndarray


def _phases(schedule: Sequence[SchedulePhase] | None) -> list[SchedulePhase]:
    phases = list(schedule or [])
    if not phases or math.isfinite(phases[-1].duration):
        phases.append(SchedulePhase(math.inf))
    if any(math.isinf(phase.duration) for phase in phases[:-1]):
        raise DomainError("only the last schedule phase may be open-ended")
    return phases


def _jump_tables(g: RateGraph, schedule: Sequence[SchedulePhase] | None) -> _JumpTables:
    outgoing: list[list] = [[] for _ in g.levels]
    for edge in g.edges:
        if not math.isfinite(edge.rate):
            raise DomainError(f"rate of {edge} is not finite")
        outgoing[g.index(edge.source)].append(edge)
    width = max(1, max(len(edges) for edges in outgoing))
    size = len(g.levels)

    targets = numpy.zeros((size, width), dtype=int)
    transitions = numpy.zeros((size, width), dtype=int)
    base = numpy.zeros((size, width))
    tunnel = numpy.zeros((size, width), dtype=bool)
    inward = numpy.zeros((size, width), dtype=bool)
    for i, edges in enumerate(outgoing):
        for k, edge in enumerate(edges):
            targets[i, k] = g.index(edge.target)
            transitions[i, k] = edge.transition
            base[i, k] = edge.rate
            tunnel[i, k] = edge.transition == 0
            inward[i, k] = edge.inward

    phases = _phases(schedule)
    rates = numpy.stack(
        [
            base
            * numpy.where(tunnel, numpy.where(inward, phase.inward, phase.outward), 1.0)
            for phase in phases
        ]
    )
    total = rates.sum(axis=2)
    with numpy.errstate(invalid="ignore", divide="ignore"):
        cumulative = numpy.nan_to_num(numpy.cumsum(rates, axis=2) / total[..., None])
    positive = rates > 0
    last = width - 1 - numpy.argmax(positive[..., ::-1], axis=2)
    ends = numpy.cumsum([phase.duration for phase in phases])
    return _JumpTables(
        targets=targets,
        transitions=transitions,
        total=total,
        cumulative=cumulative,
        last=last,
        ends=ends,
        absorbing=base.sum(axis=1) == 0,
    )


def _run_batch(
    tables: _JumpTables,
    start: numpy.ndarray,
    photons: int,
    rng: numpy.random.Generator,
) -> tuple[numpy.ndarray, numpy.ndarray]:
    """Advance trajectories until each has ``photons`` photons or is absorbed."""
    size = start.size
    level = start.copy()
    clock = numpy.zeros(size)
    phase = numpy.zeros(size, dtype=int)
    count = numpy.zeros(size, dtype=int)
    times = numpy.full((size, photons), numpy.nan)
    transitions = numpy.zeros((size, photons), dtype=int)

    active = numpy.arange(size)
    while active.size:
        active = active[~tables.absorbing[level[active]]]
        if not active.size:
            break
        lv, ph = level[active], phase[active]
        rate = tables.total[ph, lv]
        end = tables.ends[ph]
        stalled = (rate == 0) & numpy.isinf(end)
        if stalled.any():
            raise StalledTrajectoryError(
                f"{stalled.sum()} trajectories stalled with zero total rate in level(s) "
                f"{sorted(set(lv[stalled].tolist()))}"
            )
        with numpy.errstate(divide="ignore"):
            arrive = clock[active] + rng.standard_exponential(active.size) / rate
        crossing = arrive > end

        boundary = active[crossing]
        clock[boundary] = end[crossing]
        phase[boundary] += 1

        jump = active[~crossing]
        if jump.size:
            clock[jump] = arrive[~crossing]
            u = rng.random(jump.size)
            cumulative = tables.cumulative[phase[jump], level[jump]]
            choice = numpy.minimum(
                (cumulative <= u[:, None]).sum(axis=1),
                tables.last[phase[jump], level[jump]],
            )
            emitted = tables.transitions[level[jump], choice]
            level[jump] = tables.targets[level[jump], choice]
            shining = jump[emitted > 0]
            times[shining, count[shining]] = clock[shining]
            transitions[shining, count[shining]] = emitted[emitted > 0]
            count[shining] += 1
        active = active[count[active] < photons]
    return times, transitions


def _proportion(hits: numpy.ndarray) -> Estimate:
    samples = int(hits.size)
    if samples == 0:
        return Estimate(math.nan, math.nan, 0)
    value = float(hits.mean())
    return Estimate(value, math.sqrt(value * (1 - value) / samples), samples)


def _mean(values: numpy.ndarray) -> Estimate:
    samples = int(values.size)
    if samples < 2:
        return Estimate(math.nan, math.nan, samples)
    return Estimate(
        float(values.mean()), float(values.std(ddof=1) / math.sqrt(samples)), samples
    )


@dataclass(frozen=True, eq=False)
class TrajectoryStats:
    """Photon streams of simulated trajectories with their estimators.

    ``times`` and ``transitions`` have one row per trajectory and one column per
    photon; missing photons are NaN and 0.
    """

    initial: Level
    seed: int
    times: numpy.ndarray
    transitions: numpy.ndarray
    estimates: dict[str, Estimate]

    @property
    def n(self) -> int:
        """Number of trajectories."""
        return int(self.times.shape[0])

    def records(self, trajectory: int) -> list[PhotonRecord]:
        """Photon records of one trajectory."""
        row = self.transitions[trajectory]
        return [
            PhotonRecord(time=float(self.times[trajectory, k]), transition=int(row[k]))
            for k in numpy.flatnonzero(row)
        ]

    def streams(self) -> Iterator[list[PhotonRecord]]:
        """Photon records of every trajectory in order."""
        for trajectory in range(self.n):
            yield self.records(trajectory)


def _batched(
    tables: _JumpTables,
    start: numpy.ndarray,
    photons: int,
    seeds: numpy.random.SeedSequence,
    batch_size: int,
) -> tuple[numpy.ndarray, numpy.ndarray]:
    batches = max(1, math.ceil(start.size / batch_size))
    results = []
    for child, chunk in zip(
        seeds.spawn(batches), numpy.array_split(start, batches), strict=True
    ):
        results.append(_run_batch(tables, chunk, photons, numpy.random.default_rng(child)))
    logger.debug(f"ran {start.size} trajectories in {batches} batches")
    return (
        numpy.concatenate([times for times, _ in results]),
        numpy.concatenate([transitions for _, transitions in results]),
    )


def simulate_trajectories(
    g: RateGraph,
    initial: Level | str,
    n: int,
    seed: int,
    schedule: Sequence[SchedulePhase] | None = None,
    photons: int = 2,
    renewal: int | None = None,
    batch_size: int | None = None,
) -> TrajectoryStats:
    """Simulate photon streams and estimate the cascade statistics.

    P_k is estimated from the first photon of every trajectory, P_1k from the
    photon following a first photon on transition 1. The steady-state mean
    interphoton time is estimated from ``renewal`` trajectories started in the
    post-emission distribution of the stationary state, whose mean time to the
    next photon equals the mean spacing between photons.

    Args:
        g (RateGraph): Rate graph.
        initial (Level | str): Starting level of the cascade trajectories.
        n (int): Number of cascade trajectories.
        seed (int): Master seed; batches use independent child streams.
        schedule (Sequence[SchedulePhase] | None): Tunneling schedule applied from t = 0.
        photons (int): Photons recorded per trajectory.
        renewal (int | None): Steady-state samples, defaults to ``n``. Zero skips.
        batch_size (int | None): Trajectories per batch.

    Raises:
        DomainError: n < 1 or photons < 1.

    Returns:
        TrajectoryStats: Streams and estimators.
    """
    if n < 1 or photons < 1:
        raise DomainError(f"need n >= 1 and photons >= 1, got n={n}, photons={photons}")
    batch_size = batch_size or settings.BATCH_SIZE
    renewal = n if renewal is None else renewal
    cascade_seeds, renewal_seeds = numpy.random.SeedSequence(seed).spawn(2)
    start = numpy.full(n, g.index(initial))

    logger.info(f"simulating {n} trajectories from {Level(initial).value}, seed {seed}")
    times, transitions = _batched(
        _jump_tables(g, schedule), start, photons, cascade_seeds, batch_size
    )

    first = transitions[:, 0]
    emitted = first[first > 0]
    estimates = {f"P{k}": _proportion(emitted == k) for k in range(1, 5)}
    if photons >= 2:
        after = transitions[(first == 1) & (transitions[:, 1] > 0), 1]
        estimates |= {f"P1{k}": _proportion(after == k) for k in range(1, 5)}

    if renewal > 0 and math.isfinite(stationary_interphoton_time(g)):
        nu = post_emission_distribution(g)
        rng = numpy.random.default_rng(renewal_seeds)
        origins = rng.choice(len(g.levels), size=renewal, p=nu)
        intervals, _ = _batched(
            _jump_tables(g, None), origins, 1, renewal_seeds.spawn(1)[0], batch_size
        )
        estimates["interphoton_time"] = _mean(intervals[:, 0])
    else:
        estimates["interphoton_time"] = Estimate(math.inf, 0.0, 0)
    return TrajectoryStats(
        initial=Level(initial),
        seed=seed,
        times=times,
        transitions=transitions,
        estimates=estimates,
    )


def photon_frame(stats: TrajectoryStats) -> pandas.DataFrame:
    """Photon streams as ``trajectory_id,time,transition`` rows."""
    rows, cols = numpy.nonzero(stats.transitions)
    return pandas.DataFrame(
        {
            "trajectory_id": rows,
            "time": stats.times[rows, cols],
            "transition": stats.transitions[rows, cols],
        }
    )


def estimator_frame(stats: TrajectoryStats) -> pandas.DataFrame:
    """Estimator summary as ``estimator,value,stderr,samples`` rows."""
    return pandas.DataFrame(
        [
            {
                "estimator": name,
                "value": est.value,
                "stderr": est.stderr,
                "samples": est.samples,
            }
            for name, est in stats.estimates.items()
        ]
    )
