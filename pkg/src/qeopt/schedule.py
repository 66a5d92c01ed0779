"""Geometric temperature schedules and the (quantum-enhanced) annealing driver.

A schedule of length ell visits T_i = t_high * exp(-a*i) with
a = ln(t_high/t_low)/(ell-1), so one proposal is made per temperature and
the proposal budget of an anneal is exactly ell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import ChainState, mcmc_step
from .ising import SKInstance, SpinConfiguration
from .proposal import ProposalKernel

#: Energy tolerance for declaring the ground state found.
GROUND_TOL = 1e-9


def _geometric(t_high: float, t_low: float, length: int) -> tuple[float, ...]:
    if not (t_high > t_low > 0.0):
        raise ValueError(
            f"need t_high > t_low > 0, got t_high={t_high}, t_low={t_low}"
        )
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")
    if length == 1:
        # degenerate single-entry schedule: the high endpoint only
        return (float(t_high),)
    a = math.log(t_high / t_low) / (length - 1)
    values = [t_high * math.exp(-a * i) for i in range(length)]
    values[0] = float(t_high)
    values[-1] = float(t_low)  # pin endpoints exactly
    return tuple(values)


@dataclass(frozen=True)
class TemperatureSchedule:
    t_high: float
    t_low: float
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.values) >= 2 and not all(
            a > b for a, b in zip(self.values, self.values[1:])
        ):
            raise ValueError("schedule must be strictly decreasing")

    @property
    def length(self) -> int:
        return len(self.values)


def make_schedule(t_high: float, t_low: float, length: int) -> TemperatureSchedule:
    """Geometric interpolation from t_high down to t_low over ``length`` steps."""
    return TemperatureSchedule(
        t_high=float(t_high),
        t_low=float(t_low),
        values=_geometric(t_high, t_low, length),
    )


@dataclass(frozen=True)
class AnnealResult:
    best: SpinConfiguration
    best_energy: float
    final: SpinConfiguration
    final_energy: float
    proposals: int
    accepts: int
    success_by_best: bool | None
    success_by_final: bool | None


def simulated_anneal(
    instance: SKInstance,
    kernel: ProposalKernel,
    schedule: TemperatureSchedule,
    rng: np.random.Generator,
    ground_energy: float | None = None,
    start: SpinConfiguration | None = None,
) -> AnnealResult:
    """One annealing run: one proposal per schedule temperature.

    With a local kernel this is plain simulated annealing; with a quantum
    kernel it is the quantum-enhanced variant. Success flags (best-seen and
    final-state) are reported when ``ground_energy`` is supplied.
    """
    if start is None:
        state = ChainState.random_start(instance, rng)
    else:
        state = ChainState.from_configuration(instance, start)
    for temperature in schedule.values:
        mcmc_step(state, instance, kernel, temperature, rng)
    state.resync_energy(instance)
    success_best = success_final = None
    if ground_energy is not None:
        success_best = bool(state.best_energy <= ground_energy + GROUND_TOL)
        success_final = bool(state.current_energy <= ground_energy + GROUND_TOL)
    return AnnealResult(
        best=state.best,
        best_energy=state.best_energy,
        final=state.current,
        final_energy=state.current_energy,
        proposals=state.steps_taken,
        accepts=state.accepts,
        success_by_best=success_best,
        success_by_final=success_final,
    )
