"""Metropolis-Hastings kernel and single-temperature chain driver.

One step = one proposal = one unit of effort; counters track proposals, not
accepted moves. All randomness comes from the caller's ``numpy`` Generator;
each step consumes the kernel's draws followed by one acceptance uniform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ising import SKInstance, SpinConfiguration, energy, energy_delta
from .proposal import (
    ProposalKernel,
    propose_local,
    propose_quantum,
    propose_uniform,
)

#: Recompute the cached energy from scratch every this many steps.
RESYNC_INTERVAL = 4096


@dataclass
class ChainState:
    """Mutable state of one Markov chain, owned by a single worker."""

    current: SpinConfiguration
    current_energy: float
    best: SpinConfiguration
    best_energy: float
    steps_taken: int = 0
    accepts: int = 0

    @classmethod
    def from_configuration(
        cls, instance: SKInstance, start: SpinConfiguration
    ) -> "ChainState":
        e = energy(instance, start)
        return cls(current=start, current_energy=e, best=start, best_energy=e)

    @classmethod
    def random_start(
        cls, instance: SKInstance, rng: np.random.Generator
    ) -> "ChainState":
        start = SpinConfiguration.from_index(
            int(rng.integers(1 << instance.n)), instance.n
        )
        return cls.from_configuration(instance, start)

    def resync_energy(self, instance: SKInstance) -> None:
        self.current_energy = energy(instance, self.current)


def mh_accept_probability(delta_f: float, temperature: float) -> float:
    """min(1, exp(-delta_f / T)) for a symmetric proposal."""
    if not temperature > 0.0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    if delta_f <= 0.0:
        return 1.0
    return math.exp(-delta_f / temperature)


def mcmc_step(
    state: ChainState,
    instance: SKInstance,
    kernel: ProposalKernel,
    temperature: float,
    rng: np.random.Generator,
) -> bool:
    """Advance the chain by one proposal; returns whether it was accepted.

    Local proposals use the O(n) energy update; uniform and quantum
    proposals (which may flip many spins) re-evaluate the objective.
    The acceptance uniform is always drawn, even for downhill moves.
    """
    if kernel.kind == "local":
        flip = int(rng.integers(state.current.n))
        delta = energy_delta(instance, state.current, flip)
        proposed = None
    else:
        if kernel.kind == "uniform":
            proposed = propose_uniform(instance.n, rng)
        else:
            proposed = propose_quantum(state.current, instance, kernel, rng)
        delta = energy(instance, proposed) - state.current_energy

    accept_p = mh_accept_probability(delta, temperature)
    accepted = rng.random() < accept_p

    state.steps_taken += 1
    if accepted:
        state.accepts += 1
        state.current = state.current.flipped(flip) if proposed is None else proposed
        state.current_energy += delta
        if state.current_energy < state.best_energy:
            state.best = state.current
            state.best_energy = state.current_energy
    return accepted


def run_chain(
    instance: SKInstance,
    kernel: ProposalKernel,
    temperature: float,
    length: int,
    rng: np.random.Generator,
    record_stride: int = 0,
    start: SpinConfiguration | None = None,
) -> tuple[ChainState, np.ndarray | None]:
    """Run a fixed-budget chain from a uniformly random start.

    ``record_stride`` > 0 records the canonical index of the post-step state
    every that many steps (indices only, for memory economy). Returns the
    final ChainState and the trajectory (or None).
    """
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")
    if start is None:
        state = ChainState.random_start(instance, rng)
    else:
        state = ChainState.from_configuration(instance, start)
    trajectory = (
        np.empty(length // record_stride, dtype=np.int64) if record_stride else None
    )
    rec = 0
    for step in range(1, length + 1):
        mcmc_step(state, instance, kernel, temperature, rng)
        if record_stride and step % record_stride == 0:
            trajectory[rec] = state.current.index
            rec += 1
        if step % RESYNC_INTERVAL == 0:
            state.resync_energy(instance)
    return state, trajectory
