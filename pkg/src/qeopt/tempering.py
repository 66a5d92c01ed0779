"""Parallel tempering with optional quantum-enhanced low-temperature replicas.

Replicas are pinned to their ladder temperatures; swaps exchange
configurations (and their cached energies), never temperatures. Every k-th
global step a swap epoch attempts one of the two maximal sets of disjoint
adjacent pairs, alternating between them. With 0-based replica labels and
the ladder stored hot-to-cold, odd epochs attempt (0,1), (2,3), ... and
even epochs (1,2), (3,4), ... - the same two-phase alternation as the
1-based ``start = 2 - ((step/k) mod 2)`` bookkeeping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import ChainState, mcmc_step
from .ising import SKInstance, SpinConfiguration
from .proposal import ProposalKernel
from .schedule import GROUND_TOL, _geometric


@dataclass(frozen=True)
class TemperatureLadder:
    """Strictly decreasing replica temperatures, t_high first."""

    temperatures: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.temperatures) < 2:
            raise ValueError("ladder needs at least 2 replicas")
        if not all(
            a > b for a, b in zip(self.temperatures, self.temperatures[1:])
        ):
            raise ValueError("ladder must be strictly decreasing")

    @property
    def size(self) -> int:
        return len(self.temperatures)


def make_ladder(t_high: float, t_low: float, replicas: int) -> TemperatureLadder:
    """Geometric ladder with the same form as the annealing schedule."""
    if replicas < 2:
        raise ValueError(f"replicas must be >= 2, got {replicas}")
    return TemperatureLadder(_geometric(t_high, t_low, replicas))


def pt_swap_probability(t_i: float, t_j: float, f_i: float, f_j: float) -> float:
    """min(1, exp((1/T_i - 1/T_j) * (f_i - f_j)))."""
    if not (t_i > 0.0 and t_j > 0.0):
        raise ValueError(f"temperatures must be positive, got {t_i}, {t_j}")
    exponent = (1.0 / t_i - 1.0 / t_j) * (f_i - f_j)
    if exponent >= 0.0:
        return 1.0
    return math.exp(exponent)


def swap_pairs_for(step: int, k: int, replicas: int) -> list[tuple[int, int]]:
    """Adjacent 0-based index pairs attempted at a swap epoch.

    ``step`` must be a positive multiple of the swap interval ``k``. Odd
    multiples pair from replica 0, even multiples from replica 1.
    """
    if k < 1:
        raise ValueError(f"swap interval must be >= 1, got {k}")
    if step < 1 or step % k != 0:
        raise ValueError(f"step {step} is not a positive multiple of k={k}")
    epoch = step // k
    start = 0 if epoch % 2 == 1 else 1
    return [(i, i + 1) for i in range(start, replicas - 1, 2)]


class ReplicaEnsemble:
    """M pinned-temperature chains plus the swap bookkeeping.

    The ``m_q`` lowest-temperature replicas propose with the quantum kernel,
    the rest with single-spin flips. Each replica consumes its own rng
    stream; swap decisions consume a dedicated stream. All streams are
    spawned deterministically from the ensemble rng at construction.
    """

    def __init__(
        self,
        instance: SKInstance,
        ladder: TemperatureLadder,
        m_q: int,
        kernel_quantum: ProposalKernel | None,
        swap_interval: int,
        rng: np.random.Generator,
    ) -> None:
        m = ladder.size
        if not 0 <= m_q <= m:
            raise ValueError(f"m_q must be in [0, {m}], got {m_q}")
        if m_q > 0 and (kernel_quantum is None or kernel_quantum.kind != "quantum"):
            raise ValueError("m_q > 0 requires a quantum kernel")
        if swap_interval < 1:
            raise ValueError(f"swap interval must be >= 1, got {swap_interval}")
        self.instance = instance
        self.ladder = ladder
        self.m_q = m_q
        self.kernel_quantum = kernel_quantum
        self.swap_interval = swap_interval
        self.step = 0
        self.swap_attempts = 0
        self.swap_accepts = 0
        streams = rng.spawn(m + 1)
        self._replica_rngs = streams[:m]
        self._swap_rng = streams[m]
        self._local = ProposalKernel.local()
        self.replicas = [
            ChainState.random_start(instance, self._replica_rngs[i])
            for i in range(m)
        ]

    def kernel_for(self, i: int) -> ProposalKernel:
        """Quantum for the m_q coldest replicas (highest indices)."""
        if i >= self.ladder.size - self.m_q:
            return self.kernel_quantum
        return self._local

    def advance(self) -> None:
        """One global step: every replica moves, then a swap epoch if due."""
        self.step += 1
        for i, state in enumerate(self.replicas):
            mcmc_step(
                state,
                self.instance,
                self.kernel_for(i),
                self.ladder.temperatures[i],
                self._replica_rngs[i],
            )
        if self.step % self.swap_interval == 0:
            self.swap_epoch()

    def swap_epoch(self, force: bool | None = None) -> None:
        """Attempt the parity-alternating adjacent swaps for the current step.

        ``force`` overrides the acceptance decision (tests only); the swap
        uniform is drawn either way so rng streams stay aligned.
        """
        pairs = swap_pairs_for(self.step, self.swap_interval, self.ladder.size)
        temps = self.ladder.temperatures
        for i, j in pairs:
            a, b = self.replicas[i], self.replicas[j]
            prob = pt_swap_probability(
                temps[i], temps[j], a.current_energy, b.current_energy
            )
            v = self._swap_rng.random()
            self.swap_attempts += 1
            accept = (v < prob) if force is None else force
            if accept:
                self.swap_accepts += 1
                a.current, b.current = b.current, a.current
                a.current_energy, b.current_energy = (
                    b.current_energy,
                    a.current_energy,
                )
                for state in (a, b):
                    if state.current_energy < state.best_energy:
                        state.best = state.current
                        state.best_energy = state.current_energy


@dataclass(frozen=True)
class PTResult:
    best: SpinConfiguration
    best_energy: float
    coldest: SpinConfiguration
    coldest_energy: float
    proposals: int
    replica_accepts: tuple[int, ...]
    swap_attempts: int
    swap_accepts: int
    success_by_best: bool | None
    success_by_coldest: bool | None


def run_pt(
    instance: SKInstance,
    ladder: TemperatureLadder,
    m_q: int,
    kernel_quantum: ProposalKernel | None,
    k: int,
    total_steps: int,
    rng: np.random.Generator,
    ground_energy: float | None = None,
) -> PTResult:
    """Run a replica ensemble for ``total_steps`` global steps.

    Returns the coldest replica's final configuration (the algorithm's
    nominal output) alongside the global best seen at any replica; the
    total proposal count is replicas * total_steps (swap costs excluded).
    """
    if total_steps < 1:
        raise ValueError(f"total_steps must be >= 1, got {total_steps}")
    ensemble = ReplicaEnsemble(instance, ladder, m_q, kernel_quantum, k, rng)
    for _ in range(total_steps):
        ensemble.advance()
    for state in ensemble.replicas:
        state.resync_energy(instance)
    best = min(ensemble.replicas, key=lambda s: s.best_energy)
    coldest = ensemble.replicas[-1]
    success_best = success_coldest = None
    if ground_energy is not None:
        success_best = bool(best.best_energy <= ground_energy + GROUND_TOL)
        success_coldest = bool(
            coldest.current_energy <= ground_energy + GROUND_TOL
        )
    return PTResult(
        best=best.best,
        best_energy=best.best_energy,
        coldest=coldest.current,
        coldest_energy=coldest.current_energy,
        proposals=ladder.size * total_steps,
        replica_accepts=tuple(s.accepts for s in ensemble.replicas),
        swap_attempts=ensemble.swap_attempts,
        swap_accepts=ensemble.swap_accepts,
        success_by_best=success_best,
        success_by_coldest=success_coldest,
    )
