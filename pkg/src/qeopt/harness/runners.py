"""Execution of a single configured run (one anneal, chain, or PT ensemble)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..chain import run_chain
from ..ising import SKInstance
from ..proposal import ProposalKernel
from ..schedule import GROUND_TOL, make_schedule, simulated_anneal
from ..tempering import make_ladder, run_pt
from .config import ExperimentConfig


@dataclass(frozen=True)
class RunOutcome:
    success_best: bool
    success_final: bool
    best_energy: float
    final_energy: float
    proposals: int


def quantum_kernel(config: ExperimentConfig) -> ProposalKernel:
    return ProposalKernel.quantum(
        gamma_range=config.gamma_range, t_range=config.t_range, dt=config.dt
    )


def single_chain_kernel(config: ExperimentConfig) -> ProposalKernel:
    kind = config.resolved_kernel()
    if kind == "quantum":
        return quantum_kernel(config)
    return ProposalKernel(kind)


def execute_run(
    config: ExperimentConfig,
    n: int,
    length: int,
    instance: SKInstance,
    ground_energy: float,
    rng: np.random.Generator,
) -> RunOutcome:
    """One run of the configured method at chain length ``length``."""
    method = config.method
    if method in ("sa", "qesa"):
        kernel = (
            quantum_kernel(config) if method == "qesa" else ProposalKernel.local()
        )
        schedule = make_schedule(config.t_high, config.t_low, length)
        res = simulated_anneal(
            instance, kernel, schedule, rng, ground_energy=ground_energy
        )
        return RunOutcome(
            success_best=res.success_by_best,
            success_final=res.success_by_final,
            best_energy=res.best_energy,
            final_energy=res.final_energy,
            proposals=res.proposals,
        )
    if method == "mcmc":
        state, _ = run_chain(
            instance,
            single_chain_kernel(config),
            config.resolved_temperature(),
            length,
            rng,
        )
        return RunOutcome(
            success_best=bool(state.best_energy <= ground_energy + GROUND_TOL),
            success_final=bool(
                state.current_energy <= ground_energy + GROUND_TOL
            ),
            best_energy=state.best_energy,
            final_energy=state.current_energy,
            proposals=state.steps_taken,
        )
    if method in ("pt", "qept"):
        m_q = config.resolved_m_q() if method == "qept" else 0
        res = run_pt(
            instance,
            make_ladder(config.t_high, config.t_low, config.replicas),
            m_q,
            quantum_kernel(config) if m_q > 0 else None,
            config.swap_interval_for(n),
            length,
            rng,
            ground_energy=ground_energy,
        )
        return RunOutcome(
            success_best=res.success_by_best,
            success_final=res.success_by_coldest,
            best_energy=res.best_energy,
            final_energy=res.coldest_energy,
            proposals=res.proposals,
        )
    raise ValueError(f"unknown method {method!r}")


def method_replicas(config: ExperimentConfig) -> int:
    """Chains advanced per step: M for the PT family, 1 otherwise."""
    return config.replicas if config.method in ("pt", "qept") else 1
