"""Hybrid quantum-classical combinatorial optimization on SK spin glasses.

Classical MCMC, simulated annealing, and parallel tempering next to their
quantum-enhanced variants, where proposals come from exact statevector
simulation of Trotterized real-time evolution; plus exact spectral-gap
diagnostics and a reproducible benchmark harness.
"""

__version__ = "0.1.0"

from .analysis import (
    DeltaMinResult,
    EffortRecord,
    OptimalLengthFit,
    TransitionMatrix,
    boltzmann,
    delta_min,
    effort,
    measure_mixing_time,
    optimal_length,
    repeats_needed,
    spectral_gap,
    success_probability,
    thermalization_bounds,
    transition_matrix,
    tv_distance,
)
from .chain import ChainState, mcmc_step, mh_accept_probability, run_chain
from .errors import (
    CapExceededError,
    ConfigError,
    InsufficientDataError,
    QeoptError,
)
from .ising import (
    SKInstance,
    SpinConfiguration,
    decode_index,
    encode_spins,
    energy,
    energy_delta,
    generate_sk,
    ground_state,
    read_instance,
    write_instance,
)
from .proposal import (
    ProposalKernel,
    exact_proposal_matrix,
    propose_local,
    propose_quantum,
    propose_uniform,
)
from .schedule import (
    AnnealResult,
    TemperatureSchedule,
    make_schedule,
    simulated_anneal,
)
from .statevector import (
    EvolutionParams,
    QuantumState,
    apply_mixer_layer,
    apply_problem_phase,
    basis_state,
    compute_alpha,
    outcome_distribution,
    sample_measurement,
    trotter_evolve,
)
from .tempering import (
    PTResult,
    ReplicaEnsemble,
    TemperatureLadder,
    make_ladder,
    pt_swap_probability,
    run_pt,
    swap_pairs_for,
)

__all__ = [name for name in dir() if not name.startswith("_")]
