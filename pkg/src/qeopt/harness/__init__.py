"""Experiment harness: configs, seed ledger, sweep runners, CSV persistence."""

from .config import ExperimentConfig, expand_lengths, load_config
from .runners import RunOutcome, execute_run, method_replicas
from .seeds import instance_seed, ledger_rows, make_rng, run_entropy, stream_entropy
from .sweeps import (
    SweepOutputs,
    TaskCoord,
    aggregate_rows,
    plan_tasks,
    replay_run,
    report_from_details,
    run_effort_sweep,
    run_gap_study,
    run_probability_sweep,
    run_scaling_study,
    run_task,
    run_tasks,
)

__all__ = [name for name in dir() if not name.startswith("_")]
