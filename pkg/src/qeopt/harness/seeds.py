"""Deterministic rng-stream derivation: the seed ledger.

Every random stream in the harness is keyed by SHA-256 over the master seed
and the task coordinates (scheme ``sha256-qeopt-1``): the first 16 digest
bytes, little-endian, seed a Philox bit generator through a SeedSequence.
Instance seeds are the first 8 bytes, so an instance can be regenerated
from its recorded 64-bit seed alone. Scheduling order never touches any
stream, which is what makes results independent of the worker count.
"""

from __future__ import annotations

import hashlib
from typing import Iterator

import numpy as np

from .config import ExperimentConfig

SCHEME = "sha256-qeopt-1"


def _digest(master_seed: int, parts: tuple) -> bytes:
    msg = "|".join([SCHEME, str(master_seed), *(str(p) for p in parts)])
    return hashlib.sha256(msg.encode("ascii")).digest()


def stream_entropy(master_seed: int, *parts) -> int:
    """128-bit entropy for a named stream."""
    return int.from_bytes(_digest(master_seed, parts)[:16], "little")


def make_rng(entropy: int) -> np.random.Generator:
    """Philox generator seeded through a SeedSequence (spawnable)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def instance_seed(master_seed: int, n: int, index: int, ensemble: str = "tune") -> int:
    """64-bit generation seed for instance ``index`` of an ensemble."""
    return int.from_bytes(
        _digest(master_seed, ("instance", ensemble, n, index))[:8], "little"
    )


def run_entropy(
    master_seed: int,
    method: str,
    n: int,
    length: int,
    instance_index: int,
    repeat: int,
    ensemble: str = "tune",
) -> int:
    """Entropy for one run's rng stream (replica streams spawn from it)."""
    return stream_entropy(
        master_seed, "run", ensemble, method, n, length, instance_index, repeat
    )


def ledger_rows(config: ExperimentConfig) -> Iterator[dict]:
    """Every derived stream of a sweep config, in deterministic order."""
    seen_instances = set()
    for n in config.n_values:
        for idx in range(config.instances):
            key = (n, idx)
            if key not in seen_instances:
                seen_instances.add(key)
                yield {
                    "role": "instance",
                    "ensemble": "tune",
                    "method": "",
                    "n": n,
                    "length": "",
                    "instance": idx,
                    "repeat": "",
                    "entropy": f"{instance_seed(config.master_seed, n, idx):016x}",
                }
        for length in config.lengths_for(n):
            for idx in range(config.instances):
                for rep in range(config.repeats):
                    e = run_entropy(
                        config.master_seed, config.method, n, length, idx, rep
                    )
                    yield {
                        "role": "run",
                        "ensemble": "tune",
                        "method": config.method,
                        "n": n,
                        "length": length,
                        "instance": idx,
                        "repeat": rep,
                        "entropy": f"{e:032x}",
                    }
