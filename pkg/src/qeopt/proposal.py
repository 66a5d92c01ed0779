"""Interchangeable proposal kernels: local flip, uniform, quantum.

All three kernels have symmetric proposal probabilities Q(s'|s) = Q(s|s'),
which is what permits the min(1, exp(-df/T)) Metropolis acceptance used by
the chain module. ``exact_proposal_matrix`` materializes Q densely for the
spectral analysis path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapExceededError
from .ising import SKInstance, SpinConfiguration
from .statevector import (
    EvolutionParams,
    _apply_mixer,
    compute_alpha,
    sample_measurement,
    trotter_evolve,
)

#: Default hyperparameter ranges for the quantum kernel.
DEFAULT_GAMMA_RANGE = (0.25, 0.6)
DEFAULT_T_RANGE = (2, 20)
DEFAULT_DT = 0.8

#: Cap on dense quantum proposal matrices.
MAX_MATRIX_QUBITS = 12


@dataclass(frozen=True)
class ProposalKernel:
    """Tagged choice of proposal mechanism.

    ``gamma_range``/``t_range``/``dt`` are present only for the quantum
    kind. t is drawn as a uniform integer over [t_min, t_max]; gamma as a
    continuous uniform over [gamma_min, gamma_max].
    """

    kind: str
    gamma_range: tuple[float, float] | None = None
    t_range: tuple[int, int] | None = None
    dt: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("local", "uniform", "quantum"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind != "quantum":
            if not (self.gamma_range is None and self.t_range is None and self.dt is None):
                raise ValueError(f"{self.kind} kernel takes no quantum hyperparameters")
            return
        g_lo, g_hi = self.gamma_range
        t_lo, t_hi = self.t_range
        if not (0.0 < g_lo <= g_hi < 1.0):
            raise ValueError(f"gamma range must satisfy 0 < lo <= hi < 1, got {self.gamma_range}")
        if not (1 <= t_lo <= t_hi) or int(t_lo) != t_lo or int(t_hi) != t_hi:
            raise ValueError(f"t range must be integers with 1 <= lo <= hi, got {self.t_range}")
        if not self.dt > 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")

    @classmethod
    def local(cls) -> "ProposalKernel":
        return cls("local")

    @classmethod
    def uniform(cls) -> "ProposalKernel":
        return cls("uniform")

    @classmethod
    def quantum(
        cls,
        gamma_range: tuple[float, float] = DEFAULT_GAMMA_RANGE,
        t_range: tuple[int, int] = DEFAULT_T_RANGE,
        dt: float = DEFAULT_DT,
    ) -> "ProposalKernel":
        return cls(
            "quantum",
            gamma_range=(float(gamma_range[0]), float(gamma_range[1])),
            t_range=(int(t_range[0]), int(t_range[1])),
            dt=float(dt),
        )


def propose_local(s: SpinConfiguration, rng: np.random.Generator) -> SpinConfiguration:
    """Copy of s with one uniformly chosen spin negated."""
    return s.flipped(int(rng.integers(s.n)))


def propose_uniform(n: int, rng: np.random.Generator) -> SpinConfiguration:
    """Uniformly random configuration over all 2^n, independent of state."""
    return SpinConfiguration.from_index(int(rng.integers(1 << n)), n)


def propose_quantum(
    s: SpinConfiguration,
    instance: SKInstance,
    kernel: ProposalKernel,
    rng: np.random.Generator,
) -> SpinConfiguration:
    """One quantum proposal: draw (t, gamma), evolve |s>, measure once.

    Consumes exactly three variates from ``rng`` in order: the integer t,
    the continuous gamma, and the measurement uniform.
    """
    if kernel.kind != "quantum":
        raise ValueError(f"propose_quantum needs a quantum kernel, got {kernel.kind}")
    t_lo, t_hi = kernel.t_range
    g_lo, g_hi = kernel.gamma_range
    steps = int(rng.integers(t_lo, t_hi + 1))
    gamma = float(rng.uniform(g_lo, g_hi))
    params = EvolutionParams(
        gamma=gamma, steps=steps, dt=kernel.dt, alpha=compute_alpha(instance)
    )
    state = trotter_evolve(s, instance, params)
    return sample_measurement(state, rng)


def _quantum_matrix(
    instance: SKInstance, kernel: ProposalKernel, gamma_nodes: int
) -> np.ndarray:
    """Exact quantum Q: outcome distributions averaged over t and gamma.

    t is averaged over every integer in [t_min, t_max]; gamma over
    ``gamma_nodes`` midpoint-rule quadrature nodes in [gamma_min, gamma_max].
    """
    n = instance.n
    dim = 1 << n
    t_lo, t_hi = kernel.t_range
    g_lo, g_hi = kernel.gamma_range
    alpha = compute_alpha(instance)
    width = (g_hi - g_lo) / gamma_nodes
    nodes = g_lo + width * (np.arange(gamma_nodes) + 0.5)
    energy = instance.energy_table()

    acc = np.zeros((dim, dim))
    for gamma in nodes:
        phase = np.exp(-1j * kernel.dt * (1.0 - gamma) * alpha * energy)
        theta = gamma * kernel.dt
        c, s = float(np.cos(theta)), float(np.sin(theta))
        cols = np.eye(dim, dtype=np.complex128)  # column z = evolving |z>
        acc_g = np.zeros((dim, dim))
        for step in range(1, t_hi + 1):
            cols *= phase[:, None]
            _apply_mixer(cols, n, c, s)
            if step >= t_lo:
                acc_g += np.abs(cols) ** 2
        acc += acc_g / (t_hi - t_lo + 1)
    # columns are destinations for a given start; Q rows index the start
    return acc.T / gamma_nodes


def exact_proposal_matrix(
    instance: SKInstance, kernel: ProposalKernel, gamma_nodes: int = 8
) -> np.ndarray:
    """Row-stochastic proposal matrix Q with Q[s, s'] = Q(s' | s)."""
    if gamma_nodes < 1:
        raise ValueError(f"gamma_nodes must be >= 1, got {gamma_nodes}")
    n = instance.n
    dim = 1 << n
    if kernel.kind == "local":
        q = np.zeros((dim, dim))
        idx = np.arange(dim)
        for j in range(n):
            q[idx, idx ^ (1 << j)] = 1.0 / n
        return q
    if kernel.kind == "uniform":
        return np.full((dim, dim), 1.0 / dim)
    if n > MAX_MATRIX_QUBITS:
        raise CapExceededError(
            f"dense quantum proposal matrix needs n <= {MAX_MATRIX_QUBITS}, got {n}"
        )
    return _quantum_matrix(instance, kernel, gamma_nodes)
