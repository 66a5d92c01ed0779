"""Exact dense simulation of the quantum proposal circuit.

The proposal unitary is first-order Trotterized real-time evolution under

    H = gamma * sum_j X_j  +  (1 - gamma) * alpha * diag(f)

where f is the instance objective over canonical indices (the ZZ/Z problem
term written in the computational basis; with the package's spin-bit
convention its diagonal at index z is exactly the objective value f(z)).
One Trotter step of length dt applies the problem phase
exp(-i*dt*(1-gamma)*alpha*f) and then one mixer rotation
exp(-i*dt*gamma*X_j) on every qubit. The modulus of the resulting transition
amplitudes is symmetric, |<s'|U|s>| = |<s|U|s'>|, which is what licenses the
Metropolis simplification downstream; tests assert it exhaustively.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .errors import CapExceededError
from .ising import SKInstance, SpinConfiguration

#: Cap on dense statevector work.
MAX_QUBITS = 14

_NORM_TOL = 1e-10


@dataclass(frozen=True)
class EvolutionParams:
    """Hyperparameters of one proposal evolution.

    gamma: mixing weight in (0, 1); steps: integer Trotter step count;
    dt: step length; alpha: problem-term normalization.
    """

    gamma: float
    steps: int
    dt: float
    alpha: float

    def __post_init__(self) -> None:
        if not 0.0 < self.gamma < 1.0:
            raise ValueError(f"gamma must be in (0, 1), got {self.gamma}")
        if not isinstance(self.steps, (int, np.integer)) or self.steps < 1:
            raise ValueError(f"steps must be a positive integer, got {self.steps}")
        if not self.dt > 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.alpha > 0.0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")

    @classmethod
    def unchecked(
        cls, gamma: float, steps: int, dt: float, alpha: float
    ) -> "EvolutionParams":
        """Bypass validation; lets tests pin gamma to the endpoints 0 and 1."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "gamma", gamma)
        object.__setattr__(obj, "steps", steps)
        object.__setattr__(obj, "dt", dt)
        object.__setattr__(obj, "alpha", alpha)
        return obj


@dataclass(frozen=True)
class QuantumState:
    """Unit-norm complex amplitude vector over 2^n canonical indices."""

    amplitudes: np.ndarray
    n: int

    def __post_init__(self) -> None:
        if self.amplitudes.shape != (1 << self.n,):
            raise ValueError(
                f"amplitude vector must have length 2^{self.n}, "
                f"got {self.amplitudes.shape}"
            )
        norm_sq = float(np.sum(np.abs(self.amplitudes) ** 2))
        if abs(norm_sq - 1.0) > _NORM_TOL:
            raise ValueError(f"state norm^2 deviates from 1: {norm_sq}")


def _check_qubit_cap(n: int) -> None:
    if n > MAX_QUBITS:
        raise CapExceededError(
            f"dense statevector work needs n <= {MAX_QUBITS}, got {n}"
        )


def basis_state(s: SpinConfiguration) -> QuantumState:
    """Computational basis state |s> at the canonical index of s."""
    _check_qubit_cap(s.n)
    amps = np.zeros(1 << s.n, dtype=np.complex128)
    amps[s.index] = 1.0
    return QuantumState(amps, s.n)


def compute_alpha(instance: SKInstance) -> float:
    """Problem-term normalization: sqrt(n) over the coefficient 2-norm.

    Makes the problem term's energy scale comparable to the n-qubit mixer,
    so the useful gamma range is instance-independent.
    """
    total = float(np.sum(instance.linear**2) + np.sum(instance.quadratic**2))
    if total == 0.0:
        raise ValueError("alpha is undefined for an all-zero instance")
    return float(np.sqrt(instance.n) / np.sqrt(total))


def _problem_phase_vector(
    instance: SKInstance, params: EvolutionParams
) -> np.ndarray:
    """Per-index phase factors exp(-i*dt*(1-gamma)*alpha*f(z))."""
    coeff = params.dt * (1.0 - params.gamma) * params.alpha
    return np.exp(-1j * coeff * instance.energy_table())


def _apply_mixer(amps: np.ndarray, n: int, c: float, s: float) -> None:
    """In-place mixer layer on axis 0 of ``amps`` (trailing axes ride along)."""
    mis = -1j * s
    rest = amps.shape[1] if amps.ndim == 2 else 1
    flat = amps.reshape(-1)
    for j in range(n):
        v = flat.reshape(1 << (n - 1 - j), 2, (1 << j) * rest)
        a = v[:, 0, :].copy()
        b = v[:, 1, :]
        v[:, 0, :] = c * a + mis * b
        v[:, 1, :] = mis * a + c * b


@numba.njit(cache=True)
def _evolve_kernel(amps, phase, c, s, steps, n):  # pragma: no cover - jit
    dim = amps.shape[0]
    mis = -1j * s
    for _ in range(steps):
        for z in range(dim):
            amps[z] *= phase[z]
        for j in range(n):
            stride = 1 << j
            block = stride << 1
            for base in range(0, dim, block):
                for lo in range(stride):
                    i0 = base + lo
                    i1 = i0 + stride
                    a = amps[i0]
                    b = amps[i1]
                    amps[i0] = c * a + mis * b
                    amps[i1] = mis * a + c * b


def apply_problem_phase(
    state: QuantumState, instance: SKInstance, params: EvolutionParams
) -> QuantumState:
    """One diagonal problem-phase layer."""
    if state.n != instance.n:
        raise ValueError(
            f"state has {state.n} qubits, instance has {instance.n} spins"
        )
    amps = state.amplitudes * _problem_phase_vector(instance, params)
    return QuantumState(amps, state.n)


def apply_mixer_layer(state: QuantumState, params: EvolutionParams) -> QuantumState:
    """One mixer layer: exp(-i*dt*gamma*X_j) on every qubit j."""
    theta = params.gamma * params.dt
    amps = state.amplitudes.copy()
    _apply_mixer(amps, state.n, float(np.cos(theta)), float(np.sin(theta)))
    return QuantumState(amps, state.n)


def trotter_evolve(
    s: SpinConfiguration, instance: SKInstance, params: EvolutionParams
) -> QuantumState:
    """Evolve |s> by ``steps`` repetitions of (problem phase; mixer layer)."""
    if s.n != instance.n:
        raise ValueError(
            f"configuration has {s.n} spins, instance has {instance.n}"
        )
    _check_qubit_cap(instance.n)
    amps = np.zeros(1 << s.n, dtype=np.complex128)
    amps[s.index] = 1.0
    phase = _problem_phase_vector(instance, params)
    theta = params.gamma * params.dt
    _evolve_kernel(
        amps,
        phase,
        float(np.cos(theta)),
        float(np.sin(theta)),
        int(params.steps),
        s.n,
    )
    return QuantumState(amps, s.n)


def outcome_distribution(state: QuantumState) -> np.ndarray:
    """Computational-basis measurement distribution |amplitude_z|^2."""
    return np.abs(state.amplitudes) ** 2


def sample_measurement(
    state: QuantumState, rng: np.random.Generator
) -> SpinConfiguration:
    """One measurement shot via inverse CDF on a single uniform variate."""
    probs = outcome_distribution(state)
    cdf = np.cumsum(probs)
    u = rng.random() * cdf[-1]
    z = int(np.searchsorted(cdf, u, side="right"))
    z = min(z, len(probs) - 1)
    return SpinConfiguration.from_index(z, state.n)
