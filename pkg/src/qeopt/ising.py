"""Sherrington-Kirkpatrick instances: generation, energies, exact ground states.

An instance is an n-spin fully connected model with objective

    f(s) = -sum_i linear[i] * s_i  -  sum_{i<j} quadratic[i][j] * s_i * s_j,

all coefficients i.i.d. standard normal. Spin configurations are encoded as
integers with the convention that bit j of the index is 0 for spin +1 and 1
for spin -1, spin 0 in the least-significant bit. This keeps the diagonal of
the statevector module's problem Hamiltonian index-aligned with ``energy``.

Generation is bit-reproducible across platforms. The pipeline, named
``philox4x64-10+u53+ndtri``, is:

1. raw 64-bit words from the Philox4x64-10 counter-based generator keyed
   with ``[seed, 0]`` (numpy's ``np.random.Philox(counter=0, key=seed)``
   stream, first block at counter 1);
2. uniform doubles ``u = ((word >> 11) + 0.5) * 2**-53`` in (0, 1);
3. standard normals via the inverse CDF (``scipy.special.ndtri``).

Draws are consumed in order: ``linear[0..n)`` first, then the strictly
upper-triangular couplings in row-major (i < j) order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.special import ndtri

from .errors import CapExceededError

GENERATOR_NAME = "philox4x64-10+u53+ndtri"

#: Hard cap on instance size (protects downstream 2^n structures).
MAX_GENERATE_N = 30
#: Cap on exhaustive ground-state enumeration.
MAX_ENUMERATION_N = 24
#: Cap on materializing the full 2^n energy table.
MAX_TABLE_N = 20

_ENUMERATION_CHUNK = 1 << 16


def encode_spins(spins: Sequence[int]) -> int:
    """Canonical index of a spin sequence (bit j = 0 iff spin j = +1)."""
    z = 0
    for j, s in enumerate(spins):
        if s == -1:
            z |= 1 << j
        elif s != 1:
            raise ValueError(f"spin {j} must be +1 or -1, got {s!r}")
    return z


def decode_index(index: int, n: int) -> tuple[int, ...]:
    """Spin sequence for a canonical index."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if not 0 <= index < (1 << n):
        raise ValueError(f"index {index} out of range for n={n}")
    return tuple(1 - 2 * ((index >> j) & 1) for j in range(n))


@dataclass(frozen=True)
class SpinConfiguration:
    """A length-n sequence of +-1 spins plus its canonical integer index."""

    spins: tuple[int, ...]
    index: int

    def __post_init__(self) -> None:
        if encode_spins(self.spins) != self.index:
            raise ValueError(
                f"index {self.index} does not encode spins {self.spins}"
            )

    @classmethod
    def from_spins(cls, spins: Iterable[int]) -> "SpinConfiguration":
        spins = tuple(int(s) for s in spins)
        return cls(spins, encode_spins(spins))

    @classmethod
    def from_index(cls, index: int, n: int) -> "SpinConfiguration":
        return cls(decode_index(index, n), index)

    @property
    def n(self) -> int:
        return len(self.spins)

    @cached_property
    def _array(self) -> np.ndarray:
        arr = np.asarray(self.spins, dtype=np.float64)
        arr.setflags(write=False)
        return arr

    def as_array(self) -> np.ndarray:
        """Read-only float64 view of the spins."""
        return self._array

    def flipped(self, j: int) -> "SpinConfiguration":
        """Copy with spin j negated."""
        if not 0 <= j < self.n:
            raise ValueError(f"spin index {j} out of range for n={self.n}")
        spins = list(self.spins)
        spins[j] = -spins[j]
        return SpinConfiguration(tuple(spins), self.index ^ (1 << j))


@dataclass(eq=False)
class SKInstance:
    """An n-spin SK model: per-spin fields and strictly upper couplings.

    Instances are immutable after construction and safe to share across
    threads; regenerating with the same (n, seed) reproduces identical
    coefficients bit for bit.
    """

    n: int
    linear: np.ndarray
    quadratic: np.ndarray
    seed: int
    _energy_table: np.ndarray | None = field(
        default=None, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        self.linear = np.asarray(self.linear, dtype=np.float64)
        self.quadratic = np.asarray(self.quadratic, dtype=np.float64)
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        if self.linear.shape != (self.n,):
            raise ValueError(
                f"linear must have shape ({self.n},), got {self.linear.shape}"
            )
        if self.quadratic.shape != (self.n, self.n):
            raise ValueError(
                f"quadratic must have shape ({self.n}, {self.n}), "
                f"got {self.quadratic.shape}"
            )
        if np.any(np.tril(self.quadratic) != 0.0):
            raise ValueError("quadratic must be strictly upper-triangular")
        self.linear.setflags(write=False)
        self.quadratic.setflags(write=False)

    @cached_property
    def couplings_dense(self) -> np.ndarray:
        """Symmetric coupling matrix quadratic + quadratic.T (zero diagonal)."""
        w = self.quadratic + self.quadratic.T
        w.setflags(write=False)
        return w

    def energy_table(self) -> np.ndarray:
        """Energies of all 2^n configurations, indexed canonically.

        Computed once and cached; requires n <= MAX_TABLE_N.
        """
        if self._energy_table is None:
            if self.n > MAX_TABLE_N:
                raise CapExceededError(
                    f"energy table needs n <= {MAX_TABLE_N}, got {self.n}"
                )
            table = _energies_for_indices(
                self, np.arange(1 << self.n, dtype=np.int64)
            )
            table.setflags(write=False)
            self._energy_table = table
        return self._energy_table


def _spin_matrix(indices: np.ndarray, n: int) -> np.ndarray:
    """(len(indices), n) matrix of +-1 spins for canonical indices."""
    bits = (indices[:, None] >> np.arange(n, dtype=np.int64)[None, :]) & 1
    return 1.0 - 2.0 * bits.astype(np.float64)


def _energies_for_indices(instance: SKInstance, indices: np.ndarray) -> np.ndarray:
    s = _spin_matrix(indices, instance.n)
    pair = np.einsum("zi,ij,zj->z", s, instance.quadratic, s)
    return -(s @ instance.linear) - pair


def generate_sk(n: int, seed: int) -> SKInstance:
    """Generate an SK instance with i.i.d. standard-normal coefficients.

    The (n, seed) pair fully determines the instance; see the module
    docstring for the exact sampling pipeline.
    """
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise ValueError(f"n must be an integer, got {n!r}")
    if n < 1 or n > MAX_GENERATE_N:
        raise ValueError(f"n must be in [1, {MAX_GENERATE_N}], got {n}")
    if not 0 <= int(seed) < (1 << 64):
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    n = int(n)
    seed = int(seed)
    draws = n + n * (n - 1) // 2
    raw = np.random.Philox(counter=0, key=seed).random_raw(draws)
    u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
    coeff = ndtri(u)
    linear = coeff[:n].copy()
    quadratic = np.zeros((n, n))
    iu, ju = np.triu_indices(n, k=1)
    quadratic[iu, ju] = coeff[n:]
    return SKInstance(n=n, linear=linear, quadratic=quadratic, seed=seed)


def energy(instance: SKInstance, s: SpinConfiguration) -> float:
    """Objective value of configuration s."""
    if s.n != instance.n:
        raise ValueError(
            f"configuration has {s.n} spins, instance has {instance.n}"
        )
    arr = s.as_array()
    return float(-(instance.linear @ arr) - arr @ (instance.quadratic @ arr))


def energy_delta(instance: SKInstance, s: SpinConfiguration, flip: int) -> float:
    """energy(s with spin `flip` negated) - energy(s), in O(n)."""
    if not 0 <= flip < instance.n:
        raise ValueError(f"flip index {flip} out of range for n={instance.n}")
    if s.n != instance.n:
        raise ValueError(
            f"configuration has {s.n} spins, instance has {instance.n}"
        )
    arr = s.as_array()
    return float(
        2.0
        * arr[flip]
        * (instance.linear[flip] + instance.couplings_dense[flip] @ arr)
    )


def ground_state(instance: SKInstance) -> tuple[SpinConfiguration, float]:
    """Exhaustive global minimum; ties broken by smallest canonical index."""
    if instance.n > MAX_ENUMERATION_N:
        raise CapExceededError(
            f"ground_state enumerates 2^n states and needs "
            f"n <= {MAX_ENUMERATION_N}, got {instance.n}"
        )
    total = 1 << instance.n
    best_energy = np.inf
    best_index = 0
    for lo in range(0, total, _ENUMERATION_CHUNK):
        idx = np.arange(lo, min(lo + _ENUMERATION_CHUNK, total), dtype=np.int64)
        e = _energies_for_indices(instance, idx)
        k = int(np.argmin(e))
        # strict < keeps the smallest index on exact ties
        if e[k] < best_energy:
            best_energy = float(e[k])
            best_index = int(idx[k])
    return SpinConfiguration.from_index(best_index, instance.n), best_energy


# ---------------------------------------------------------------------------
# Instance files: self-describing, line-oriented, bit-exact round trip.
# Floats are written with repr() (shortest round-trip decimal).

_FILE_FORMAT = "sk-instance/1"


def write_instance(instance: SKInstance, path: str | Path) -> None:
    lines = [
        f"format: {_FILE_FORMAT}",
        f"generator: {GENERATOR_NAME}",
        f"n: {instance.n}",
        f"seed: {instance.seed}",
    ]
    for j, v in enumerate(instance.linear):
        lines.append(f"linear {j} {float(v)!r}")
    for i in range(instance.n):
        for j in range(i + 1, instance.n):
            lines.append(f"coupling {i} {j} {float(instance.quadratic[i, j])!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_instance(path: str | Path) -> SKInstance:
    text = Path(path).read_text()
    header: dict[str, str] = {}
    linear_entries: dict[int, float] = {}
    coupling_entries: dict[tuple[int, int], float] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if ":" in line and not line.startswith(("linear ", "coupling ")):
            key, _, value = line.partition(":")
            header[key.strip()] = value.strip()
            continue
        parts = line.split()
        if parts[0] == "linear" and len(parts) == 3:
            linear_entries[int(parts[1])] = float(parts[2])
        elif parts[0] == "coupling" and len(parts) == 4:
            coupling_entries[(int(parts[1]), int(parts[2]))] = float(parts[3])
        else:
            raise ValueError(f"{path}: unrecognized line {lineno}: {line!r}")
    if header.get("format") != _FILE_FORMAT:
        raise ValueError(
            f"{path}: expected format {_FILE_FORMAT}, got {header.get('format')!r}"
        )
    n = int(header["n"])
    seed = int(header["seed"])
    if sorted(linear_entries) != list(range(n)):
        raise ValueError(f"{path}: linear entries do not cover 0..{n - 1}")
    linear = np.array([linear_entries[j] for j in range(n)])
    quadratic = np.zeros((n, n))
    for (i, j), v in coupling_entries.items():
        if not 0 <= i < j < n:
            raise ValueError(f"{path}: coupling ({i}, {j}) is not upper-triangular")
        quadratic[i, j] = v
    expected_pairs = n * (n - 1) // 2
    if len(coupling_entries) != expected_pairs:
        raise ValueError(
            f"{path}: expected {expected_pairs} couplings, got {len(coupling_entries)}"
        )
    return SKInstance(n=n, linear=linear, quadratic=quadratic, seed=seed)
