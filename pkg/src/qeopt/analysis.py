"""Exact small-n diagnostics and the evaluation metrics.

Boltzmann distributions, Metropolis transition matrices, spectral gaps,
thermalization bounds, success probabilities, the repeats formula
R = log(1-p)/log(1-p_s), effort N_p = M * ell * R, and the quadratic
optimal-length fit over effort sweeps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapExceededError, InsufficientDataError
from .ising import SKInstance
from .proposal import ProposalKernel, exact_proposal_matrix
from .schedule import TemperatureSchedule

#: Cap on dense eigendecompositions.
MAX_SPECTRAL_N = 12

#: Target confidence for effort accounting (N_0.99).
DEFAULT_TARGET_P = 0.99

_WILSON_Z = 1.959963984540054  # 97.5% normal quantile

_ROW_TOL = 1e-10
_SYM_TOL = 1e-9


def boltzmann(instance: SKInstance, temperature: float) -> np.ndarray:
    """Boltzmann distribution over canonical indices, max-shifted for stability."""
    if not temperature > 0.0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    if instance.n > 20:
        raise CapExceededError(f"boltzmann needs n <= 20, got {instance.n}")
    e = instance.energy_table()
    w = np.exp(-(e - e.min()) / temperature)
    return w / w.sum()


@dataclass(frozen=True)
class TransitionMatrix:
    """Row-stochastic Metropolis matrix together with its stationary law."""

    entries: np.ndarray
    temperature: float
    kernel: str
    stationary: np.ndarray


def transition_matrix(
    instance: SKInstance,
    proposal: np.ndarray,
    temperature: float,
    kernel: str = "",
) -> TransitionMatrix:
    """P(s'|s) = Q(s'|s) * min(1, exp(-(f(s')-f(s))/T)), rejected mass on the diagonal.

    The proposal matrix must be row-stochastic and symmetric; asymmetry
    beyond 1e-9 is rejected because the Metropolis simplification would be
    wrong for it.
    """
    if not temperature > 0.0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    dim = 1 << instance.n
    if proposal.shape != (dim, dim):
        raise ValueError(
            f"proposal matrix shape {proposal.shape} does not match 2^{instance.n}"
        )
    row_err = np.abs(proposal.sum(axis=1) - 1.0).max()
    if row_err > _SYM_TOL:
        raise ValueError(f"proposal rows must sum to 1 (max error {row_err:.3g})")
    asym = np.abs(proposal - proposal.T).max()
    if asym > _SYM_TOL:
        raise ValueError(
            f"proposal matrix asymmetry {asym:.3g} exceeds {_SYM_TOL:.0e}"
        )
    e = instance.energy_table()
    with np.errstate(over="ignore"):
        accept = np.exp(np.minimum(0.0, -(e[None, :] - e[:, None]) / temperature))
    p = proposal * accept
    np.fill_diagonal(p, 0.0)
    diag = 1.0 - p.sum(axis=1)
    np.fill_diagonal(p, np.maximum(diag, 0.0))
    return TransitionMatrix(
        entries=p,
        temperature=float(temperature),
        kernel=kernel,
        stationary=boltzmann(instance, temperature),
    )


def _check_stochastic(p: np.ndarray) -> None:
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise ValueError(f"transition matrix must be square, got {p.shape}")
    if p.min() < -1e-12:
        raise ValueError(f"transition matrix has negative entries ({p.min():.3g})")
    row_err = np.abs(p.sum(axis=1) - 1.0).max()
    if row_err > 1e-8:
        raise ValueError(f"transition matrix rows must sum to 1 (max error {row_err:.3g})")


def spectral_gap(matrix: TransitionMatrix) -> float:
    """delta = 1 - max_{lambda != 1} |lambda| via the symmetrized eigensolve.

    Detailed balance makes D^(1/2) P D^(-1/2) symmetric (D = diag(mu)), so
    the spectrum is real and numerically robust. Exactly one eigenvalue 1
    is excluded.
    """
    p = matrix.entries
    _check_stochastic(p)
    if p.shape[0] > (1 << MAX_SPECTRAL_N):
        raise CapExceededError(
            f"spectral_gap needs n <= {MAX_SPECTRAL_N}, got dim {p.shape[0]}"
        )
    d = np.sqrt(matrix.stationary)
    sym = d[:, None] * p / d[None, :]
    sym = 0.5 * (sym + sym.T)
    eigs = np.linalg.eigvalsh(sym)
    top = int(np.argmax(eigs))
    if abs(eigs[top] - 1.0) > 1e-8:
        raise ValueError(
            f"leading eigenvalue {eigs[top]} is not 1; matrix is not stochastic "
            "against its stationary distribution"
        )
    rest = np.delete(eigs, top)
    if rest.size == 0:
        return 1.0
    delta = 1.0 - float(np.abs(rest).max())
    return min(max(delta, 0.0), 1.0)


def thermalization_bounds(
    delta: float, stationary: np.ndarray, epsilon: float = 0.01
) -> tuple[float, float]:
    """Spectral-gap mixing-time bracket (worst-case start).

    lower = (1/delta - 1) * ln(1/(2 eps));
    upper = (1/delta) * ln(1/(eps * min_s mu(s))).
    delta = 0 signals an unbounded chain: returns (inf, inf).
    """
    if delta < 0.0 or delta > 1.0:
        raise ValueError(f"delta must be in [0, 1], got {delta}")
    if not 0.0 < epsilon < 0.5:
        raise ValueError(f"epsilon must be in (0, 0.5), got {epsilon}")
    mu_min = float(np.min(stationary))
    if mu_min <= 0.0:
        raise ValueError("stationary distribution must be strictly positive")
    if delta == 0.0:
        return (math.inf, math.inf)
    lower = (1.0 / delta - 1.0) * math.log(1.0 / (2.0 * epsilon))
    upper = (1.0 / delta) * math.log(1.0 / (epsilon * mu_min))
    return (lower, upper)


def measure_mixing_time(
    matrix: TransitionMatrix, epsilon: float = 0.01, max_steps: int = 10**6
) -> int:
    """Smallest t with max_s TV(P^t(s, .), mu) <= epsilon, by direct iteration."""
    p = matrix.entries
    mu = matrix.stationary
    dist = np.eye(p.shape[0])
    for t in range(1, max_steps + 1):
        dist = dist @ p
        worst = 0.5 * np.abs(dist - mu[None, :]).sum(axis=1).max()
        if worst <= epsilon:
            return t
    raise InsufficientDataError(
        f"chain did not mix to {epsilon} within {max_steps} steps"
    )


@dataclass(frozen=True)
class DeltaMinResult:
    delta: float
    temperature: float


def delta_min(
    instance: SKInstance,
    kernel: ProposalKernel,
    schedule: TemperatureSchedule,
    gamma_nodes: int = 8,
) -> DeltaMinResult:
    """Minimum spectral gap over the schedule's temperatures, with its argmin."""
    if instance.n > 10:
        raise CapExceededError(f"delta_min needs n <= 10, got {instance.n}")
    q = exact_proposal_matrix(instance, kernel, gamma_nodes=gamma_nodes)
    best = DeltaMinResult(delta=math.inf, temperature=math.nan)
    for temperature in schedule.values:
        d = spectral_gap(transition_matrix(instance, q, temperature, kernel.kind))
        if d < best.delta:
            best = DeltaMinResult(delta=d, temperature=temperature)
    return best


def success_probability(outcomes) -> tuple[float, float]:
    """Sample success rate and the 95% Wilson interval half-width."""
    outcomes = list(outcomes)
    if not outcomes:
        raise ValueError("success_probability needs at least one outcome")
    k = len(outcomes)
    p_hat = sum(bool(o) for o in outcomes) / k
    z2 = _WILSON_Z**2
    denom = 1.0 + z2 / k
    half = (
        _WILSON_Z
        * math.sqrt(p_hat * (1.0 - p_hat) / k + z2 / (4.0 * k * k))
        / denom
    )
    return (p_hat, half)


def repeats_needed(p_s: float, p: float = DEFAULT_TARGET_P) -> float:
    """R = log(1-p)/log(1-p_s), floored at 1; p_s = 0 yields infinity."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"target probability must be in (0, 1), got {p}")
    if not 0.0 <= p_s <= 1.0:
        raise ValueError(f"success probability must be in [0, 1], got {p_s}")
    if p_s == 0.0:
        return math.inf
    if p_s == 1.0:
        return 1.0
    return max(1.0, math.log1p(-p) / math.log1p(-p_s))


def effort(length: int, repeats: float, replicas: int = 1) -> float:
    """Total proposals to reach the target: N_p = M * ell * R."""
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")
    if replicas < 1:
        raise ValueError(f"replicas must be >= 1, got {replicas}")
    if not (repeats >= 1.0 or math.isinf(repeats)):
        raise ValueError(f"repeats must be >= 1 or infinite, got {repeats}")
    return float(replicas) * float(length) * float(repeats)


@dataclass(frozen=True)
class EffortRecord:
    """One (n, method, ell) evaluation row."""

    n: int
    method: str
    length: int
    replicas: int
    p_s: float
    p_s_halfwidth: float
    repeats: float
    effort: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_s <= 1.0:
            raise ValueError(f"p_s must be in [0, 1], got {self.p_s}")
        if math.isfinite(self.effort):
            expected = self.replicas * self.length * self.repeats
            if abs(self.effort - expected) > 1e-9 * max(1.0, abs(expected)):
                raise ValueError(
                    f"effort {self.effort} != M*l*R = {expected}"
                )


@dataclass(frozen=True)
class OptimalLengthFit:
    """Quadratic-in-ln(ell) fit over the low-effort subset of a sweep."""

    l_star: float
    coeffs: tuple[float, float, float]  # a, b, c for a*x^2 + b*x + c, x = ln(ell)
    subset_lengths: tuple[int, ...]
    vertex_from_fit: bool


def optimal_length(points) -> OptimalLengthFit:
    """Estimate the effort-minimizing chain length from (ell, effort) points.

    The subset fitted is every point with effort <= 2x the observed minimum,
    grown to at least 5 points (smallest efforts first) when the threshold
    selects fewer. The fitted vertex is clamped to the sweep range; if the
    fit is not convex the observed minimizer within the subset is returned
    instead (flagged in the result).
    """
    finite = [(int(l), float(e)) for l, e in points if math.isfinite(e)]
    if len(finite) < 3:
        raise InsufficientDataError(
            f"optimal_length needs >= 3 finite-effort points, got {len(finite)}"
        )
    e_min = min(e for _, e in finite)
    subset = [(l, e) for l, e in finite if e <= 2.0 * e_min]
    if len(subset) < 5:
        by_effort = sorted(finite, key=lambda le: (le[1], le[0]))
        subset = sorted(by_effort[:5], key=lambda le: le[0])
    lengths = np.array([l for l, _ in subset], dtype=float)
    efforts = np.array([e for _, e in subset], dtype=float)
    x = np.log(lengths)
    a, b, c = np.polyfit(x, efforts, 2)
    lo = min(l for l, _ in finite)
    hi = max(l for l, _ in finite)
    if a > 0.0:
        l_star = float(np.exp(-b / (2.0 * a)))
        vertex_from_fit = True
    else:
        l_star = float(min(subset, key=lambda le: (le[1], le[0]))[0])
        vertex_from_fit = False
    l_star = min(max(l_star, float(lo)), float(hi))
    return OptimalLengthFit(
        l_star=l_star,
        coeffs=(float(a), float(b), float(c)),
        subset_lengths=tuple(int(l) for l, _ in subset),
        vertex_from_fit=vertex_from_fit,
    )


def tv_distance(p: np.ndarray, q: np.ndarray) -> float:
    """Total variation distance between two probability vectors."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"shape mismatch: {p.shape} vs {q.shape}")
    for name, vec in (("p", p), ("q", q)):
        if abs(vec.sum() - 1.0) > 1e-9:
            raise ValueError(f"{name} is not normalized (sum {vec.sum()!r})")
    return 0.5 * float(np.abs(p - q).sum())
