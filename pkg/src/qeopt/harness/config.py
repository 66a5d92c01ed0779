"""Experiment configuration: one JSON document, strictly validated.

Every run is fully determined by (config, master_seed). Unknown keys are
rejected so a typo cannot silently fall back to a default.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, fields
from pathlib import Path

from ..errors import ConfigError

METHODS = ("mcmc", "sa", "qesa", "pt", "qept")
KERNELS = ("local", "uniform", "quantum")

_GRID_KEYS = {"lo", "hi", "per_decade"}


def expand_lengths(spec) -> tuple[int, ...]:
    """Explicit list, or a geometric grid {"lo", "hi", "per_decade"}."""
    if isinstance(spec, dict):
        unknown = set(spec) - _GRID_KEYS
        if unknown:
            raise ConfigError(f"unknown length-grid keys: {sorted(unknown)}")
        try:
            lo, hi = int(spec["lo"]), int(spec["hi"])
        except KeyError as exc:
            raise ConfigError(f"length grid needs 'lo' and 'hi': missing {exc}")
        per_decade = int(spec.get("per_decade", 12))
        if not (1 <= lo <= hi) or per_decade < 1:
            raise ConfigError(f"bad length grid {spec!r}")
        ratio = 10.0 ** (1.0 / per_decade)
        values = []
        k = 0
        while True:
            v = int(round(lo * ratio**k))
            if v > hi:
                break
            values.append(v)
            k += 1
        values.append(hi)
        return tuple(sorted(set(values)))
    try:
        values = tuple(int(v) for v in spec)
    except TypeError:
        raise ConfigError(f"lengths must be a list or a grid dict, got {spec!r}")
    if not values or any(v < 1 for v in values):
        raise ConfigError(f"lengths must be positive integers, got {spec!r}")
    return tuple(sorted(set(values)))


@dataclass(frozen=True)
class ExperimentConfig:
    method: str
    n_values: tuple[int, ...]
    lengths: tuple[int, ...]
    master_seed: int
    instances: int = 100
    repeats: int = 100
    t_high: float = 10.0
    t_low: float = 0.1
    temperature: float | None = None  # mcmc only; defaults to t_low
    kernel: str | None = None  # mcmc only; defaults to local
    replicas: int = 4
    m_q: int | None = None  # defaults: replicas for qept, 0 otherwise
    swap_interval: int | None = None  # defaults to k = n
    gamma_range: tuple[float, float] = (0.25, 0.6)
    t_range: tuple[int, int] = (2, 20)
    dt: float = 0.8
    target_p: float = 0.99
    epsilon: float = 0.01
    gamma_nodes: int = 8
    eval_instances: int | None = None  # scaling: fresh-ensemble size
    eval_repeats: int | None = None  # scaling: fresh-ensemble repeats
    lengths_by_n: dict | None = None  # optional per-n length grids
    gap_kernels: tuple[str, ...] = ("local", "quantum")
    gap_temperatures: tuple[float, ...] | None = None
    out_dir: str = "results"
    label: str | None = None
    workers: int = 1
    detail: bool = True

    # -- derived accessors -------------------------------------------------

    def resolved_m_q(self) -> int:
        if self.m_q is not None:
            return self.m_q
        return self.replicas if self.method == "qept" else 0

    def resolved_temperature(self) -> float:
        return self.t_low if self.temperature is None else self.temperature

    def resolved_kernel(self) -> str:
        return self.kernel or "local"

    def swap_interval_for(self, n: int) -> int:
        return self.swap_interval if self.swap_interval is not None else n

    def lengths_for(self, n: int) -> tuple[int, ...]:
        if self.lengths_by_n and str(n) in self.lengths_by_n:
            return expand_lengths(self.lengths_by_n[str(n)])
        return self.lengths

    def resolved_eval_instances(self) -> int:
        return self.eval_instances if self.eval_instances is not None else self.instances

    def resolved_eval_repeats(self) -> int:
        return self.eval_repeats if self.eval_repeats is not None else 1000

    def stem(self) -> str:
        return self.label or self.method

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        if not self.n_values or any(n < 1 for n in self.n_values):
            raise ConfigError(f"n must be positive integers, got {self.n_values}")
        if not self.lengths:
            raise ConfigError("lengths must be nonempty")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError(f"master_seed must be a 64-bit value, got {self.master_seed}")
        if self.instances < 1 or self.repeats < 1:
            raise ConfigError("instances and repeats must be >= 1")
        if not (self.t_high > self.t_low > 0):
            raise ConfigError(
                f"need t_high > t_low > 0, got {self.t_high}, {self.t_low}"
            )
        if self.temperature is not None and not self.temperature > 0:
            raise ConfigError(f"temperature must be positive, got {self.temperature}")
        if self.kernel is not None and self.kernel not in KERNELS:
            raise ConfigError(f"kernel must be one of {KERNELS}, got {self.kernel!r}")
        if self.method in ("pt", "qept") and self.replicas < 2:
            raise ConfigError(f"{self.method} needs >= 2 replicas, got {self.replicas}")
        if self.m_q is not None and not 0 <= self.m_q <= self.replicas:
            raise ConfigError(f"m_q must be in [0, {self.replicas}], got {self.m_q}")
        if self.method == "qept" and self.resolved_m_q() < 1:
            raise ConfigError("qept needs m_q >= 1 (use method 'pt' for m_q = 0)")
        if self.swap_interval is not None and self.swap_interval < 1:
            raise ConfigError(f"swap_interval must be >= 1, got {self.swap_interval}")
        g_lo, g_hi = self.gamma_range
        if not (0.0 < g_lo <= g_hi < 1.0):
            raise ConfigError(f"gamma_range must be within (0, 1), got {self.gamma_range}")
        t_lo, t_hi = self.t_range
        if not 1 <= t_lo <= t_hi:
            raise ConfigError(f"t_range must satisfy 1 <= lo <= hi, got {self.t_range}")
        if not self.dt > 0:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if not 0.0 < self.target_p < 1.0:
            raise ConfigError(f"target_p must be in (0, 1), got {self.target_p}")
        if not 0.0 < self.epsilon < 0.5:
            raise ConfigError(f"epsilon must be in (0, 0.5), got {self.epsilon}")
        if self.gamma_nodes < 1:
            raise ConfigError(f"gamma_nodes must be >= 1, got {self.gamma_nodes}")
        for k in (self.eval_instances, self.eval_repeats):
            if k is not None and k < 1:
                raise ConfigError("eval_instances/eval_repeats must be >= 1")
        for kern in self.gap_kernels:
            if kern not in KERNELS:
                raise ConfigError(f"gap kernel {kern!r} not in {KERNELS}")
        if self.gap_temperatures is not None and (
            not self.gap_temperatures or any(t <= 0 for t in self.gap_temperatures)
        ):
            raise ConfigError("gap_temperatures must be positive")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")

    # -- serialization -----------------------------------------------------

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        if not isinstance(doc, dict):
            raise ConfigError(f"config document must be an object, got {type(doc)}")
        doc = dict(doc)
        known = {f.name for f in fields(cls)} | {"n"}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "n" in doc:
            if "n_values" in doc:
                raise ConfigError("give either 'n' or 'n_values', not both")
            doc["n_values"] = doc.pop("n")
        try:
            n_raw = doc["n_values"]
        except KeyError:
            raise ConfigError("config needs 'n' (spin counts)")
        doc["n_values"] = (
            (int(n_raw),) if isinstance(n_raw, int) else tuple(int(v) for v in n_raw)
        )
        if "lengths" not in doc:
            raise ConfigError("config needs 'lengths'")
        doc["lengths"] = expand_lengths(doc["lengths"])
        for key in ("gamma_range", "t_range"):
            if key in doc:
                pair = doc[key]
                if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
                    raise ConfigError(f"{key} must be a [lo, hi] pair, got {pair!r}")
                doc[key] = tuple(pair)
        if doc.get("gap_temperatures") is not None:
            doc["gap_temperatures"] = tuple(float(t) for t in doc["gap_temperatures"])
        if "gap_kernels" in doc:
            doc["gap_kernels"] = tuple(doc["gap_kernels"])
        for key in ("method",):
            if key not in doc:
                raise ConfigError(f"config needs '{key}'")
        if "master_seed" not in doc:
            raise ConfigError("config needs 'master_seed'")
        try:
            return cls(**doc)
        except TypeError as exc:
            raise ConfigError(str(exc))

    def to_dict(self) -> dict:
        """Fully resolved, JSON-ready form (used for hashing and manifests)."""
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = list(v)
            out[f.name] = v
        return out

    def config_hash(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}")
    return ExperimentConfig.from_dict(doc)


def default_gap_temperatures(config: ExperimentConfig, points: int = 7) -> tuple[float, ...]:
    """Geometric grid from t_high down to t_low (gap studies)."""
    if config.gap_temperatures is not None:
        return config.gap_temperatures
    a = math.log(config.t_high / config.t_low) / (points - 1)
    return tuple(config.t_high * math.exp(-a * i) for i in range(points))
