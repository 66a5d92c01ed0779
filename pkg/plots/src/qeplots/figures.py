"""The five figure kinds and their rendering.

Every plotted data point is taken verbatim from a CSV column; quadratic-fit
overlays and optimal-length markers come from the fit parameters persisted
by the harness (never refit here). Series are styled by method: classical
green, quantum blue, and a green-to-blue ramp over the number of
quantum-enhanced replicas for heterogeneous tempering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .csvio import (
    SchemaError,
    fnum,
    inum,
    read_table,
    require_columns,
    require_schema,
)

STYLE_VERSION = "qeplots-style/1"

SCHEMA_RESULTS = "qeopt-results/1"
SCHEMA_FITS = "qeopt-fits/1"
SCHEMA_SCALING = "qeopt-scaling/1"
SCHEMA_GAPS = "qeopt-gaps/1"

FIGURE_KINDS = (
    "prob-steps",
    "effort-steps",
    "effort-scaling",
    "steps-scaling",
    "gap-temperature",
)

_KIND_SCHEMAS = {
    "prob-steps": {SCHEMA_RESULTS},
    "effort-steps": {SCHEMA_RESULTS, SCHEMA_FITS},
    "effort-scaling": {SCHEMA_SCALING},
    "steps-scaling": {SCHEMA_SCALING},
    "gap-temperature": {SCHEMA_GAPS},
}

_CLASSICAL_GREEN = "#2e8b57"
_QUANTUM_BLUE = "#1f4e9c"
_QUANTUM_METHODS = {"qesa", "qept"}


def method_color(method: str, m_q: int | None = None, replicas: int | None = None) -> str:
    """Classical green vs quantum blue; m_q interpolates between them."""
    if m_q is not None and replicas:
        frac = max(0.0, min(1.0, m_q / replicas))
        lo = matplotlib.colors.to_rgb(_CLASSICAL_GREEN)
        hi = matplotlib.colors.to_rgb(_QUANTUM_BLUE)
        return matplotlib.colors.to_hex(
            tuple(a + (b - a) * frac for a, b in zip(lo, hi))
        )
    return _QUANTUM_BLUE if method in _QUANTUM_METHODS else _CLASSICAL_GREEN


@dataclass(frozen=True)
class FigureSpec:
    """One figure request: kind, inputs, filters, output path, axis flags."""

    kind: str
    inputs: tuple[str, ...]
    out: str
    methods: tuple[str, ...] | None = None
    n_filter: tuple[int, ...] | None = None
    mq_filter: tuple[int, ...] | None = None
    logx: bool | None = None
    logy: bool | None = None
    dpi: int = 150

    def __post_init__(self) -> None:
        if self.kind not in FIGURE_KINDS:
            raise ValueError(
                f"unknown figure kind {self.kind!r}; expected one of {FIGURE_KINDS}"
            )
        if not self.inputs:
            raise ValueError("figure needs at least one input CSV")


def _load_inputs(spec: FigureSpec) -> dict[str, list[tuple[Path, list[str], list[dict]]]]:
    """Read and bucket the input CSVs by schema, validating versions."""
    accepted = _KIND_SCHEMAS[spec.kind]
    buckets: dict[str, list[tuple[Path, list[str], list[dict]]]] = {}
    for raw in spec.inputs:
        path = Path(raw)
        schema, columns, rows = read_table(path)
        require_schema(path, schema, accepted)
        buckets.setdefault(schema, []).append((path, columns, rows))
    return buckets


def _keep(spec: FigureSpec, row: dict) -> bool:
    if spec.methods is not None and row.get("method") not in spec.methods:
        return False
    if spec.n_filter is not None and inum(row, "n") not in spec.n_filter:
        return False
    if spec.mq_filter is not None and "m_q" in row and inum(row, "m_q") not in spec.mq_filter:
        return False
    return True


def _axes(spec: FigureSpec, default_logx: bool, default_logy: bool):
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    if spec.logx if spec.logx is not None else default_logx:
        ax.set_xscale("log")
    if spec.logy if spec.logy is not None else default_logy:
        ax.set_yscale("log")
    return fig, ax


def _series_sorted(rows, xkey):
    return sorted(rows, key=lambda r: fnum(r, xkey))


def _finite_pairs(rows, xkey, ykey):
    xs, ys, ok = [], [], []
    for r in rows:
        x, y = fnum(r, xkey), fnum(r, ykey)
        if math.isfinite(y):
            xs.append(x)
            ys.append(y)
        else:
            ok.append(x)
    return xs, ys


def _group(rows, keyfn):
    grouped: dict[tuple, list[dict]] = {}
    for r in rows:
        grouped.setdefault(keyfn(r), []).append(r)
    return grouped


def _require_series(kind: str, grouped: dict) -> None:
    if not grouped:
        raise SchemaError(f"{kind}: no rows left after filtering; nothing to draw")


def _render_prob_steps(spec: FigureSpec, ax) -> None:
    needed = {"method", "n", "length", "p_s", "p_s_halfwidth"}
    rows = []
    for path, columns, recs in _load_inputs(spec)[SCHEMA_RESULTS]:
        require_columns(path, columns, needed)
        rows.extend(r for r in recs if _keep(spec, r))
    grouped = _group(rows, lambda r: (r["method"], inum(r, "n")))
    _require_series(spec.kind, grouped)
    for (method, n), series in sorted(grouped.items()):
        series = _series_sorted(series, "length")
        xs = [fnum(r, "length") for r in series]
        ys = [fnum(r, "p_s") for r in series]
        errs = [fnum(r, "p_s_halfwidth") for r in series]
        color = method_color(method)
        ax.plot(xs, ys, marker="o", ms=4, color=color, label=f"{method} n={n}")
        ax.errorbar(xs, ys, yerr=errs, fmt="none", ecolor=color, alpha=0.5)
    ax.set_xlabel("chain length")
    ax.set_ylabel("success probability")
    ax.set_ylim(-0.02, 1.02)


def _render_effort_steps(spec: FigureSpec, ax) -> None:
    buckets = _load_inputs(spec)
    needed = {"method", "n", "length", "effort"}
    rows = []
    for path, columns, recs in buckets.get(SCHEMA_RESULTS, []):
        require_columns(path, columns, needed)
        rows.extend(r for r in recs if _keep(spec, r))
    grouped = _group(rows, lambda r: (r["method"], inum(r, "n")))
    _require_series(spec.kind, grouped)
    for (method, n), series in sorted(grouped.items()):
        series = _series_sorted(series, "length")
        finite = [r for r in series if math.isfinite(fnum(r, "effort"))]
        xs = [fnum(r, "length") for r in finite]
        ys = [fnum(r, "effort") for r in finite]
        ax.plot(
            xs, ys, marker="o", ms=4, linestyle="", color=method_color(method),
            label=f"{method} n={n}",
        )
    fit_needed = {"method", "n", "l_star", "fit_a", "fit_b", "fit_c", "subset_lengths"}
    for path, columns, recs in buckets.get(SCHEMA_FITS, []):
        require_columns(path, columns, fit_needed)
        for r in recs:
            if not _keep(spec, r):
                continue
            lengths = [int(v) for v in r["subset_lengths"].split()]
            a, b, c = fnum(r, "fit_a"), fnum(r, "fit_b"), fnum(r, "fit_c")
            xs = np.geomspace(min(lengths), max(lengths), 200)
            ys = a * np.log(xs) ** 2 + b * np.log(xs) + c
            label = f"fit:{r['method']} n={r['n']}"
            ax.plot(xs, ys, color="black", lw=1.2, label=label)
            ax.axvline(
                fnum(r, "l_star"),
                color=method_color(r["method"]),
                linestyle=":",
                lw=1.2,
                label=f"lstar:{r['method']} n={r['n']}",
            )
    ax.set_xlabel("chain length")
    ax.set_ylabel("effort (proposals)")


def _render_scaling(spec: FigureSpec, ax, ykey: str) -> None:
    needed = {"method", "n", "replicas", "m_q", "l_star", "effort", "effort_lo", "effort_hi"}
    rows = []
    for path, columns, recs in _load_inputs(spec)[SCHEMA_SCALING]:
        require_columns(path, columns, needed)
        rows.extend(r for r in recs if _keep(spec, r))
    grouped = _group(rows, lambda r: (r["method"], inum(r, "m_q"), inum(r, "replicas")))
    _require_series(spec.kind, grouped)
    for (method, m_q, replicas), series in sorted(grouped.items()):
        series = _series_sorted(series, "n")
        pt_family = method in ("pt", "qept")
        color = method_color(method, m_q if pt_family else None, replicas)
        label = f"{method} m_q={m_q}" if pt_family else method
        xs = [inum(r, "n") for r in series]
        ys = [fnum(r, ykey) for r in series]
        ax.plot(xs, ys, marker="o", ms=5, color=color, label=label)
        if ykey == "effort":
            lo = [fnum(r, "effort") - fnum(r, "effort_lo") for r in series]
            hi = []
            for r in series:
                h = fnum(r, "effort_hi")
                hi.append((h - fnum(r, "effort")) if math.isfinite(h) else 0.0)
            ax.errorbar(
                xs, ys, yerr=[lo, hi], fmt="none", ecolor=color, alpha=0.5
            )
    ax.set_xlabel("spins n")
    ax.set_ylabel("optimal effort (proposals)" if ykey == "effort" else "optimal chain length")


def _render_gap_temperature(spec: FigureSpec, ax) -> None:
    needed = {"n", "kernel", "temperature", "delta_mean", "delta_stderr"}
    rows = []
    for path, columns, recs in _load_inputs(spec)[SCHEMA_GAPS]:
        require_columns(path, columns, needed)
        for r in recs:
            if spec.n_filter is not None and inum(r, "n") not in spec.n_filter:
                continue
            if spec.methods is not None and r["kernel"] not in spec.methods:
                continue
            rows.append(r)
    grouped = _group(rows, lambda r: (r["kernel"], inum(r, "n")))
    _require_series(spec.kind, grouped)
    for (kernel, n), series in sorted(grouped.items()):
        series = _series_sorted(series, "temperature")
        xs = [fnum(r, "temperature") for r in series]
        ys = [fnum(r, "delta_mean") for r in series]
        errs = [fnum(r, "delta_stderr") for r in series]
        color = method_color("qesa" if kernel == "quantum" else "sa")
        if kernel == "uniform":
            color = "#888888"
        ax.plot(xs, ys, marker="o", ms=4, color=color, label=f"{kernel} n={n}")
        ax.errorbar(xs, ys, yerr=errs, fmt="none", ecolor=color, alpha=0.5)
    ax.set_xlabel("temperature")
    ax.set_ylabel("spectral gap")


def render_figure(spec: FigureSpec):
    """Build the matplotlib Figure for a spec (no file output)."""
    plt.style.use("default")
    if spec.kind == "prob-steps":
        fig, ax = _axes(spec, default_logx=True, default_logy=False)
        _render_prob_steps(spec, ax)
    elif spec.kind == "effort-steps":
        fig, ax = _axes(spec, default_logx=True, default_logy=True)
        _render_effort_steps(spec, ax)
    elif spec.kind == "effort-scaling":
        fig, ax = _axes(spec, default_logx=False, default_logy=True)
        _render_scaling(spec, ax, "effort")
    elif spec.kind == "steps-scaling":
        fig, ax = _axes(spec, default_logx=False, default_logy=True)
        _render_scaling(spec, ax, "l_star")
    else:
        fig, ax = _axes(spec, default_logx=True, default_logy=True)
        _render_gap_temperature(spec, ax)
    ax.legend(fontsize=8)
    ax.set_title(spec.kind)
    fig.tight_layout()
    return fig


def render(spec: FigureSpec) -> Path:
    """Render to the spec's output path; one static image per spec."""
    fig = render_figure(spec)
    out = Path(spec.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=spec.dpi, metadata=_image_metadata(out.suffix))
    plt.close(fig)
    return out


def _image_metadata(suffix: str) -> dict | None:
    # strip timestamps so identical inputs give identical bytes
    if suffix == ".png":
        return {"Software": STYLE_VERSION}
    if suffix == ".svg":
        return {"Date": None}
    return None


def extract_line_series(fig) -> dict[str, tuple[list[float], list[float]]]:
    """Labeled line data actually drawn on the figure (self-test hook)."""
    out = {}
    for ax in fig.axes:
        for line in ax.get_lines():
            label = line.get_label()
            if label.startswith("_"):
                continue
            out[label] = (
                [float(v) for v in line.get_xdata()],
                [float(v) for v in line.get_ydata()],
            )
    return out
