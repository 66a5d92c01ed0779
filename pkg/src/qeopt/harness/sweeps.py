"""Sweep orchestration: task planning, dispatch, persistence, aggregation.

A task is one (method, n, length, instance) cell covering all its repeats.
Every task derives its streams from the seed ledger, so results are
bit-identical for any worker count; output rows are sorted canonically
before the final files are written.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import __version__ as code_version
from ..analysis import (
    EffortRecord,
    boltzmann,
    effort,
    optimal_length,
    repeats_needed,
    spectral_gap,
    success_probability,
    thermalization_bounds,
    transition_matrix,
)
from ..errors import CapExceededError, InsufficientDataError
from ..ising import generate_sk, ground_state
from ..proposal import ProposalKernel, exact_proposal_matrix
from .config import ExperimentConfig, default_gap_temperatures
from .csvio import (
    DETAIL_COLUMNS,
    FITS_COLUMNS,
    GAPDETAIL_COLUMNS,
    GAPS_COLUMNS,
    LEDGER_COLUMNS,
    RESULTS_COLUMNS,
    SCALING_COLUMNS,
    SCHEMA_DETAIL,
    SCHEMA_FITS,
    SCHEMA_GAPDETAIL,
    SCHEMA_GAPS,
    SCHEMA_LEDGER,
    SCHEMA_RESULTS,
    SCHEMA_SCALING,
    append_rows,
    read_rows,
    write_rows,
)
from .runners import execute_run, method_replicas, quantum_kernel
from .seeds import instance_seed, ledger_rows, make_rng, run_entropy


@dataclass(frozen=True, order=True)
class TaskCoord:
    """One repeat-block: all repeats of (method, n, length, instance)."""

    method: str
    n: int
    length: int
    instance: int
    ensemble: str = "tune"


def plan_tasks(
    config: ExperimentConfig,
    ensemble: str = "tune",
    n_values=None,
    lengths=None,
    instances: int | None = None,
) -> list[TaskCoord]:
    n_values = config.n_values if n_values is None else n_values
    instances = config.instances if instances is None else instances
    tasks = []
    for n in n_values:
        for length in config.lengths_for(n) if lengths is None else lengths:
            for idx in range(instances):
                tasks.append(
                    TaskCoord(config.method, n, length, idx, ensemble)
                )
    return tasks


def run_task(config: ExperimentConfig, coord: TaskCoord, repeats: int) -> list[dict]:
    """Execute all repeats of one task; pure in (config, coord, repeats)."""
    seed = instance_seed(config.master_seed, coord.n, coord.instance, coord.ensemble)
    instance = generate_sk(coord.n, seed)
    _, ground = ground_state(instance)
    m_q = config.resolved_m_q() if config.method == "qept" else 0
    replicas = method_replicas(config)
    rows = []
    for rep in range(repeats):
        rng = make_rng(
            run_entropy(
                config.master_seed,
                coord.method,
                coord.n,
                coord.length,
                coord.instance,
                rep,
                coord.ensemble,
            )
        )
        out = execute_run(config, coord.n, coord.length, instance, ground, rng)
        rows.append(
            {
                "method": coord.method,
                "n": coord.n,
                "length": coord.length,
                "replicas": replicas,
                "m_q": m_q,
                "ensemble": coord.ensemble,
                "instance": coord.instance,
                "repeat": rep,
                "seed": seed,
                "success_best": out.success_best,
                "success_final": out.success_final,
                "best_energy": out.best_energy,
                "final_energy": out.final_energy,
                "proposals": out.proposals,
            }
        )
    return rows


def _pool_task(args) -> tuple[list[dict], str | None]:
    config_doc, coord_tuple, repeats = args
    config = ExperimentConfig.from_dict(config_doc)
    try:
        return run_task(config, TaskCoord(*coord_tuple), repeats), None
    except CapExceededError as exc:
        return [], str(exc)


def _task_key(coord: TaskCoord) -> tuple:
    return (coord.method, coord.n, coord.length, coord.instance, coord.ensemble)


_DETAIL_SORT = ("method", "n", "length", "instance", "repeat", "ensemble")


def _sort_detail(rows: list[dict]) -> list[dict]:
    return sorted(rows, key=lambda r: tuple(r[k] for k in _DETAIL_SORT))


def run_tasks(
    config: ExperimentConfig,
    tasks: list[TaskCoord],
    repeats: int,
    completed: dict[tuple, list[dict]] | None = None,
    on_rows=None,
    progress=None,
    failures: list[dict] | None = None,
) -> list[dict]:
    """Run tasks (skipping completed ones), returning sorted detail rows.

    Cap violations are reported per task into ``failures`` (coords plus
    message); remaining tasks still run, so partial results persist.
    """
    completed = completed or {}
    rows: list[dict] = []
    todo = []
    for coord in tasks:
        prior = completed.get(_task_key(coord))
        if prior is not None and len(prior) == repeats:
            rows.extend(prior)
        else:
            todo.append(coord)

    def record_failure(coord: TaskCoord, message: str) -> None:
        entry = {"task": list(_task_key(coord)), "error": message}
        if failures is not None:
            failures.append(entry)

    done = 0
    if config.workers <= 1 or len(todo) <= 1:
        for coord in todo:
            try:
                new = run_task(config, coord, repeats)
            except CapExceededError as exc:
                record_failure(coord, str(exc))
                new = []
            if new:
                rows.extend(new)
                if on_rows:
                    on_rows(new)
            done += 1
            if progress:
                progress(done, len(todo))
    else:
        doc = config.to_dict()
        args = [
            (doc, (c.method, c.n, c.length, c.instance, c.ensemble), repeats)
            for c in todo
        ]
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            for coord, (new, error) in zip(todo, pool.map(_pool_task, args)):
                if error is not None:
                    record_failure(coord, error)
                if new:
                    rows.extend(new)
                    if on_rows:
                        on_rows(new)
                done += 1
                if progress:
                    progress(done, len(todo))
    return _sort_detail(rows)


def aggregate_rows(
    detail: list[dict], target_p: float = 0.99
) -> list[dict]:
    """Aggregate detail rows per (method, n, length, ensemble) cell.

    Aggregates are exact functions of the detail rows.
    """
    cells: dict[tuple, list[dict]] = {}
    for row in detail:
        key = (row["method"], row["n"], row["length"], row["ensemble"])
        cells.setdefault(key, []).append(row)
    out = []
    for (method, n, length, ensemble) in sorted(cells):
        rows = cells[(method, n, length, ensemble)]
        replicas = rows[0]["replicas"]
        m_q = rows[0]["m_q"]
        succ_best = [bool(r["success_best"]) for r in rows]
        p_s, half = success_probability(succ_best)
        r_needed = repeats_needed(p_s, target_p)
        rec = EffortRecord(
            n=n,
            method=method,
            length=length,
            replicas=replicas,
            p_s=p_s,
            p_s_halfwidth=half,
            repeats=r_needed,
            effort=effort(length, r_needed, replicas),
        )
        out.append(
            {
                "method": rec.method,
                "n": rec.n,
                "length": rec.length,
                "replicas": rec.replicas,
                "m_q": m_q,
                "ensemble": ensemble,
                "instances": len({r["instance"] for r in rows}),
                "repeats": len({r["repeat"] for r in rows}),
                "trials": len(rows),
                "successes_best": sum(succ_best),
                "successes_final": sum(bool(r["success_final"]) for r in rows),
                "p_s": rec.p_s,
                "p_s_halfwidth": rec.p_s_halfwidth,
                "repeats_needed": rec.repeats,
                "effort": rec.effort,
                "total_proposals": sum(int(r["proposals"]) for r in rows),
            }
        )
    return out


# ---------------------------------------------------------------------------
# Persistence plumbing


def _load_partial(part_path: Path) -> dict[tuple, list[dict]]:
    """Completed rows from a partial detail file, grouped by task."""
    if not part_path.exists():
        return {}
    _, _, raw = read_rows(part_path)
    grouped: dict[tuple, list[dict]] = {}
    for r in raw:
        row = _parse_detail_row(r)
        key = (row["method"], row["n"], row["length"], row["instance"], row["ensemble"])
        grouped.setdefault(key, []).append(row)
    return grouped


def _parse_detail_row(r: dict) -> dict:
    return {
        "method": r["method"],
        "n": int(r["n"]),
        "length": int(r["length"]),
        "replicas": int(r["replicas"]),
        "m_q": int(r["m_q"]),
        "ensemble": r["ensemble"],
        "instance": int(r["instance"]),
        "repeat": int(r["repeat"]),
        "seed": int(r["seed"]),
        "success_best": r["success_best"] == "1",
        "success_final": r["success_final"] == "1",
        "best_energy": float(r["best_energy"]),
        "final_energy": float(r["final_energy"]),
        "proposals": int(r["proposals"]),
    }


def write_manifest(
    out_dir: Path, config: ExperimentConfig, status: str, **extra
) -> Path:
    doc = {
        "schema": "qeopt-manifest/1",
        "code_version": code_version,
        "config": config.to_dict(),
        "config_sha256": config.config_hash(),
        "master_seed": config.master_seed,
        "status": status,
        "written_at": time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime()),
    }
    doc.update(extra)
    path = out_dir / f"{config.stem()}_manifest.json"
    path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    return path


@dataclass
class SweepOutputs:
    detail: list[dict]
    results: list[dict]
    fits: list[dict]
    paths: dict[str, Path]
    failures: list[dict] = field(default_factory=list)

    @property
    def status(self) -> str:
        return "partial" if self.failures else "complete"


def _run_sweep_core(
    config: ExperimentConfig,
    out_dir: Path | None,
    resume: bool,
    progress=None,
) -> SweepOutputs:
    out_dir = Path(out_dir if out_dir is not None else config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = config.stem()
    part_path = out_dir / f"{stem}_detail.partial.csv"
    if not resume and part_path.exists():
        part_path.unlink()
    completed = _load_partial(part_path) if resume else {}
    write_manifest(out_dir, config, "running")

    def persist(new_rows):
        append_rows(part_path, SCHEMA_DETAIL, DETAIL_COLUMNS, new_rows)

    tasks = plan_tasks(config)
    failures: list[dict] = []
    detail = run_tasks(
        config,
        tasks,
        config.repeats,
        completed=completed,
        on_rows=persist,
        progress=progress,
        failures=failures,
    )
    results = aggregate_rows(detail, config.target_p)
    paths = {}
    if config.detail:
        paths["detail"] = write_rows(
            out_dir / f"{stem}_detail.csv", SCHEMA_DETAIL, DETAIL_COLUMNS, detail
        )
    paths["results"] = write_rows(
        out_dir / f"{stem}_results.csv", SCHEMA_RESULTS, RESULTS_COLUMNS, results
    )
    paths["ledger"] = write_rows(
        out_dir / f"{stem}_ledger.csv",
        SCHEMA_LEDGER,
        LEDGER_COLUMNS,
        ledger_rows(config),
    )
    if part_path.exists() and not failures:
        part_path.unlink()
    return SweepOutputs(
        detail=detail, results=results, fits=[], paths=paths, failures=failures
    )


def run_probability_sweep(
    config: ExperimentConfig,
    out_dir: str | Path | None = None,
    resume: bool = False,
    progress=None,
) -> SweepOutputs:
    """p_s versus chain length for every (n, length) cell of the config."""
    out = _run_sweep_core(config, out_dir, resume, progress)
    out_path = Path(out_dir if out_dir is not None else config.out_dir)
    write_manifest(
        out_path, config, out.status,
        rows={"detail": len(out.detail), "results": len(out.results)},
        failures=out.failures,
    )
    return out


def fit_rows_for(
    config: ExperimentConfig, results: list[dict], errors: list | None = None
) -> list[dict]:
    """Quadratic optimal-length fits per n over an aggregate sweep.

    Unfittable n values (too few finite-effort points) are skipped and, when
    ``errors`` is given, recorded there for the manifest.
    """
    fits = []
    for n in config.n_values:
        points = [
            (r["length"], r["effort"])
            for r in results
            if r["n"] == n and r["ensemble"] == "tune"
        ]
        try:
            fit = optimal_length(points)
        except InsufficientDataError as exc:
            if errors is not None:
                errors.append({"n": n, "error": str(exc)})
            continue
        a, b, c = fit.coeffs
        fits.append(
            {
                "method": config.method,
                "n": n,
                "replicas": method_replicas(config),
                "m_q": config.resolved_m_q() if config.method == "qept" else 0,
                "l_star": fit.l_star,
                "fit_a": a,
                "fit_b": b,
                "fit_c": c,
                "subset_size": len(fit.subset_lengths),
                "subset_lengths": " ".join(str(v) for v in fit.subset_lengths),
                "vertex_from_fit": fit.vertex_from_fit,
            }
        )
    return fits


def run_effort_sweep(
    config: ExperimentConfig,
    out_dir: str | Path | None = None,
    resume: bool = False,
    progress=None,
) -> SweepOutputs:
    """Probability sweep plus effort aggregation and the optimal-length fit."""
    out = _run_sweep_core(config, out_dir, resume, progress)
    fit_errors: list = []
    out.fits = fit_rows_for(config, out.results, fit_errors)
    out_path = Path(out_dir if out_dir is not None else config.out_dir)
    out.paths["fits"] = write_rows(
        out_path / f"{config.stem()}_fits.csv", SCHEMA_FITS, FITS_COLUMNS, out.fits
    )
    write_manifest(
        out_path, config, out.status,
        rows={
            "detail": len(out.detail),
            "results": len(out.results),
            "fits": len(out.fits),
        },
        fit_errors=fit_errors,
        failures=out.failures,
    )
    return out


def run_scaling_study(
    config: ExperimentConfig,
    out_dir: str | Path | None = None,
    resume: bool = False,
    progress=None,
) -> SweepOutputs:
    """Per n: tune ell on one ensemble, evaluate at ell* on a fresh one.

    The evaluation ensemble's instance seeds are derived under a different
    ledger role, so tuning and evaluation instances are disjoint.
    """
    out = _run_sweep_core(config, out_dir, resume, progress)
    fit_errors: list = []
    out.fits = fit_rows_for(config, out.results, fit_errors)
    out_path = Path(out_dir if out_dir is not None else config.out_dir)
    stem = config.stem()

    eval_part = out_path / f"{stem}_eval.partial.csv"
    if not resume and eval_part.exists():
        eval_part.unlink()
    completed = _load_partial(eval_part) if resume else {}

    def persist(new_rows):
        append_rows(eval_part, SCHEMA_DETAIL, DETAIL_COLUMNS, new_rows)

    scaling = []
    eval_detail_all = []
    for fit in out.fits:
        n = fit["n"]
        l_eval = max(1, int(round(fit["l_star"])))
        tasks = plan_tasks(
            config,
            ensemble="eval",
            n_values=(n,),
            lengths=(l_eval,),
            instances=config.resolved_eval_instances(),
        )
        eval_detail = run_tasks(
            config,
            tasks,
            config.resolved_eval_repeats(),
            completed=completed,
            on_rows=persist,
            progress=progress,
            failures=out.failures,
        )
        eval_detail_all.extend(eval_detail)
        agg = aggregate_rows(eval_detail, config.target_p)
        row = next(r for r in agg if r["n"] == n and r["length"] == l_eval)
        p_s, half = row["p_s"], row["p_s_halfwidth"]
        m = row["replicas"]
        eff_lo = effort(l_eval, repeats_needed(min(p_s + half, 1.0), config.target_p), m)
        p_low = p_s - half
        eff_hi = (
            effort(l_eval, repeats_needed(p_low, config.target_p), m)
            if p_low > 0.0
            else math.inf
        )
        scaling.append(
            {
                "method": fit["method"],
                "n": n,
                "replicas": m,
                "m_q": fit["m_q"],
                "l_star": fit["l_star"],
                "l_eval": l_eval,
                "p_s": p_s,
                "p_s_halfwidth": half,
                "repeats_needed": row["repeats_needed"],
                "effort": row["effort"],
                "effort_lo": eff_lo,
                "effort_hi": eff_hi,
                "instances": row["instances"],
                "repeats": row["repeats"],
            }
        )
    out.paths["fits"] = write_rows(
        out_path / f"{stem}_fits.csv", SCHEMA_FITS, FITS_COLUMNS, out.fits
    )
    out.paths["scaling"] = write_rows(
        out_path / f"{stem}_scaling.csv", SCHEMA_SCALING, SCALING_COLUMNS, scaling
    )
    if config.detail and eval_detail_all:
        out.paths["eval_detail"] = write_rows(
            out_path / f"{stem}_evaldetail.csv",
            SCHEMA_DETAIL,
            DETAIL_COLUMNS,
            _sort_detail(eval_detail_all),
        )
    if eval_part.exists() and not out.failures:
        eval_part.unlink()
    out.results.extend(scaling)
    write_manifest(
        out_path, config, out.status,
        rows={
            "detail": len(out.detail),
            "results": len(out.results),
            "fits": len(out.fits),
            "scaling": len(scaling),
        },
        fit_errors=fit_errors,
        failures=out.failures,
    )
    return out


# ---------------------------------------------------------------------------
# Gap study


def gap_rows_for_instance(
    config: ExperimentConfig, n: int, kernel_kind: str, index: int
) -> list[dict]:
    seed = instance_seed(config.master_seed, n, index, "gap")
    instance = generate_sk(n, seed)
    if kernel_kind == "quantum":
        kernel = quantum_kernel(config)
    else:
        kernel = ProposalKernel(kernel_kind)
    q = exact_proposal_matrix(instance, kernel, gamma_nodes=config.gamma_nodes)
    rows = []
    for temperature in default_gap_temperatures(config):
        tm = transition_matrix(instance, q, temperature, kernel_kind)
        delta = spectral_gap(tm)
        lower, upper = thermalization_bounds(
            delta, boltzmann(instance, temperature), config.epsilon
        )
        rows.append(
            {
                "n": n,
                "kernel": kernel_kind,
                "temperature": temperature,
                "instance": index,
                "seed": seed,
                "delta": delta,
                "tau_lower": lower,
                "tau_upper": upper,
            }
        )
    return rows


def _pool_gap_task(args) -> list[dict]:
    config_doc, n, kernel_kind, index = args
    return gap_rows_for_instance(
        ExperimentConfig.from_dict(config_doc), n, kernel_kind, index
    )


def run_gap_study(
    config: ExperimentConfig,
    out_dir: str | Path | None = None,
    progress=None,
) -> SweepOutputs:
    """Exact spectral gaps and thermalization bounds per (n, kernel, T)."""
    too_big = [n for n in config.n_values if n > 10]
    if too_big:
        raise CapExceededError(
            f"gap study needs n <= 10 (dense eigendecompositions), got {too_big}"
        )
    out_dir = Path(out_dir if out_dir is not None else config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = config.stem()
    write_manifest(out_dir, config, "running")
    items = [
        (n, kern, idx)
        for n in config.n_values
        for kern in config.gap_kernels
        for idx in range(config.instances)
    ]
    detail: list[dict] = []
    if config.workers <= 1 or len(items) <= 1:
        for done, (n, kern, idx) in enumerate(items, start=1):
            detail.extend(gap_rows_for_instance(config, n, kern, idx))
            if progress:
                progress(done, len(items))
    else:
        doc = config.to_dict()
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            for done, rows in enumerate(
                pool.map(_pool_gap_task, [(doc, *item) for item in items]), start=1
            ):
                detail.extend(rows)
                if progress:
                    progress(done, len(items))
    detail.sort(key=lambda r: (r["n"], r["kernel"], -r["temperature"], r["instance"]))

    cells: dict[tuple, list[dict]] = {}
    for row in detail:
        cells.setdefault((row["n"], row["kernel"], row["temperature"]), []).append(row)
    gaps = []
    for (n, kern, temperature) in sorted(
        cells, key=lambda k: (k[0], k[1], -k[2])
    ):
        rows = cells[(n, kern, temperature)]
        deltas = np.array([r["delta"] for r in rows])
        stderr = (
            float(deltas.std(ddof=1) / np.sqrt(len(deltas)))
            if len(deltas) > 1
            else 0.0
        )
        gaps.append(
            {
                "n": n,
                "kernel": kern,
                "temperature": temperature,
                "instances": len(rows),
                "delta_mean": float(deltas.mean()),
                "delta_stderr": stderr,
                "delta_min": float(deltas.min()),
                "delta_max": float(deltas.max()),
                "tau_lower_mean": float(np.mean([r["tau_lower"] for r in rows])),
                "tau_upper_mean": float(np.mean([r["tau_upper"] for r in rows])),
            }
        )
    paths = {
        "gaps": write_rows(
            out_dir / f"{stem}_gaps.csv", SCHEMA_GAPS, GAPS_COLUMNS, gaps
        )
    }
    if config.detail:
        paths["gapdetail"] = write_rows(
            out_dir / f"{stem}_gapdetail.csv",
            SCHEMA_GAPDETAIL,
            GAPDETAIL_COLUMNS,
            detail,
        )
    write_manifest(
        out_dir, config, "complete", rows={"gaps": len(gaps), "gapdetail": len(detail)}
    )
    return SweepOutputs(detail=detail, results=gaps, fits=[], paths=paths)


# ---------------------------------------------------------------------------
# Replay and report


def replay_run(
    config: ExperimentConfig,
    n: int,
    length: int,
    instance_index: int,
    repeat: int,
    ensemble: str = "tune",
) -> dict:
    """Re-execute one run from its ledger coordinates, in isolation."""
    rows = run_task(
        config,
        TaskCoord(config.method, n, length, instance_index, ensemble),
        repeat + 1,
    )
    return rows[repeat]


def report_from_details(
    detail_paths, out_path: str | Path, target_p: float = 0.99
) -> list[dict]:
    """Recompute aggregate rows from persisted detail files."""
    detail = []
    for path in detail_paths:
        schema, _, raw = read_rows(path)
        if schema != SCHEMA_DETAIL:
            raise ValueError(f"{path}: expected {SCHEMA_DETAIL}, got {schema}")
        detail.extend(_parse_detail_row(r) for r in raw)
    results = aggregate_rows(_sort_detail(detail), target_p)
    write_rows(out_path, SCHEMA_RESULTS, RESULTS_COLUMNS, results)
    return results
