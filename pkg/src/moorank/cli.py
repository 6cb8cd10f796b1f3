"""Experiment runner: wires config -> dataset -> surrogate -> problem ->
optimizer -> metrics and writes machine-readable result artifacts.

Artifacts per run directory: ``pareto_front.csv`` (designs, user-sense
objectives, feasibility), ``history.csv`` (per-generation trace),
``summary.json`` (metrics and config echo), and per-step front CSVs for
plotting. Exit codes: 0 success, 1 runtime failure, 2 invalid config.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from moorank import kernels
from moorank.algorithms import (
    GridParams,
    RunParams,
    RunResult,
    run_do_nsga2,
    run_grid_search,
)
from moorank.core import ObjectiveSense, Solution, canonicalize
from moorank.metrics import (
    IntervalSet,
    ScalingParams,
    average_hypervolume,
    confidence_uncertainty,
    hypervolume_2d,
    min_max_scale,
)
from moorank.operators import HypermutationState, OperatorParams
from moorank.problems import (
    Constraint,
    ConstraintKind,
    DynamicSchedule,
    ProblemSpec,
    ScheduleStep,
    static_schedule,
    zdt1_problem,
)
from moorank.surrogate import (
    DESIGN_COLUMNS,
    Dataset,
    KnnSurrogate,
    derive_log_features,
    fit_report,
    generate_synthetic,
    load_dataset,
)

MODES = ("optimize", "grid-search", "compare", "dynamic", "metrics")
LN10 = math.log(10.0)


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the field."""


@dataclass(frozen=True)
class ConstraintConfig:
    objective: str
    op: str  # ">=" or "<=" (strict forms are treated as non-strict)
    threshold: float
    scale: str  # "linear" or "log10"


@dataclass
class ExperimentConfig:
    mode: str
    problem: str = "zdt1"
    zdt_n: int = 10
    dataset_path: str | None = None
    dataset_seed: int = 7
    dataset_sizes: tuple[int, ...] = (6000,)
    knn_k: int = 25
    constraints: tuple[ConstraintConfig, ...] = ()
    population_size: int = 500
    generations: int = 500
    p_c: float = 0.9
    eta_c: float = 15.0
    p_m: float | None = None  # None -> 1/n
    eta_m: float = 1.0
    boosted_p_m: float = 1.0
    epoch: int = 10
    seed: int = 0
    change_tol: float = 1e-9
    inc: float = 10.0
    schedule_generations: tuple[int, ...] | None = None
    reference: tuple[float, float] = (2.0, 2.0)
    feasible_only: bool = False
    output_dir: str = "out"
    metrics_front_path: str | None = None
    metrics_senses: tuple[str, ...] | None = None
    raw: dict = field(default_factory=dict)


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigError(message)


def _as_positive_int(value, name: str) -> int:
    _require(isinstance(value, int) and not isinstance(value, bool) and value > 0,
             f"{name} must be a positive integer")
    return value


def _as_number(value, name: str) -> float:
    _require(isinstance(value, (int, float)) and not isinstance(value, bool)
             and math.isfinite(float(value)), f"{name} must be a finite number")
    return float(value)


def load_config(path: str | Path, mode: str, seed_override: int | None = None,
                out_dir_override: str | None = None) -> ExperimentConfig:
    """Parse and validate a JSON config for one mode."""
    _require(mode in MODES, f"mode must be one of {MODES}")
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    _require(isinstance(raw, dict), "config root must be a JSON object")

    cfg = ExperimentConfig(mode=mode, raw=raw)

    problem = raw.get("problem", cfg.problem)
    _require(problem in ("zdt1", "article-surrogate", "article-synthetic"),
             "problem must be zdt1, article-surrogate, or article-synthetic")
    cfg.problem = problem

    zdt = raw.get("zdt", {})
    _require(isinstance(zdt, dict), "zdt must be an object")
    if "n" in zdt:
        cfg.zdt_n = _as_positive_int(zdt["n"], "zdt.n")
        _require(cfg.zdt_n >= 2, "zdt.n must be at least 2")

    dataset = raw.get("dataset", {})
    _require(isinstance(dataset, dict), "dataset must be an object")
    if dataset.get("path") is not None:
        _require(isinstance(dataset["path"], str), "dataset.path must be a string")
        cfg.dataset_path = dataset["path"]
    if "seed" in dataset:
        _require(isinstance(dataset["seed"], int), "dataset.seed must be an integer")
        cfg.dataset_seed = dataset["seed"]
    if "sizes" in dataset:
        sizes = dataset["sizes"]
        _require(isinstance(sizes, list) and sizes, "dataset.sizes must be a nonempty list")
        cfg.dataset_sizes = tuple(_as_positive_int(s, "dataset.sizes[*]") for s in sizes)
    if "knn_k" in dataset:
        cfg.knn_k = _as_positive_int(dataset["knn_k"], "dataset.knn_k")

    run = raw.get("run", {})
    _require(isinstance(run, dict), "run must be an object")
    if "population_size" in run:
        cfg.population_size = _as_positive_int(run["population_size"], "run.population_size")
        _require(cfg.population_size >= 2, "run.population_size must be at least 2")
    if "generations" in run:
        cfg.generations = _as_positive_int(run["generations"], "run.generations")
    for key in ("p_c", "eta_c", "eta_m", "boosted_p_m", "change_tol"):
        if key in run:
            setattr(cfg, key, _as_number(run[key], f"run.{key}"))
    if run.get("p_m") is not None:
        cfg.p_m = _as_number(run["p_m"], "run.p_m")
        _require(0.0 <= cfg.p_m <= 1.0, "run.p_m must lie in [0, 1]")
    if "epoch" in run:
        cfg.epoch = _as_positive_int(run["epoch"], "run.epoch")
    if "seed" in run:
        _require(isinstance(run["seed"], int), "run.seed must be an integer")
        cfg.seed = run["seed"]
    _require(0.0 <= cfg.p_c <= 1.0, "run.p_c must lie in [0, 1]")
    _require(0.0 <= cfg.boosted_p_m <= 1.0, "run.boosted_p_m must lie in [0, 1]")
    _require(cfg.change_tol >= 0.0, "run.change_tol must be nonnegative")

    grid = raw.get("grid", {})
    _require(isinstance(grid, dict), "grid must be an object")
    if "inc" in grid:
        cfg.inc = _as_number(grid["inc"], "grid.inc")
        _require(0.0 < cfg.inc <= 100.0, "grid.inc must lie in (0, 100]")

    constraints = raw.get("constraints", [])
    _require(isinstance(constraints, list), "constraints must be a list")
    parsed = []
    for i, spec in enumerate(constraints):
        _require(isinstance(spec, dict), f"constraints[{i}] must be an object")
        objective = spec.get("objective")
        _require(isinstance(objective, str) and objective,
                 f"constraints[{i}].objective must be a nonempty string")
        op = spec.get("op", ">=")
        _require(op in (">=", ">", "<=", "<"), f"constraints[{i}].op must be >=, >, <=, or <")
        op = ">=" if op in (">=", ">") else "<="
        threshold = _as_number(spec.get("threshold"), f"constraints[{i}].threshold")
        scale = spec.get("scale", "linear")
        _require(scale in ("linear", "log10"), f"constraints[{i}].scale must be linear or log10")
        parsed.append(ConstraintConfig(objective=objective, op=op, threshold=threshold, scale=scale))
    cfg.constraints = tuple(parsed)

    if raw.get("schedule") is not None:
        schedule = raw["schedule"]
        _require(isinstance(schedule, list) and schedule, "schedule must be a nonempty list")
        durations = []
        for i, entry in enumerate(schedule):
            _require(isinstance(entry, dict), f"schedule[{i}] must be an object")
            durations.append(_as_positive_int(entry.get("generations", 500), f"schedule[{i}].generations"))
        cfg.schedule_generations = tuple(durations)

    if "reference" in raw:
        ref = raw["reference"]
        _require(isinstance(ref, list) and len(ref) == 2, "reference must be a 2-element list")
        cfg.reference = (_as_number(ref[0], "reference[0]"), _as_number(ref[1], "reference[1]"))

    if "feasible_only" in raw:
        _require(isinstance(raw["feasible_only"], bool), "feasible_only must be a boolean")
        cfg.feasible_only = raw["feasible_only"]

    if "output_dir" in raw:
        _require(isinstance(raw["output_dir"], str) and raw["output_dir"], "output_dir must be a string")
        cfg.output_dir = raw["output_dir"]

    metrics_cfg = raw.get("metrics", {})
    _require(isinstance(metrics_cfg, dict), "metrics must be an object")
    if metrics_cfg.get("front_path") is not None:
        _require(isinstance(metrics_cfg["front_path"], str), "metrics.front_path must be a string")
        cfg.metrics_front_path = metrics_cfg["front_path"]
    if metrics_cfg.get("senses") is not None:
        senses = metrics_cfg["senses"]
        _require(isinstance(senses, list) and senses
                 and all(s in ("minimize", "maximize") for s in senses),
                 "metrics.senses must list 'minimize'/'maximize' per objective")
        cfg.metrics_senses = tuple(senses)

    if seed_override is not None:
        cfg.seed = seed_override
    if out_dir_override is not None:
        cfg.output_dir = out_dir_override

    if mode == "metrics":
        _require(cfg.metrics_front_path is not None, "metrics.front_path is required in metrics mode")
        _require(cfg.metrics_senses is not None, "metrics.senses is required in metrics mode")
    if mode == "dynamic":
        _require(cfg.problem != "zdt1", "dynamic mode needs an article problem with time steps")
    if cfg.problem == "article-surrogate":
        _require(cfg.dataset_path is not None, "dataset.path is required for article-surrogate")
    return cfg


@dataclass
class ProblemBundle:
    """Everything mode handlers need beyond the bare ProblemSpec."""

    schedule: DynamicSchedule
    design_names: tuple[str, ...]
    objective_names: tuple[str, ...]
    senses: tuple[ObjectiveSense, ...]
    data_bounds: np.ndarray
    history_scaling: ScalingParams | None = None
    surrogates: tuple[KnnSurrogate, ...] = ()
    surrogate_fit: list | None = None

    @property
    def problem(self) -> ProblemSpec:
        return self.schedule.steps[0].problem

    def intervals_for(self, designs: np.ndarray, step: int = -1) -> IntervalSet | None:
        if not self.surrogates:
            return None
        model = self.surrogates[step]
        _, lo, hi = model.predict(designs)
        return IntervalSet(lo90=lo, hi90=hi)


def _objective_index(name: str, objective_names: Sequence[str]) -> int:
    aliases = {n: i for i, n in enumerate(objective_names)}
    aliases.update({"clicks": 0, "dwell_ms": 1, "dwell": 1} if "ln_clicks" in objective_names else {})
    if name not in aliases:
        raise ConfigError(f"constraints[*].objective {name!r} is not one of {list(objective_names)}")
    return aliases[name]


def _build_constraints(
    specs: Sequence[ConstraintConfig],
    objective_names: Sequence[str],
    log_space_objectives: bool,
) -> tuple[Constraint, ...]:
    """Compile user-space constraint specs against raw objective vectors.

    Article objectives live in natural-log space; a log10-scale spec
    divides by ln(10), a linear-scale spec exponentiates first.
    """
    out = []
    for spec in specs:
        j = _objective_index(spec.objective, objective_names)
        threshold = spec.threshold
        sign = 1.0 if spec.op == ">=" else -1.0

        def expression(obj, design, j=j, threshold=threshold, sign=sign, scale=spec.scale):
            value = obj[j]
            if scale == "log10":
                if not log_space_objectives:
                    value = math.log10(value) if value > 0 else -math.inf
                else:
                    value = value / LN10
            elif log_space_objectives:
                value = math.exp(value)
            return sign * (value - threshold)

        label = f"{spec.objective} {spec.op} {spec.threshold} ({spec.scale})"
        out.append(Constraint(kind=ConstraintKind.INEQUALITY, expression=expression, label=label))
    return tuple(out)


def _surrogate_problem(
    model: KnnSurrogate,
    bounds: np.ndarray,
    constraints: tuple[Constraint, ...],
    name: str,
) -> ProblemSpec:
    senses = (ObjectiveSense.MAXIMIZE, ObjectiveSense.MAXIMIZE)

    def batch_fn(X, model=model):
        mean, _, _ = model.predict(X)
        return mean

    def single_fn(x, model=model):
        mean, _, _ = model.predict(np.asarray(x)[None, :])
        return mean[0]

    return ProblemSpec(
        n=bounds.shape[0],
        bounds=bounds,
        m=2,
        senses=senses,
        objective_fn=single_fn,
        batch_objective_fn=batch_fn,
        constraints=constraints,
        name=name,
    )


def _load_article_dataset(cfg: ExperimentConfig) -> Dataset:
    if cfg.problem == "article-synthetic":
        return generate_synthetic(cfg.dataset_seed, cfg.dataset_sizes)
    try:
        return load_dataset(cfg.dataset_path)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"dataset.path: {exc}") from exc


def build_bundle(cfg: ExperimentConfig) -> ProblemBundle:
    """Construct the problem (or schedule of problems) a config describes."""
    if cfg.problem == "zdt1":
        problem = zdt1_problem(cfg.zdt_n)
        names = tuple(f"x{i + 1}" for i in range(cfg.zdt_n))
        constraints = _build_constraints(cfg.constraints, ("f1", "f2"), log_space_objectives=False)
        if constraints:
            problem = ProblemSpec(
                n=problem.n, bounds=problem.bounds, m=2, senses=problem.senses,
                objective_fn=problem.objective_fn, batch_objective_fn=problem.batch_objective_fn,
                constraints=constraints, name=problem.name,
            )
        return ProblemBundle(
            schedule=static_schedule(problem, cfg.generations),
            design_names=names,
            objective_names=("f1", "f2"),
            senses=problem.senses,
            data_bounds=problem.bounds,
        )

    dataset = _load_article_dataset(cfg)
    X, Y = derive_log_features(dataset)
    bounds = np.column_stack([X.min(axis=0), X.max(axis=0)])
    objective_names = ("ln_clicks", "ln_dwell_ms")
    senses = (ObjectiveSense.MAXIMIZE, ObjectiveSense.MAXIMIZE)
    constraints = _build_constraints(cfg.constraints, objective_names, log_space_objectives=True)
    history_scaling = ScalingParams.fit(canonicalize(Y, senses))
    if cfg.knn_k > dataset.row_count:
        raise ConfigError(f"dataset.knn_k exceeds the dataset row count ({dataset.row_count})")

    steps = dataset.steps_present()
    if cfg.mode == "dynamic":
        if len(steps) < 2:
            raise ConfigError("dynamic mode needs a dataset with at least 2 time steps")
        durations = cfg.schedule_generations or tuple(500 for _ in steps)
        if len(durations) != len(steps):
            raise ConfigError(
                f"schedule length {len(durations)} does not match the {len(steps)} time steps present"
            )
        models, spec_steps = [], []
        for step, duration in zip(steps, durations):
            sub = dataset.subset_for_step(step)
            Xs, Ys = derive_log_features(sub)
            if cfg.knn_k > Xs.shape[0]:
                raise ConfigError(f"dataset.knn_k exceeds the rows of time step {step}")
            model = KnnSurrogate.fit(Xs, Ys, k=cfg.knn_k)
            models.append(model)
            spec_steps.append(
                ScheduleStep(
                    duration=duration,
                    problem=_surrogate_problem(model, bounds, constraints, f"article-step{step}"),
                )
            )
        schedule = DynamicSchedule(steps=tuple(spec_steps))
    else:
        model = KnnSurrogate.fit(X, Y, k=cfg.knn_k)
        models = [model]
        schedule = static_schedule(
            _surrogate_problem(model, bounds, constraints, "article-static"), cfg.generations
        )

    try:
        fit = fit_report(dataset, k=cfg.knn_k, seed=cfg.dataset_seed)
    except ValueError:
        fit = None
    return ProblemBundle(
        schedule=schedule,
        design_names=DESIGN_COLUMNS,
        objective_names=objective_names,
        senses=senses,
        data_bounds=bounds,
        history_scaling=history_scaling,
        surrogates=tuple(models),
        surrogate_fit=fit,
    )


def make_run_params(cfg: ExperimentConfig, bundle: ProblemBundle, generations: int | None = None) -> RunParams:
    p_m = cfg.p_m if cfg.p_m is not None else 1.0 / bundle.problem.n
    ops = OperatorParams(p_c=cfg.p_c, eta_c=cfg.eta_c, p_m=p_m, eta_m=cfg.eta_m)
    return RunParams(
        population_size=cfg.population_size,
        generations=generations if generations is not None else cfg.generations,
        operators=ops,
        hypermutation=HypermutationState(base_p_m=p_m, boosted_p_m=cfg.boosted_p_m, epoch=cfg.epoch),
        seed=cfg.seed,
        change_tol=cfg.change_tol,
        reference=cfg.reference,
        history_scaling=bundle.history_scaling,
    )


def _fmt(value: float) -> str:
    return repr(float(value))


def _front_rows(solutions: Sequence[Solution], bundle: ProblemBundle,
                feasible_only: bool, surrogate_step: int):
    kept = [s for s in solutions if s.feasible] if feasible_only else list(solutions)
    if not kept:
        return [], None
    raw = np.stack([canonicalize(s.objectives, bundle.senses) for s in kept])
    designs = np.stack([s.design for s in kept])
    intervals = bundle.intervals_for(designs, step=surrogate_step)
    return list(zip(kept, raw)), intervals


def write_front_csv(
    path: Path,
    solutions: Sequence[Solution],
    bundle: ProblemBundle,
    feasible_only: bool = False,
    surrogate_step: int = -1,
) -> None:
    """Front CSV: designs, user-sense objectives, feasibility, intervals.

    ``surrogate_step`` selects which step's model supplies the interval
    columns; the default is the final step's.
    """
    rows, intervals = _front_rows(solutions, bundle, feasible_only, surrogate_step)
    header = list(bundle.design_names)
    header += [f"obj_{name}" for name in bundle.objective_names]
    header += ["violation", "feasible"]
    if bundle.surrogates:
        for name in bundle.objective_names:
            header += [f"obj_{name}_lo90", f"obj_{name}_hi90"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i, (sol, raw) in enumerate(rows):
            record = [_fmt(v) for v in sol.design]
            record += [_fmt(v) for v in raw]
            record += [_fmt(sol.violation), "1" if sol.feasible else "0"]
            if intervals is not None:
                for j in range(len(bundle.objective_names)):
                    record += [_fmt(intervals.lo90[i, j]), _fmt(intervals.hi90[i, j])]
            writer.writerow(record)


def write_history_csv(path: Path, result: RunResult | None) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["generation", "hypervolume", "effective_p_m", "feasible_count"])
        if result is None:
            return
        for rec in result.history:
            writer.writerow(
                [rec.generation, _fmt(rec.hypervolume), _fmt(rec.effective_p_m), rec.feasible_count]
            )


def emit_plot_data(result: RunResult, out_dir: Path, bundle: ProblemBundle,
                   feasible_only: bool = False) -> list[Path]:
    """Per-step front CSVs plus an hv-per-generation CSV for plotting."""
    out_dir = Path(out_dir)
    written = []
    for step_front in result.step_fronts:
        path = out_dir / f"front_step{step_front.step_index}.csv"
        step = step_front.step_index - 1 if bundle.surrogates else -1
        write_front_csv(
            path, step_front.solutions, bundle,
            feasible_only=feasible_only, surrogate_step=step,
        )
        written.append(path)
    hv_path = out_dir / "hv_per_generation.csv"
    with open(hv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["generation", "hypervolume"])
        for rec in result.history:
            writer.writerow([rec.generation, _fmt(rec.hypervolume)])
    written.append(hv_path)
    return written


def front_metrics(
    solutions: Sequence[Solution],
    bundle: ProblemBundle,
    reference: tuple[float, float],
    scaling: ScalingParams | None = None,
) -> dict:
    """Scaled hypervolume, average hypervolume, and CU for one front."""
    if not solutions:
        return {
            "total_solutions": 0, "hypervolume": 0.0,
            "average_hypervolume": 0.0, "confidence_uncertainty": None,
        }
    objectives = np.stack([s.objectives for s in solutions])
    if scaling is None:
        scaled, _ = min_max_scale(objectives)
    else:
        scaled = scaling.apply(objectives)
    hv = hypervolume_2d(scaled, reference, scaled=True).value
    avg = average_hypervolume(scaled, reference)
    cu = None
    intervals = bundle.intervals_for(np.stack([s.design for s in solutions]))
    if intervals is not None:
        _, cu = confidence_uncertainty(intervals)
    return {
        "total_solutions": len(solutions),
        "hypervolume": hv,
        "average_hypervolume": avg,
        "confidence_uncertainty": cu,
    }


def _summary_scaffold(cfg: ExperimentConfig) -> dict:
    return {
        "mode": cfg.mode,
        "problem": cfg.problem,
        "kernel_backend": kernels.active_backend(),
        "config": cfg.raw,
        "seed": cfg.seed,
        "reference": list(cfg.reference),
    }


def _write_summary(out_dir: Path, summary: dict) -> None:
    with open(out_dir / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _run_optimize(cfg: ExperimentConfig, bundle: ProblemBundle, out_dir: Path) -> dict:
    params = make_run_params(cfg, bundle)
    result = run_do_nsga2(bundle.schedule, params)
    write_front_csv(out_dir / "pareto_front.csv", result.final_pareto, bundle, cfg.feasible_only)
    write_history_csv(out_dir / "history.csv", result)
    emit_plot_data(result, out_dir, bundle, cfg.feasible_only)
    summary = _summary_scaffold(cfg)
    summary["surrogate_fit"] = bundle.surrogate_fit
    summary["algorithms"] = {
        "do_nsga2": {
            **front_metrics(result.final_pareto, bundle, cfg.reference),
            "final_front_feasible": result.final_front_feasible,
            "wall_time_s": result.wall_time,
        }
    }
    summary["scaling"] = {"fit": "per-front"}
    return summary


def _run_grid(cfg: ExperimentConfig, bundle: ProblemBundle, out_dir: Path) -> dict:
    started = time.perf_counter()
    grid_result = run_grid_search(bundle.data_bounds, bundle.problem, GridParams(inc=cfg.inc))
    elapsed = time.perf_counter() - started
    write_front_csv(out_dir / "pareto_front.csv", grid_result.solutions, bundle, cfg.feasible_only)
    write_history_csv(out_dir / "history.csv", None)
    summary = _summary_scaffold(cfg)
    summary["surrogate_fit"] = bundle.surrogate_fit
    summary["algorithms"] = {
        "grid_search": {
            **front_metrics(grid_result.solutions, bundle, cfg.reference),
            "evaluation_count": grid_result.evaluation_count,
            "all_candidates_infeasible": not grid_result.feasible,
            "wall_time_s": elapsed,
        }
    }
    summary["scaling"] = {"fit": "per-front"}
    return summary


def _run_compare(cfg: ExperimentConfig, bundle: ProblemBundle, out_dir: Path) -> dict:
    params = make_run_params(cfg, bundle)
    nsga_result = run_do_nsga2(bundle.schedule, params)
    started = time.perf_counter()
    grid_result = run_grid_search(bundle.data_bounds, bundle.problem, GridParams(inc=cfg.inc))
    grid_elapsed = time.perf_counter() - started

    nsga_obj = np.stack([s.objectives for s in nsga_result.final_pareto])
    grid_obj = (
        np.stack([s.objectives for s in grid_result.solutions])
        if grid_result.solutions
        else np.empty((0, 2))
    )
    joint = ScalingParams.fit(np.vstack([nsga_obj, grid_obj]))

    write_front_csv(out_dir / "pareto_front.csv", nsga_result.final_pareto, bundle, cfg.feasible_only)
    write_front_csv(out_dir / "grid_front.csv", grid_result.solutions, bundle, cfg.feasible_only)
    write_history_csv(out_dir / "history.csv", nsga_result)
    emit_plot_data(nsga_result, out_dir, bundle, cfg.feasible_only)

    summary = _summary_scaffold(cfg)
    summary["surrogate_fit"] = bundle.surrogate_fit
    summary["algorithms"] = {
        "do_nsga2": {
            **front_metrics(nsga_result.final_pareto, bundle, cfg.reference, scaling=joint),
            "final_front_feasible": nsga_result.final_front_feasible,
            "wall_time_s": nsga_result.wall_time,
        },
        "grid_search": {
            **front_metrics(grid_result.solutions, bundle, cfg.reference, scaling=joint),
            "evaluation_count": grid_result.evaluation_count,
            "all_candidates_infeasible": not grid_result.feasible,
            "wall_time_s": grid_elapsed,
        },
    }
    summary["scaling"] = {
        "fit": "joint",
        "mins": [float(v) for v in joint.mins],
        "maxs": [float(v) for v in joint.maxs],
    }
    return summary


def _run_dynamic(cfg: ExperimentConfig, bundle: ProblemBundle, out_dir: Path) -> dict:
    params = make_run_params(cfg, bundle, generations=bundle.schedule.total_generations)
    result = run_do_nsga2(bundle.schedule, params)
    write_front_csv(out_dir / "pareto_front.csv", result.final_pareto, bundle, cfg.feasible_only)
    write_history_csv(out_dir / "history.csv", result)
    emit_plot_data(result, out_dir, bundle, cfg.feasible_only)
    summary = _summary_scaffold(cfg)
    summary["surrogate_fit"] = bundle.surrogate_fit
    summary["schedule"] = [
        {"step": i + 1, "generations": step.duration}
        for i, step in enumerate(bundle.schedule.steps)
    ]
    summary["algorithms"] = {
        "do_nsga2": {
            **front_metrics(result.final_pareto, bundle, cfg.reference),
            "final_front_feasible": result.final_front_feasible,
            "wall_time_s": result.wall_time,
        }
    }
    summary["scaling"] = {"fit": "per-front"}
    return summary


def _run_metrics(cfg: ExperimentConfig, out_dir: Path) -> dict:
    try:
        with open(cfg.metrics_front_path, newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            rows = list(reader)
    except OSError as exc:
        raise ConfigError(f"metrics.front_path: {exc}") from exc
    obj_cols = [
        c for c in header
        if c.startswith("obj_") and not c.endswith("_lo90") and not c.endswith("_hi90")
    ]
    if not obj_cols:
        raise ConfigError("metrics.front_path: no obj_* columns found")
    senses = tuple(
        ObjectiveSense.MAXIMIZE if s == "maximize" else ObjectiveSense.MINIMIZE
        for s in cfg.metrics_senses
    )
    if len(senses) != len(obj_cols):
        raise ConfigError(
            f"metrics.senses lists {len(senses)} entries but the front has {len(obj_cols)} objectives"
        )
    summary = _summary_scaffold(cfg)
    if not rows:
        summary["metrics"] = {
            "total_solutions": 0, "hypervolume": 0.0,
            "average_hypervolume": 0.0, "confidence_uncertainty": None,
        }
        return summary
    raw = np.array([[float(r[c]) for c in obj_cols] for r in rows])
    canonical = canonicalize(raw, senses)
    scaled, _ = min_max_scale(canonical)
    entry = {
        "total_solutions": len(rows),
        "hypervolume": hypervolume_2d(scaled, cfg.reference, scaled=True).value
        if len(obj_cols) == 2 else None,
        "average_hypervolume": average_hypervolume(scaled, cfg.reference),
    }
    lo_cols = [f"{c}_lo90" for c in obj_cols]
    hi_cols = [f"{c}_hi90" for c in obj_cols]
    if all(c in header for c in lo_cols + hi_cols):
        lo = np.array([[float(r[c]) for c in lo_cols] for r in rows])
        hi = np.array([[float(r[c]) for c in hi_cols] for r in rows])
        _, cu = confidence_uncertainty(IntervalSet(lo90=lo, hi90=hi))
        entry["confidence_uncertainty"] = cu
    else:
        entry["confidence_uncertainty"] = None
    summary["metrics"] = entry
    return summary


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Execute one configured experiment and write its artifacts.

    All validation (config, dataset, surrogate build) happens before any
    file is written, so an invalid configuration leaves no partial
    artifacts behind.
    """
    bundle = None
    if cfg.mode != "metrics":
        bundle = build_bundle(cfg)

    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    if cfg.mode == "optimize":
        summary = _run_optimize(cfg, bundle, out_dir)
    elif cfg.mode == "grid-search":
        summary = _run_grid(cfg, bundle, out_dir)
    elif cfg.mode == "compare":
        summary = _run_compare(cfg, bundle, out_dir)
    elif cfg.mode == "dynamic":
        summary = _run_dynamic(cfg, bundle, out_dir)
    elif cfg.mode == "metrics":
        summary = _run_metrics(cfg, out_dir)
    else:  # pragma: no cover - load_config rejects unknown modes
        raise ConfigError(f"unsupported mode: {cfg.mode}")

    _write_summary(out_dir, summary)
    return summary


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="moo-rank",
        description="Constrained, dynamic, multi-objective optimization experiments.",
    )
    parser.add_argument("mode", choices=MODES)
    parser.add_argument("--config", required=True, help="path to the JSON experiment config")
    parser.add_argument("--seed", type=int, default=None, help="override run.seed")
    parser.add_argument("--out-dir", default=None, help="override output_dir")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config, args.mode, seed_override=args.seed,
                          out_dir_override=args.out_dir)
        summary = run_experiment(cfg)
    except ConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 1

    print(json.dumps({"mode": cfg.mode, "output_dir": cfg.output_dir,
                      "kernel_backend": summary.get("kernel_backend")}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
