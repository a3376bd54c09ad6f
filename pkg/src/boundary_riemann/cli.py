"""Scenario-driven command line front end.

    boundary-riemann run --scenario ns_doubly_characteristic --out out/
    boundary-riemann compare --scenario my_case.json --threads 3

Exit codes: 0 when every requested check passes, 2 for an unreadable or
invalid scenario, 3 when a solver fails, 4 when a check fails.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import svgplot
from .boundary_layer import LayerProfile
from .boundary_layer import NewtonFail as LayerNewtonFail
from .model_core import BoundaryRegime, DomainError, Model, check_hypotheses, make_mhd, make_navier_stokes
from .riemann import (
    NewtonFail,
    RiemannOptions,
    SelfSimilarSolution,
    admissibility_report,
    layout_for,
    solve_boundary_riemann,
)
from .spectral import eig_EA, pencil_roots
from .viscous_ref import NoConvergence, PdeRun, StabilityViolation, cell_averages, evolve, l1_distance
from .wave_curves import AmplitudeTooLarge, FixedPointDiverged, NegativeCtilde, zeta_k_general

log = logging.getLogger("boundary_riemann")

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_SOLVER = 3
EXIT_CHECK = 4

SCHEMA_VERSION = 1
TASKS = ("solve", "hypotheses", "spectra", "layers", "sweep", "compare")
SOLVER_ERRORS = (
    AmplitudeTooLarge,
    NewtonFail,
    LayerNewtonFail,
    FixedPointDiverged,
    NegativeCtilde,
    NoConvergence,
    StabilityViolation,
    DomainError,
    ArithmeticError,
)

_number = {"type": "number"}
_positive = {"type": "number", "exclusiveMinimum": 0}
_vector = {"type": "array", "items": _number, "minItems": 1}

SCENARIO_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["schema_version", "model", "u_i", "u_b"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "name": {"type": "string"},
        "model": {
            "type": "object",
            "additionalProperties": False,
            "required": ["model"],
            "properties": {
                "model": {"enum": ["navier_stokes", "mhd"]},
                "R": _positive,
                "cv": _positive,
                "nu": _positive,
                "kappa": _positive,
                "eta": {"type": "number", "minimum": 0},
                "beta": _number,
            },
        },
        "u_i": _vector,
        "u_b": _vector,
        "solver": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "delta": _positive,
                "strength_bound": _positive,
                "tol": _positive,
                "max_iter": {"type": "integer", "minimum": 1},
                "n_curve": {"type": "integer", "minimum": 4},
                "fast_method": {"enum": ["auto", "shoot", "collocation"]},
            },
        },
        "tasks": {"type": "array", "items": {"enum": list(TASKS)}, "uniqueItems": True},
        "hypotheses": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "samples": {"type": "integer", "minimum": 0},
                "radius": {"type": "number", "minimum": 0},
            },
        },
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "required": ["eps"],
            "properties": {
                "eps": {"type": "array", "items": _positive, "minItems": 1},
                "n": {"type": "integer", "minimum": 8},
                "T": _positive,
                "X": _positive,
                "dx_min": _positive,
                "growth": {"type": "number", "exclusiveMinimum": 1},
                "snapshot_times": {"type": "array", "items": _positive},
                "max_relative_distance": _positive,
            },
        },
        "out": {"type": "string"},
        "seed": {"type": "integer", "minimum": 0},
    },
}

COMPONENT_NAMES = {
    "navier_stokes": ("rho", "u", "theta"),
    "mhd": ("rho", "b1", "b2", "u", "w1", "w2", "theta"),
}


class ScenarioError(ValueError):
    """Unreadable or schema-invalid scenario (exit code 2)."""


@dataclass(frozen=True)
class Scenario:
    path: str
    model: dict
    u_i: tuple
    u_b: tuple
    solver: dict = field(default_factory=dict)
    tasks: tuple = ("solve",)
    hypotheses: dict = field(default_factory=dict)
    sweep: dict | None = None
    out: str | None = None
    seed: int = 0
    name: str = ""

    def build_model(self) -> Model:
        params = {k: v for k, v in self.model.items() if k != "model"}
        if self.model["model"] == "navier_stokes":
            extra = set(params) - {"R", "cv", "nu", "kappa"}
            if extra:
                raise ScenarioError(f"navier_stokes does not take {sorted(extra)}")
            return make_navier_stokes(**params)
        return make_mhd(**params)

    @property
    def component_names(self) -> tuple:
        return COMPONENT_NAMES[self.model["model"]]


def resolve_scenario_path(name: str) -> Path:
    """A filesystem path, or the name of a bundled scenario."""
    path = Path(name)
    if path.exists():
        return path
    bundled = resources.files("boundary_riemann") / "scenarios"
    for candidate in (name, f"{name}.json"):
        entry = bundled / candidate
        if entry.is_file():
            return Path(str(entry))
    raise ScenarioError(f"{name}: no such file or bundled scenario")


def load_scenario(name: str) -> Scenario:
    path = resolve_scenario_path(name)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"{path}: {exc.strerror}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from exc
    try:
        jsonschema.validate(raw, SCENARIO_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ScenarioError(f"{path}: {where}: {exc.message}") from exc
    sc = Scenario(
        path=str(path),
        model=dict(raw["model"]),
        u_i=tuple(raw["u_i"]),
        u_b=tuple(raw["u_b"]),
        solver=dict(raw.get("solver", {})),
        tasks=tuple(raw.get("tasks", ["solve"])),
        hypotheses=dict(raw.get("hypotheses", {})),
        sweep=raw.get("sweep"),
        out=raw.get("out"),
        seed=int(raw.get("seed", 0)),
        name=raw.get("name", path.stem),
    )
    model = sc.build_model()
    for key in ("u_i", "u_b"):
        state = np.asarray(getattr(sc, key))
        if state.shape != (model.N,):
            raise ScenarioError(f"{path}: {key}: expected {model.N} components, got {len(state)}")
        try:
            model.check_state(state)
        except ValueError as exc:
            raise ScenarioError(f"{path}: {key}: {exc}") from exc
    if "compare" in sc.tasks and sc.sweep is None:
        raise ScenarioError(f"{path}: the compare task needs a sweep section")
    return sc


# ---------------------------------------------------------------------------
# deterministic JSON


def _format_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with every float written at 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, np.ndarray):
        return dumps(obj.tolist(), indent, _level)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(float(obj))
    if obj is None:
        return "null"
    return json.dumps(str(obj))


# ---------------------------------------------------------------------------
# tasks


@dataclass
class RunContext:
    scenario: Scenario
    model: Model
    out: Path
    threads: int
    seed: int
    checks: dict = field(default_factory=dict)
    report: dict = field(default_factory=dict)
    solution: SelfSimilarSolution | None = None
    snapshots: dict = field(default_factory=dict)

    @property
    def u_i(self) -> np.ndarray:
        return np.asarray(self.scenario.u_i, dtype=float)

    @property
    def u_b(self) -> np.ndarray:
        return np.asarray(self.scenario.u_b, dtype=float)

    def path(self, *parts: str) -> Path:
        p = self.out.joinpath(*parts)
        p.parent.mkdir(parents=True, exist_ok=True)
        return p


def _options(sc: Scenario, build_profiles: bool = False) -> RiemannOptions:
    return RiemannOptions(**sc.solver, build_profiles=build_profiles)


def _wave_record(w) -> dict:
    return {
        "kind": w.kind,
        "family": int(w.family),
        "speed_left": float(w.speed_left),
        "speed_right": float(w.speed_right),
        "left": w.left,
        "right": w.right,
    }


def task_solve(ctx: RunContext) -> None:
    build = "layers" in ctx.scenario.tasks
    sol = solve_boundary_riemann(ctx.model, ctx.u_i, ctx.u_b, _options(ctx.scenario, build))
    ctx.solution = sol
    adm = admissibility_report(sol, ctx.model)
    ctx.report["solve"] = {
        "regime": sol.regime.value,
        "strengths": sol.strengths,
        "residual": sol.residual,
        "iterations": sol.iterations,
        "trace": sol.trace,
        "underline": sol.underline,
        "boundary_value": sol.boundary_value,
        "waves": [_wave_record(w) for w in sol.pieces],
        "admissibility": adm.summary(),
    }
    ctx.checks["admissibility"] = bool(adm.all_pass)
    _wave_diagram(ctx, sol)


def _wave_diagram(ctx: RunContext, sol: SelfSimilarSolution) -> None:
    fig = svgplot.Figure("Wave diagram", "x", "t")
    t = np.array([0.0, 1.0])
    if any(w.kind == "BOUNDARY_LAYER" for w in sol.pieces):
        fig.add([0.0, 0.0], t, "boundary layer")
    for j, w in enumerate(sol.moving_waves()):
        label = f"{w.kind.lower()} {j}"
        if w.kind == "RAREFACTION":
            for speed in np.linspace(w.speed_left, w.speed_right, 5):
                fig.add(speed * t, t, label, dashed=True)
        else:
            fig.add(w.speed * t, t, label)
    if not fig.series:
        fig.add([0.0, 0.0], t, "no waves")
    svgplot.save(fig, ctx.path("plots", "wave_diagram.svg"), ctx.path("plots", "wave_diagram.csv"))


def task_hypotheses(ctx: RunContext) -> None:
    opts = ctx.scenario.hypotheses
    samples = int(opts.get("samples", 20))
    radius = float(opts.get("radius", 0.01))
    rng = np.random.default_rng(ctx.seed)
    states = [ctx.u_i, ctx.u_b]
    states += [ctx.u_i + radius * rng.uniform(-1.0, 1.0, ctx.model.N) for _ in range(samples)]
    failures = []
    checked = 0
    for u in states:
        try:
            ctx.model.check_state(u)
        except ValueError:
            continue
        checked += 1
        rep = check_hypotheses(ctx.model, u)
        if not rep.all_pass:
            failures.append({"state": u, "failed": rep.failures()})
    ctx.report["hypotheses"] = {"checked": checked, "failures": failures}
    ctx.checks["hypotheses"] = not failures


def task_spectra(ctx: RunContext) -> None:
    spec = eig_EA(ctx.model, ctx.u_i)
    dirs = pencil_roots(ctx.model, ctx.u_i)
    neg, zero, pos = dirs.root_signature()
    ctx.report["spectra"] = {
        "eigenvalues": spec.lambdas,
        "characteristic_family": int(spec.k),
        "pencil_roots": dirs.pencil_roots,
        "pencil_root_signature": {"negative": neg, "zero": zero, "positive": pos},
        "characteristic_root": dirs.char_root,
    }
    fig = svgplot.Figure("Spectra at the interior state", "index", "value")
    fig.add(np.arange(len(spec.lambdas)), spec.lambdas, "eigenvalues of E^-1 A")
    fig.add(np.arange(len(dirs.pencil_roots)), np.sort(dirs.pencil_roots), "pencil roots", dashed=True)
    svgplot.save(fig, ctx.path("plots", "spectra.svg"), ctx.path("plots", "spectra.csv"))


def _layer_table(prof, model) -> tuple[np.ndarray, np.ndarray, str] | None:
    if isinstance(prof, LayerProfile):
        if prof.grid_x is not None:
            x = np.asarray(prof.grid_x, dtype=float)
            return x, prof.states, "x"
        return np.asarray(prof.grid_y, dtype=float), prof.states, "y"
    if isinstance(prof, dict) and "x" in prof:
        x = np.asarray(prof["x"], dtype=float)
        keep = np.isfinite(x)
        return x[keep], np.asarray(prof["states"])[keep], "x"
    return None


def task_layers(ctx: RunContext) -> None:
    if ctx.solution is None:
        task_solve(ctx)
    sol = ctx.solution
    names = ctx.scenario.component_names
    layers = []
    for j, w in enumerate(p for p in sol.pieces if p.kind == "BOUNDARY_LAYER"):
        prof = w.profile or {}
        table = _layer_table(prof.get("layer", prof), ctx.model)
        if table is None:
            continue
        x, states, axis = table
        fig = svgplot.Figure(f"Boundary layer {j}", axis, "state - end state")
        for c, name in enumerate(names):
            fig.add(x, states[:, c] - w.right[c], name)
        stem = f"layer_{j}"
        svgplot.save(fig, ctx.path("plots", f"{stem}.svg"), ctx.path("plots", f"{stem}.csv"))
        with open(ctx.path("profiles", f"{stem}.csv"), "w", encoding="utf-8") as fh:
            fh.write(",".join([axis, *names]) + "\n")
            for xv, row in zip(x, states):
                fh.write(",".join(format(float(v), ".17g") for v in (xv, *row)) + "\n")
        layers.append({"index": j, "axis": axis, "points": len(x), "wall": states[0], "end": w.right})
    ctx.report["layers"] = layers
    _envelope_plot(ctx, sol)


def _envelope_plot(ctx: RunContext, sol: SelfSimilarSolution) -> None:
    """The enveloped function of the characteristic curve next to its monotone envelope."""
    u_tilde = sol.states.get("u_tilde")
    full = sol.strengths
    if sol.regime is BoundaryRegime.PARTIAL:
        full = np.concatenate([np.zeros(ctx.model.h), full])
    s_char = float(full[layout_for(ctx.model, ctx.u_i).char])
    if u_tilde is None or s_char == 0.0:
        return
    res = zeta_k_general(ctx.model, None, u_tilde, s_char, n_grid=513)
    t = np.abs(res.tau)
    fig = svgplot.Figure("Characteristic curve envelope", "|tau|", "g")
    fig.add(t, res.g_vals, "g")
    fig.add(t, res.env_vals, "monotone concave envelope", dashed=True)
    svgplot.save(fig, ctx.path("plots", "envelope.svg"), ctx.path("plots", "envelope.csv"))
    ctx.report["envelope"] = {"s_char": s_char, "tau_bar": res.tau_bar, "tau_under": res.tau_under}


def _sweep_point(scenario: Scenario, eps: float) -> tuple[float, dict, PdeRun]:
    """One viscous run; top level so worker processes can pickle it."""
    cfg = scenario.sweep or {}
    run = PdeRun(
        X=float(cfg.get("X", 1.0)),
        n=int(cfg.get("n", 4096)),
        eps=eps,
        T=float(cfg.get("T", 0.5)),
        dx_min=cfg.get("dx_min", 1e-6),
        growth=float(cfg.get("growth", 1.05)),
        snapshot_times=tuple(cfg.get("snapshot_times", ())),
    )
    snaps = evolve(scenario.build_model(), np.asarray(scenario.u_i), np.asarray(scenario.u_b), run)
    return eps, snaps, run


def task_sweep(ctx: RunContext) -> None:
    eps_list = [float(e) for e in ctx.scenario.sweep["eps"]]
    if ctx.threads > 1 and len(eps_list) > 1:
        # the stepper holds the interpreter lock, so workers are processes
        with ProcessPoolExecutor(max_workers=min(ctx.threads, len(eps_list))) as pool:
            results = list(pool.map(_sweep_point, [ctx.scenario] * len(eps_list), eps_list))
    else:
        results = [_sweep_point(ctx.scenario, e) for e in eps_list]
    names = ctx.scenario.component_names
    records = []
    for eps, snaps, run in results:
        ctx.snapshots[eps] = (snaps, run)
        for t_snap, (x, u) in sorted(snaps.items()):
            with open(ctx.path("profiles", f"viscous_eps{eps:g}_t{t_snap:g}.csv"), "w", encoding="utf-8") as fh:
                fh.write(",".join(["x", *names]) + "\n")
                for xv, row in zip(x, u):
                    fh.write(",".join(format(float(v), ".17g") for v in (xv, *row)) + "\n")
        records.append(
            {
                "eps": eps,
                "cells": run.n,
                "steps": run.steps,
                "snapshot_times": sorted(snaps),
                "mass_drift": run.mass[-1] - run.mass[0],
            }
        )
    ctx.report["sweep"] = records


def compare_distances(ctx: RunContext) -> dict:
    """L1 distance between the viscous runs and the self-similar solution at the final time."""
    sol = ctx.solution
    h = ctx.model.h
    used = np.arange(ctx.model.N)
    if sol.regime is BoundaryRegime.PARTIAL:
        # the wall only prescribes the parabolic components
        used = used[h:]
    amplitude = float(np.max(np.abs(ctx.u_b - ctx.u_i)[used]))
    rows = []
    for eps in sorted(ctx.snapshots, reverse=True):
        snaps, run = ctx.snapshots[eps]
        T = max(snaps)
        _, u = snaps[T]
        ref = cell_averages(lambda x: sol.sample(T, x), run.faces)
        dist = l1_distance(run.faces, u, ref)
        rel = float(np.max(dist[used])) / amplitude if amplitude > 0 else 0.0
        rows.append({"eps": eps, "l1": dist, "relative": rel})
    verdict = None
    if len(rows) > 1:
        rel = [r["relative"] for r in rows]
        verdict = "monotone" if all(b < a for a, b in zip(rel, rel[1:])) else "not_monotone"
    limit = float((ctx.scenario.sweep or {}).get("max_relative_distance", 0.05))
    return {
        "components": [ctx.scenario.component_names[i] for i in used],
        "amplitude": amplitude,
        "rows": rows,
        "verdict": verdict,
        "max_relative_distance": limit,
        "smallest_eps_within_limit": bool(rows[-1]["relative"] <= limit) if rows else None,
    }


def task_compare(ctx: RunContext) -> None:
    if ctx.solution is None:
        task_solve(ctx)
    if not ctx.snapshots:
        task_sweep(ctx)
    table = compare_distances(ctx)
    ctx.report["compare"] = table
    ctx.checks["compare_monotone"] = table["verdict"] != "not_monotone"
    ctx.checks["compare_distance"] = bool(table["smallest_eps_within_limit"])
    fig = svgplot.Figure("Distance to the self-similar solution", "eps", "relative L1 distance")
    fig.add([r["eps"] for r in table["rows"]], [r["relative"] for r in table["rows"]], "distance")
    svgplot.save(fig, ctx.path("plots", "compare.svg"), ctx.path("plots", "compare.csv"))
    if ctx.solution is not None and ctx.snapshots:
        eps = min(ctx.snapshots)
        snaps, run = ctx.snapshots[eps]
        T = max(snaps)
        x, u = snaps[T]
        ref = ctx.solution.sample(T, x)
        fig = svgplot.Figure(f"Profiles at t = {T:g}", "x", "state")
        for c, name in enumerate(ctx.scenario.component_names):
            fig.add(x, u[:, c], f"{name} eps={eps:g}")
            fig.add(x, ref[:, c], f"{name} self-similar", dashed=True)
        svgplot.save(fig, ctx.path("plots", "profiles_final.svg"), ctx.path("plots", "profiles_final.csv"))


TASK_FUNCS = {
    "solve": task_solve,
    "hypotheses": task_hypotheses,
    "spectra": task_spectra,
    "layers": task_layers,
    "sweep": task_sweep,
    "compare": task_compare,
}


# ---------------------------------------------------------------------------
# entry points


def run(
    scenario_path: str,
    out: str | None = None,
    tasks: list[str] | None = None,
    threads: int = 1,
    seed: int | None = None,
) -> int:
    """Execute the scenario's tasks and write artifacts; returns the exit code."""
    try:
        sc = load_scenario(scenario_path)
        task_list = list(tasks) if tasks is not None else list(sc.tasks)
        unknown = [t for t in task_list if t not in TASKS]
        if unknown:
            raise ScenarioError(f"unknown tasks {unknown}")
        if "compare" in task_list and sc.sweep is None:
            raise ScenarioError(f"{sc.path}: the compare task needs a sweep section")
        if "sweep" in task_list and sc.sweep is None:
            raise ScenarioError(f"{sc.path}: the sweep task needs a sweep section")
        model = sc.build_model()
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    out_dir = Path(out or sc.out or "out")
    out_dir.mkdir(parents=True, exist_ok=True)
    ctx = RunContext(sc, model, out_dir, threads, sc.seed if seed is None else seed)
    ctx.scenario = Scenario(**{**sc.__dict__, "tasks": tuple(task_list)})
    code = EXIT_OK
    error = None
    for name in (t for t in TASKS if t in task_list):
        log.info("task %s", name)
        try:
            TASK_FUNCS[name](ctx)
        except SOLVER_ERRORS as exc:
            error = {"task": name, "type": type(exc).__name__, "message": str(exc)}
            code = EXIT_SOLVER
            break
    failed = sorted(k for k, ok in ctx.checks.items() if not ok)
    if code == EXIT_OK and failed:
        code = EXIT_CHECK
    doc = {
        "schema_version": SCHEMA_VERSION,
        "scenario": sc.name,
        "model": sc.model,
        "u_i": ctx.u_i,
        "u_b": ctx.u_b,
        "seed": ctx.seed,
        "tasks": task_list,
        **ctx.report,
        "checks": dict(sorted(ctx.checks.items())),
        "error": error,
        "exit_code": code,
    }
    ctx.path("solution.json").write_text(dumps(doc) + "\n", encoding="utf-8")
    if error:
        print(f"solver failure in {error['task']}: {error['type']}: {error['message']}", file=sys.stderr)
    for k, ok in sorted(ctx.checks.items()):
        print(f"{'PASS' if ok else 'FAIL'} {k}")
    return code


def compare(scenario_path: str, out: str | None = None, threads: int = 1, seed: int | None = None) -> dict:
    """Run solve, sweep and compare; returns the comparison table (raises on errors)."""
    sc = load_scenario(scenario_path)
    if sc.sweep is None:
        raise ScenarioError(f"{sc.path}: the compare task needs a sweep section")
    model = sc.build_model()
    out_dir = Path(out or sc.out or "out")
    sc = Scenario(**{**sc.__dict__, "tasks": ("solve", "sweep", "compare")})
    ctx = RunContext(sc, model, out_dir, threads, sc.seed if seed is None else seed)
    task_solve(ctx)
    task_sweep(ctx)
    task_compare(ctx)
    return ctx.report["compare"]


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="boundary-riemann", description=__doc__.splitlines()[0])
    p.add_argument("command", nargs="?", choices=("run", "compare"), default="run")
    p.add_argument("--scenario", required=True, help="scenario JSON path or bundled scenario name")
    p.add_argument("--out", help="output directory (default: scenario 'out' or ./out)")
    p.add_argument("--tasks", help=f"comma-separated subset of {','.join(TASKS)}")
    p.add_argument("--threads", type=int, default=1, help="parallel workers for sweep points")
    p.add_argument("--seed", type=int, help="seed for sampled checks (unsigned 64-bit)")
    p.add_argument("--verbose", action="store_true")
    return p


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.seed is not None and not 0 <= args.seed < 2**64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_SCHEMA
    if args.threads < 1:
        print("error: --threads must be positive", file=sys.stderr)
        return EXIT_SCHEMA
    if args.command == "compare":
        tasks = ["solve", "sweep", "compare"]
    else:
        tasks = [t.strip() for t in args.tasks.split(",") if t.strip()] if args.tasks else None
    return run(args.scenario, out=args.out, tasks=tasks, threads=args.threads, seed=args.seed)


if __name__ == "__main__":
    sys.exit(main())
