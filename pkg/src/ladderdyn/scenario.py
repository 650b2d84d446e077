"""Declarative scenarios: validation, solver dispatch and CSV rendering.

A scenario is a plain mapping (usually loaded from YAML)::

    model: quadratic-pp          # preset name or alias
    params: {lam: 3.0}           # preset parameter overrides (rad / unit time)
    centers: {1: 2.0, 3: 5.0}    # Gaussian centers k_j
    time: {t_max: 10.0, samples: 201}
    solver: all                  # exact | perturbative | grid | all
    tolerance: 1.0e-3            # cross-solver agreement reported for solver=all
    grid: {cells_per_unit: 8}    # GridConfig overrides
    output: {csv: out.csv, svg: true, dump: null}
"""

from __future__ import annotations

import copy
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np
import yaml

from .dynamics import evolve_positions, mean_trajectory, negative_excursions
from .models import (
    PRESETS,
    fermi_density,
    fermi_density_matrix,
    gated_perturbative_x1,
    lookup_preset,
)
from .models.registry import ALIASES
from .oracle import GridConfig, discretize_state, propagate, write_trajectory
from .states import GaussianState
from .svg import render_svg

OUTDIR_ENV = "LADDERDYN_OUTDIR"
SOLVERS = ("exact", "perturbative", "grid", "all")
DEFAULT_TIME = {"t_max": 10.0, "samples": 201}
DEFAULT_TOLERANCE = 1e-3

_GRID_KEYS = {"half_width", "cells_per_unit", "dt", "integrator", "krylov_dim", "krylov_tol",
              "krylov_reorth", "boundary_mass_threshold", "boundary_margin",
              "min_center_clearance"}
_TOP_KEYS = {"name", "model", "params", "centers", "time", "solver", "tolerance", "grid", "output"}

# built-in scenarios: figure panels use the solvable closed forms
SCENARIOS: dict[str, dict] = {
    "figure1-top": {
        "model": "quadratic-pp", "params": {"omega1": 3.0, "omega3": 1.0, "lam": 3.0},
        "centers": {1: 1.0, 3: 4.0}, "time": {"t_max": 10.0, "samples": 401}, "solver": "exact"},
    "figure1-bottom-left": {
        "model": "cubic-pp3", "params": {"Omega1": 2.0, "Omega2": 3.0, "lam1": 2.0, "lam2": 1.0},
        "centers": {1: 4.0, 2: 3.0, 3: 3.0}, "time": {"t_max": 10.0, "samples": 401},
        "solver": "exact"},
    "figure1-bottom-right": {
        "model": "cubic-pp3", "params": {"Omega1": 1.0, "Omega2": 4.0, "lam1": 2.0, "lam2": 1.0},
        "centers": {1: 4.0, 2: 3.0, 3: 3.0}, "time": {"t_max": 10.0, "samples": 401},
        "solver": "exact"},
    "quadratic": {"model": "quadratic-pp"},
    "cubic": {"model": "cubic-pp3"},
    "gated": {"model": "gated-pp", "solver": "perturbative"},
    "fermi": {"model": "fermi-pp"},
}
FIGURE1_PANELS = ("figure1-top", "figure1-bottom-left", "figure1-bottom-right")


class ConfigError(ValueError):
    """Invalid scenario; ``field`` names the offending config key."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def base_config(name: str) -> dict:
    if name in SCENARIOS:
        cfg = copy.deepcopy(SCENARIOS[name])
    elif name in PRESETS or name in ALIASES:
        cfg = {"model": name}
    else:
        known = sorted(SCENARIOS) + sorted(PRESETS) + sorted(ALIASES)
        raise ConfigError("scenario", f"unknown scenario {name!r}; known: {', '.join(known)}")
    cfg["name"] = name
    return cfg


def load_config(path: str | Path) -> dict:
    try:
        data = yaml.safe_load(Path(path).read_text())
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    except yaml.YAMLError as exc:
        raise ConfigError("config", f"not valid YAML: {exc}") from None
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError("config", "top level must be a mapping")
    return data


def merge(base: Mapping, over: Mapping) -> dict:
    out = copy.deepcopy(dict(base))
    for k, v in over.items():
        if isinstance(v, Mapping) and isinstance(out.get(k), Mapping):
            out[k] = merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _number(field: str, v, kind=float):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(field, f"expected a number, got {v!r}")
    if kind is int:
        if float(v) != int(v):
            raise ConfigError(field, f"expected an integer, got {v!r}")
        return int(v)
    v = float(v)
    if not np.isfinite(v):
        raise ConfigError(field, "must be finite")
    return v


@dataclass(frozen=True)
class Scenario:
    name: str
    model: str
    kind: str
    params: dict
    centers: dict
    t_max: float
    samples: int
    solver: str
    tolerance: float
    grid: dict
    csv: str | None = None
    svg: bool | str = False
    dump: str | None = None
    extra: dict = field(default_factory=dict)

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.samples)

    @property
    def solvers(self) -> tuple[str, ...]:
        if self.solver != "all":
            return (self.solver,)
        return {"gated": ("perturbative", "grid"), "fermi": ("exact", "grid")}.get(
            self.kind, ("exact", "grid"))

    @property
    def modes(self) -> tuple[int, ...]:
        return (1, 2, 3) if self.kind == "cubic" else (1, 3)

    @property
    def columns(self) -> tuple[str, ...]:
        prefix = "n" if self.kind == "fermi" else "x"
        return tuple(f"{prefix}{j}" for j in self.modes)

    def preset(self):
        return lookup_preset(self.model).make(**self.params)

    def state(self) -> GaussianState:
        return GaussianState(self.centers)

    def grid_config(self) -> GridConfig:
        return GridConfig(**self.grid)

    def effective(self) -> dict:
        """Fully resolved config, every default included."""
        return {
            "name": self.name, "model": self.model, "params": dict(self.params),
            "centers": dict(self.centers),
            "time": {"t_max": self.t_max, "samples": self.samples},
            "solver": self.solver, "tolerance": self.tolerance, "grid": dict(self.grid),
            "output": {"csv": self.csv, "svg": self.svg, "dump": self.dump},
        }


def build_scenario(cfg: Mapping[str, Any]) -> Scenario:
    unknown = set(cfg) - _TOP_KEYS
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown config key")
    if "model" not in cfg:
        raise ConfigError("model", "missing (give a scenario name or a model key)")
    model = cfg["model"]
    try:
        info = lookup_preset(str(model))
    except KeyError as exc:
        raise ConfigError("model", exc.args[0]) from None

    params = dict(info.params)
    for k, v in (cfg.get("params") or {}).items():
        if k not in info.params:
            raise ConfigError(f"params.{k}", f"not a parameter of {info.name}; "
                                             f"expected one of {sorted(info.params)}")
        params[k] = None if v is None else _number(f"params.{k}", v,
                                                   int if k in ("n1", "n3") else float)
    try:
        info.make(**params)
    except (ValueError, KeyError) as exc:
        raise ConfigError("params", str(exc.args[0] if exc.args else exc)) from None

    solver = cfg.get("solver", "exact")
    if solver not in SOLVERS:
        raise ConfigError("solver", f"expected one of {', '.join(SOLVERS)}, got {solver!r}")
    if info.kind == "gated" and solver == "exact":
        raise ConfigError("solver", "gated-pp is outside the solvable class; use perturbative, "
                                    "grid or all")
    if info.kind != "gated" and solver == "perturbative":
        raise ConfigError("solver", "perturbative is only defined for gated-pp")

    modes = (1, 2, 3) if info.kind == "cubic" else (1, 3)
    centers = {}
    if info.kind != "fermi":
        raw = {**info.centers, **(cfg.get("centers") or {})}
        for k, v in raw.items():
            try:
                j = int(k)
            except (TypeError, ValueError):
                raise ConfigError(f"centers.{k}", "mode labels are integers") from None
            if j not in modes:
                raise ConfigError(f"centers.{k}", f"{info.name} has modes {modes}")
            centers[j] = _number(f"centers.{k}", v)
    elif cfg.get("centers"):
        raise ConfigError("centers", "fermi-pp starts from a number state; set params n1, n3")

    time = {**DEFAULT_TIME, **(cfg.get("time") or {})}
    if set(time) - set(DEFAULT_TIME):
        raise ConfigError(f"time.{sorted(set(time) - set(DEFAULT_TIME))[0]}", "unknown key")
    t_max = _number("time.t_max", time["t_max"])
    samples = _number("time.samples", time["samples"], int)
    if t_max <= 0:
        raise ConfigError("time.t_max", "must be positive")
    if samples < 2:
        raise ConfigError("time.samples", "need at least 2 samples")

    tolerance = _number("tolerance", cfg.get("tolerance", DEFAULT_TOLERANCE))
    if tolerance <= 0:
        raise ConfigError("tolerance", "must be positive")

    grid = {**info.grid, **(cfg.get("grid") or {})}
    for k in grid:
        if k not in _GRID_KEYS:
            raise ConfigError(f"grid.{k}", f"unknown grid setting; expected one of {sorted(_GRID_KEYS)}")
    try:
        gc = GridConfig(**grid)
    except (TypeError, ValueError) as exc:
        raise ConfigError("grid", str(exc)) from None
    grid = {k: getattr(gc, k) for k in sorted(_GRID_KEYS)}

    out = cfg.get("output") or {}
    if not isinstance(out, Mapping) or set(out) - {"csv", "svg", "dump"}:
        raise ConfigError("output", "expected a mapping with keys csv, svg, dump")
    svg = out.get("svg", False)
    if not isinstance(svg, (bool, str)):
        raise ConfigError("output.svg", "expected true/false or a path")

    return Scenario(
        name=str(cfg.get("name") or info.name), model=info.name, kind=info.kind,
        params={k: params[k] for k in sorted(params)}, centers=dict(sorted(centers.items())),
        t_max=t_max, samples=samples, solver=solver, tolerance=tolerance, grid=grid,
        csv=out.get("csv"), svg=svg, dump=out.get("dump"))


@dataclass
class SolverRun:
    solver: str
    values: dict[str, np.ndarray]
    info: dict = field(default_factory=dict)

    @property
    def total(self) -> np.ndarray:
        """The conserved predator/prey total (first plus last column)."""
        cols = list(self.values.values())
        return cols[0] + cols[-1]


@dataclass
class RunResult:
    scenario: Scenario
    times: np.ndarray
    runs: list[SolverRun]
    diagnostics: list[str] = field(default_factory=list)

    def run(self, solver: str) -> SolverRun:
        return next(r for r in self.runs if r.solver == solver)

    def comparison(self) -> dict | None:
        """Max deviations of the second solver against the first."""
        if len(self.runs) < 2:
            return None
        ref, other = self.runs[0], self.runs[1]
        abs_dev = max(float(np.max(np.abs(other.values[c] - ref.values[c]))) for c in ref.values)
        rel_dev = max(float(np.max(np.abs(other.values[c] - ref.values[c]))
                            / max(float(np.max(np.abs(ref.values[c]))), 1e-300))
                      for c in ref.values)
        drift = {r.solver: float(np.max(np.abs(r.total - r.total[0]))) for r in self.runs}
        return {"reference": ref.solver, "candidate": other.solver, "max_abs": abs_dev,
                "max_rel": rel_dev, "drift": drift,
                "within_tolerance": rel_dev <= self.scenario.tolerance}


def _solve(sc: Scenario, solver: str, times: np.ndarray) -> SolverRun:
    preset = sc.preset()
    if sc.kind == "fermi":
        if solver == "exact":
            n1, n3 = fermi_density(preset, times)
            return SolverRun("exact", {"n1": n1, "n3": n3})
        n1, n3 = fermi_density_matrix(preset, times)
        return SolverRun("matrix", {"n1": n1, "n3": n3})
    state = sc.state()
    if solver == "exact":
        trajs = evolve_positions(preset.build())
        return SolverRun("exact", {f"x{j}": mean_trajectory(trajs[j], state, times)
                                   for j in sc.modes})
    if solver == "perturbative":
        x1 = gated_perturbative_x1(preset, state.center(1), times)
        # x1 + x3 is conserved exactly, so x3 follows from x1
        return SolverRun("perturbative", {"x1": x1, "x3": state.center(1) + state.center(3) - x1})
    H = preset.build()
    H = H if sc.kind == "gated" else H.hamiltonian()
    cfg = sc.grid_config()
    try:
        psi0 = discretize_state(state, cfg)
    except ValueError as exc:
        raise ConfigError("grid.half_width", str(exc)) from None
    res = propagate(psi0, H, times, cfg)
    info = dict(res.info, norm_drift=res.norm_drift,
                max_boundary_mass=float(np.max(res.boundary_masses)))
    return SolverRun("grid", {f"x{j}": res.means[j] for j in sc.modes}, info)


def run_scenario(sc: Scenario) -> RunResult:
    times = sc.times
    runs = [_solve(sc, s, times) for s in sc.solvers]
    diags = []
    for r in runs:
        for col, v in r.values.items():
            neg = negative_excursions(v, times)
            if neg:
                diags.append(f"{r.solver}: {col} negative at {len(neg)} sample(s), "
                             f"first t={neg[0]:.6g}")
    return RunResult(sc, times, runs, diags)


def _fmt(v: float) -> str:
    # shortest round-trip representation: lossless and deterministic
    return repr(float(v))


def render_csv(result: RunResult) -> str:
    sc = result.scenario
    lines = ["# ladderdyn scenario output",
             "# units: frequencies in radians per unit time; t in the same time unit",
             "# sum: first plus last density column (the conserved total)"]
    echo = yaml.safe_dump({"config": sc.effective()}, sort_keys=True, default_flow_style=False)
    lines += [f"# {ln}" for ln in echo.rstrip("\n").split("\n")]
    for r in result.runs:
        for k, v in sorted(r.info.items()):
            lines.append(f"# {r.solver}.{k}: {v}")
    lines += [f"# diagnostic: {d}" for d in result.diagnostics]
    cols = sc.columns
    lines.append(",".join(("t",) + cols + ("sum", "solver")))
    for r in result.runs:
        tot = r.total
        for i, t in enumerate(result.times):
            row = [_fmt(t)] + [_fmt(r.values[c][i]) for c in cols] + [_fmt(tot[i]), r.solver]
            lines.append(",".join(row))
    cmp_ = result.comparison()
    if cmp_ is not None:
        drift = " ".join(f"drift_{k}={_fmt(v)}" for k, v in cmp_["drift"].items())
        lines.append(f"# compare {cmp_['candidate']} vs {cmp_['reference']}: "
                     f"max_abs={_fmt(cmp_['max_abs'])} max_rel={_fmt(cmp_['max_rel'])} "
                     f"tolerance={_fmt(sc.tolerance)} "
                     f"within_tolerance={'yes' if cmp_['within_tolerance'] else 'no'} {drift}")
    return "\n".join(lines) + "\n"


def atomic_write(path: str | Path, data: str | bytes) -> Path:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def default_outdir() -> Path:
    return Path(os.environ.get(OUTDIR_ENV, "."))


def write_outputs(result: RunResult, csv_path: str | Path | None = None) -> dict[str, Path]:
    """Write the CSV, plus SVG and binary dump when the scenario asks for them."""
    sc = result.scenario
    csv_path = Path(csv_path or sc.csv or default_outdir() / f"{sc.name}.csv")
    written = {"csv": atomic_write(csv_path, render_csv(result))}
    if sc.svg:
        svg_path = csv_path.with_suffix(".svg") if sc.svg is True else Path(sc.svg)
        first = result.runs[0]
        series = {c: first.values[c] for c in sc.columns}
        written["svg"] = atomic_write(svg_path, render_svg(result.times, series,
                                                           f"{sc.name} ({first.solver})"))
    if sc.dump:
        base = Path(sc.dump)
        for r in result.runs:
            path = base if len(result.runs) == 1 else base.with_name(
                f"{base.stem}.{r.solver}{base.suffix}")
            series = {j: r.values[c] for j, c in zip(sc.modes, sc.columns)}
            tmp = path.with_name(f".{path.name}.tmp")
            write_trajectory(tmp, result.times, series)
            os.replace(tmp, path)
            written[f"dump.{r.solver}"] = path
    return written


def read_csv(path: str | Path) -> tuple[list[str], dict[str, np.ndarray | list[str]]]:
    """Parse a scenario CSV into ``(comment lines, columns)``; ``solver`` stays a list of str."""
    comments, rows, header = [], [], None
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            comments.append(line[2:] if line.startswith("# ") else line[1:])
        elif header is None:
            header = line.split(",")
        elif line:
            rows.append(line.split(","))
    cols: dict[str, np.ndarray | list[str]] = {}
    for i, name in enumerate(header or []):
        vals = [r[i] for r in rows]
        cols[name] = vals if name == "solver" else np.array(vals, dtype=float)
    return comments, cols


def echoed_config(comments: list[str]) -> dict:
    """Recover the effective config echoed into a CSV's comment header."""
    block, inside = [], False
    for c in comments:
        if c == "config:":
            inside = True
        elif inside and not c.startswith("  "):
            break
        if inside:
            block.append(c)
    return (yaml.safe_load("\n".join(block)) or {}).get("config", {})
