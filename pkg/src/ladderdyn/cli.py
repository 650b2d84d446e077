"""Command-line entry point: ``ladderdyn {run,compare,figure1,fermi-baseline,list-models}``.

Every flag has a config-file key; precedence is built-in scenario, then
``--config`` file, then flags.  Exit codes: 0 success, 2 invalid config,
3 grid oracle breach (truncation or norm drift), 4 tolerance exceeded
under ``compare --strict``.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import yaml

from .models import PRESETS
from .models.registry import ALIASES
from .oracle import OracleError
from .scenario import (
    FIGURE1_PANELS,
    SCENARIOS,
    SOLVERS,
    ConfigError,
    base_config,
    build_scenario,
    default_outdir,
    load_config,
    merge,
    run_scenario,
    write_outputs,
)

EXIT_CONFIG = 2
EXIT_ORACLE = 3
EXIT_TOLERANCE = 4


def _key_value(text: str) -> tuple[str, object]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    k, v = text.split("=", 1)
    return k.strip(), yaml.safe_load(v)


def _add_scenario_args(p: argparse.ArgumentParser, positional: bool = True):
    if positional:
        p.add_argument("scenario", nargs="?", help="built-in scenario or model preset name")
    p.add_argument("--config", metavar="PATH", help="YAML scenario file")
    p.add_argument("--out", metavar="PATH", help="CSV output path (output.csv)")
    p.add_argument("--svg", action="store_true", default=None, help="also write an SVG plot (output.svg)")
    p.add_argument("--dump", metavar="PATH", help="binary trajectory dump (output.dump)")
    p.add_argument("--solver", choices=SOLVERS, help="solver selection (solver)")
    p.add_argument("--lambda2", type=float, help="second cubic coupling (params.lam2)")
    p.add_argument("--t-max", type=float, help="final time (time.t_max)")
    p.add_argument("--samples", type=int, help="number of time samples (time.samples)")
    p.add_argument("--tolerance", type=float, help="cross-solver relative tolerance (tolerance)")
    p.add_argument("--param", action="append", type=_key_value, default=[], metavar="KEY=VALUE",
                   help="preset parameter override (params.KEY)")
    p.add_argument("--center", action="append", type=_key_value, default=[], metavar="J=K",
                   help="initial Gaussian center of mode J (centers.J)")
    p.add_argument("--grid", action="append", type=_key_value, default=[], metavar="KEY=VALUE",
                   help="grid oracle override (grid.KEY)")


def _flag_overrides(args) -> dict:
    over: dict = {}
    params = dict(args.param)
    if args.lambda2 is not None:
        params["lam2"] = args.lambda2
    if params:
        over["params"] = params
    if args.center:
        over["centers"] = dict(args.center)
    if args.grid:
        over["grid"] = dict(args.grid)
    time = {k: v for k, v in (("t_max", args.t_max), ("samples", args.samples)) if v is not None}
    if time:
        over["time"] = time
    if args.solver is not None:
        over["solver"] = args.solver
    if args.tolerance is not None:
        over["tolerance"] = args.tolerance
    output = {k: v for k, v in (("csv", args.out), ("svg", args.svg), ("dump", args.dump))
              if v is not None}
    if output:
        over["output"] = output
    return over


def _resolve(args, name: str | None = None):
    cfg: dict = {}
    name = name or getattr(args, "scenario", None)
    if name:
        cfg = base_config(name)
    if args.config:
        cfg = merge(cfg, load_config(args.config))
    if "model" not in cfg:
        raise ConfigError("scenario", "give a scenario name or --config with a model key")
    return build_scenario(merge(cfg, _flag_overrides(args)))


def cmd_run(args) -> int:
    sc = _resolve(args)
    result = run_scenario(sc)
    written = write_outputs(result)
    for kind, path in written.items():
        print(f"wrote {kind}: {path}")
    cmp_ = result.comparison()
    if cmp_:
        print(f"{cmp_['candidate']} vs {cmp_['reference']}: max_abs={cmp_['max_abs']:.3e} "
              f"max_rel={cmp_['max_rel']:.3e}")
    for d in result.diagnostics:
        print(f"diagnostic: {d}", file=sys.stderr)
    return 0


def format_report(cmp_: dict, tolerance: float) -> str:
    lines = [f"reference: {cmp_['reference']}", f"candidate: {cmp_['candidate']}",
             f"max_abs_deviation: {cmp_['max_abs']:.6e}",
             f"max_rel_deviation: {cmp_['max_rel']:.6e}",
             f"tolerance: {tolerance:g}",
             f"within_tolerance: {'yes' if cmp_['within_tolerance'] else 'no'}"]
    lines += [f"conservation_drift[{k}]: {v:.6e}" for k, v in cmp_["drift"].items()]
    return "\n".join(lines)


def cmd_compare(args) -> int:
    sc = _resolve(args)
    if sc.solver != "all":
        sc = build_scenario(merge(sc.effective(), {"solver": "all"}))
    result = run_scenario(sc)
    cmp_ = result.comparison()
    print(f"scenario: {sc.name} ({sc.model})")
    print(format_report(cmp_, sc.tolerance))
    if args.out or sc.csv:
        write_outputs(result)
    if args.strict and not cmp_["within_tolerance"]:
        return EXIT_TOLERANCE
    return 0


def cmd_figure1(args) -> int:
    outdir = Path(args.out_dir) if args.out_dir else default_outdir()
    for panel in FIGURE1_PANELS:
        cfg = base_config(panel)
        if args.config:
            cfg = merge(cfg, load_config(args.config))
        if args.lambda2 is not None and cfg["model"] == "cubic-pp3":
            cfg = merge(cfg, {"params": {"lam2": args.lambda2}})
        cfg = merge(cfg, {"output": {"csv": str(outdir / f"{panel}.csv"), "svg": True}})
        result = run_scenario(build_scenario(cfg))
        for kind, path in write_outputs(result).items():
            print(f"wrote {kind}: {path}")
    return 0


def cmd_fermi(args) -> int:
    args.solver = args.solver or "all"
    sc = _resolve(args, "fermi-pp")
    if sc.kind != "fermi":
        raise ConfigError("model", "fermi-baseline runs the fermi-pp preset only")
    result = run_scenario(sc)
    for kind, path in write_outputs(result).items():
        print(f"wrote {kind}: {path}")
    cmp_ = result.comparison()
    if cmp_:
        print(f"matrix vs closed form: max_abs={cmp_['max_abs']:.3e}")
    return 0


def list_models() -> str:
    lines = ["presets (H = ...; frequencies in radians per unit time):"]
    for info in PRESETS.values():
        defaults = ", ".join(f"{k}={v}" for k, v in info.params.items() if v is not None)
        lines.append(f"  {info.name:<14} [{info.kind}] {info.formula}")
        lines.append(f"  {'':<14} defaults: {defaults}")
    lines.append("aliases:")
    lines += [f"  {a} -> {t}" for a, t in ALIASES.items()]
    lines.append("scenarios:")
    lines += [f"  {s} -> {c['model']}" for s, c in SCENARIOS.items()]
    return "\n".join(lines)


def cmd_list(args) -> int:
    print(list_models())
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ladderdyn", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one scenario and write CSV (and SVG)")
    _add_scenario_args(r)
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("compare", help="cross-check exact or perturbative results against the grid")
    _add_scenario_args(c)
    c.add_argument("--strict", action="store_true", help="exit 4 when the tolerance is exceeded")
    c.set_defaults(func=cmd_compare)

    f = sub.add_parser("figure1", help="write the three figure panels as CSV/SVG pairs")
    f.add_argument("--out-dir", metavar="DIR", help="output directory")
    f.add_argument("--config", metavar="PATH", help="YAML overrides applied to every panel")
    f.add_argument("--lambda2", type=float, help="second cubic coupling of the bottom panels")
    f.set_defaults(func=cmd_figure1)

    fb = sub.add_parser("fermi-baseline", help="fermionic 4x4 baseline, closed form vs matrix")
    _add_scenario_args(fb, positional=False)
    fb.set_defaults(func=cmd_fermi)

    ls = sub.add_parser("list-models", help="list presets, aliases and built-in scenarios")
    ls.set_defaults(func=cmd_list)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"ladderdyn: invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OracleError as exc:
        print(f"ladderdyn: grid oracle: {exc}", file=sys.stderr)
        return EXIT_ORACLE


if __name__ == "__main__":
    sys.exit(main())
