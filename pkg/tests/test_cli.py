import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pytest
import yaml

from ladderdyn.cli import list_models, main
from ladderdyn.oracle import read_trajectory
from ladderdyn.scenario import ConfigError, base_config, build_scenario, echoed_config, read_csv

FAST_GRID = ["--grid", "half_width=12", "--grid", "cells_per_unit=4",
             "--grid", "integrator=krylov", "--grid", "dt=0.1"]


def test_list_models_mentions_presets_and_aliases(capsys):
    assert main(["list-models"]) == 0
    out = capsys.readouterr().out
    for name in ("quadratic-pp", "cubic-pp3", "gated-pp", "fermi-pp", "free",
                 "love-affair-quadratic", "love-affair-cubic", "love-affair-gated",
                 "love-affair-fermi", "figure1-top"):
        assert name in out
    assert "T1^-1 T3" in list_models()


def test_run_writes_schema_and_is_deterministic(tmp_path):
    out = tmp_path / "top.csv"
    assert main(["run", "figure1-top", "--out", str(out), "--samples", "21"]) == 0
    first = out.read_bytes()
    assert main(["run", "figure1-top", "--out", str(out), "--samples", "21"]) == 0
    assert out.read_bytes() == first
    comments, cols = read_csv(out)
    assert list(cols) == ["t", "x1", "x3", "sum", "solver"]
    assert len(cols["t"]) == 21
    assert set(cols["solver"]) == {"exact"}
    np.testing.assert_allclose(cols["sum"], 5.0, atol=1e-12)
    echoed = echoed_config(comments)
    assert echoed["params"] == {"lam": 3.0, "omega1": 3.0, "omega3": 1.0}
    assert echoed["grid"]["cells_per_unit"] == 8
    assert echoed["time"] == {"samples": 21, "t_max": 10.0}


def test_config_file_equivalent_to_flags(tmp_path):
    out = tmp_path / "q.csv"
    flags = ["run", "quadratic", "--out", str(out), "--samples", "11", "--t-max", "2",
             "--param", "lam=1.5", "--center", "1=2", "--solver", "exact", "--tolerance", "0.01"]
    assert main(flags) == 0
    via_flags = out.read_bytes()
    cfg = {"model": "quadratic-pp", "name": "quadratic", "params": {"lam": 1.5},
           "centers": {1: 2}, "time": {"t_max": 2, "samples": 11}, "solver": "exact",
           "tolerance": 0.01, "output": {"csv": str(out)}}
    path = tmp_path / "q.yaml"
    path.write_text(yaml.safe_dump(cfg))
    assert main(["run", "--config", str(path)]) == 0
    assert out.read_bytes() == via_flags


def test_solver_all_reports_trailing_comparison(tmp_path):
    out = tmp_path / "q.csv"
    assert main(["run", "quadratic", "--solver", "all", "--out", str(out), "--t-max", "1",
                 "--samples", "6", *FAST_GRID]) == 0
    lines = out.read_text().splitlines()
    assert lines[-1].startswith("# compare grid vs exact:")
    assert "within_tolerance=yes" in lines[-1]
    _, cols = read_csv(out)
    assert cols["solver"].count("exact") == 6 and cols["solver"].count("grid") == 6


def test_svg_and_dump(tmp_path):
    out = tmp_path / "c.csv"
    dump = tmp_path / "c.bin"
    assert main(["run", "figure1-bottom-left", "--out", str(out), "--svg", "--dump", str(dump),
                 "--samples", "50"]) == 0
    root = ET.parse(tmp_path / "c.svg").getroot()
    assert root.tag.endswith("svg")
    assert len([e for e in root.iter() if e.tag.endswith("polyline")]) == 3
    t, series = read_trajectory(dump)
    _, cols = read_csv(out)
    np.testing.assert_array_equal(series[2], cols["x2"])
    np.testing.assert_array_equal(t, cols["t"])


def test_env_var_sets_default_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("LADDERDYN_OUTDIR", str(tmp_path / "outdir"))
    assert main(["run", "love-affair-quadratic", "--samples", "5"]) == 0
    assert (tmp_path / "outdir" / "love-affair-quadratic.csv").exists()


@pytest.mark.parametrize("argv, field", [
    (["run", "gated", "--solver", "exact"], "solver"),
    (["run", "quadratic", "--solver", "perturbative"], "solver"),
    (["run", "quadratic", "--param", "mu=1"], "params.mu"),
    (["run", "quadratic", "--param", "lam=abc"], "params.lam"),
    (["run", "quadratic", "--center", "2=1"], "centers.2"),
    (["run", "quadratic", "--samples", "1"], "time.samples"),
    (["run", "quadratic", "--grid", "cells_per_unit=3"], "grid"),
    (["run", "quadratic", "--grid", "speed=3"], "grid.speed"),
    (["run", "nonsense"], "scenario"),
    (["run"], "scenario"),
])
def test_invalid_config_names_the_field(argv, field, capsys, tmp_path):
    assert main(argv + ["--out", str(tmp_path / "x.csv")]) == 2
    err = capsys.readouterr().err
    assert f"invalid config: {field}" in err


def test_invalid_yaml_file(tmp_path, capsys):
    path = tmp_path / "bad.yaml"
    path.write_text("model: [unclosed")
    assert main(["run", "--config", str(path)]) == 2
    path.write_text("model: quadratic-pp\ncolour: red\n")
    assert main(["run", "--config", str(path)]) == 2
    assert "colour" in capsys.readouterr().err


def test_truncation_breach_exits_nonzero(tmp_path, capsys):
    argv = ["run", "quadratic", "--solver", "grid", "--out", str(tmp_path / "x.csv"),
            "--t-max", "2", "--samples", "3", "--grid", "half_width=6"]
    assert main(argv) == 3
    assert "boundary mass" in capsys.readouterr().err
    assert not (tmp_path / "x.csv").exists()


def test_compare_free_model(capsys):
    assert main(["compare", "free", "--t-max", "2", "--samples", "5", *FAST_GRID, "--strict"]) == 0
    out = capsys.readouterr().out
    dev = float(next(ln for ln in out.splitlines() if ln.startswith("max_abs_deviation")).split()[-1])
    assert dev <= 1e-6


def test_compare_strict_flags_tolerance(capsys):
    argv = ["compare", "gated", "--t-max", "1", "--samples", "3", *FAST_GRID,
            "--tolerance", "1e-9", "--strict"]
    assert main(argv) == 4
    assert "within_tolerance: no" in capsys.readouterr().out


def test_fermi_baseline(tmp_path):
    out = tmp_path / "f.csv"
    assert main(["fermi-baseline", "--out", str(out), "--t-max", "20", "--samples", "101"]) == 0
    _, cols = read_csv(out)
    assert list(cols) == ["t", "n1", "n3", "sum", "solver"]
    np.testing.assert_allclose(cols["sum"], 1.0, atol=1e-12)
    assert set(cols["solver"]) == {"exact", "matrix"}


def test_figure1_emits_three_pairs(tmp_path):
    assert main(["figure1", "--out-dir", str(tmp_path), "--lambda2", "0.5"]) == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == sorted(f"figure1-{p}.{ext}" for p in ("top", "bottom-left", "bottom-right")
                           for ext in ("csv", "svg"))
    comments, _ = read_csv(tmp_path / "figure1-bottom-right.csv")
    assert echoed_config(comments)["params"]["lam2"] == 0.5


def test_scenario_builder_rules():
    sc = build_scenario(base_config("gated"))
    assert sc.solvers == ("perturbative",)
    assert build_scenario({**base_config("gated"), "solver": "all"}).solvers == ("perturbative", "grid")
    assert build_scenario(base_config("cubic")).columns == ("x1", "x2", "x3")
    with pytest.raises(ConfigError) as exc:
        build_scenario({"model": "fermi-pp", "centers": {1: 0.0}})
    assert exc.value.field == "centers"


@pytest.mark.slow
def test_shipped_config_runs(tmp_path, monkeypatch):
    cfg = yaml.safe_load((Path(__file__).parents[1] / "configs" / "cubic-gap.yaml").read_text())
    cfg["output"] = {"csv": str(tmp_path / "c.csv"), "svg": True}
    path = tmp_path / "c.yaml"
    path.write_text(yaml.safe_dump(cfg))
    assert main(["run", "--config", str(path)]) == 0
    assert "within_tolerance=yes" in (tmp_path / "c.csv").read_text().splitlines()[-1]
    assert (tmp_path / "c.svg").exists()
