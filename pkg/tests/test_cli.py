import json
import math
import subprocess
import sys
import time

import pytest

from finitebath import cli
from finitebath import experiments as ex
from finitebath.errors import NumericalError


def _run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_fig1_csv_schema(capsys):
    code, out, _ = _run(capsys, "fig1", "--n", "4", "8")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("# schema finitebath.fig1/1 columns=12")
    assert "q_convention=exact" in lines[0]
    header = lines[1].split(",")
    assert tuple(header) == ex.FIG1_COLUMNS
    assert len(lines) == 2 + 2 * len(ex.FIG1_CURVES)
    assert all(len(l.split(",")) == len(header) for l in lines[2:])


def test_fig1_empty_curve_selection_is_usage_error(capsys):
    code, _, err = _run(capsys, "fig1", "--n", "4", "--curves", "")
    assert code == 2 and "no curves" in err


def test_fig1_runtime_budget():
    t = time.perf_counter()
    rows = ex.fig1_rows([4, 8, 16, 32, 64, 128, 256, 512, 1024])
    assert time.perf_counter() - t < 60
    assert {r["curve"] for r in rows} == set(ex.FIG1_CURVES)


def test_erasure_sweep_columns_and_bounds(capsys):
    code, out, _ = _run(capsys, "erasure-sweep", "--n", "16", "--policy", "sorted", "--format", "json")
    assert code == 0
    body = json.loads(out)
    assert body["schema"] == "finitebath.erasure/1"
    (row,) = body["rows"]
    assert list(row) == list(ex.ERASURE_COLUMNS)
    assert row["lb_rw"] <= row["lb_heatcap"] <= row["sigma"]


def test_bad_n_is_usage_error(capsys):
    assert _run(capsys, "erasure-sweep", "--n", "1")[0] == 2
    assert _run(capsys, "erasure-sweep", "--policy", "nope")[0] == 2


def test_numerical_failure_exit_code(capsys, monkeypatch):
    def boom(args):
        raise NumericalError("bisection stalled")
    monkeypatch.setattr(cli, "run", boom)
    code, _, err = _run(capsys, "bounds", "--n", "4")
    assert code == 3 and "bisection stalled" in err


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": [4, 8], "q-convention": "half", "format": "json"}))
    code, out, _ = _run(capsys, "collisional", "--config", str(cfg), "--family", "linear")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert [r["n"] for r in rows] == [4, 8]
    assert rows[0]["q"] == pytest.approx(0.5 * 4.0**-3)
    code, out, _ = _run(capsys, "collisional", "--config", str(cfg), "--n", "16", "--family", "linear")
    assert [r["n"] for r in json.loads(out)["rows"]] == [16]


def test_n_max_powers(capsys):
    code, out, _ = _run(capsys, "critical", "--n", "8", "--n-max", "64")
    assert code == 0
    assert [l.split(",")[0] for l in out.strip().splitlines()[2:]] == ["8", "16", "32", "64"]


def test_svg_output(tmp_path, capsys):
    path = tmp_path / "fig3.svg"
    code, _, _ = _run(capsys, "fig3", "--n", "8", "16", "32", "--format", "svg", "--out", str(path))
    assert code == 0
    text = path.read_text()
    assert text.startswith("<svg") and text.count("<polyline") == 3
    assert _run(capsys, "bounds", "--n", "4", "--format", "svg")[0] == 2


def test_optimize_json(capsys):
    code, out, _ = _run(capsys, "optimize", "--n", "3", "--steps", "200", "--format", "json", "--seed", "2")
    assert code == 0
    body = json.loads(out)
    assert body["config"]["seed"] == 2 and body["objective"] <= body["initial_objective"]
    assert sum(int(l["degeneracy"]) for l in body["spectrum"]["levels"]) == 8


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "finitebath", "bounds", "--n", "4"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("# schema finitebath.bounds/1")


def test_fig2_panels():
    rows = ex.fig2_rows([64, 256, 1024], points=11)
    main = [r for r in rows if r["panel"] == "main"]
    gammas = sorted({r["gamma"] for r in main})
    assert gammas[0] == 0.5 and gammas[-1] == 2.0 and len(gammas) == 11
    inset = {(r["family"], r["n"]): r for r in rows if r["panel"] == "inset"}
    ratio = inset[("engineered", 1024)]["c_over_n2"] / inset[("engineered", 256)]["c_over_n2"]
    assert abs(ratio - 1) < 0.20
    per_n = [inset[("noninteracting", n)]["c_over_n"] for n in (64, 256, 1024)]
    assert max(per_n) / min(per_n) - 1 < 0.01


def test_fig3_q_formula_and_guides():
    rows = ex.fig3_rows([8, 16, 32, 64])
    for r in rows:
        assert r["q"] == pytest.approx(r["q_formula"], abs=1e-12)
        assert r["q"] == pytest.approx(r["q_target"], rel=1e-6)
    assert rows[0]["guide_inv_n"] == rows[0]["sigma"] == rows[0]["guide_inv_n2"]
    assert rows[2]["guide_inv_n"] == pytest.approx(rows[0]["sigma"] / 4)
    assert rows[2]["guide_inv_n2"] == pytest.approx(rows[0]["sigma"] / 16)


def test_q_conventions():
    assert ex.target_q(4, 3.0, 1.0, "exact") == pytest.approx(1 / 262)
    assert ex.target_q(4, 3.0, 1.0, "half") == 0.0078125
    assert ex.target_q(4, 3.0, 1.0, "caption") == 0.015625
    with pytest.raises(ValueError):
        ex.target_q(4, 3.0, 1.0, "other")


def test_gamma_grid_endpoints():
    g = ex.gamma_grid(0.3, 1.7, 7)
    assert g[0] == 0.3 and g[-1] == 1.7 and len(g) == 7
    assert all(b > a for a, b in zip(g, g[1:]))


def test_threads_match_serial():
    a = ex.erasure_sweep([8, 16], threads=1)
    b = ex.erasure_sweep([8, 16], threads=2)
    assert a == b or all(
        all((x[k] == y[k]) or (isinstance(x[k], float) and math.isnan(x[k]) and math.isnan(y[k])) for k in x)
        for x, y in zip(a, b))
