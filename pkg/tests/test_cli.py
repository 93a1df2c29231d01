import csv
import json
import math
from pathlib import Path

import jsonschema
import numpy as np
import pytest
import yaml

from qlaplace import cli
from qlaplace.blockenc import DIAGONAL_TAG
from qlaplace.circuit import from_qasm, metrics, read_qasm_meta
from qlaplace.numerics import truncation_order
from qlaplace.qlt import as_problem, certified_alpha, plan_series, random_problem
from qlaplace.schemas import DEMO_REPORT_SCHEMA, REPORT_SCHEMA

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def run(tmp_path, *args):
    return cli.main([*args, "--out", str(tmp_path)])


def write_cfg(tmp_path, data, name="job.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(data))
    return str(path)


def load_report(out):
    return json.loads((out / "report.json").read_text())


# synthesize


def test_synthesize_degenerate(tmp_path):
    assert run(tmp_path, "synthesize", "--config", str(CONFIGS / "synthesize_degenerate.yaml")) == 0
    r = load_report(tmp_path)
    assert (r["K"], r["alpha"], r["controlled_diagonal_invocations"]) == (0, 1.0, 2)
    jsonschema.validate(r, REPORT_SCHEMA)


def test_synthesize_ln2(tmp_path):
    assert run(tmp_path, "synthesize", "--config", str(CONFIGS / "synthesize_taylor.yaml")) == 0
    r = load_report(tmp_path)
    assert r["K"] == 5 and r["alpha"] == pytest.approx(2.0)
    assert r["controlled_diagonal_invocations"] == 2 * (r["K"] + 1)


def test_report_recomputable_from_qasm(tmp_path):
    assert run(tmp_path, "verify", "--config", str(CONFIGS / "verify_random.yaml")) == 0
    r = load_report(tmp_path)
    text = (tmp_path / "circuit.qasm").read_text()
    c = from_qasm(text)
    meta = read_qasm_meta(text)
    full = metrics(c)
    over = metrics(c, exclude_tag_prefix=DIAGONAL_TAG)
    tags = {g.tag for g in c.gates if g.tag.startswith(DIAGONAL_TAG)}
    assert (r["size"], r["depth"]) == (full.size, full.depth)
    assert (r["overhead_size"], r["overhead_depth"]) == (over.size, over.depth)
    assert r["total_qubits"] == c.num_qubits
    assert r["registers"] == c.layout.breakdown()
    assert r["controlled_diagonal_invocations"] == len(tags)
    assert (r["alpha"], r["eps"], r["K"], r["kind"], r["terms"]) == (
        meta["alpha"], meta["eps"], meta["K"], meta["kind"], meta["terms"]
    )


def test_reports_are_deterministic(tmp_path):
    cfg = str(CONFIGS / "verify_random.yaml")
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(a, "verify", "--config", cfg) == 0
    assert run(b, "verify", "--config", cfg) == 0
    assert (a / "report.json").read_bytes() == (b / "report.json").read_bytes()
    assert (a / "circuit.qasm").read_bytes() == (b / "circuit.qasm").read_bytes()


def test_seed_flag_overrides_config(tmp_path):
    cfg = str(CONFIGS / "verify_random.yaml")
    assert run(tmp_path / "a", "verify", "--config", cfg) == 0
    assert run(tmp_path / "b", "verify", "--config", cfg, "--seed", "8") == 0
    assert load_report(tmp_path / "a")["seed"] == 7
    assert load_report(tmp_path / "b")["seed"] == 8
    assert (tmp_path / "a" / "circuit.qasm").read_text() != (tmp_path / "b" / "circuit.qasm").read_text()


# verify


def test_verify_random_passes(tmp_path):
    assert run(tmp_path, "verify", "--config", str(CONFIGS / "verify_random.yaml"), "--format", "csv") == 0
    r = load_report(tmp_path)
    assert r["passed"] and r["measured_error"] <= r["eps"]
    assert 0 <= r["success_probability"] <= 1
    jsonschema.validate(r, json.loads((tmp_path / "report.schema.json").read_text()))
    rows = dict(csv.reader((tmp_path / "report.csv").open()))
    assert float(rows["measured_error"]) == pytest.approx(r["measured_error"])


def test_verify_complex(tmp_path):
    assert run(tmp_path, "verify", "--config", str(CONFIGS / "verify_complex.yaml")) == 0
    assert load_report(tmp_path)["passed"]


def test_verify_forced_failure_exit_code(tmp_path):
    assert run(tmp_path, "verify", "--config", str(CONFIGS / "verify_forced_fail.yaml")) == 1
    r = load_report(tmp_path)
    assert not r["passed"] and r["measured_error"] > r["eps"]


def test_verify_with_state(tmp_path):
    cfg = {"problem": {"eps": 1e-2, "x": [0, 0], "y": [0, 0]}, "state": [1, 0]}
    assert run(tmp_path, "verify", "--config", write_cfg(tmp_path, cfg)) == 0
    # block is the all-1/2 matrix, so |0> maps to (1/2, 1/2)
    assert load_report(tmp_path)["success_probability"] == pytest.approx(0.5)


def test_verify_without_simulation(tmp_path):
    cfg = {"problem": {"eps": 1e-2, "random": {"n": 6}}, "simulate": False}
    assert run(tmp_path, "verify", "--config", write_cfg(tmp_path, cfg)) == 0
    r = load_report(tmp_path)
    assert r["passed"] is None and r["measured_error"] is None


def test_verify_laplace(tmp_path):
    assert run(tmp_path, "verify", "--config", str(CONFIGS / "verify_laplace.yaml")) == 0
    r = load_report(tmp_path)
    assert r["problem"] == "laplace" and r["passed"]
    assert r["laplace"]["M"] == pytest.approx(2.0)
    assert r["measured_error"] <= r["laplace"]["qlt_state_budget"]


def test_verify_laplace_t_grid(tmp_path):
    t = (np.arange(4) * 0.5).tolist()
    cfg = {"laplace": {"f_values": np.exp(-np.array(t)).tolist(), "t_grid": t, "z_points": [1, 1.5, 2, 2.5],
                       "k": 1, "a": -1, "eps": 1e-2}}
    assert run(tmp_path, "verify", "--config", write_cfg(tmp_path, cfg)) == 0
    assert load_report(tmp_path)["laplace"]["M"] == pytest.approx(2.0)
    bad = dict(cfg["laplace"], t_grid=[0, 0.5, 0.7, 1.5])
    assert run(tmp_path, "verify", "--config", write_cfg(tmp_path, {"laplace": bad})) == 2


# refusals and usage errors


def test_refuses_large_simulation(tmp_path, capsys):
    cfg = {"problem": {"eps": 1e-2, "random": {"n": 5}}}
    assert run(tmp_path, "verify", "--config", write_cfg(tmp_path, cfg)) == 3
    assert "refused" in capsys.readouterr().err


def test_refuses_large_construction(tmp_path):
    cfg = {"problem": {"eps": 1e-2, "random": {"n": cli.MAX_BUILD_N + 1}}}
    assert run(tmp_path, "synthesize", "--config", write_cfg(tmp_path, cfg)) == 3


@pytest.mark.parametrize(
    "cfg",
    [
        {"problem": {"eps": 0, "x": [0, 1], "y": [0, 1]}},
        {"problem": {"eps": 1.5, "x": [0, 1], "y": [0, 1]}},
        {"problem": {"eps": 0.1, "x": [0, 1], "y": [0, 1]}, "extra": 1},
        {"problem": {"eps": 0.1, "x": [0, 1, 2], "y": [0, 1, 2]}},
        {"problem": {"eps": 0.1, "kind": "pade", "x": [0, 1], "y": [0, 1]}},
        {"problem": {"eps": 0.1, "x": [0, 1]}},
        {"seed": -1, "problem": {"eps": 0.1, "x": [0, 1], "y": [0, 1]}},
    ],
)
def test_bad_configs_exit_2(tmp_path, capsys, cfg):
    assert run(tmp_path, "synthesize", "--config", write_cfg(tmp_path, cfg)) == 2
    assert "error" in capsys.readouterr().err


def test_schema_error_names_field(tmp_path, capsys):
    cfg = {"problem": {"eps": 2.0, "x": [0, 1], "y": [0, 1]}}
    run(tmp_path, "synthesize", "--config", write_cfg(tmp_path, cfg))
    assert "eps" in capsys.readouterr().err


def test_usage_errors(tmp_path):
    assert cli.main(["bogus"]) == 2
    assert run(tmp_path, "demo", "nope") == 2
    assert run(tmp_path, "synthesize", "--config", str(tmp_path / "missing.yaml")) == 2


# scaling


def test_scaling_table(tmp_path):
    cfg = {"scaling": {"n": [2, 3], "eps": [1e-2, 1e-3]}, "seed": 0}
    assert run(tmp_path, "scaling", "--config", write_cfg(tmp_path, cfg)) == 0
    rows = list(csv.DictReader((tmp_path / "table.csv").open()))
    assert [(int(r["n"]), float(r["eps"])) for r in rows] == [(2, 1e-2), (2, 1e-3), (3, 1e-2), (3, 1e-3)]
    for r in rows:
        assert int(r["controlled_diagonal_invocations"]) == 2 * (int(r["K"]) + 1)
        # the normalization loop only raises K above the bare order at eps / 3
        K = int(r["K"])
        p = random_problem(int(r["n"]), float(r["eps"]), seed=0)
        assert K >= truncation_order("taylor", p.product, p.eps / 3).K
        assert float(r["size_per_Kn"]) == pytest.approx(int(r["size"]) / (max(K, 1) * int(r["n"])))


def test_scaling_K_matches_planner(tmp_path):
    cfg = {"scaling": {"n": [2], "eps": [1e-2]}, "seed": 3}
    assert run(tmp_path, "scaling", "--config", write_cfg(tmp_path, cfg), "--format", "json") == 0
    row = json.loads((tmp_path / "table.json").read_text())["rows"][0]
    assert row["K"] == plan_series(random_problem(2, 1e-2, seed=3)).K


def test_scaling_empty_range(tmp_path):
    cfg = {"scaling": {"n": [], "eps": [1e-2]}}
    assert run(tmp_path, "scaling", "--config", write_cfg(tmp_path, cfg)) == 0
    lines = (tmp_path / "table.csv").read_text().splitlines()
    assert lines == [",".join(cli.CSV_FIELDS)]


# demos


@pytest.mark.parametrize("name", ["ztransform", "continuous-laplace", "fourier-diagonal"])
def test_demos(tmp_path, name):
    assert run(tmp_path, "demo", name) == 0
    stem = name.replace("-", "_")
    report = json.loads((tmp_path / f"{stem}.json").read_text())
    jsonschema.validate(report, DEMO_REPORT_SCHEMA)
    assert report["passed"] and all(report["checks"].values())
    assert (tmp_path / f"{stem}.csv").exists()


def test_ln2_alpha_matches_formula():
    plan = plan_series(as_problem([0, math.log(2)], [0, 1], 1e-3))
    assert plan.alpha == pytest.approx(certified_alpha(plan.kind, math.log(2)))
