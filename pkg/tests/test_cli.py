import csv
import io
import json
import subprocess
import sys

import jsonschema
import pytest

from debategame.cli import main, schema_path
from debategame.config_io import config_from_dict, config_to_dict, load_config

SCHEMA = json.loads(schema_path().read_text())


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, doc, name="game.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
    return path


def two_point(tmp_path, points, shock=None, q_I=1.0, csf=None):
    doc = {
        "q_I": q_I,
        "prior": {"family": "discrete", "points": points},
        "shock": shock or {"family": "normal", "params": {"mu": 0.0, "sigma": 1.0}},
        "csf": csf or {"family": "tullock", "params": {}},
    }
    return write(tmp_path, doc)


@pytest.mark.parametrize("name,regime,announcement", [
    ("f1_normal.json", "Debate", "P"),
    ("nodebate_negexp.json", "NoDebate", "NP"),
    ("f1_uniform.json", "KnifeEdge", "P|NP"),
])
def test_solve_regimes(fixtures_dir, capsys, name, regime, announcement):
    code, out, _ = run(["solve", fixtures_dir / name], capsys)
    assert code == 0
    report = json.loads(out)
    jsonschema.validate(report, SCHEMA)
    assert report["command"] == "solve" and "duration_s" not in report
    assert report["results"]["regime"] == regime
    assert report["results"]["announcements"]["incumbent"] == announcement


def test_solve_timing_and_out_file(fixtures_dir, tmp_path, capsys):
    target = tmp_path / "report.json"
    code, out, _ = run(["solve", fixtures_dir / "gamma_logistic.json", "--timing", "--out", target], capsys)
    assert code == 0 and out == ""
    report = json.loads(target.read_text())
    jsonschema.validate(report, SCHEMA)
    assert report["duration_s"] >= 0


def test_echo_round_trips_bit_for_bit(fixtures_dir, capsys):
    for path in sorted(fixtures_dir.glob("*.json")):
        _, out, _ = run(["solve", path], capsys)
        echo = json.loads(out)["config"]
        assert config_to_dict(config_from_dict(echo)) == echo == config_to_dict(load_config(path))


def test_input_errors_exit_2(tmp_path, capsys):
    code, _, err = run(["solve", two_point(tmp_path, [[0.0, 0.25], [2.0, 0.25]])], capsys)
    assert code == 2 and "prior.points" in err
    code, _, err = run(["solve", write(tmp_path, '{"q_I": 1.0,', "bad.json")], capsys)
    assert code == 2 and "line" in err
    code, _, _ = run(["solve", tmp_path / "missing.json"], capsys)
    assert code == 2
    code, _, _ = run(["solve", two_point(tmp_path, [[0.0, 0.5], [2.0, 0.5]], q_I=1.5)], capsys)
    assert code == 2
    code, _, _ = run(["bogus"], capsys)
    assert code == 2


def test_degenerate_prior_exits_3(tmp_path, capsys):
    code, _, err = run(["solve", two_point(tmp_path, [[1.0, 1.0]])], capsys)
    assert code == 3 and err


@pytest.mark.parametrize("name", ["f1_uniform.json", "f1_normal.json", "nodebate_negexp.json"])
def test_verify_passes_on_fixtures(fixtures_dir, capsys, name):
    code, out, _ = run(["verify", fixtures_dir / name, "--n", 200000, "--seed", 3], capsys)
    report = json.loads(out)
    jsonschema.validate(report, SCHEMA)
    assert code == 0, report["results"]["failed"]
    names = [c["name"] for c in report["results"]["checks"]]
    assert names == ["validate_csf", "posterior_signal", "threshold_consistency_scan",
                     "sequence_invariance_check", "informativeness_thresholds", "oracle_check"]
    invariance = report["results"]["checks"][3]["status"]
    assert invariance == ("skipped" if name == "f1_uniform.json" else "pass")


def test_verify_fails_on_nonconcave_csf(tmp_path, capsys):
    csf = {"family": "custom-grid", "params": {"ratio": [0, 1, 2, 3], "theta": [0, 0.2, 0.7, 0.8]}}
    code, out, err = run(["verify", two_point(tmp_path, [[0.0, 0.5], [2.0, 0.5]], csf=csf), "--n", 1000], capsys)
    assert code == 1
    report = json.loads(out)
    assert "validate_csf" in report["results"]["failed"] and "validate_csf" in err
    assert run(["solve", tmp_path / "game.json"], capsys)[0] == 2


def test_verify_small_n_is_not_a_pass(fixtures_dir, capsys):
    code, out, _ = run(["verify", fixtures_dir / "f1_normal.json", "--n", 10], capsys)
    assert code == 1
    assert json.loads(out)["results"]["failed"] == ["oracle_check"]


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_sweep_q_I_regime_transition(tmp_path, capsys):
    path = two_point(tmp_path, [[0.0, 0.5], [0.4, 0.5]])
    code, out, _ = run(["sweep", path, "--param", "q_I", "--range", "0.05:1", "--steps", 20], capsys)
    assert code == 0
    table = rows(out)
    assert len(table) == 20
    assert table[0]["regime"] == "Debate" and table[-1]["regime"] == "NoDebate"
    assert float(table[0]["q_I"]) == 0.05 and float(table[-1]["q_I"]) == 1.0


def test_sweep_single_step_matches_solve(fixtures_dir, capsys):
    path = fixtures_dir / "f1_normal.json"
    _, out, _ = run(["sweep", path, "--param", "q_I", "--range", "1:1", "--steps", 1], capsys)
    (row,) = rows(out)
    _, solved, _ = run(["solve", path], capsys)
    result = json.loads(solved)["results"]
    assert float(row["margin"]) == result["margin"]
    assert row["regime"] == result["regime"]


def test_sweep_q_C_labels(fixtures_dir, capsys):
    code, out, _ = run(["sweep", fixtures_dir / "f1_uniform.json", "--param", "q_C", "--range", "0:4",
                        "--steps", 5], capsys)
    assert code == 0
    table = rows(out)
    assert [r["label"] for r in table] == ["Informative", "Noisy", "Informative", "Informative", "Informative"]
    assert float(table[2]["challenger_debate_payoff"]) == pytest.approx(0.625)


def test_sweep_prior_parameter(fixtures_dir, capsys):
    code, out, _ = run(["sweep", fixtures_dir / "gamma_logistic.json", "--param", "prior.scale",
                        "--range", "0.3:0.6", "--steps", 3], capsys)
    assert code == 0 and len(rows(out)) == 3


@pytest.mark.parametrize("extra", [
    ["--param", "q_I", "--range", "0.5:1.5"],
    ["--param", "q_I", "--range", "oops"],
    ["--param", "q_I", "--range", "0:1", "--steps", 0],
    ["--param", "shock.sigma", "--range", "0:1"],
    ["--param", "prior.shape", "--range", "1:2"],
])
def test_sweep_bad_arguments(fixtures_dir, capsys, extra):
    assert run(["sweep", fixtures_dir / "f1_normal.json", *extra], capsys)[0] == 2


def test_simulate_deterministic(fixtures_dir, capsys):
    argv = ["simulate", fixtures_dir / "f1_normal.json", "--scenario", "debate-ex-ante", "--n", 100000,
            "--seed", 42]
    code, first, _ = run(argv, capsys)
    _, second, _ = run(argv + ["--workers", 4], capsys)
    assert code == 0 and first == second
    report = json.loads(first)
    jsonschema.validate(report, SCHEMA)
    assert report["results"]["n"] == 100000


def test_simulate_bad_inputs(fixtures_dir, capsys):
    base = ["simulate", fixtures_dir / "f1_normal.json"]
    assert run(base + ["--scenario", "no-debate", "--n", 0], capsys)[0] == 2
    assert run(base + ["--scenario", "debate-conditional", "--n", 10], capsys)[0] == 2
    assert run(base + ["--scenario", "no-debate", "--n", 10, "--seed", -4], capsys)[0] == 2


def test_module_entry_point(fixtures_dir):
    proc = subprocess.run([sys.executable, "-m", "debategame", "solve", str(fixtures_dir / "f1_normal.json")],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"]["regime"] == "Debate"
