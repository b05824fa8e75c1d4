import json
import subprocess
import sys

import pytest

from cantordim.cli import run


def call(capsys, *argv):
    code = run([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_validate_ok(capsys, data_dir):
    code, out, _ = call(capsys, "validate", data_dir / "power_half.spec", "--max-n", 1000)
    body = json.loads(out)
    assert code == 0 and body["ok"] and body["family"] == "power_law"
    assert body["sequence_spec"] == (data_dir / "power_half.spec").read_text()


def test_validate_failure_exit_code(capsys, data_dir):
    code, out, _ = call(capsys, "validate", data_dir / "nonmonotone.spec")
    assert code == 2 and not json.loads(out)["monotone_ok"]


def test_usage_errors(capsys, data_dir):
    assert call(capsys, "frobnicate")[0] == 1
    assert call(capsys, "build", data_dir / "power_half.spec")[0] == 1
    assert call(capsys, "dims", data_dir / "missing.spec")[0] == 1
    assert call(capsys, "classify", data_dir / "power_half.spec", "--gauge", "power(")[0] == 1


def test_domain_error_exit_code(capsys, data_dir):
    code, _, err = call(capsys, "classify", data_dir / "power_half.spec", "--gauge", "power(2)")
    assert code == 2 and "invalid input" in err


def test_build_report(capsys, data_dir, tmp_path):
    dump = tmp_path / "leaves.csv"
    code, out, _ = call(capsys, "build", data_dir / "middle_third.spec", "--depth", 6,
                        "--dump", dump)
    body = json.loads(out)
    assert code == 0 and body["root_length"] == pytest.approx(1.0)
    assert body["ball_check"]["ok"] and body["ball_check"]["seed"] == 0
    assert len(dump.read_text().splitlines()) == 65


def test_dims(capsys, data_dir):
    code, out, _ = call(capsys, "dims", data_dir / "middle_third.spec", "--max-n", 2 ** 20,
                        "--box-depth", 12)
    body = json.loads(out)
    assert code == 0
    assert body["dim_H"] == pytest.approx(0.630929753571, abs=1e-12)
    assert body["box_dimension"] == pytest.approx(0.63, abs=0.03)


def test_classify_json(capsys, data_dir):
    code, out, _ = call(capsys, "classify", data_dir / "power_half.spec", "--gauge",
                        "power(0.5)", "--depth", 10)
    body = json.loads(out)
    assert code == 0 and body["cell"] == {"H": "1", "P": "1"}
    assert body["verdicts"]["regular"] is True
    assert body["sandwich"]["applicable"]


def test_table_text_and_json(capsys, data_dir):
    code, out, _ = call(capsys, "table", data_dir / "power_half.spec", "--gauges",
                        "power(0.4)", "power(0.5)", "power(0.6)")
    assert code == 0 and "power(0.5)" in out
    code, out, _ = call(capsys, "table", data_dir / "power_half.spec", "--gauges",
                        "power(0.4);power(0.6)", "--format", "json")
    rows = json.loads(out)["rows"]
    assert [r["cell"] for r in rows] == [{"H": "inf", "P": "inf"}, {"H": "0", "P": "0"}]


def test_compare(capsys, data_dir):
    code, out, _ = call(capsys, "compare", data_dir / "example_a_first.spec",
                        data_dir / "example_a_second.spec")
    body = json.loads(out)
    assert code == 0
    assert body["sequence"]["verdict"] == "refuted"
    assert body["tail"]["verdict"] == "holds_up_to_N"
    assert body["crosscheck"]["verdict"] == "holds"


def test_synthesize_writes_loadable_spec(capsys, tmp_path):
    target = tmp_path / "syn.spec"
    code, out, _ = call(capsys, "synthesize", "--gauge", "power(0.5)", "--count", 100,
                        "--out", target)
    assert code == 0 and json.loads(out)["head_length"] == 0
    code, out, _ = call(capsys, "validate", target)
    assert code == 0


def test_synthesize_infeasible(capsys, tmp_path):
    code, _, err = call(capsys, "synthesize", "--gauge", "logrec(1,1)", "--count", 100,
                        "--out", tmp_path / "x.spec")
    assert code == 2 and "increase" in err
    code, _, _ = call(capsys, "synthesize", "--gauge", "logrec(1,1)", "--count", 100,
                      "--head", "envelope", "--out", tmp_path / "x.spec")
    assert code == 0


def test_export_csv(capsys, data_dir):
    code, out, _ = call(capsys, "export", data_dir / "middle_third.spec", "--gauge",
                        "power(0.630929753571)", "--max-n", 1000)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "n,r_n,b_n,n_h_b_n,dim_ratio"
    assert lines[1].startswith("1,1,1,1")


def test_config_file_supplies_defaults(capsys, data_dir, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("gauge = power(0.5)\nmax_n = 5000\n")
    code, out, _ = call(capsys, "classify", data_dir / "power_half.spec", "--config", cfg)
    assert code == 0 and json.loads(out)["gauge_spec"] == "power(0.5)"
    # explicit flags win over the file
    code, out, _ = call(capsys, "classify", data_dir / "power_half.spec", "--config", cfg,
                        "--gauge", "power(0.6)")
    assert json.loads(out)["cell"] == {"H": "0", "P": "0"}


def test_reports_are_byte_identical(capsys, data_dir):
    args = ("compare", data_dir / "geometric_e1.spec", data_dir / "geometric_e2.spec")
    first = call(capsys, *args)[1]
    assert call(capsys, *args)[1] == first


def test_entry_point_runs_as_module(data_dir):
    proc = subprocess.run([sys.executable, "-m", "cantordim.cli", "validate",
                           str(data_dir / "small.spec")], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["ok"]
