import json
import subprocess
import sys

import pytest

from chainscope.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cr_akin(capsys):
    code, out, _ = run(capsys, "cr", "--system", "akin", "--grid", "101", "--eps", "0.05")
    assert code == 0
    rep = json.loads(out)
    assert rep["labels"].index(0.0) in rep["cr_set"]
    assert rep["schema"] == 1


def test_nested_sigma1(capsys):
    code, out, _ = run(capsys, "nested", "--system", "sigma1", "--k", "6", "--schedule", "geometric:0.375,6",
                       "--from", "1inf", "--to", "0inf", "--mode", "exact")
    assert code == 0
    assert json.loads(out)["status"] == "infeasible"


def test_grid_too_small(capsys):
    code, _, err = run(capsys, "cr", "--system", "akin", "--grid", "1", "--eps", "0.05")
    assert code == 2
    assert "grid_n" in err


def test_undecided_exit_code(capsys):
    argv = ["nested", "--system", "square", "--grid", "11", "--schedule", "0.3,0.1", "--from", "0.8", "--to", "0.3"]
    code, out, _ = run(capsys, *argv, "--mode", "greedy")
    rep = json.loads(out)
    assert code == 3 and rep["status"] == "undecided"
    assert "level 1" in rep["reason"]
    code, out, _ = run(capsys, *argv, "--mode", "exact")
    assert code == 0 and json.loads(out)["status"] == "success"


def test_nested_set(capsys):
    code, out, _ = run(capsys, "nested", "--system", "logistic4", "--schedule", "0.2,0.1", "--set", "0,0.75",
                       "--threads", "2")
    rep = json.loads(out)
    assert code == 0 and rep["nested_transitive"]
    assert len(rep["pairs"]) == 4


def test_schedule_not_decreasing(capsys):
    code, _, err = run(capsys, "nested", "--system", "cycle", "--schedule", "0.1,0.2", "--from", "0", "--to", "1")
    assert code == 2 and "decreasing" in err


def test_state_not_a_sample(capsys):
    code, _, err = run(capsys, "nested", "--system", "square", "--schedule", "0.1", "--from", "0.3", "--to", "0")
    assert code == 2 and "not a sample" in err


def test_precondition_names_min_eps(capsys):
    code, _, err = run(capsys, "locate", "--system", "akin", "--eps", "0.001")
    assert code == 2 and "need eps >" in err


def test_locate_seed(capsys):
    code, out, _ = run(capsys, "locate", "--system", "akin", "--from", "0.01")
    rep = json.loads(out)
    assert code == 0 and rep["orbit"]["artifact_flag"] is True


def test_relations(capsys):
    code, out, _ = run(capsys, "relations", "--system", "square", "--grid", "11", "--from", "0.9", "--to", "0",
                       "--eps", "0.1", "--kmax", "10")
    rep = json.loads(out)
    assert code == 0
    assert rep["R"] == {"holds": True, "k": 5}
    assert rep["O"]["holds"] is False
    # both endpoints are grid points, so the sampled chain relation is reported too
    assert rep["C"]["holds"] is True and rep["C"]["chain"][0] == 9


def test_strong_values_flag(capsys):
    code, out, _ = run(capsys, "strong", "--system", "identity", "--eps", "0.1", "--metrics", "d,min:0.2", "--values")
    rep = json.loads(out)
    assert code == 0
    assert rep["gr_upper_bound"] == [0, 1, 2]
    assert rep["metrics"][1]["values"][0][2] == 0.2


def test_bad_metric(capsys):
    code, _, err = run(capsys, "strong", "--system", "identity", "--eps", "0.1", "--metrics", "power:2")
    assert code == 2 and "power" in err


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"system": "cycle", "cycle_n": 4, "eps": 0.1}))
    code, out, _ = run(capsys, "cr", "--config", str(cfg))
    assert code == 0 and json.loads(out)["cr_set"] == [0, 1, 2, 3]
    # flags override the file
    code, out, _ = run(capsys, "cr", "--config", str(cfg), "--cycle-n", "5")
    assert len(json.loads(out)["cr_set"]) == 5


def test_config_syntax_error_has_position(capsys, tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text('{"system": "cycle",\n  "cycle_n": 4,,\n}')
    code, _, err = run(capsys, "cr", "--config", str(cfg), "--eps", "0.1")
    assert code == 2
    assert f"{cfg}:2:" in err


def test_config_bad_field(capsys, tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"system": "cycle", "cycle_n": 1}))
    code, _, err = run(capsys, "cr", "--config", str(cfg), "--eps", "0.1")
    assert code == 2 and "'cycle_n'" in err
    cfg.write_text(json.dumps({"system": "cycle", "colour": 1}))
    code, _, err = run(capsys, "cr", "--config", str(cfg), "--eps", "0.1")
    assert code == 2 and "'colour'" in err


def test_missing_config_file(capsys, tmp_path):
    code, _, err = run(capsys, "cr", "--config", str(tmp_path / "nope.json"))
    assert code == 2 and "cannot read" in err


def test_dot_and_out_files(capsys, tmp_path):
    out, dot = tmp_path / "r.json", tmp_path / "g.dot"
    code, stdout, _ = run(capsys, "cr", "--system", "square", "--eps", "0.3", "--out", str(out), "--dot", str(dot))
    assert code == 0 and stdout == ""
    assert json.loads(out.read_text())["eps"] == 0.3
    assert dot.read_text().startswith("digraph") and "doublecircle" in dot.read_text()


def test_reports_byte_stable(capsys):
    argv = ["nested", "--system", "sigma2", "--k", "4", "--schedule", "geometric:0.375,4", "--from", "110010inf",
            "--to", "0inf"]
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first == second and first[0] == 0


def test_golden_only_sigma1(capsys):
    code, out, err = run(capsys, "paper", "--only", "sigma1")
    rep = json.loads(out)
    assert code == 0
    assert [c["name"] for c in rep["cases"]] == ["sigma1-chain", "sigma1-nested"]


def test_golden_fault_names_sigma1_chain(capsys):
    code, out, err = run(capsys, "paper", "--only", "sigma1", "--fault-sigma1-scale", "1.5")
    assert code == 1
    assert json.loads(out)["failed"] == ["sigma1-chain"]
    assert "failed: sigma1-chain" in err


def test_golden_only_unknown(capsys):
    code, _, err = run(capsys, "paper", "--only", "tent")
    assert code == 2


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["cr", "--system", "tent"])
    assert exc.value.code == 2


def test_console_script_entry():
    out = subprocess.run([sys.executable, "-m", "chainscope.cli", "cr", "--system", "cycle", "--eps", "0.1"],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["cr_set"] == [0, 1, 2]
