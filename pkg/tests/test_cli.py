"""Command-line behaviour: outputs, exit codes, determinism and validation."""

import json
import shutil
import subprocess

import pytest

from qsolve.cli import EXIT_COUNT, EXIT_INPUT, EXIT_OK, EXIT_VALIDATION, compare_spectra, oracle_levels
from qsolve.representation import Partition


def solve_json(run_cli, *args):
    code, out, err = run_cli("solve", *args)
    return code, json.loads(out), err


def test_count_examples(run_cli):
    code, out, _ = run_cli("count", "--length", "12", "--partition", "6,6")
    assert code == EXIT_OK
    assert json.loads(out)["partitions"] == [{"partition": [6, 6], "expected_count": 132}]
    _, out, _ = run_cli("count", "--length", "7", "--partition", "4,2,1")
    assert json.loads(out)["partitions"][0]["expected_count"] == 35
    _, out, _ = run_cli("count", "--length", "12", "--all", "--fat-hook", "2,0")
    counts = [p["expected_count"] for p in json.loads(out)["partitions"]]
    assert counts == [1, 11, 54, 154, 275, 297, 132]


def test_count_csv_and_pretty(run_cli):
    _, out, _ = run_cli("count", "--length", "3", "--all", "--output", "csv")
    assert out.splitlines() == ["partition,count", "3,1", '"2,1",2', '"1,1,1",1']
    _, out, _ = run_cli("count", "--length", "3", "--all", "--output", "pretty")
    assert out.splitlines()[0].split() == ["partition", "count"]
    assert out.splitlines()[2].split() == ["2,1", "2"]


def test_input_errors(run_cli):
    assert run_cli("count", "--length", "5", "--partition", "2,3")[0] == EXIT_INPUT
    assert run_cli("count", "--length", "5", "--partition", "3,1")[0] == EXIT_INPUT
    assert run_cli("solve", "--length", "4", "--partition", "2,2", "--relations", "bogus")[0] == EXIT_INPUT
    assert run_cli("solve", "--length", "3", "--partition", "2,1", "--inhomogeneities", "0,1")[0] == EXIT_INPUT
    assert run_cli("solve", "--length", "3", "--partition", "2,1", "--precision-bits", "10")[0] == EXIT_INPUT
    assert run_cli("frobnicate")[0] == EXIT_INPUT
    code, _, err = run_cli("count", "--length", "4", "--partition", "1,1,1,1", "--fat-hook", "2,0")
    assert code == EXIT_INPUT and "fat hook" in err


def test_solve_four_sites(run_cli):
    code, doc, err = solve_json(run_cli, "--length", "4", "--partition", "2,2")
    assert code == EXIT_OK
    (part,) = doc["partitions"]
    assert part["expected_count"] == part["found_distinct"] == part["validated_count"] == 2
    sols = part["solutions"]
    assert [s["exceptional"] for s in sols] == [True, False]
    assert sols[0]["validation"]["bethe_residual"] == "not-applicable"
    assert sols[0]["energy"]["exact"] == "2"
    assert sols[1]["energy"]["exact"] == "6"
    assert [c["exact"] for c in sols[0]["coefficients"]["Q[1,0]"]] == ["-1/4", "0", "1"]
    assert "expected 2, found 2" in err


def test_solve_three_sites_nested(run_cli):
    code, doc, _ = solve_json(run_cli, "--length", "3", "--partition", "2,1")
    assert code == EXIT_OK
    assert doc["partitions"][0]["found_distinct"] == 2


def test_solve_with_split(run_cli):
    code, doc, _ = solve_json(run_cli, "--length", "6", "--partition", "3,3", "--momentum-split")
    assert code == EXIT_OK
    part = doc["partitions"][0]
    assert part["found_distinct"] == part["validated_count"] == 5
    assert doc["config"]["momentum_split"] is True


def test_schema_fields(run_cli):
    _, doc, _ = solve_json(run_cli, "--length", "5", "--partition", "3,2", "--dump-grid")
    assert doc["schema_version"] == 1
    part = doc["partitions"][0]
    for key in ["partition", "expected_count", "found_distinct", "found_with_multiplicity", "solutions", "eliminants"]:
        assert key in part
    assert "grid" in part and part["grid"]["partition"] == [3, 2]
    sol = part["solutions"][0]
    for key in ["coefficients", "energy", "momentum_phase", "exceptional", "validation"]:
        assert key in sol
    coeff = sol["coefficients"]["Q[1,0]"][0]
    assert set(coeff) >= {"re", "im", "radius"}
    assert isinstance(coeff["re"], str)
    assert set(part["eliminants"]) == {"c[1,0][0]", "c[1,0][1]"}


def test_output_is_deterministic(run_cli):
    args = ("--length", "6", "--partition", "4,2", "--momentum-split", "--seed", "7")
    first = run_cli("solve", *args)[1]
    second = run_cli("solve", *args)[1]
    assert first == second


def test_threads_give_identical_solutions(run_cli, monkeypatch):
    args = ("--length", "5", "--all", "--momentum-split")
    serial = json.loads(run_cli("solve", *args, "--threads", "1")[1])
    monkeypatch.setenv("QSOLVE_THREADS", "2")
    parallel = json.loads(run_cli("solve", *args)[1])
    assert parallel["config"]["threads"] == 2
    strip = lambda d: [p["solutions"] for p in d["partitions"]]  # noqa: E731
    assert strip(serial) == strip(parallel)


def test_bad_thread_env(run_cli, monkeypatch):
    monkeypatch.setenv("QSOLVE_THREADS", "many")
    assert run_cli("solve", "--length", "2", "--partition", "1,1")[0] == EXIT_INPUT


def test_csv_solve_output(run_cli):
    code, out, _ = run_cli("solve", "--length", "4", "--partition", "2,2", "--output", "csv")
    lines = out.splitlines()
    assert lines[0] == "partition,index,energy,momentum_phase,exceptional,passed"
    assert lines[1:] == ['"2,2",0,2,-1,True,True', '"2,2",1,6,1,False,True']


def test_validate_own_output_passes(run_cli, tmp_path):
    _, out, _ = run_cli("solve", "--length", "5", "--partition", "3,2")
    path = tmp_path / "run.json"
    path.write_text(out)
    code, vout, _ = run_cli("validate", str(path))
    assert code == EXIT_OK
    report = json.loads(vout)
    assert all(s["passed"] for p in report["partitions"] for s in p["solutions"])


def test_validate_perturbed_coefficient_fails(run_cli, tmp_path):
    _, out, _ = run_cli("solve", "--length", "6", "--partition", "4,2")
    doc = json.loads(out)
    target = doc["partitions"][0]["solutions"][3]
    coeff = target["coefficients"]["Q[1,0]"][0]
    coeff.pop("exact", None)
    coeff["re"] = str(float(coeff["re"]) + 1)
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, vout, err = run_cli("validate", str(path))
    assert code == EXIT_VALIDATION
    assert "partition 4,2 solution 3" in err
    report = json.loads(vout)
    failed = {s["index"]: s["failed"] for s in report["partitions"][0]["solutions"]}
    assert set(failed[3]) >= {"coefficients_consistent", "baxter_T_polynomial_ok", "dual_q_polynomial_ok"}
    assert all(not f for i, f in failed.items() if i != 3)


def test_validate_vacuum_and_empty(run_cli, tmp_path):
    _, out, _ = run_cli("solve", "--length", "4", "--partition", "4")
    path = tmp_path / "vac.json"
    path.write_text(out)
    assert run_cli("validate", str(path))[0] == EXIT_OK
    doc = json.loads(out)
    doc["partitions"] = []
    path.write_text(json.dumps(doc))
    assert run_cli("validate", str(path))[0] == EXIT_OK


def test_validate_malformed(run_cli, tmp_path):
    path = tmp_path / "x.json"
    path.write_text("{}")
    assert run_cli("validate", str(path))[0] == EXIT_INPUT
    path.write_text("not json")
    assert run_cli("validate", str(path))[0] == EXIT_INPUT
    assert run_cli("validate", str(tmp_path / "missing.json"))[0] == EXIT_INPUT


def test_sub_minimal_region_overcounts(run_cli):
    code, doc, err = solve_json(run_cli, "--length", "5", "--partition", "3,2", "--relations", "rect:2,1")
    part = doc["partitions"][0]
    assert part["found_distinct"] > part["expected_count"] == 5
    assert part["validated_count"] == 5
    assert code == EXIT_COUNT
    extra = [s for s in part["solutions"] if not s["validation"]["passed"]]
    assert len(extra) == 1
    assert extra[0]["validation"]["grid_polynomiality_ok"] is False


def test_oracle_compare(run_cli, tmp_path):
    code, out, _ = run_cli("oracle-compare", "--length", "6", "--all", "--fat-hook", "2,0",
                           "--figures", str(tmp_path))
    assert code == EXIT_OK
    doc = json.loads(out)
    assert all(c["comparison"]["match"] for c in doc["oracle_comparison"])
    assert (tmp_path / "spectrum_L6.png").exists()
    assert (tmp_path / "roots_3-3.png").exists()

    code, out, _ = run_cli("oracle-compare", "--length", "2", "--partition", "1,1")
    comp = json.loads(out)["oracle_comparison"][0]["comparison"]
    assert code == EXIT_OK
    assert float(comp["levels"][0]["bethe"]) == pytest.approx(4)
    assert float(comp["levels"][0]["oracle"]) == pytest.approx(4)

    code, out, _ = run_cli("oracle-compare", "--length", "5", "--partition", "5")
    comp = json.loads(out)["oracle_comparison"][0]["comparison"]
    assert [float(lv["bethe"]) for lv in comp["levels"]] == [0.0]


def test_oracle_compare_rejects_inhomogeneous(run_cli):
    code = run_cli("oracle-compare", "--length", "2", "--partition", "1,1", "--inhomogeneities", "0,1")[0]
    assert code == EXIT_INPUT


def test_compare_spectra_reports_mismatch():
    comp = compare_spectra([0.0, 2.0], [0.0, 2.5])
    assert not comp["match"]
    assert [lv["match"] for lv in comp["levels"]] == [True, False]
    assert not compare_spectra([0.0], [0.0, 1.0])["match"]
    assert oracle_levels(Partition((2, 2))) == pytest.approx([2, 6])


def test_console_script_runs():
    exe = shutil.which("qsolve")
    if exe is None:
        pytest.skip("console script not installed")
    proc = subprocess.run([exe, "count", "--length", "4", "--partition", "2,2"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["partitions"][0]["expected_count"] == 2
