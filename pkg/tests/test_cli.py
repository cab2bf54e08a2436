import json
import subprocess
import sys

import pytest

from doubleseq.cli import main


def run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr()


def test_spiral_prints_position(capsys):
    code, out = run(["spiral", "--j", "10"], capsys)
    assert code == 0 and out.out.strip() == "(1,4)"
    code, out = run(["spiral", "--row", "3", "--col", "1"], capsys)
    assert out.out.strip() == "9"


def test_cauchy_const(capsys):
    code, out = run(["check-cauchy", "--seq", "const", "--eps", "0.001", "--n", "1", "--horizon", "50"], capsys)
    assert code == 0
    assert json.loads(out.out)["status"] == "verified"


def test_cauchy_violated_exit(capsys):
    code, out = run(["check-cauchy", "--seq", "log_max", "--eps", "0.5", "--n", "10", "--horizon", "100"], capsys)
    assert code == 1
    assert json.loads(out.out)["counterexample"][:4] == [11, 11, 11, 19]


def test_check_so_given_triple(capsys):
    argv = ["check-so", "--seq", "alternating", "--eps", "1", "--alpha", "0.5", "--delta", "0.5", "--n", "4",
            "--horizon", "100"]
    code, out = run(argv, capsys)
    assert code == 1 and json.loads(out.out)["status"] == "violated"


def test_check_so_search(capsys):
    code, out = run(["check-so", "--seq", "log_max", "--eps", "0.1", "--horizon", "1000"], capsys)
    d = json.loads(out.out)
    assert code == 0 and d["status"] == "verified" and d["alpha"] <= 0.0625
    code, out = run(["check-so", "--seq", "alternating", "--eps", "1", "--horizon", "100"], capsys)
    assert code == 2 and json.loads(out.out)["status"] == "no-witness"


def test_partial_triple_is_usage_error(capsys):
    code, out = run(["check-so", "--seq", "log_max", "--eps", "0.1", "--alpha", "0.5", "--horizon", "50"], capsys)
    assert code == 64


@pytest.mark.parametrize("argv", [
    ["check-so", "--seq", "nope", "--eps", "1", "--horizon", "5"],
    ["uc-test", "--fn", "nope", "--eps", "1"],
    ["check-cauchy", "--seq", "log_max", "--eps", "abc"],
    ["check-cauchy", "--seq", "log_max"],
    ["check-cauchy", "--seq", "log_max", "--eps", "1", "--n", "10", "--horizon", "10"],
    ["frobnicate"],
    [],
    ["campaign", "T9.9"],
])
def test_usage_errors(argv, capsys):
    code, out = run(argv, capsys)
    assert code == 64
    assert out.err.startswith("doubleseq:")


def test_pringsheim_grid_default_limit(capsys):
    code, out = run(["check-pringsheim", "--seq", "recip_grid", "--eps", "0.05", "--n", "50", "--horizon", "500"], capsys)
    assert code == 0 and json.loads(out.out)["limit"] == [0.0, 0.0]


def test_pringsheim_and_bounded_row_spike(capsys):
    code, _ = run(["check-pringsheim", "--seq", "row_spike", "--limit", "0", "--eps", "0.1", "--n", "10",
                   "--horizon", "100"], capsys)
    assert code == 0
    code, out = run(["check-bounded", "--seq", "row_spike", "--bound", "50", "--horizon", "100"], capsys)
    assert code == 1 and json.loads(out.out)["counterexample"][:2] == [50, 1]


def test_limit_exit_codes(capsys):
    assert run(["limit", "--seq", "harmonic_sum", "--eps", "0.01", "--horizon", "2000"], capsys)[0] == 0
    assert run(["limit", "--seq", "log_max", "--eps", "0.5", "--horizon", "2000"], capsys)[0] == 1
    assert run(["limit", "--seq", "alternating", "--eps", "0.5", "--horizon", "100"], capsys)[0] == 2


def test_subseq_json_and_csv(capsys):
    code, out = run(["subseq", "--seq", "log_max", "--rows", "pow2", "--cols", "pow2", "--count", "3"], capsys)
    assert code == 0
    assert json.loads(out.out)["matrix"][1][0] is None
    code, out = run(["subseq", "--seq", "const(2)", "--count", "4", "--out", "csv"], capsys)
    assert out.out.splitlines() == ["k,l,value", "1,1,2.0", "1,2,2.0", "2,1,2.0", "2,2,2.0"]


def test_apply_and_domain_error(capsys):
    code, out = run(["apply", "--seq", "recip_grid", "--fn", "add", "--size", "4"], capsys)
    assert code == 0 and json.loads(out.out)["matrix"][1][3] == 0.75
    code, out = run(["apply", "--seq", "log_grid", "--fn", "one_over_xy", "--size", "3"], capsys)
    assert code == 1 and "outside the domain" in out.err


def test_uc_test_exit_codes(capsys):
    assert run(["uc-test", "--fn", "one_over_xy", "--eps", "1"], capsys)[0] == 1
    assert run(["uc-test", "--fn", "add", "--eps", "0.1"], capsys)[0] == 0


def test_campaign_and_output_file(tmp_path, capsys):
    target = tmp_path / "t33.json"
    code, out = run(["campaign", "T3.3", "--output", str(target)], capsys)
    assert code == 0 and out.out == ""
    d = json.loads(target.read_text())
    assert d["theorem_id"] == "T3.3" and d["status"] == "pass"
    code, _ = run(["campaign", "T3.3", "--fn", "add", "--eps", "0.1"], capsys)
    assert code == 2
    code, _ = run(["campaign", "T3.4", "--horizon", "500"], capsys)
    assert code == 0


def test_json_round_trip_is_byte_stable(capsys):
    _, out = run(["check-so", "--seq", "alternating", "--eps", "1", "--alpha", "0.5", "--delta", "0.5", "--n", "4",
                  "--horizon", "100"], capsys)
    assert json.dumps(json.loads(out.out), indent=2) + "\n" == out.out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "doubleseq", "spiral", "--j", "7"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "(3,3)"


def test_cell_cap_gives_undetermined(capsys, monkeypatch):
    monkeypatch.setenv("DOUBLESEQ_MAX_CELLS", "100")
    code, out = run(["check-cauchy", "--seq", "log_max", "--eps", "1", "--n", "10", "--horizon", "100"], capsys)
    assert code == 2 and json.loads(out.out)["status"] == "undetermined"
