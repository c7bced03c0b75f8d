import json
import subprocess
import sys
from pathlib import Path

import pytest

from inverse_power.cli import main
from inverse_power.ilp_models import read_lp

HERE = Path(__file__).parent
GOLDEN = HERE / "golden"

GOLDEN_RUNS = {
    "count_wvg_6": ["count", "--class", "wvg", "--n", "6"],
    "power_table2": ["power", "[12;4,4,4,3,2,1]"],
    "invert_hard4_csg_bz": ["invert", "--class", "csg", "--index", "bz", "--hard", "4"],
    "verify_witness_hard5": ["verify-witness", "--game", "[5;4,1,1,1,1]", "--hard", "5", "--index", "bz", "--expect", "0.3947368"],
    "bound_4": ["bound", "--n", "4", "--eps", "1/18"],
    "instance_hard3": ["instance", "--hard", "3"],
    "verify_conjectures_8": ["verify-conjectures", "--upto", "8"],
    "verify_appendix_2_ss": ["verify-appendix", "--n", "2", "--index", "ss", "--steps", "12"],
    "enumerate_csg_3": ["enumerate", "--class", "csg", "--n", "3"],
}


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("name", sorted(GOLDEN_RUNS))
def test_json_matches_golden(capsys, name):
    code, out, _ = run(capsys, *GOLDEN_RUNS[name], "--json")
    assert code == 0
    assert json.loads(out) == json.loads((GOLDEN / f"{name}.json").read_text())
    assert out.count("\n") == 1  # one JSON object per run


def test_count_example(capsys):
    code, out, err = run(capsys, "count", "--class", "wvg", "--n", "6")
    assert code == 0 and out.strip() == "1111"
    assert "count:" in err  # timings stay off stdout


def test_invert_example(capsys):
    code, out, _ = run(capsys, "invert", "--class", "wvg", "--index", "ss", "--hard", "5")
    assert code == 0
    assert "1/3 (0.3333333)" in out


def test_invert_bnb_and_witness_cap(capsys):
    code, out, _ = run(capsys, "invert", "--class", "csg", "--index", "bz", "--hard", "5", "--method", "bnb", "--json", "--max-witnesses", "1")
    data = json.loads(out)
    assert code == 0 and data["deviation"] == "15/38" and len(data["witnesses"]) == 1
    assert "pruned_by_bound" in data


def test_invert_reports_voter_order(capsys, tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("1/6,1/2,1/3\n")
    code, out, _ = run(capsys, "invert", "--class", "wvg", "--index", "ss", "--target", str(path), "--json")
    data = json.loads(out)
    assert code == 0 and data["voter_order"] == [2, 3, 1]


def test_verify_witness_mismatch_exit(capsys):
    args = ["verify-witness", "--game", "[5;4,1,1,1,1]", "--hard", "5", "--index", "bz"]
    assert run(capsys, *args, "--expect", "15/38")[0] == 0
    assert run(capsys, *args, "--expect", "3.94737e-1")[0] == 0
    code, out, _ = run(capsys, *args, "--expect", "0.3947369")
    assert code == 4 and "MISMATCH" in out


def test_power_csv(capsys):
    code, out, _ = run(capsys, "power", "[3;2,1,1]")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "voter,eta,bz,ss"
    assert lines[1] == "1,3,3/5,2/3"


def test_verify_appendix_published_and_corrected(capsys):
    code, out, _ = run(capsys, "verify-appendix", "--n", "3", "--index", "bz", "--steps", "20")
    assert code == 4 and "fail" in out.lower()
    code, out, _ = run(capsys, "verify-appendix", "--n", "3", "--index", "bz", "--steps", "20", "--corrected")
    assert code == 0 and "pass" in out


def test_usage_errors(capsys):
    assert run(capsys, "bogus")[0] == 1
    assert run(capsys, "count", "--class", "wvg", "--n", "3", "--frobnicate")[0] == 1
    code, _, err = run(capsys, "invert", "--class", "wvg", "--index", "ss")
    assert code == 1 and "usage" in err.lower()


def test_limit_exit(capsys):
    assert run(capsys, "count", "--class", "wvg", "--n", "9")[0] == 2
    assert run(capsys, "invert", "--class", "sg", "--index", "ss", "--hard", "7")[0] == 2


def test_export_ilp(capsys, tmp_path):
    out_path = tmp_path / "m.lp"
    code, _, _ = run(capsys, "export-ilp", "--class", "csg", "--index", "bz", "--hard", "3", "--alpha", "2/5", "--out", str(out_path))
    assert code == 0
    m = read_lp(out_path)
    assert m.metadata["model"] == "bz" and m.metadata["alpha"] == "2/5"
    code, out, _ = run(capsys, "export-ilp", "--index", "ss", "--hard", "3", "--simplified")
    assert code == 0 and out.startswith("\\ model: ss-simplified")


def test_solve_ext_failure_exit(capsys, tmp_path):
    adapter = tmp_path / "a.json"
    adapter.write_text(json.dumps({"command": "/nonexistent/solver {model} {solution}"}))
    code, _, err = run(capsys, "solve-ext", "--class", "sg", "--index", "ss", "--hard", "3", "--adapter", str(adapter))
    assert code == 3 and err


def test_bisect_with_stub(capsys, tmp_path):
    adapter = tmp_path / "a.json"
    cmd = f"{sys.executable} {HERE / 'stub_solver.py'} {{model}} {{solution}}"
    adapter.write_text(json.dumps({"command": cmd}))
    code, out, _ = run(capsys, "bisect", "--class", "csg", "--hard", "3", "--adapter", str(adapter), "--json")
    assert code == 0 and json.loads(out)["deviation"] == "2/5"


def test_regions_outputs(capsys, tmp_path):
    code, _, _ = run(capsys, "regions", "--n", "4", "--index", "bz", "--width", "20", "--height", "10", "--out", str(tmp_path / "r"))
    assert code == 0
    written = sorted(p.name for p in tmp_path.iterdir())
    assert any(n.endswith(".pgm") for n in written) and any(n.endswith(".csv") for n in written)


def test_cache_dir_byte_identical(capsys, tmp_path):
    args = ["invert", "--class", "wvg", "--index", "ss", "--eu", "5", "--json"]
    cold = run(capsys, *args)[1]
    first = run(capsys, *args, "--cache-dir", str(tmp_path))[1]
    cached = run(capsys, *args, "--cache-dir", str(tmp_path))[1]
    assert (tmp_path / "wvg_5.txt").exists()
    assert cold == first == cached
    enum_cold = run(capsys, "enumerate", "--class", "wvg", "--n", "4", "--json")[1]
    run(capsys, "enumerate", "--class", "wvg", "--n", "4", "--json", "--cache-dir", str(tmp_path))
    assert run(capsys, "enumerate", "--class", "wvg", "--n", "4", "--json", "--cache-dir", str(tmp_path))[1] == enum_cold


def test_threads_do_not_change_results(capsys):
    one = run(capsys, "count", "--class", "csg", "--n", "6", "--threads", "1")[1]
    two = run(capsys, "count", "--class", "csg", "--n", "6", "--threads", "2")[1]
    assert one == two == "1171\n"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "inverse_power", "count", "--class", "csg", "--n", "4"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "25"
