import json
import subprocess
import sys

import pytest

from tsystems.cli import cache_path, dispatch


@pytest.fixture
def run(tmp_path, capsys):
    def _run(*argv):
        code = dispatch(list(argv) + ["--cache-dir", str(tmp_path), "--no-timings"])
        out = capsys.readouterr()
        return code, out.out, out.err
    return _run


def test_orbits_a5_rank3(run):
    code, out, _ = run("orbits", "--group", "A5", "--rank", "3")
    data = json.loads(out)
    assert code == 0 and data["orbits"] == 1 and data["classes"] == 1668


def test_dpower(run):
    code, out, _ = run("dpower", "--group", "A5", "--k", "20")
    assert code == 0 and json.loads(out)["d"] == 3


def test_bad_group_exit_2(run):
    code, out, err = run("orbits", "--group", "XYZ")
    assert code == 2 and out == "" and "XYZ" in err


def test_usage_error_exit_2(run):
    assert run("orbits")[0] == 2
    assert run("nonsense", "--group", "A5")[0] == 2
    assert run("spread", "--group", "A5", "--elements", "1,999")[0] == 2
    assert run("classes", "--group", "A5", "--rank", "0")[0] == 2


def test_negative_outcomes_exit_1(run):
    code, out, _ = run("law", "--group", "A5", "--max-word-len", "5")
    assert code == 1 and json.loads(out)["word"] is None
    code, out, _ = run("matrix", "--group", "A5", "--rank", "4", "--k", "3")
    assert code == 1 and json.loads(out)["outcome"] == "MatrixExhausted"
    assert run("spread", "--group", "A5", "--elements", "0")[0] == 1


def test_law_and_kernel(run):
    code, out, _ = run("law", "--group", "C2xC2", "--max-word-len", "4")
    assert code == 0 and json.loads(out)["word"] == "1 1"
    code, out, _ = run("kernel", "--group", "C2xC2", "--rank", "4", "--word", "1 2 -1 -2")
    data = json.loads(out)
    assert data["non_inner"] and data["acts_trivially"] and data["checked"] == 256


def test_deterministic_and_cache_roundtrip(run, tmp_path):
    first = run("classes", "--group", "A5", "--rank", "2", "--list")[1]
    path = cache_path(tmp_path, "A5", 2)
    text = path.read_text()
    assert run("classes", "--group", "A5", "--rank", "2", "--list")[1] == first
    path.unlink()
    assert run("classes", "--group", "A5", "--rank", "2", "--list")[1] == first
    assert path.read_text() == text


def test_matrix_then_hall_and_connect_stab(run, tmp_path):
    code, out, _ = run("matrix", "--group", "A5", "--rank", "4", "--k", "2")
    assert code == 0
    mfile = tmp_path / "m.json"
    mfile.write_text(json.dumps(json.loads(out)["matrix"]))
    code, out, _ = run("hall", "--group", "A5", "--matrix", str(mfile))
    assert code == 0 and json.loads(out)["diagonal_surjective"]
    code, out, _ = run("connect-stab", "--group", "A5", "--matrix", str(mfile), "--target", "3,17,40,55")
    assert code == 0 and json.loads(out)["verified"]


def test_connect_and_formats(run):
    code, out, _ = run("connect", "--group", "A5", "--source", "(0 1 2 3 4);(0 1 2);(1 2 3)",
                       "--target", "(0 2 1 3 4);(2 3 4);(0 1)(2 3)", "--format", "text")
    assert code == 0 and "verified: True" in out
    code, out, _ = run("spread", "--group", "A5", "--elements", "5,17", "--format", "csv")
    assert code == 0 and out.startswith("key,value")


def test_ktrans_and_certify(run):
    code, out, _ = run("ktrans", "--group", "A5", "--rank", "2", "--k", "1")
    assert code == 1 and json.loads(out)["orbits"] == 2
    code, out, _ = run("certify", "--group", "A5", "--rank", "2")
    assert code == 1 and json.loads(out)["verdict"] == "Other"


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "tsystems", "dpower", "--group", "A5", "--k", "19",
                           "--cache-dir", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["d"] == 2
