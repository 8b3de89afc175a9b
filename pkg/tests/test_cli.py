from __future__ import annotations

import io
import json
import subprocess
import sys

import pytest

from clusterpainleve.cli import run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def values(text):
    return [json.loads(line)["value"] for line in text.splitlines()]


def test_bk():
    code, out, _ = call("bk", "--k", "4")
    assert code == 0
    assert json.loads(out) == {"k": 4, "matrix": [[0, -1, 2, -1], [1, 0, -3, 2], [-2, 3, 0, -1], [1, -2, 1, 0]]}


def test_somos_example():
    code, out, _ = call("somos", "--k", "4", "--steps", "8", "--initial", "1,1,1,1")
    assert code == 0
    assert values(out) == ["2", "3", "7", "23", "59", "314", "1529", "8209"]


def test_somos_csv_and_initial():
    code, out, _ = call("somos", "--k", "5", "--steps", "2", "--format", "csv", "--include-initial")
    assert code == 0
    assert out == "n,value\n1,1\n2,1\n3,1\n4,1\n5,1\n6,2\n7,3\n"


def test_somos_symbolic_csv_is_usage_error():
    code, _, err = call("somos", "--k", "4", "--steps", "2", "--symbolic", "--format", "csv")
    assert code == 2 and "CSV" in err


def test_somos_symbolic_jsonl():
    code, out, _ = call("somos", "--k", "4", "--steps", "1", "--symbolic")
    assert code == 0
    rec = json.loads(out)
    assert rec["n"] == 5 and rec["value"]["vars"] == ["x1", "x2", "x3", "x4"]


def test_usage_errors():
    assert call("somos", "--k", "3", "--steps", "2")[0] == 2
    assert call("somos", "--k", "4")[0] == 2
    assert call("frobnicate")[0] == 2
    assert call("somos", "--k", "4", "--steps", "2", "--initial", "1,x,1,1")[0] == 2
    assert call("verify", "nothing", "--k", "4")[0] == 2
    assert call("orbit", "--eq", "qp1", "--k", "6", "--steps", "1", "--initial", "1,1")[0] == 2


def test_budget_exit_code(monkeypatch):
    assert call("somos", "--k", "4", "--steps", "30", "--symbolic", "--budget", "500")[0] == 3
    monkeypatch.setenv("CLUSTER_PAINLEVE_BUDGET", "500")
    assert call("somos", "--k", "4", "--steps", "30", "--symbolic")[0] == 3
    # the flag overrides the environment
    assert call("somos", "--k", "4", "--steps", "3", "--symbolic", "--budget", "100000")[0] == 0


def test_singular_orbit_exit_code():
    code, _, err = call("orbit", "--eq", "qp1", "--steps", "3", "--params", "alpha=1,beta=1",
                        "--initial", "1,0")
    assert code == 1 and "error" in err


def test_orbit_qp1():
    code, out, _ = call("orbit", "--eq", "qp1", "--steps", "2", "--params", "alpha=1,beta=1", "--initial", "1,1")
    assert code == 0 and values(out) == ["2", "3/4"]


def test_orbit_qp2():
    code, out, _ = call("orbit", "--eq", "qp2", "--steps", "2", "--params", "alpha=1,beta=1,gamma=1",
                        "--initial", "1,1")
    assert code == 0 and values(out) == ["2", "3/2"]


def test_orbit_y_even_roots_vs_direct_params():
    a = call("orbit", "--eq", "y-even", "--k", "6", "--steps", "3", "--params", "a=2,b=3", "--initial", "1,1,1,1")
    b = call("orbit", "--eq", "y-even", "--k", "6", "--steps", "3", "--params", "alpha=64,beta=27",
             "--initial", "1,1,1,1")
    assert a[0] == 0 and a[1] == b[1]


def test_orbit_y_odd_symbolic():
    code, out, _ = call("orbit", "--eq", "y-odd", "--k", "7", "--steps", "1", "--symbolic")
    assert code == 0
    rec = json.loads(out)
    assert rec["value"]["num"]["vars"] == ["y0", "y1", "y2", "y3", "alpha", "beta", "gamma"]


def test_orbit_bilinear():
    code, out, _ = call("orbit", "--eq", "bilinear", "--k", "4", "--steps", "1", "--params", "a=1,b=2",
                        "--initial", "1,1,1,1")
    assert code == 0 and values(out) == ["4"]
    code, out, _ = call("orbit", "--eq", "bilinear", "--k", "5", "--steps", "3")
    assert values(out) == ["2", "3", "5"]
    code, out, _ = call("orbit", "--eq", "bilinear", "--k", "4", "--steps", "1", "--symbolic")
    assert json.loads(out)["value"]["vars"] == ["x1", "x2", "x3", "x4", "a", "b"]


def test_mutate_round_trip(tmp_path):
    seed = tmp_path / "seed.json"
    code, _, _ = call("mutate", "--k", "4", "--directions", "1,2,3", "--out", str(seed))
    assert code == 0
    back = tmp_path / "back.json"
    call("mutate", "--seed", str(seed), "--directions", "3,2,1", "--out", str(back))
    start = call("mutate", "--k", "4", "--directions", "")[1]
    assert back.read_text() == start


def test_mutate_bad_seed(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    assert call("mutate", "--seed", str(bad), "--directions", "1")[0] == 2
    assert call("mutate", "--seed", str(tmp_path / "missing.json"), "--directions", "1")[0] == 2


def test_verify_periodicity():
    code, out, _ = call("verify", "periodicity", "--k", "4")
    assert code == 0 and json.loads(out)["verdict"] == "pass"


def test_verify_failure_exit_code():
    code, out, _ = call("verify", "irreducibility", "--k", "5")
    assert code == 1 and json.loads(out)["verdict"] == "fail"


def test_verify_coprime_options():
    code, out, _ = call("verify", "coprime-x", "--k", "4", "--range", "5..8")
    assert code == 0 and json.loads(out)["cases"] == 6
    code, out, _ = call("verify", "coprime-y", "--k", "6", "--max-n", "7")
    assert code == 0 and json.loads(out)["verdict"] == "evidence"
    assert call("verify", "coprime-x", "--k", "4", "--range", "5-8")[0] == 2


def test_verify_all_jsonl():
    code, out, _ = call("verify", "ALL", "--k", "4")
    assert code == 0
    checks = [json.loads(line)["check"] for line in out.splitlines()]
    assert checks == ["periodicity", "involution", "laurent", "coprime-x", "coprime-y",
                      "y-equation", "irreducibility"]


def test_out_file(tmp_path):
    target = tmp_path / "orbit.csv"
    code, out, _ = call("somos", "--k", "4", "--steps", "2", "--format", "csv", "--out", str(target))
    assert code == 0 and out == ""
    assert target.read_text() == "n,value\n5,2\n6,3\n"


@pytest.mark.parametrize("argv", [["verify", "ALL", "--k", "4"], ["somos", "--k", "6", "--steps", "5", "--symbolic"]])
def test_byte_identical_across_processes(argv):
    cmd = [sys.executable, "-m", "clusterpainleve", *argv]
    a = subprocess.run(cmd, capture_output=True, check=False)
    b = subprocess.run(cmd, capture_output=True, check=False)
    assert a.returncode == 0
    assert a.stdout == b.stdout and a.stdout
