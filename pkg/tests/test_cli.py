import json
import subprocess
import sys
from fractions import Fraction

import pytest

from vvsiegel.cli import SessionConfig, dumps, main
from vvsiegel.lattice import build_lattice
from vvsiegel.series import ParityMismatch


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip().startswith(("{", "[")) else out


def test_lattice_info(capsys):
    code, out = run(capsys, "lattice", "info", "--gram", "[[2]]")
    assert code == 0
    assert out["order"] == 2 and out["level"] == 4 and out["signature"] == [1, 0]


def test_lattice_from_file(capsys, tmp_path):
    path = tmp_path / "a2.json"
    path.write_text(json.dumps({"gram": [[2, 1], [1, 2]]}))
    code, out = run(capsys, "lattice", "info", "--lattice", str(path))
    assert code == 0 and out["order"] == 3


def test_domain_error_exit_code(capsys):
    code, out = run(capsys, "lattice", "info", "--gram", "[[3]]")
    assert code == 1
    assert out["error"]["type"] == "NotEven"


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["lattice", "nosuch"])
    assert exc.value.code == 2


def test_weilrep_matrix_exact_and_float(capsys):
    word = json.dumps({"word": [{"S": None}, {"T": [[1]]}], "branch_flip": 0})
    code, ex = run(capsys, "weilrep", "matrix", "--gram", "[[2]]", "--genus", "1", "--word", word, "--exact")
    assert code == 0 and ex["backend"] == "exact"
    code, fl = run(capsys, "weilrep", "matrix", "--gram", "[[2]]", "--genus", "1", "--word", word, "--float")
    assert code == 0 and len(fl["matrix"]) == 2


def test_series_eis1_reports_errors(capsys):
    code, out = run(capsys, "series", "eis1", "--gram", "[[2,1],[1,2]]", "-k", "3", "--mmax", "1", "-H", "40")
    assert code == 0
    first = out["value"][0]
    assert first["alpha"] == [0] and abs(first["value"][0] - 1) < first["error_estimate"] + 1e-3
    assert out["config"]["H"] == 40


def test_parity_mismatch_is_domain_error(capsys):
    code, out = run(capsys, "series", "eis1", "--gram", "[[2]]", "-k", "6")
    assert code == 1 and out["error"]["type"] == "ParityMismatch"


def test_pet_const(capsys):
    code, out = run(capsys, "series", "pet-const", "-k", "10", "-g", "2")
    assert code == 0 and out["value"]["gamma_args"] == ["17/2", "8"]


def test_doubling_commands(capsys):
    code, out = run(capsys, "doubling", "enum", "--genus", "2", "--height", "1", "--stratify")
    assert code == 0 and sum(out["strata"].values()) == out["count"]
    code, out = run(capsys, "doubling", "setofrep-check", "--nu", "1", "--height", "2")
    assert code == 0 and out["ok"]
    code, out = run(capsys, "doubling", "mstar", "--W", "[[1,0],[0,2]]", "--genus", "3")
    assert code == 0 and out["member"]


def test_cycles_commands(capsys):
    code, out = run(capsys, "cycles", "expand", "--gram", "[[2]]", "--kind", "ord", "--T", "[[1]]", "--alpha", "[0]")
    assert code == 0 and len(out["terms"]) == 2
    code, out = run(capsys, "cycles", "verify", "--gram", "[[2]]", "--trace-bound", "4")
    assert code == 0 and out["ok"]


def test_expansion_reduce(capsys):
    code, out = run(capsys, "expansion", "reduce", "--T", "[[5,2],[2,1]]")
    assert code == 0 and out["T"] == [["1", "0"], ["0", "1"]]


def test_selftest_quick(capsys):
    code, out = run(capsys, "selftest", "--quick")
    assert code == 0 and out["ok"]


def test_output_file(capsys, tmp_path):
    path = tmp_path / "out.json"
    assert main(["--output", str(path), "lattice", "info", "--gram", "[[2]]"]) == 0
    assert json.loads(path.read_text())["order"] == 2


def test_dumps_is_deterministic():
    obj = {"b": 0.1, "a": [1 + 2j, Fraction(3, 4)], "c": 2.0}
    assert dumps(obj) == '{"a":[[1.0,2.0],"3/4"],"b":0.10000000000000001,"c":2.0}'
    assert dumps(obj) == dumps(dict(reversed(list(obj.items()))))


def test_session_config_checks_parity():
    L = build_lattice([[2]])
    SessionConfig(lattice=L, weight=Fraction(5, 2))
    with pytest.raises(ParityMismatch):
        SessionConfig(lattice=L, weight=Fraction(3))


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "vvsiegel", "lattice", "info", "--gram", "[[2]]"],
                         capture_output=True, text=True, check=True)
    assert json.loads(res.stdout)["det"] == 2
