import io
import json
import subprocess
import sys

import numpy as np
import pytest

from clifford_hierarchy import gates
from clifford_hierarchy.cli import main
from clifford_hierarchy.exceptions import ParseError
from clifford_hierarchy.expr import parse_gate, tokenize
from clifford_hierarchy.matrix import as_array, equal_up_to_global_phase


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), stream=buf)
    return code, buf.getvalue()


def records(text):
    return [json.loads(line) for line in text.splitlines()]


class TestParser:
    @pytest.mark.parametrize("text,expected", [
        ("t", gates.t()),
        ("T", gates.t()),
        ("w_k(4)", gates.w_k(4)),
        ("compose(h, t)", as_array(gates.h()) @ as_array(gates.t())),
        ("lambda(1, r_k(3))", gates.lambda_controlled(1, gates.r_k(3))),
        ("embed(t, 2, 3)", gates.embed(gates.t(), 2, 3)),
        ("dagger(s)", gates.sdg()),
        ("tensor(h, x)", np.kron(as_array(gates.h()), as_array(gates.x()))),
        ("phase(pi/4)", gates.t()),
        ("gamma1(2*pi/16)", gates.v_k(4)),
        ("toffoli(1, 2, 0)", gates.toffoli(1, 2, 0)),
        ("cnot", gates.cnot()),
    ])
    def test_expressions(self, text, expected):
        assert equal_up_to_global_phase(parse_gate(text), expected)

    def test_negative_and_float(self):
        assert equal_up_to_global_phase(parse_gate("phase(-0.5)"), np.diag([1, np.exp(-0.5j)]))

    @pytest.mark.parametrize("text,line,column", [
        ("foo", 1, 1),
        ("compose(h,\n  bogus)", 2, 3),
        ("w_k(", 1, 5),
        ("t t", 1, 3),
        ("h $", 1, 3),
        ("lambda(h, 1)", 1, 1),
        ("s_k(0)", 1, 1),
        ("phase(1/0)", 1, 9),
    ])
    def test_errors_report_position(self, text, line, column):
        with pytest.raises(ParseError) as err:
            parse_gate(text)
        assert (err.value.line, err.value.column) == (line, column)
        assert f"line {line}, column {column}" in str(err.value)

    def test_number_is_not_gate(self):
        with pytest.raises(ParseError):
            parse_gate("3")

    def test_tokens(self):
        kinds = [t.kind for t in tokenize("w_k(4)")]
        assert kinds == ["ident", "punct", "int", "punct", "end"]


class TestCli:
    def test_level_t(self):
        code, out = run("level", "t")
        rec = records(out)[0]
        assert code == 0
        assert rec["result"]["level"] == 3
        assert rec["command"] == "chl level t"
        assert set(rec) >= {"command", "gate", "result", "version", "seed", "settings"}
        assert rec["settings"]["tol"] == 1e-9

    def test_semi_text(self):
        code, out = run("semi", "w_k(3)", "--format", "text")
        assert code == 0 and out.strip() == "w_k(3): not semi-Clifford; generalized: yes"

    def test_depth_r_c3(self):
        code, out = run("depth", "r_c3", "--scheme", "two")
        res = records(out)[0]["result"]
        assert code == 0 and res["exact_expectation"] == 2.75 and res["exact_fraction"] == "11/4"

    def test_qft_csv(self):
        code, out = run("qft", "--n", "8", "--format", "csv")
        lines = out.strip().splitlines()
        assert lines[0] == "j,t1"
        assert [ln.split(",")[0] for ln in lines[1:8]] == [str(j) for j in range(2, 9)]
        total = float(lines[8].split(",")[1])
        assert lines[8].startswith("total") and abs(total - 27) <= 1.0

    def test_curve_csv(self):
        code, out = run("curve", "--format", "csv")
        lines = out.strip().splitlines()
        assert lines[0] == "n,k,bound" and len(lines) == 11
        assert lines[1] == "2,3,1.0"

    def test_diag(self):
        code, out = run("diag", "ccz")
        assert records(out)[0]["result"]["in_level"] is True

    def test_gsemi(self):
        code, out = run("gsemi", "w_k(4)")
        assert records(out)[0]["result"]["generalized"] is True

    def test_parse_error_exit_code(self, capsys):
        code, _ = run("level", "compose(h,")
        assert code == 2
        assert "line 1" in capsys.readouterr().err

    def test_usage_error_exit_code(self):
        assert run("level")[0] == 2
        assert run("depth", "t")[0] == 2

    def test_capability_exit_code(self):
        assert run("level", "t", "--kmax", "40")[0] == 2

    def test_scheme_inapplicable(self):
        assert run("depth", "w_k(3)", "--scheme", "one")[0] == 2

    def test_resource_cap_exit_code(self):
        assert run("depth", "r_c3", "--scheme", "two", "--state-cap", "10")[0] == 3

    def test_verify_exit_codes(self):
        code, out = run("verify", "--only", "8")
        assert code == 0
        assert records(out)[-1]["result"]["summary"]["fail"] == 0
        code, _ = run("verify", "--only", "7")
        assert code == 1

    def test_json_round_trip_and_determinism(self):
        argv = ["depth", "w_k(3)", "--scheme", "two", "--trials", "2000", "--seed", "5"]
        a, b = run(*argv)[1], run(*argv)[1]
        assert a == b
        rec = records(a)[0]
        assert json.loads(json.dumps(rec)) == rec
        assert rec["seed"] == 5 and rec["result"]["mc_mean"] is not None

    def test_timing_flag(self):
        rec = records(run("level", "s", "--timing")[1])[0]
        assert "wall_time" in rec
        assert "wall_time" not in records(run("level", "s")[1])[0]

    def test_env_settings_echoed(self):
        out = subprocess.run(
            [sys.executable, "-m", "clifford_hierarchy", "level", "t"],
            capture_output=True, text=True, env={"CHL_TOL": "1e-8", "CHL_KMAX": "6", "PATH": ""}, check=True,
        ).stdout
        rec = json.loads(out)
        assert rec["settings"]["tol"] == 1e-8 and rec["settings"]["kmax"] == 6
        assert rec["settings"]["env"] == {"CHL_TOL": "1e-8", "CHL_KMAX": "6"}
        assert rec["result"]["k_max"] == 6
