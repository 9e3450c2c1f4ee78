import json
import subprocess
import sys

import jsonschema
import pytest

from hermcert.cli import EXIT_CODES, main, run
from hermcert.polys import MixedHermPoly
from hermcert.report import load_schema

QUILLEN = "sq(z0^2)+sq(z1^2)-3/2*sq(z0*z1)"
CIRCLE = "(sq(z0)-sq(z1))^2"
JET_FORM = "sq(z0^4) + (sq(z0*z2) - sq(z1^2))^2"
CHAIN = "x1=y1*y2,x2=y2 | y1=t1,y2=t1*t2"
SCHEMA = load_schema()


def report(argv):
    code, text = run(argv + ["--reproducible"])
    data = json.loads(text)
    jsonschema.validate(data, SCHEMA)
    return code, data


def test_certify_quillen_example():
    code, data = report(["certify-quillen", "--form", QUILLEN, "--mmax", "10"])
    assert code == 0 and data["verdict"] == "certified-qsn"
    assert data["minimal_exponent"] == 5 and data["signature"] == [2, 1]
    assert data["witnesses"][0]["type"] == "squares"
    assert data["diagnostics"]["min_eigenvalue_trace"][-1] == [5, 0.0]
    # rationals are serialized as num/den strings
    assert {w["weight"] for w in data["witnesses"][0]["data"]} == {"1/1", "7/2"}


def test_qsn_circle_example():
    code, data = report(["qsn-p1", "--form", CIRCLE, "--mmax", "50"])
    assert code == 2 and data["verdict"] == "certified-not-qsn"
    ob = data["witnesses"][0]["data"]
    assert ob["point"] == ["1/1", "1/1"]
    assert not ob["jet"]["passed"]
    assert ob["jet"]["lowest_block"] == [[0, 2, "1/1"], [1, 1, "2/1"], [2, 0, "1/1"]]


def _abs2(p):
    return p * p.conj()


@pytest.mark.parametrize("form", [JET_FORM, "sq(x1^4) + (sq(x1) - sq(x2^2))^2"])
def test_blowup_example(form):
    code, data = report(["blowup", "--form", form, "--chain", CHAIN, "--probe", "0,1"])
    assert code == 0
    steps = [w["data"] for w in data["witnesses"]]
    assert [s["gamma"] for s in steps] == [[0, 2], [2, 0]]
    assert steps[-1]["total_gamma"] == [4, 2]
    y1, y2 = (MixedHermPoly.variable(2, i) for i in range(2))
    p1 = _abs2(y2**2) * (_abs2(y1**2 * y2) ** 2 + (_abs2(y1) - _abs2(y2)) ** 2)
    p2 = _abs2(y1**2 * y2) ** 2 * (_abs2(y1**2 * y2) ** 2 + (1 - _abs2(y2)) ** 2)
    assert steps[0]["transform"] == p1.format(["y1", "y2"])
    assert steps[1]["transform"] == p2.format(["t1", "t2"])
    assert data["diagnostics"]["residual_zeros"] == [["0/1", "1/1"]]


def test_other_commands_validate():
    cases = [
        (["diagonalize", "--form", CIRCLE], 0),
        (["ratio-estimate", "--form", JET_FORM, "--probe", "1/100,1/10,1", "--samples", "0"], 0),
        (["ratio-estimate", "--form", JET_FORM, "--probe", "1/100,1/10,1", "--samples", "0", "--threshold", "1e6"], 2),
        (["pullback", "--form", JET_FORM, "--curve", "x^2; x*y; x*y+y^2"], 0),
        (["jet-scan", "--form", JET_FORM, "--curve", "x^2; x*y; x*y+y^2"], 2),
        (["gcurv", "--form", "normK(1)", "--probe", "1,2", "--probe", "0,1"], 0),
        (["bergman", "--mlist", "4,8", "--samples", "5"], 0),
        (["certify-quillen", "--form", CIRCLE, "--mmax", "5"], 3),
    ]
    for argv, expected in cases:
        code, data = report(argv)
        assert code == expected, argv
        assert code == EXIT_CODES[data["verdict"]]
        assert data["command"] == argv[0]


def test_ratio_estimate_exact_value():
    _, data = report(["ratio-estimate", "--form", JET_FORM, "--probe", "1/100,1/10,1", "--samples", "0"])
    assert data["diagnostics"]["sup_ratio"] == "400000001/1"


def test_pullback_matches_library(jet_form, gamma_curve):
    from hermcert.curves import pullback
    from hermcert.parser import parse

    _, data = report(["pullback", "--form", JET_FORM, "--curve", "x^2; x*y; x*y+y^2"])
    assert parse(data["witnesses"][0]["data"]).elaborate() == pullback(jet_form, gamma_curve)


def test_byte_identical_with_equal_seeds():
    argv = ["ratio-estimate", "--form", CIRCLE, "--samples", "200", "--seed", "5", "--reproducible"]
    a, b = run(argv), run(argv)
    assert a == b
    c = run(argv[:-3] + ["--seed", "6", "--reproducible"])
    assert c[1] != a[1]


def test_timing_reported_without_reproducible_flag():
    _, text = run(["diagonalize", "--form", CIRCLE])
    assert json.loads(text)["timing_ms"] >= 0


@pytest.mark.parametrize(
    "argv",
    [
        ["nonsense"],
        ["certify-quillen"],
        ["certify-quillen", "--form", "sq(z0"],
        ["certify-quillen", "--form", "sq(z0+1)"],
        ["certify-quillen", "--form", QUILLEN, "--mmax", "-1"],
        ["blowup", "--form", CIRCLE],
        ["pullback", "--form", JET_FORM],
        ["gcurv", "--form", "normK(1)"],
        ["diagonalize", "--form", CIRCLE, "--figure", "x.png"],
    ],
)
def test_usage_errors_exit_1(argv, capsys):
    code, text = run(argv)
    assert code == 1 and text == ""
    assert "error" in capsys.readouterr().err


def test_matrix_file_input(tmp_path):
    entries = [[[2, 0], [2, 0], "1", "0"], [[1, 1], [1, 1], "-3/2", "0"], [[0, 2], [0, 2], "1", "0"]]
    path = tmp_path / "m.json"
    path.write_text(json.dumps(entries))
    code, data = report(["certify-quillen", "--matrix", str(path), "--mmax", "10"])
    assert code == 0 and data["minimal_exponent"] == 5
    path.write_text("{}")
    assert run(["certify-quillen", "--matrix", str(path)])[0] == 1


def test_form_from_file(tmp_path):
    path = tmp_path / "form.txt"
    path.write_text(QUILLEN + "\n")
    assert report(["certify-quillen", "--form", str(path), "--mmax", "10"])[1]["minimal_exponent"] == 5


def test_json_out(tmp_path):
    out = tmp_path / "report.json"
    code, text = run(["qsn-p1", "--form", CIRCLE, "--json-out", str(out), "--reproducible"])
    assert code == 2 and out.read_text() == text


def test_figure(tmp_path):
    out = tmp_path / "rho.png"
    code, data = report(["bergman", "--mlist", "4,8", "--samples", "3", "--figure", str(out)])
    assert code == 0 and out.stat().st_size > 0


def test_thread_cap(monkeypatch):
    monkeypatch.setenv("HERMCERT_THREADS", "3")
    code, data = report(["certify-quillen", "--form", QUILLEN, "--mmax", "10"])
    assert code == 0 and data["minimal_exponent"] == 5
    monkeypatch.setenv("HERMCERT_THREADS", "zero")
    assert run(["certify-quillen", "--form", QUILLEN])[0] == 1


def test_main_writes_stdout_only(capsys):
    assert main(["diagonalize", "--form", CIRCLE, "--reproducible"]) == 0
    captured = capsys.readouterr()
    json.loads(captured.out)
    assert captured.err == ""


def test_console_entry_point_streams():
    proc = subprocess.run(
        [sys.executable, "-m", "hermcert.cli", "qsn-p1", "--form", "sq(z0", "--reproducible"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 1 and proc.stdout == "" and "position 5" in proc.stderr
