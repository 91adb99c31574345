import json
import math
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from misotool import cli, config, jsonio
from misotool import generators as gen
from misotool import linalg as la
from misotool.errors import ParseError
from misotool.exact import gq

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, name, matrix):
    path = tmp_path / name
    path.write_text(jsonio.emit_matrix(matrix))
    return str(path)


# ---- parsing -------------------------------------------------------------

def test_parse_identity():
    m = jsonio.parse_matrix('{"n":2,"data":[[1,0],[0,0],[0,0],[1,0]]}')
    assert np.array_equal(m, np.eye(2))
    e = jsonio.parse_matrix('{"n":2,"data":[[1,0],[0,0],[0,0],[1,0]]}', exact=True)
    assert e[0, 0] == gq(1) and la.is_exact(e)


@pytest.mark.parametrize("text", [
    '{"n":2,"data":[[1,0]]}',
    '{"n":1,"data":[["a",0]]}',
    '{"n":1,"data":[[NaN,0]]}',
    '{"n":1,"data":[[Infinity,0]]}',
    '{"n":1,"data":[[true,0]]}',
    '{"n":1,"data":[[1,0,0]]}',
    '{"n":0,"data":[]}',
    '{"n":1.5,"data":[[1,0]]}',
    '{"data":[[1,0]]}',
    '{"n":1,"data":[[1,0]]',
    '[1, 2]',
])
def test_parse_rejects(text):
    with pytest.raises(ParseError):
        jsonio.parse_matrix(text)


def test_parse_vector_and_missing_file(tmp_path):
    v = jsonio.parse_vector('{"n":3,"data":[[1,0],[0,1],[2,-1]]}')
    assert np.array_equal(v, [1, 1j, 2 - 1j])
    with pytest.raises(ParseError):
        jsonio.parse_vector('{"n":3,"data":[[1,0]]}')
    with pytest.raises(ParseError):
        jsonio.parse_matrix(str(tmp_path / "missing.json"))


def test_emit_canonical_form():
    text = jsonio.emit_matrix(np.array([[0.1, -0.0], [1j, 2]]))
    assert text == ('{"data": [[0.10000000000000001, 0], [0, 0], [0, 1], [2, 0]], '
                    '"n": 2}\n')
    assert json.loads(text) == json.loads(json.dumps(json.loads(text), sort_keys=True))


@given(st.integers(1, 4).flatmap(
    lambda n: st.lists(st.tuples(finite, finite), min_size=n * n, max_size=n * n)))
def test_round_trip_is_byte_identical(pairs):
    n = math.isqrt(len(pairs))
    m = np.array([complex(a, b) for a, b in pairs]).reshape(n, n)
    text = jsonio.emit_matrix(m)
    assert jsonio.emit_matrix(jsonio.parse_matrix(text)) == text
    assert jsonio.emit_matrix(jsonio.parse_matrix(text, exact=True)) == text


def test_vector_round_trip():
    text = jsonio.emit_vector(np.array([1.5, -2j]))
    assert jsonio.emit_vector(jsonio.parse_vector(text)) == text


# ---- tolerance configuration --------------------------------------------

def test_env_tolerance(monkeypatch):
    assert config.default_tol() == 1e-8
    monkeypatch.setenv("MISOTOOL_TOL", "1e-5")
    assert config.default_tol() == 1e-5
    assert config.resolve_tol(None) == 1e-5
    assert config.resolve_tol(1e-3) == 1e-3
    monkeypatch.setenv("MISOTOOL_TOL", "-1")
    with pytest.raises(ValueError):
        config.default_tol()


def test_env_tolerance_reaches_cli_and_flag_wins(tmp_path, monkeypatch, capsys):
    # rotation rounded to 6 digits is an isometry only at a loose tolerance
    t = np.round(gen.rotation(0.7), 6)
    path = write(tmp_path, "r.json", t)
    code, out, _ = run(["analyze", "--matrix", path, "--max-order", "1"], capsys)
    assert json.loads(out)["results"]["strict_order"] is None
    monkeypatch.setenv("MISOTOOL_TOL", "1e-4")
    code, out, _ = run(["analyze", "--matrix", path, "--max-order", "1"], capsys)
    assert json.loads(out)["results"]["strict_order"] == 1
    code, out, _ = run(["analyze", "--matrix", path, "--max-order", "1", "--tol", "1e-9"],
                       capsys)
    assert json.loads(out)["inputs"]["tol"] == 1e-9
    assert json.loads(out)["results"]["strict_order"] is None


# ---- CLI -----------------------------------------------------------------

def test_analyze_identity(tmp_path, capsys):
    code, out, err = run(["analyze", "--matrix", write(tmp_path, "id.json", np.eye(2)),
                          "--max-order", "3"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["verdict"] == "pass"
    assert doc["results"]["strict_order"] == 1
    assert set(doc) == {"command", "inputs", "results", "residuals", "verdict", "elapsed_ms"}
    assert out.endswith("\n") and out.count("\n") == 1
    assert "strict 1-isometry" in err


def test_analyze_counterexample_reports_no_order(tmp_path, capsys):
    path = write(tmp_path, "ce.json", gen.counterexample_3x3())
    for extra in ([], ["--exact"]):
        code, out, err = run(["analyze", "--matrix", path, "--max-order", "3", *extra], capsys)
        doc = json.loads(out)
        assert code == 0
        assert doc["results"]["strict_order"] is None
        assert "not an m-isometry" in doc["results"]["summary"]


def test_analyze_exact_shift(tmp_path, capsys):
    path = write(tmp_path, "s.json", np.array([[1, 1], [0, 1]]))
    code, out, _ = run(["analyze", "--matrix", path, "--exact"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["results"]["strict_order"] == 3 and doc["results"]["exact"]
    assert doc["residuals"][0]["value"] == 0


def test_decompose(tmp_path, capsys):
    spec = gen.BuilderSpec(4, ((0.4, 3), (2.0, 1)), 3, seed=1, mix=True)
    a, q = gen.strict_isometry_parts(spec)
    code, out, _ = run(["decompose", "--matrix", write(tmp_path, "b.json", a + q)], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["verdict"] == "pass"
    assert doc["results"]["nilpotency_order"] == 3 and doc["results"]["strict_order"] == 5
    a_hat = jsonio.parse_matrix(json.dumps(doc["results"]["A"]))
    assert la.frobenius_norm(a_hat - a) < 1e-7


def test_decompose_counterexample_exits_1(tmp_path, capsys):
    code, out, err = run(["decompose", "--matrix",
                          write(tmp_path, "ce.json", gen.counterexample_3x3())], capsys)
    assert code == 1
    assert json.loads(out)["results"]["error"] == "ClassificationError"
    assert "ClassificationError" in err


def test_decompose_exact_exits_2(tmp_path, capsys):
    code, _, _ = run(["decompose", "--matrix", write(tmp_path, "i.json", np.eye(2)),
                      "--exact"], capsys)
    assert code == 2


@pytest.mark.parametrize("argv, check", [
    (["--kind", "rotation", "--theta", str(math.pi / 2)],
     lambda m: np.allclose(m, [[0, -1], [1, 0]], atol=1e-15)),
    (["--kind", "rotation", "--theta", str(math.pi), "--exact"],
     lambda m: np.array_equal(m, -np.eye(2))),
    (["--kind", "reflection", "--theta", "0"], lambda m: np.array_equal(m, np.diag([1, -1]))),
    (["--kind", "nilpotent", "--nil-kind", "Qk", "--k-param", "2"],
     lambda m: np.array_equal(m, [[1, 2], [-0.5, -1]])),
    (["--kind", "paper-an-qj", "--n", "4", "--j", "3"],
     lambda m: m[0, 0] == -1 and m[1, 2] == 1 and m[2, 3] == 1),
    (["--kind", "counterexample"], lambda m: m[1, 1] == 2),
    (["--kind", "builder", "--blocks", "0:2,3.0:1", "--k", "2", "--seed", "3"],
     lambda m: m.shape == (3, 3) and m[0, 1] != 0),
])
def test_generate(argv, check, capsys):
    code, out, _ = run(["generate", *argv], capsys)
    assert code == 0
    assert check(jsonio.parse_matrix(out))
    assert jsonio.emit_matrix(jsonio.parse_matrix(out)) == out


def test_generate_domain_errors_exit_2(capsys):
    assert run(["generate", "--kind", "builder", "--blocks", "0:2", "--k", "3"], capsys)[0] == 2
    assert run(["generate", "--kind", "rotation", "--theta", "1", "--exact"], capsys)[0] == 2
    assert run(["generate", "--kind", "paper-an-qj", "--n", "3", "--j", "5"], capsys)[0] == 2


def test_generate_builder_is_seeded(capsys):
    argv = ["generate", "--kind", "builder", "--blocks", "0:3", "--k", "3", "--mix"]
    assert run(argv, capsys)[1] == run(argv, capsys)[1]


def test_lift(tmp_path, capsys):
    t = write(tmp_path, "t.json", np.array([[1, 1], [0, 1]]))
    x0 = tmp_path / "x0.json"
    x0.write_text(jsonio.emit_vector(np.array([0, 1])))
    for extra in ([], ["--exact"]):
        code, out, _ = run(["lift", "--matrix", t, "--x0", str(x0), "--k", "1", "--m", "3",
                            "--trials", "10", *extra], capsys)
        doc = json.loads(out)
        assert code == 0 and doc["verdict"] == "pass"
        assert doc["inputs"]["seed"] == 42
        assert doc["results"]["strictness_witness"] == pytest.approx(1 / 3)
        assert len(doc["results"]["beta_residuals"]) == 10


def test_lift_precondition_failure_exits_1(tmp_path, capsys):
    t = write(tmp_path, "ce.json", gen.counterexample_3x3())
    code, out, _ = run(["lift", "--matrix", t, "--x0", '{"n":3,"data":[[1,0],[1,0],[0,0]]}',
                        "--k", "1", "--m", "3"], capsys)
    doc = json.loads(out)
    assert code == 1 and doc["verdict"] == "error"
    assert doc["results"]["quantity"] == "compressed_defect"


def test_volume(tmp_path, capsys):
    path = write(tmp_path, "ce.json", gen.counterexample_3x3())
    code, out, _ = run(["volume", "--matrix", path, "--k", "3", "--trials", "20"], capsys)
    assert code == 0 and json.loads(out)["results"]["preserved"]
    code, out, _ = run(["volume", "--matrix", path, "--k", "1", "--trials", "20"], capsys)
    assert code == 1 and json.loads(out)["verdict"] == "fail"


def test_bad_arguments_exit_2(tmp_path, capsys):
    assert run([], capsys)[0] == 2
    assert run(["analyze"], capsys)[0] == 2
    assert run(["analyze", "--matrix", str(tmp_path / "none.json")], capsys)[0] == 2
    assert run(["volume", "--matrix", '{"n":1,"data":[[1,0]]}', "--k", "x"], capsys)[0] == 2


@pytest.mark.parametrize("corrupt", [
    lambda s: s[: len(s) // 2],
    lambda s: s.replace("[2, 0]", "[NaN, 0]"),
    lambda s: s.replace('"n": 3', '"n": 4'),
    lambda s: s.replace("[2, 0]", '["2", 0]'),
    lambda s: "",
])
@pytest.mark.parametrize("command", ["analyze", "decompose", "volume", "lift"])
def test_corrupted_input_exits_2(tmp_path, capsys, corrupt, command):
    good = jsonio.emit_matrix(gen.counterexample_3x3())
    path = tmp_path / "bad.json"
    path.write_text(corrupt(good))
    extra = {"volume": ["--k", "3"],
             "lift": ["--k", "1", "--m", "1", "--x0", '{"n":3,"data":[[1,0],[0,0],[0,0]]}']}
    code, out, _ = run([command, "--matrix", str(path), *extra.get(command, [])], capsys)
    assert code == 2
    assert json.loads(out)["verdict"] == "error"


def test_convergence_failure_exits_3(tmp_path, capsys, monkeypatch):
    def boom(_):
        raise np.linalg.LinAlgError("no convergence")
    monkeypatch.setattr(np.linalg, "eigvals", boom)
    code, _, _ = run(["decompose", "--matrix", write(tmp_path, "i.json", np.eye(2))], capsys)
    assert code == 3


def test_suite_subset(capsys):
    code, out, err = run(["suite", "--seed", "7", "--only", "5", "8"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["verdict"] == "pass"
    assert [r["number"] for r in doc["results"]] == [5, 8]
    assert err.count("[PASS]") == 2


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "misotool.cli", "generate", "--kind",
                           "counterexample"], capture_output=True, text=True, check=True)
    assert np.array_equal(jsonio.parse_matrix(proc.stdout), gen.counterexample_3x3())
