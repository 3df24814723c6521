import csv
import io
import json
import math
import subprocess
import sys

import pytest

from chabauty_metric.cli import main
from chabauty_metric.io import PointSetDocument, read_document, write_document
from chabauty_metric.sets import FiniteClosedSet, generate


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def doc(tmp_path, name, points, dim=1):
    path = tmp_path / name
    path.write_text(json.dumps({"dim": dim, "points": points}))
    return str(path)


def test_dist_examples(tmp_path):
    a = doc(tmp_path, "a.json", [[0.0]])
    b = doc(tmp_path, "b.json", [[0.5]])
    code, text = run("dist", a, b)
    assert code == 0
    rep = json.loads(text)
    assert round(rep["distance"], 6) == 0.696735
    assert rep["breakpoints"] == [0.0, 0.5]
    assert rep["segment_values"] == [0.0, 1.0, 0.5]
    assert rep["weight"] == "exp:1"

    code, text = run("dist", a, a)
    assert json.loads(text)["distance"] == 0.0

    empty = doc(tmp_path, "e.json", [])
    two = doc(tmp_path, "two.json", [[2.0]])
    code, text = run("dist", empty, two)
    assert json.loads(text)["distance"] == pytest.approx(math.exp(-2), rel=1e-15)
    assert round(json.loads(text)["distance"], 6) == 0.135335


def test_dist_options(tmp_path):
    a = doc(tmp_path, "a.json", [[0.0, 0.0]], dim=2)
    b = doc(tmp_path, "b.json", [[3.0, 4.0]], dim=2)
    code, text = run("dist", a, b, "--metric", "manhattan", "--base", "0,0", "--weight", "exp:2", "--check")
    rep = json.loads(text)
    assert code == 0 and rep["metric"] == "manhattan" and rep["weight"] == "exp:2"
    assert abs(rep["quadrature"]["value"] - rep["distance"]) <= rep["quadrature"]["error_bound"]
    # base point (3, 4) moves the breakpoints
    code, text = run("dist", a, b, "--base", "3,4")
    assert json.loads(text)["breakpoints"] == [0.0, 5.0]


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_curve_examples(tmp_path):
    a = doc(tmp_path, "a.json", [[1.25, 0.0]], dim=2)
    c = doc(tmp_path, "c.json", [[1.0, 0.0]], dim=2)
    code, text = run("curve", a, c)
    assert code == 0
    table = rows(text)
    assert table[0] == ["r_start", "r_end", "d_r"]
    assert [[float(x) for x in r] for r in table[1:]] == [[0, 1, 0], [1, 1.25, 1], [1.25, math.inf, 0.25]]

    code, text = run("curve", a, a)
    assert {float(r[2]) for r in rows(text)[1:]} == {0.0}

    zero = doc(tmp_path, "z.json", [[0.0]])
    one = doc(tmp_path, "o.json", [[1.0]])
    code, text = run("curve", zero, one)
    assert {float(r[2]) for r in rows(text)[1:]} == {1.0}


def write_sequence(directory, sets, dim=2):
    directory.mkdir()
    for i, S in enumerate(sets, start=1):
        write_document(directory / f"C_{i:04d}.json", S, dim=dim)
    return str(directory)


def test_converge_examples(tmp_path):
    limit = tmp_path / "limit.json"
    write_document(limit, generate("boundary-approach-limit"))
    seq = write_sequence(tmp_path / "ba", generate("boundary-approach", n=100))
    code, text = run("converge", seq, str(limit))
    rep = json.loads(text)
    assert code == 0 and len(rep["d_values"]) == 100
    # with defaults C_51 is 1/51 > tol from the limit and d(C_100, C) = 7.3e-3
    assert rep["verdict"] == "inconclusive"
    code, text = run("converge", seq, str(limit), "--tol", "2e-2", "--threshold", "1e-2")
    assert json.loads(text)["verdict"] == "converges"

    seq = write_sequence(tmp_path / "ba1000", generate("boundary-approach", n=1000))
    assert json.loads(run("converge", seq, str(limit))[1])["verdict"] == "converges"

    limit1 = tmp_path / "one.json"
    write_document(limit1, FiniteClosedSet([(1.0, 0.0)]))
    seq = write_sequence(tmp_path / "alt", generate("alternating", n=50))
    rep = json.loads(run("converge", seq, str(limit1))[1])
    assert rep["verdict"] == "diverges"
    assert rep["condition1"]["witness"]["point"] == [-1.0, 0.0]

    seq = write_sequence(tmp_path / "two", [FiniteClosedSet([(1.0, 0.0)])] * 2)
    assert json.loads(run("converge", seq, str(limit1))[1])["verdict"] == "inconclusive"


def test_converge_missing_index(tmp_path):
    d = tmp_path / "gap"
    d.mkdir()
    for i in (1, 2, 4):
        write_document(d / f"{i}.json", FiniteClosedSet([(1.0, 0.0)]))
    limit = tmp_path / "limit.json"
    write_document(limit, FiniteClosedSet([(1.0, 0.0)]))
    assert run("converge", str(d), str(limit))[0] == 2


def test_malformed_inputs(tmp_path):
    good = doc(tmp_path, "good.json", [[0.0]])
    bad_json = tmp_path / "bad.json"
    bad_json.write_text("{not json")
    assert run("dist", good, str(bad_json))[0] == 2
    assert run("dist", good, doc(tmp_path, "ragged.json", [[0.0, 1.0]]))[0] == 2
    assert run("dist", good, doc(tmp_path, "d2.json", [[0.0, 1.0]], dim=2))[0] == 2
    nan = tmp_path / "nan.json"
    nan.write_text('{"dim": 1, "points": [[NaN]]}')
    assert run("dist", good, str(nan))[0] == 2
    assert run("dist", good, str(tmp_path / "missing.json"))[0] == 2
    nodim = tmp_path / "nodim.json"
    nodim.write_text('{"points": []}')
    assert run("dist", good, str(nodim))[0] == 2


def test_usage_errors(tmp_path):
    good = doc(tmp_path, "good.json", [[0.0]])
    assert run("dist", good, good, "--base", "0,0")[0] == 1
    with pytest.raises(SystemExit) as exc:
        run("dist", good, good, "--weight", "gauss:1")
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        run("frobnicate")
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        run("dist", good, good, "--tol", "-1")
    assert exc.value.code == 1


def test_selftest_exit_codes():
    code, text = run("selftest", "--trials", "30")
    assert code == 0 and json.loads(text)["passed"]
    code, text = run("selftest", "--trials", "30", "--sentinel", "broken-cap")
    assert code == 3
    assert json.loads(text)["suites"]["cap"]["failed"] > 0


def test_selftest_deterministic():
    first = run("selftest", "--seed", "42", "--trials", "1000")
    second = run("selftest", "--seed", "42", "--trials", "1000")
    assert first == second and first[0] == 0


def test_round_trip(tmp_path, rng):
    for k in range(20):
        S = FiniteClosedSet(rng.normal(size=(int(rng.integers(0, 30)), 3)) * 10.0 ** rng.integers(-5, 5), dim=3)
        path = tmp_path / f"s{k}.json"
        write_document(path, S, dim=3, label=f"set {k}")
        back = read_document(path)
        assert back.label == f"set {k}" and back.dim == 3
        assert back.to_set() == S
        assert PointSetDocument.from_set(back.to_set(), dim=3).points == back.points


def test_module_entry_point(tmp_path):
    a = doc(tmp_path, "a.json", [[0.0]])
    res = subprocess.run([sys.executable, "-m", "chabauty_metric", "dist", a, a], capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["distance"] == 0.0
    res = subprocess.run([sys.executable, "-m", "chabauty_metric"], capture_output=True, text=True)
    assert res.returncode == 1
