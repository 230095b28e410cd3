import json

import pytest

from starktoric.cli import main


def write_spec(tmp_path, name="spec.json", **doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def test_coeffs_text(capsys):
    assert main(["coeffs", "--n", "1"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "C: 1 1 | D: 3 | all-positive: true"


def test_coeffs_json(capsys):
    assert main(["coeffs", "--n", "3", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["C"] == [1, 5, 6, 1]
    assert doc["D"] == [7, 28, 21]
    assert doc["d"] == [2, -2, 2]
    assert doc["all_positive"] and doc["cn_is_one"]


@pytest.mark.parametrize("n", ["0", "65"])
def test_coeffs_bad_n(n):
    assert main(["coeffs", "--n", n]) == 2


def test_analyze_concave(tmp_path, capsys):
    spec = write_spec(tmp_path, kind="frozen-hill", m=1, g=1, f=2)
    assert main(["analyze", spec]) == 0
    out = capsys.readouterr().out
    assert "energy regime: below-first-critical" in out
    assert out.rstrip().endswith("verdict: concave (Criterion 3)")


@pytest.mark.parametrize(
    "doc, code",
    [
        (dict(kind="frozen-hill", m=1, g=1, f=1), 3),
        (dict(kind="custom", m=1, f=1, custom_G=[[1, 1, 1]]), 2),
        (dict(kind="stark", m=1, g=0, f=1), 2),
        (dict(kind="nope", m=1, f=1), 2),
        (dict(kind="kepler", m=1), 2),
    ],
)
def test_analyze_exit_codes(tmp_path, doc, code):
    assert main(["analyze", write_spec(tmp_path, **doc)]) == code


def test_analyze_missing_file(tmp_path):
    assert main(["analyze", str(tmp_path / "absent.json")]) == 2


def test_audit_bad_n_max():
    assert main(["audit", "--n-max", "0"]) == 2


def test_curve_csv(tmp_path, capsys):
    spec = write_spec(tmp_path, kind="frozen-hill", m=1, g=-1, f=1)
    out = tmp_path / "curve.csv"
    assert main(["curve", spec, "--samples", "9", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "a,b,I1,I2,dI2_dI1,d2I2_dI12"
    assert len(lines) == 10
    for row in lines[1:]:
        a, b, I1, I2, slope, curv = map(float, row.split(","))
        assert a + b == pytest.approx(1.0, abs=1e-15)
        assert slope < 0
    assert "verdict: convex" in capsys.readouterr().out


def test_curve_json(tmp_path):
    spec = write_spec(tmp_path, kind="generalized", m=1, g=1, n=2, f=4)
    out = tmp_path / "curve.json"
    assert main(["curve", spec, "--samples", "5", "--out", str(out), "--format", "json"]) == 0
    doc = json.loads(out.read_text())
    assert doc["columns"][-1] == "d2I2_dI12"
    assert len(doc["rows"]) == 5


def test_analyze_deterministic_across_threads(tmp_path, capsys):
    spec = write_spec(tmp_path, kind="frozen-hill", m=1, g=1, f=2)
    outputs = []
    for threads in ("1", "4", "8"):
        path = tmp_path / f"c{threads}.csv"
        assert main(["analyze", spec, "--out", str(path), "--threads", threads]) == 0
        outputs.append((capsys.readouterr().out, path.read_bytes()))
    assert outputs[0] == outputs[1] == outputs[2]
