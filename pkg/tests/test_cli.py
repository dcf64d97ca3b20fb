import csv
import io
import json
import math

import pytest

from bestreply import bounds
from bestreply.cli import BOUNDS_COLUMNS, main
from bestreply.model import generate_random, parse_instance, serialize
from bestreply.smoothness import CSV_COLUMNS

FORCED = {
    "mode": "explicit",
    "resources": [{"id": "r1", "coeffs": [0, 1]}, {"id": "r2", "coeffs": [0, 1]}],
    "requests": [{"weight": 1, "allocations": [["r1"], ["r2"]]}, {"weight": 1, "allocations": [["r1"]]}],
}


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), stdout=out)
    return code, out.getvalue()


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_bounds_d1():
    code, text = run("bounds", "--d-min", "1", "--d-max", "1")
    assert code == 0
    assert text.splitlines()[0] == ",".join(BOUNDS_COLUMNS)
    (row,) = rows(text)
    assert float(row["log10_upper_unweighted"]) == pytest.approx(math.log10(4.24))
    assert row["xi"] == "" and row["mu"] == ""


def test_bounds_d2_xi():
    (row,) = rows(run("bounds", "--d-min", "2", "--d-max", "2")[1])
    x = float(row["xi"])
    assert x == bounds.xi(2)
    lo, hi = bounds.xi_interval_tight(2)
    assert lo <= x <= hi


def test_bounds_d100_finite():
    (row,) = rows(run("bounds", "--d-min", "100", "--d-max", "100")[1])
    assert all(math.isfinite(float(row[c])) for c in BOUNDS_COLUMNS)


@pytest.mark.parametrize("lo,hi", [(0, 3), (5, 4), (1, 201)])
def test_bounds_bad_range(lo, hi):
    assert run("bounds", "--d-min", str(lo), "--d-max", str(hi))[0] == 2


def test_bounds_to_file_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run("bounds", "--d-max", "20", "--out", str(a))
    run("bounds", "--d-max", "20", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()
    assert b"\r" not in a.read_bytes()


def test_simulate_forced(tmp_path):
    f = tmp_path / "forced.json"
    f.write_text(json.dumps(FORCED))
    code, text = run("simulate", str(f), "--exact", "exhaustive", "--out", str(tmp_path / "r.csv"))
    assert code == 0
    assert "ratio 2.0" in text and "within_bound true" in text
    (row,) = rows((tmp_path / "r.csv").read_text())
    assert float(row["ratio"]) == 2.0


def test_simulate_symmetric(tmp_path):
    doc = json.loads(json.dumps(FORCED))
    doc["requests"][1]["allocations"] = [["r1"], ["r2"]]
    f = tmp_path / "sym.json"
    f.write_text(json.dumps(doc))
    code, text = run("simulate", str(f), "--tiebreak", "lex")
    assert code == 0 and "ratio 1.0" in text


def test_simulate_malformed(tmp_path, capsys):
    f = tmp_path / "bad.json"
    f.write_text('{"mode": "explicit",\n "resources": [}')
    assert run("simulate", str(f))[0] == 2
    assert "line 2, column" in capsys.readouterr().err


def test_simulate_missing_file(tmp_path):
    assert run("simulate", str(tmp_path / "none.json"))[0] == 2


def test_verify_unweighted_passes():
    code, text = run("verify", "unweighted", "--d-min", "2", "--d-max", "8", "--grid", "50")
    assert code == 0
    assert text == ",".join(CSV_COLUMNS) + "\n"


def test_verify_mu_override_fails():
    code, text = run("verify", "unweighted", "--d", "2", "--mu-override", "0.2")
    assert code == 1
    assert len(rows(text)) > 0


def test_verify_lemmas():
    assert run("verify", "lemmas", "--grid", "200")[0] == 0


def test_verify_weighted_and_gmax():
    assert run("verify", "weighted", "--d-min", "1", "--d-max", "4")[0] == 0
    assert run("verify", "g-max", "--d", "3")[0] == 0
    assert run("verify", "weighted", "--d", "2", "--lambda-override", "1.0")[0] == 1


@pytest.mark.parametrize(
    "argv",
    [
        ("verify", "unweighted", "--d", "1"),
        ("verify", "lemmas", "--grid", "10"),
        ("verify", "g-max", "--d", "2", "--samples", "10"),
        ("verify", "unweighted", "--d", "2", "--lambda-override", "-1"),
        ("verify", "bogus"),
        ("search", "--iters", "0"),
    ],
)
def test_usage_errors(argv):
    assert run(*argv)[0] == 2


def test_search_round_trip(tmp_path):
    best, t1, t2 = tmp_path / "best.json", tmp_path / "t1.csv", tmp_path / "t2.csv"
    assert run("search", "--seed", "4", "--iters", "200", "--out", str(best), "--trace", str(t1))[0] == 0
    run("search", "--seed", "4", "--iters", "200", "--trace", str(t2))
    assert t1.read_bytes() == t2.read_bytes()
    reported = float(t1.read_text().splitlines()[-1].split(",")[-1])
    code, text = run("simulate", str(best))
    ratio = float(next(line for line in text.splitlines() if line.startswith("ratio")).split()[1])
    assert ratio == pytest.approx(reported, rel=1e-12)
    assert code == 0
