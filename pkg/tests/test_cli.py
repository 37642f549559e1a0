import csv
import io
import json

import pytest

from stonecover.cli import main


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        p = tmp_path / name
        p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
        return str(p)
    return write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_validate(capsys, files):
    ok = files("ok.json", {"dist": [[0, 1], [1, 0]]})
    assert run(capsys, "validate", ok)[0] == 0
    bad = files("bad.json", {"dist": [[0, 1, 3], [1, 0, 1], [3, 1, 0]]})
    code, out, _ = run(capsys, "validate", bad)
    assert code == 2 and json.loads(out)["witness"] == [0, 1, 2]
    assert run(capsys, "validate", "/nonexistent/space.json")[0] == 1
    garbage = files("g.json", "{not json")
    assert run(capsys, "validate", garbage)[0] == 1


def test_delta_with_oracle(capsys):
    code, out, _ = run(capsys, "delta", "--gen", "random-integer", "--n", "4", "--seed", "9", "--kind", "both", "--oracle")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows and all(r["value"] == r["oracle"] for r in rows)


def test_delta_equilateral_step_and_inf(capsys, files):
    eq = files("eq.json", {"dist": [[0, 1, 1], [1, 0, 1], [1, 1, 0]]})
    code, out, _ = run(capsys, "delta", eq, "--kind", "coarse", "--grid", "0.5,1,1.5")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["value"] for r in rows] == ["0.0", "0.0", "1.0"]
    code, out, _ = run(capsys, "delta", eq, "--kind", "uniform", "--grid", "1,2")
    assert [r["value"] for r in csv.DictReader(io.StringIO(out))] == ["inf", "inf"]


def test_cover_kinds(capsys):
    for argv in (
        ["--gen", "lp-point-cloud", "--n", "10", "--kind", "clique", "--R", "0.4"],
        ["--gen", "lp-point-cloud", "--n", "10", "--kind", "greedy", "--r", "0.8", "--eps", "0.1"],
        ["--gen", "weighted-tree", "--n", "9", "--kind", "tree", "--R", "0.7", "--grid-n", "2"],
        ["--kind", "linf-grid", "--grid-n", "1", "--query", "[0.5]"],
        ["--kind", "c0-grid", "--R", "1", "--grid-n", "2", "--point", '{"a": 3}'],
    ):
        code, out, _ = run(capsys, "cover", *argv)
        assert code == 0 and json.loads(out)["pass"] is True, argv
    code, out, _ = run(capsys, "cover", "--kind", "linf-grid", "--grid-n", "1", "--query", "[0.5]")
    assert json.loads(out)["multiplicity"] == 3


def test_cover_missing_params(capsys):
    assert run(capsys, "cover", "--gen", "random-integer", "--kind", "greedy", "--r", "1")[0] == 1


def test_embed(capsys, files, tmp_path):
    out_path = tmp_path / "e.json"
    code, _, _ = run(capsys, "embed", "--gen", "random-integer", "--n", "20", "--seed", "3", "-o", str(out_path))
    data = json.loads(out_path.read_text())
    assert code == 0 and data["report"]["pass"] and set(data) == {"K", "L", "config", "points", "report"}
    code, _, err = run(capsys, "embed", "--gen", "random-integer", "--n", "5", "--lambda", "0")
    assert code == 2 and "BadParams" in err
    one = files("one.json", {"dist": [[0]]})
    code, out, _ = run(capsys, "embed", one)
    assert code == 0 and json.loads(out)["points"] == {"0": {}}
    code, out, _ = run(capsys, "embed", "--gen", "lp-point-cloud", "--n", "8", "--scales=-6..3", "--t", "2")
    assert code == 0 and json.loads(out)["config"]["scale_range"] == [-6, 3]


def test_embed_is_deterministic(capsys):
    argv = ["embed", "--gen", "lp-point-cloud", "--n", "12", "--seed", "5"]
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_clique_cap_exit_code(capsys, monkeypatch):
    monkeypatch.setenv("STONE_CLIQUE_CAP", "2")
    code, _, err = run(capsys, "cover", "--gen", "lp-point-cloud", "--n", "10", "--kind", "clique", "--R", "0.5")
    assert code == 3 and "CliqueCapExceeded" in err


def test_report(capsys, files):
    c1 = files("a.csv", "kind,argument,value\ncoarse,1.0,0.0\n")
    c2 = files("b.csv", "kind,argument,value\ncoarse,2.0,1.0\n")
    code, out, _ = run(capsys, "report", c1)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 1 and rows[0]["value"] == "0.0"
    code, out, _ = run(capsys, "report", c1, c2)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["source"] for r in rows] == [c1, c2]
    assert run(capsys, "report")[0] == 1


def test_delta_csv_round_trip(capsys, files):
    from stonecover.moduli import curves_from_csv, curves_to_csv
    sp = files("s.json", {"points": [[0], [1], [3]], "p": 2})
    _, out, _ = run(capsys, "delta", sp, "--kind", "both")
    assert curves_to_csv(curves_from_csv(out)) == out
