from __future__ import annotations

import json
from fractions import Fraction

import pytest
from hypothesis import given, settings

from seqauction import Mode, TieBreakRule, solve
from seqauction.cli import main
from seqauction.formats import (
    InputError,
    bundled_names,
    load_instance,
    parse_instance,
    serialize_instance,
    to_dot,
)
from seqauction.instances import EXAMPLES, example1, example4

from conftest import instances


@settings(max_examples=60, deadline=None)
@given(instances(max_t=6))
def test_round_trip(inst):
    back, tie = parse_instance(serialize_instance(inst, TieBreakRule.constant("1/3")))
    assert back == inst
    assert tie.q == Fraction(1, 3)


def test_bundled_examples_match_constructors():
    assert bundled_names() == sorted(EXAMPLES)
    for name, make in EXAMPLES.items():
        assert load_instance(name)[0] == make()


@pytest.mark.parametrize("text,msg", [
    ('{"T": 2, "v1": [1.5, 1], "v2": [1, 0]}', "float"),
    ('{"T": 2, "v1": ["1", "2"], "v2": [1, 0]}', "weakly decreasing"),
    ('{"T": 2, "v1": ["1"], "v2": [1, 0]}', "v1 has 1"),
    ('{"T": 2, "v1": ["1", "x"], "v2": [1, 0]}', r"v1\[1\]"),
    ('{"v1": [], "v2": []}', "lacks"),
    ('[1, 2]', "object"),
    ('{"T": 1, "v1": [1], "v2": [1], "tie": "coin"}', "tie"),
    ('{"T": 1,', "JSON"),
])
def test_parse_errors(text, msg):
    with pytest.raises(InputError, match=msg):
        parse_instance(text)


def test_dot_example1():
    dot = to_dot(solve(example1()))
    assert dot.count("[label=\"(") == 6
    labels = [line.split('label="')[1].split('"')[0] for line in dot.splitlines() if "->" in line]
    assert sorted(labels) == sorted(["6", "8", "9", "8", "10", "5"])
    assert '"0,0" -> "0,1" [label="8", style="solid,bold"]' in dot
    assert '"0,0" -> "1,0" [label="6", style="dotted"]' in dot
    assert '"(0,0)--2\\n5 : 2"' in dot


def test_dot_sizes():
    assert to_dot(solve(example4(), Mode.OVERBID, TieBreakRule.buyer2())).count("[label=\"(") == 10
    from seqauction import Instance
    assert to_dot(solve(Instance.of([1], [2]))).count("[label=\"(") == 3


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_cli_solve_example1(capsys):
    code, out, _ = _run(capsys, "solve", "ex1", "--mode", "no-overbid")
    assert code == 0
    rep = json.loads(out)
    assert rep["root_utilities"] == ["5", "2"]
    assert rep["paths"][0]["prices"] == ["6", "5"]
    assert rep["welfare"]["min_path_efficiency"] == "18/19"


def test_cli_solve_example4_overbid(capsys):
    code, out, _ = _run(capsys, "solve", "ex4", "--mode", "overbid", "--tie", "buyer2")
    rep = json.loads(out)
    root = next(n for n in rep["nodes"] if n["node"] == "0,0")
    assert (root["b1"], root["b2"]) == ("103/150", "103/150")
    assert root["win_prob1"] == "0"


def test_cli_reports_are_byte_identical(capsys, tmp_path):
    a = _run(capsys, "check", "--random", "5", "--max-t", "4", "--seed", "3", "--check", "dpa,argopt")[1]
    b = _run(capsys, "check", "--random", "5", "--max-t", "4", "--seed", "3", "--check", "dpa,argopt")[1]
    assert a == b and json.loads(a)["passed"]


def test_cli_writes_files_and_figures(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("SEQAUCTION_OUT", str(tmp_path))
    assert _run(capsys, "solve", "ex1")[0] == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["ex1-no-overbid-uniform-prices.csv", "ex1-no-overbid-uniform-prices.png",
                     "ex1-no-overbid-uniform.json"]
    csv_text = (tmp_path / "ex1-no-overbid-uniform-prices.csv").read_text()
    assert csv_text.splitlines()[1:] == ["0,1,6,2,\"0,0\",1", "0,2,5,1,\"0,1\",1"]
    assert _run(capsys, "poa", "--t-list", "3,10", "--out", str(tmp_path / "poa"))[0] == 0
    assert (tmp_path / "poa" / "poa-worst-case.png").stat().st_size > 0


def test_cli_poa_table(capsys):
    code, out, _ = _run(capsys, "poa", "--family", "worst-case", "--t-list", "1,3,10")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "name,T,efficiency,decimal"
    assert lines[1] == "worst-case-T1,1,1,1.000000000000"
    assert lines[2].startswith("worst-case-T3,3,7/9,0.7777")
    assert lines[-1].startswith("# PASS")


def test_cli_poa_random_floor(capsys):
    code, out, _ = _run(capsys, "poa", "--random", "20", "--max-t", "6", "--seed", "1")
    assert code == 0
    assert all(float(row.split(",")[3]) >= 0.63212 for row in out.splitlines()[1:-1])


def test_cli_check_example_all(capsys):
    assert _run(capsys, "check", "ex1", "--check", "all")[0] == 0


def test_cli_greedy_and_export(capsys):
    code, out, _ = _run(capsys, "greedy", "ex1", "--format", "csv")
    assert code == 0 and out.startswith("node,t,f1,mu1")
    code, out, _ = _run(capsys, "export", "ex1", "--format", "csv")
    assert code == 0 and "u1" in out.splitlines()[0]


def test_cli_parameter_overrides(capsys):
    code, out, _ = _run(capsys, "solve", "ex4", "--delta", "1/50", "--epsilon", "3/100", "--mode", "overbid")
    assert code == 0
    assert json.loads(out)["instance"]["v2"][0] == "97/150"


@pytest.mark.parametrize("argv", [
    ["solve", "missing.json"],
    ["solve", "ex1", "--tie", "coin"],
    ["check", "--check", "nonsense", "ex1"],
    ["check"],
    ["solve", "ex1", "--delta", "1/10"],
    ["solve"],
    ["poa", "--t-list", "0"],
])
def test_cli_invalid_input_exit_code(capsys, argv):
    assert _run(capsys, *argv)[0] == 2


def test_cli_non_concave_file(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"T": 3, "v1": ["1", "1/2", "2/3"], "v2": ["1", "0", "0"]}')
    code, _, err = _run(capsys, "check", str(p))
    assert code == 2
    assert "v(3)" in err and "weakly decreasing" in err
