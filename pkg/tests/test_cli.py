"""Command surface: instance grammar, subcommands, exit codes, JSON output."""

import json
import random

import pytest

from conftest import fig1_vass
from vassreach import cli
from vassreach.vass import Configuration

FIG1_DOC = """\
# three counters, one state, two loops
dim 3
state p
trans a p p 1 0 -1
trans b p p 0 1 1
query p 0 0 0 -> p 1 1 0
"""


def run_json(capsys, argv):
    code = cli.run_command(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


@pytest.fixture
def fig1_file(tmp_path):
    path = tmp_path / "fig1.vass"
    path.write_text(FIG1_DOC)
    return str(path)


def test_parse_running_example():
    g, (src, tgt) = cli.parse(FIG1_DOC)
    assert g.dimension == 3
    assert g.states == ("p",)
    assert [t.tid for t in g.transitions] == ["a", "b"]
    assert g.transitions[0].effect == (1, 0, -1)
    assert src == Configuration("p", (0, 0, 0))
    assert tgt == Configuration("p", (1, 1, 0))


def test_parse_errors():
    with pytest.raises(cli.ParseError, match="missing dim"):
        cli.parse("")
    with pytest.raises(cli.ParseError, match="line 3.*3 integers"):
        cli.parse("dim 3\nstate p\ntrans a p p 1 0\nquery p 0 0 0 -> p 0 0 0")
    with pytest.raises(cli.ParseError, match="unknown state"):
        cli.parse("dim 1\nstate p\ntrans a p q 1\nquery p 0 -> p 0")
    with pytest.raises(cli.ParseError, match="nonnegative"):
        cli.parse("dim 1\nstate p\nquery p -1 -> p 0")
    with pytest.raises(cli.ParseError, match="duplicate dim"):
        cli.parse("dim 1\ndim 1\nstate p\nquery p 0 -> p 0")
    with pytest.raises(cli.ParseError, match="missing query"):
        cli.parse("dim 1\nstate p")


def test_parse_render_identity():
    g, query = cli.parse(FIG1_DOC)
    text = cli.render(g, query)
    g2, query2 = cli.parse(text)
    assert g2 == g and query2 == query
    assert cli.render(g2, query2) == text


def test_reach_engine_both_running_example(capsys, fig1_file):
    code, payload = run_json(capsys, ["reach", "--engine", "both", fig1_file])
    assert code == 0
    assert payload["reachable"] is True
    assert payload["witness"] == ["b", "a"]
    assert payload["agree"] is True
    assert set(payload["engines"]) == {"klmst", "oracle"}


def test_reach_unreachable(capsys, tmp_path):
    doc = FIG1_DOC.replace("query p 0 0 0 -> p 1 1 0",
                           "query p 0 0 0 -> p 1 0 0")
    path = tmp_path / "un.vass"
    path.write_text(doc)
    code, payload = run_json(capsys, ["reach", "--engine", "both", str(path)])
    assert code == 0
    assert payload["reachable"] is False and "witness" not in payload


def test_reach_unknown_exit_code(capsys, tmp_path):
    # a tiny branch budget leaves the klmst engine undecided
    doc = ("dim 3\nstate p\nstate q\n"
           "trans a p p 1 0 -1\ntrans b p p 0 1 1\n"
           "trans c p q 0 0 0\ntrans d q p 0 0 0\n"
           "query p 0 0 0 -> q 2 1 0\n")
    path = tmp_path / "hard.vass"
    path.write_text(doc)
    code, payload = run_json(
        capsys,
        ["reach", "--engine", "klmst", "--branch-budget", "0", str(path)],
    )
    if payload["reachable"] == "unknown":
        assert code == 2
    else:
        assert code == 0


def test_analyze_running_example(capsys, fig1_file):
    code, payload = run_json(capsys, ["analyze", fig1_file])
    assert code == 0
    assert payload["geometric_dimension"] == 2
    assert payload["rank"] == [0]
    assert payload["rank_full"] == [0, 2, 0, 0]
    assert payload["dimension"] == 3 and payload["size"] == 9
    assert payload["strongly_connected"] is True
    assert payload["fixed_coordinates"] == []
    assert payload["sccs"] == [["p"]]


def test_flatten_command(capsys, fig1_file):
    code, payload = run_json(capsys, ["flatten", fig1_file])
    assert code == 0
    assert payload["status"] == "found"
    assert payload["witness"] == ["b", "a"]


def test_bound_command(capsys, fig1_file):
    code, payload = run_json(capsys, ["bound", fig1_file])
    assert code == 2
    assert payload["bound"] == "budget-exceeded"
    assert payload["expression"].startswith("ell(")


def test_oracle_command_and_replay(capsys, fig1_file):
    code, payload = run_json(capsys, ["oracle", fig1_file])
    assert code == 0
    assert payload["verdict"] == "yes"
    assert payload["witness"] == ["b", "a"]
    assert payload["coverable"] is True

    code2, payload2 = run_json(
        capsys, ["oracle", "--replay", "b,a", fig1_file]
    )
    assert code2 == 0 and payload2 == {"replayed": True}

    code3, payload3 = run_json(
        capsys, ["oracle", "--replay", "a,b", fig1_file]
    )
    assert code3 == 0 and payload3 == {"replayed": False}

    code4, payload4 = run_json(
        capsys, ["oracle", "--replay", "zz", fig1_file]
    )
    assert code4 == 1 and "error" in payload4


def test_usage_and_parse_failures(capsys, tmp_path):
    assert cli.run_command(["reach"]) == 1  # missing instance argument
    capsys.readouterr()

    bad = tmp_path / "bad.vass"
    bad.write_text("dim 1\nstate p\ntrans a p p 1 2\nquery p 0 -> p 0\n")
    code, payload = run_json(capsys, ["reach", str(bad)])
    assert code == 1 and "error" in payload

    code2, payload2 = run_json(capsys, ["reach", str(tmp_path / "nope")])
    assert code2 == 1 and "error" in payload2


def test_trace_file_written(capsys, fig1_file, tmp_path):
    trace = tmp_path / "trace.jsonl"
    code, _ = run_json(
        capsys, ["reach", "--trace", str(trace), fig1_file]
    )
    assert code == 0
    records = [json.loads(line) for line in trace.read_text().splitlines()]
    assert records and all("step" in r for r in records)


def test_render_roundtrip_random():
    from conftest import random_instance

    rng = random.Random(7)
    for _ in range(30):
        g, src, tgt = random_instance(rng)
        text = cli.render(g, (src, tgt))
        g2, (s2, t2) = cli.parse(text)
        assert g2 == g and (s2, t2) == (src, tgt)
