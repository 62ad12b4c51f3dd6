from __future__ import annotations

import csv
import io
import json
import subprocess
import sys

import pytest

from totalsr import cli
from totalsr.rules import Rule
from totalsr.toy import toy_database

TABLE3 = (
    "{e,f} -> {c} #SUP: 0.7500 #CONF: 1.0000 #UTIL: 34\n"
    "{e,f} -> {c},{b} #SUP: 0.5000 #CONF: 0.6667 #UTIL: 28\n"
    "{e,f},{c} -> {b} #SUP: 0.5000 #CONF: 0.6667 #UTIL: 28\n"
    "{e} -> {c} #SUP: 0.7500 #CONF: 1.0000 #UTIL: 25\n"
)


def run(*argv):
    return cli.main([str(a) for a in argv])


def test_mine_writes_table3(toy_files, tmp_path):
    db, utl = toy_files
    out = tmp_path / "rules.txt"
    assert run("mine", "--db", db, "--eutil", utl, "--minutil", 25, "--minconf", "0.5",
               "--variant", "totalsr+", "--out", out) == 0
    assert out.read_text() == TABLE3


def test_bald_same_rules_more_candidates(toy_files, tmp_path):
    db, utl = toy_files
    reports = {}
    for name in ("bald", "totalsr+"):
        out, stats = tmp_path / f"{name}.txt", tmp_path / f"{name}.json"
        assert run("mine", "--db", db, "--eutil", utl, "--minutil", 25, "--variant", name,
                   "--out", out, "--stats", stats) == 0
        assert out.read_text() == TABLE3
        reports[name] = json.loads(stats.read_text())
    assert (reports["bald"]["stats"]["candidates_evaluated"]
            > reports["totalsr+"]["stats"]["candidates_evaluated"])
    assert "wall_time" not in reports["bald"]["stats"]
    assert reports["bald"]["dataset"]["|D|"] == 4


def test_stats_with_timings(toy_files, tmp_path):
    db, utl = toy_files
    stats = tmp_path / "s.json"
    run("mine", "--db", db, "--eutil", utl, "--minutil", 25, "--out", tmp_path / "r", "--stats",
        stats, "--timings")
    assert set(json.loads(stats.read_text())["stats"]["wall_time"]) == {"preprocess", "search", "total"}


def test_mine_to_stdout(toy_files, capsys):
    db, utl = toy_files
    assert run("mine", "--db", db, "--eutil", utl, "--minutil", 25) == 0
    assert capsys.readouterr().out == TABLE3


def test_oracle_matches_mine(toy_files, tmp_path):
    db, utl = toy_files
    out = tmp_path / "o.txt"
    assert run("oracle", "--db", db, "--eutil", utl, "--minutil", 25, "--minconf", "0.5", "--out", out) == 0
    assert out.read_text() == TABLE3


def exit_code(*argv):
    """Exit status, counting argparse's own SystemExit as a return."""
    try:
        return run(*argv)
    except SystemExit as exc:
        return exc.code


@pytest.mark.parametrize("argv", [
    ["mine", "--db", "DB", "--eutil", "MISSING", "--minutil", "25"],
    ["mine", "--db", "BAD", "--eutil", "UTL", "--minutil", "25"],
    ["mine", "--db", "DB", "--eutil", "UTL", "--minutil", "0"],
    ["mine", "--db", "DB", "--eutil", "UTL", "--minutil", "25", "--minconf", "2"],
    ["mine", "--db", "DB", "--eutil", "UTL", "--minutil", "x"],
    ["mine", "--db", "DB", "--eutil", "UTL", "--minutil", "25", "--variant", "nope"],
    ["inspect", "--db", "DB", "--eutil", "UTL", "--rule", "{a} -> "],
    ["inspect", "--db", "DB", "--eutil", "UTL", "--rule", "{a,h} -> {c}", "--minutil", "25"],
    ["bench", "--db", "DB", "--eutil", "UTL", "--minutil", "25", "--variants", "nope"],
    ["gen", "--out", "GEN", "--alphabet", "2", "--avg-items", "3"],
])
def test_input_errors_exit_2(toy_files, tmp_path, argv, capsys):
    db, utl = toy_files
    bad = tmp_path / "bad.seq"
    bad.write_text("a:1 a:1 -1 -2\n")
    names = dict(DB=db, UTL=utl, MISSING=tmp_path / "none.utl", BAD=bad, GEN=tmp_path / "g.seq")
    assert exit_code(*[names.get(a, a) for a in argv]) == 2
    assert "error" in capsys.readouterr().err


def test_internal_failure_exit_1(toy_files, monkeypatch, capsys):
    db, utl = toy_files

    def boom(*args, **kwargs):
        raise RuntimeError("boom")

    monkeypatch.setattr(cli, "mine", boom)
    assert run("mine", "--db", db, "--eutil", utl, "--minutil", 25) == 1
    assert "internal error" in capsys.readouterr().err


def test_inspect_sections(toy_files, tmp_path):
    db, utl = toy_files
    out = tmp_path / "i.txt"
    assert run("inspect", "--db", db, "--eutil", utl, "--rule", "{e,f} -> {c}", "--minutil", 25,
               "--out", out) == 0
    text = out.read_text()
    assert "[RE]\nSID\tUtility\tREPEU\tPosition\tIndex\ns3\t16\t17\t3\t5\ns4\t10\t20\t2\t6\n" in text
    assert "LEPEU\t28\n" in text and "REPEU\t37\n" in text
    assert "parent\t{e} -> {c}\tleft I f\n" in text and "LERSU\t38\n" in text
    assert "RERSU\t-\n" in text


def test_inspect_unsupported_rule(toy_files, capsys):
    db, utl = toy_files
    assert run("inspect", "--db", db, "--eutil", utl, "--rule", "{b} -> {a}") == 0
    out = capsys.readouterr().out
    assert "support\t0/4\n" in out and "LEPEU\t-\n" in out


def test_gen_is_deterministic(tmp_path, capsys):
    digests = []
    for name in ("a", "b"):
        assert run("gen", "--out", tmp_path / f"{name}.seq", "--seed", 1, "--num-sequences", 100,
                   "--alphabet", 200, "--max-itemsets", 20, "--patterns", 10) == 0
        digests.append([line.split()[0] for line in capsys.readouterr().out.splitlines()])
    assert digests[0] == digests[1] and len(digests[0]) == 2
    assert (tmp_path / "a.utl").read_text() == (tmp_path / "b.utl").read_text()


def test_gen_preset_and_describe(tmp_path, capsys):
    assert run("gen", "--out", tmp_path / "s.seq", "--preset", "synthetic", "--num-sequences", 200) == 0
    capsys.readouterr()
    assert run("describe", "--db", tmp_path / "s.seq", "--eutil", tmp_path / "s.utl") == 0
    stats = json.loads(capsys.readouterr().out)
    assert stats["|D|"] == 200 and stats["max(S)"] <= 20


def test_bench_sweep(toy_files, capsys):
    db, utl = toy_files
    assert run("bench", "--db", db, "--eutil", utl, "--minutil", "25,30,35", "--minconf", "0.5",
               "--jobs", 2) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert list(rows[0]) == cli.BENCH_COLUMNS
    assert len(rows) == 21
    assert [r["variant"] for r in rows[:7]] == list(cli.VARIANTS)
    by_minutil = {}
    for r in rows:
        by_minutil.setdefault(r["minutil"], set()).add(r["htsrs"])
    assert all(len(v) == 1 for v in by_minutil.values())
    counts = [int(next(iter(by_minutil[m]))) for m in ("25", "30", "35")]
    assert counts == sorted(counts, reverse=True) and counts[0] == 4


def test_bench_single_cell(toy_files, tmp_path):
    db, utl = toy_files
    out = tmp_path / "b.csv"
    assert run("bench", "--db", db, "--eutil", utl, "--minutil", "25", "--variants", "totalsr",
               "--out", out) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 2 and lines[1].startswith("toy,totalsr,25,0.6,")


def test_module_entry_point(toy_files):
    db, utl = toy_files
    proc = subprocess.run([sys.executable, "-m", "totalsr", "mine", "--db", str(db), "--eutil", str(utl),
                           "--minutil", "25"], capture_output=True, text=True, check=True)
    assert proc.stdout == TABLE3


def test_describe_running_example(toy_files, capsys):
    db, utl = toy_files
    assert run("describe", "--db", db, "--eutil", utl) == 0
    assert json.loads(capsys.readouterr().out)["avg(S)"] == 4.0


def test_inspect_text_function():
    text = cli.inspect_text(toy_database(), Rule.parse("{e,f},{c} -> {b}"), 25)
    assert "[ART]\n{e,f},{c}: {s2}\n" in text
