from __future__ import annotations

import pytest

from totalsr.miner import prune_unpromising_items
from totalsr.toy import TOY_DB, TOY_EUTIL, toy_database


@pytest.fixture
def toy():
    return toy_database()


@pytest.fixture
def toy_pruned():
    """The toy database after item pruning at minutil 25 (drops h)."""
    db, removed = prune_unpromising_items(toy_database(), 25)
    assert removed == ["h"]
    return db


@pytest.fixture
def toy_files(tmp_path):
    db = tmp_path / "toy.seq"
    utl = tmp_path / "toy.utl"
    db.write_text(TOY_DB)
    utl.write_text(TOY_EUTIL)
    return db, utl


_ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line per acceptance criterion and assert it."""
    lines = request.config.stash.setdefault(_ACCEPTANCE_KEY, [])

    def report(number: int, ok: bool, detail: str) -> None:
        line = f"ACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} - {detail}"
        print(line)
        lines.append(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
