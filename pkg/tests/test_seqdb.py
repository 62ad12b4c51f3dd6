from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from totalsr.seqdb import (DuplicateItemInSequence, IndexOutOfRange, ItemAbsent, Malformed,
                           NonPositiveQuantityOrUtility, SequenceIndex, UnknownItem, build_upsl,
                           format_database, format_eutil, format_number, item_units, item_utility,
                           make_database, parse_database, parse_eutil, range_utility, remove_items,
                           sort_items)
from totalsr.toy import TOY_EUTIL


def test_toy_shape(toy):
    assert len(toy) == 4
    assert toy.items == list("abcdefgh")
    assert [len(s.itemsets) for s in toy] == [3, 5, 4, 4]
    s4 = toy.sequence(4)
    assert s4.items == ["e", "f", "c", "d", "g", "b"]
    assert s4.position("d") == 2 and s4.index("d") == 4 and s4.quantity("d") == 3


def test_item_order_is_shortlex():
    assert sort_items(["10", "b", "9", "a", "ab"]) == ["9", "a", "b", "10", "ab"]


def test_items_within_itemset_are_sorted():
    db = parse_database("b:1 a:2 -1 c:1 -1 -2\n", "a:1\nb:1\nc:1\n")
    assert db.sequence(1).items == ["a", "b", "c"]


def test_item_utility_and_sequence_total(toy):
    assert item_utility(toy, "d", 1) == 4
    assert item_units(toy, "c", 3) == 9
    assert toy.sequence_units(toy.sequence(3)) == 19
    with pytest.raises(ItemAbsent):
        item_utility(toy, "h", 1)


@pytest.mark.parametrize("db_text, eutil_text, error", [
    ("a:1 a:2 -1 -2\n", "a:1\n", DuplicateItemInSequence),
    ("a:1 -1 b:1 -1 a:1 -1 -2\n", "a:1\nb:1\n", DuplicateItemInSequence),
    ("a:1 -1 z:1 -1 -2\n", "a:1\n", UnknownItem),
    ("a:0 -1 -2\n", "a:1\n", NonPositiveQuantityOrUtility),
    ("a:1 -1 -2\n", "a:0\n", NonPositiveQuantityOrUtility),
    ("a:1 -1 -2\n", "a:-2.5\n", NonPositiveQuantityOrUtility),
    ("a:1 -1\n", "a:1\n", Malformed),
    ("a:1 -2\n", "a:1\n", Malformed),
    ("-1 -2\n", "a:1\n", Malformed),
    ("a -1 -2\n", "a:1\n", Malformed),
    ("a:x -1 -2\n", "a:1\n", Malformed),
    ("a:1 -1 -2\n", "a 1\n", Malformed),
    ("a:1 -1 -2\n", "a:1\na:2\n", Malformed),
    ("a:1 -1 -2\n", "a:1.00001\n", NonPositiveQuantityOrUtility),
])
def test_parse_errors(db_text, eutil_text, error):
    with pytest.raises(error):
        parse_database(db_text, eutil_text)


def test_malformed_reports_line():
    with pytest.raises(Malformed) as info:
        parse_database("a:1 -1 -2\n\n# note\na:1\n", "a:1\n")
    assert info.value.line == 4


def test_comments_and_blank_lines_are_skipped():
    db = parse_database("# header\n\na:1 -1 b:2 -1 -2\n", "# u\na:1\n\nb:2\n")
    assert len(db) == 1 and db.sequence(1).items == ["a", "b"]


def test_fixed_point_scale():
    assert parse_eutil(TOY_EUTIL).scale == 1
    eutil = parse_eutil("a:2.5\nb:1.25\n")
    assert eutil.scale == 10**4 and eutil.units("a") == 25000
    db = parse_database("a:3 -1 b:1 -1 -2\n", "a:2.5\nb:1.25\n")
    assert db.value(db.sequence_units(db.sequence(1))) == Fraction(35, 4)
    assert format_number(db.value(db.sequence_units(db.sequence(1)))) == "8.75"


def test_format_number():
    assert format_number(28) == "28"
    assert format_number(Fraction(7, 4)) == "1.75"
    assert format_number(Fraction(1, 3)) == "1/3"
    assert format_number(Fraction(-3, 8)) == "-0.375"


def test_upsl_of_s4(toy):
    assert build_upsl(toy.sequence(4), toy.eutil).prefix == (4, 7, 10, 13, 19, 20)
    upsl = toy.upsl(4)
    assert range_utility(upsl, 5, 5) == 6
    assert range_utility(upsl, 4, 6) == 10
    assert range_utility(upsl, 1, 6) == 20


@pytest.mark.parametrize("lo, hi", [(0, 1), (3, 2), (1, 7), (7, 7)])
def test_range_out_of_bounds(toy, lo, hi):
    with pytest.raises(IndexOutOfRange):
        range_utility(toy.upsl(4), lo, hi)


def test_remove_items_keeps_sids_and_empty_sequences():
    db = parse_database("a:1 -1 -2\nb:1 -1 a:2 c:1 -1 -2\n", "a:1\nb:1\nc:1\n")
    out = remove_items(db, ["a"])
    assert [s.sid for s in out] == [1, 2]
    assert len(out.sequence(1)) == 0
    assert out.sequence(2).items == ["b", "c"]
    assert remove_items(db, []) is db


items = st.sampled_from(list("abcdefghij") + ["10", "x1"])


@st.composite
def databases(draw):
    alphabet = draw(st.lists(items, min_size=1, max_size=8, unique=True))
    rows = []
    for _ in range(draw(st.integers(0, 5))):
        chosen = draw(st.lists(st.sampled_from(alphabet), unique=True, max_size=len(alphabet)))
        row, at = [], 0
        while at < len(chosen):
            size = draw(st.integers(1, 3))
            row.append([(i, draw(st.integers(1, 9))) for i in chosen[at:at + size]])
            at += size
        rows.append(row)
    utils = {i: draw(st.sampled_from(["1", "2", "3.5", "0.25", "7"])) for i in alphabet}
    return make_database(rows, utils)


@settings(max_examples=60, deadline=None)
@given(databases())
def test_format_parse_round_trip(db):
    again = parse_database(format_database(db), format_eutil(db.eutil))
    assert format_database(again) == format_database(db)
    assert format_eutil(again.eutil) == format_eutil(db.eutil)


@settings(max_examples=100, deadline=None)
@given(databases(), st.data())
def test_range_utility_matches_naive_sum(db, data):
    seqs = [s for s in db if len(s)]
    if not seqs:
        return
    s = data.draw(st.sampled_from(seqs))
    lo = data.draw(st.integers(1, len(s)))
    hi = data.draw(st.integers(lo, len(s)))
    flat = [qi.quantity * db.eutil.units(qi.item) for itemset in s.itemsets for qi in itemset]
    assert range_utility(db.upsl(s.sid), lo, hi) == sum(flat[lo - 1:hi])


@settings(max_examples=60, deadline=None)
@given(databases())
def test_sequence_index_agrees_with_sequence(db):
    rank = {name: r for r, name in enumerate(db.items)}
    for s in db:
        idx = SequenceIndex(s, rank, db.eutil)
        assert [db.items[r] for r in idx.items] == s.items
        assert idx.total == db.sequence_units(s)
        for k, name in enumerate(s.items):
            assert idx.pos[k] == s.position(name)
            assert idx.index_of[rank[name]] == k
            assert idx.prefix[k + 1] - idx.prefix[k] == item_units(db, name, s.sid)
        for p in range(1, len(s.itemsets) + 1):
            assert idx.pos[idx.end_of[p]] == p
            assert idx.end_of[p] + 1 == idx.n or idx.pos[idx.end_of[p] + 1] == p + 1
