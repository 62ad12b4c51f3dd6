"""Reference (non-incremental) utility upper bounds for rule expansion.

These recompute everything from the database for one rule at a time. The
miner carries the same quantities incrementally in its tables; the functions
here are the yardstick those tables are tested against.

Extendable-item utilities are taken as prefix-sum ranges over flat indices
(first extendable item through last extendable item for the antecedent side,
candidate item through end of sequence for the consequent side).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, NamedTuple

from .rules import Rule, _itemset_sets, _match, occurs_in
from .seqdb import QSequence, SequenceDatabase, item_key, range_utility

Side = Literal["left", "right"]
Mode = Literal["I", "S"]


class ExpansionKind(NamedTuple):
    side: Side
    mode: Mode
    item: str


class Extendable(NamedTuple):
    item: str
    index: int
    mode: Mode


@dataclass(frozen=True)
class BoundReport:
    per_sequence: dict[int, object]
    total: object


def extend(rule: Rule, ext: ExpansionKind) -> Rule:
    """Apply a left or right I-/S-expansion to ``rule``."""
    if ext.item in rule.antecedent_items or ext.item in rule.consequent_items:
        raise ValueError(f"{ext.item!r} already in {rule}")
    side = list(rule.antecedent if ext.side == "left" else rule.consequent)
    if ext.mode == "I":
        last = side[-1]
        if item_key(ext.item) <= item_key(last[-1]):
            raise ValueError(f"I-expansion item {ext.item!r} must follow every item of {last}")
        side[-1] = last + (ext.item,)
    else:
        side.append((ext.item,))
    if ext.side == "left":
        return Rule(tuple(side), rule.consequent)
    return Rule(rule.antecedent, tuple(side))


def _report(db: SequenceDatabase, per_units: dict[int, int]) -> BoundReport:
    return BoundReport({sid: db.value(v) for sid, v in per_units.items()},
                       db.value(sum(per_units.values())))


def seu_item(db: SequenceDatabase, item: str):
    return db.value(sum(db.sequence_units(s) for s in db if item in s))


def seu_rule(db: SequenceDatabase, rule: Rule):
    return db.value(sum(db.sequence_units(s) for s in db if occurs_in(rule, s) is not None))


def left_extendable_items(rule: Rule, seq: QSequence) -> list[Extendable]:
    """Items that can join the antecedent in ``seq``, in flat-index order."""
    sets = _itemset_sets(seq)
    xpos = _match(rule.antecedent, sets, 0)
    if xpos is None:
        raise ValueError(f"antecedent of {rule} does not occur in sequence {seq.sid}")
    alpha = xpos[-1] + 1
    occ = occurs_in(rule, seq)
    beta = occ.beta if occ is not None else len(seq.itemsets) + 1
    used = rule.antecedent_items | rule.consequent_items
    last_key = item_key(rule.antecedent[-1][-1])
    out = []
    for item in seq.items:
        if item in used:
            continue
        p = seq.position(item)
        if p == alpha and item_key(item) > last_key:
            out.append(Extendable(item, seq.index(item), "I"))
        elif alpha < p < beta:
            out.append(Extendable(item, seq.index(item), "S"))
    return out


def right_extendable_items(rule: Rule, seq: QSequence) -> list[Extendable]:
    """Items that can join the consequent in ``seq``, in flat-index order."""
    occ = occurs_in(rule, seq)
    if occ is None:
        raise ValueError(f"{rule} does not occur in sequence {seq.sid}")
    used = rule.antecedent_items | rule.consequent_items
    last_key = item_key(rule.consequent[-1][-1])
    out = []
    for item in seq.items:
        if item in used:
            continue
        p = seq.position(item)
        if p == occ.gamma and item_key(item) > last_key:
            out.append(Extendable(item, seq.index(item), "I"))
        elif p > occ.gamma:
            out.append(Extendable(item, seq.index(item), "S"))
    return out


def _rule_units(rule: Rule, seq: QSequence, db: SequenceDatabase) -> int:
    items = rule.antecedent_items | rule.consequent_items
    return sum(seq.quantity(i) * db.eutil.units(i) for i in items)


def u_left(rule: Rule, seq: QSequence, db: SequenceDatabase) -> int:
    ext = left_extendable_items(rule, seq)
    if not ext:
        return 0
    return range_utility(db.upsl(seq.sid), ext[0].index, ext[-1].index)


def u_right(rule: Rule, seq: QSequence, db: SequenceDatabase) -> int:
    ext = right_extendable_items(rule, seq)
    if not ext:
        return 0
    return range_utility(db.upsl(seq.sid), ext[0].index, len(seq))


def _lepeu_units(rule: Rule, seq: QSequence, db: SequenceDatabase, zero_branch: bool) -> int:
    ul = u_left(rule, seq, db)
    if ul == 0 and zero_branch:
        return 0
    return _rule_units(rule, seq, db) + ul


def _repeu_units(rule: Rule, seq: QSequence, db: SequenceDatabase, zero_branch: bool) -> int:
    ur = u_right(rule, seq, db)
    if ur == 0 and zero_branch:
        return 0
    return _rule_units(rule, seq, db) + ur


def lepeu(rule: Rule, db: SequenceDatabase, zero_branch: bool = True) -> BoundReport:
    """Left-expansion prefix extension utility, per supporting sequence.

    ``zero_branch=False`` gives the padded form ``u + ULeft`` everywhere.
    """
    return _report(db, {s.sid: _lepeu_units(rule, s, db, zero_branch)
                        for s in db if occurs_in(rule, s) is not None})


def repeu(rule: Rule, db: SequenceDatabase, zero_branch: bool = True) -> BoundReport:
    return _report(db, {s.sid: _repeu_units(rule, s, db, zero_branch)
                        for s in db if occurs_in(rule, s) is not None})


def _child_sequences(parent: Rule, ext: ExpansionKind, side: Side, db: SequenceDatabase):
    if ext.side != side:
        raise ValueError(f"expected a {side} expansion, got {ext.side}")
    child = extend(parent, ext)
    return child, [s for s in db if occurs_in(child, s) is not None]


def lersu(parent: Rule, ext: ExpansionKind, db: SequenceDatabase):
    """Parent's LEPEU summed over the child's supporting sequences."""
    _, seqs = _child_sequences(parent, ext, "left", db)
    return db.value(sum(_lepeu_units(parent, s, db, True) for s in seqs))


def rersu(parent: Rule, ext: ExpansionKind, db: SequenceDatabase):
    """Parent's REPEU summed over the child's supporting sequences."""
    _, seqs = _child_sequences(parent, ext, "right", db)
    return db.value(sum(_repeu_units(parent, s, db, True) for s in seqs))


def lerspeu(parent: Rule, ext: ExpansionKind, db: SequenceDatabase):
    """u(parent, s) plus the utility from the new item to the last left-extendable item."""
    _, seqs = _child_sequences(parent, ext, "left", db)
    total = 0
    for s in seqs:
        last = left_extendable_items(parent, s)[-1].index
        total += _rule_units(parent, s, db) + range_utility(db.upsl(s.sid), s.index(ext.item), last)
    return db.value(total)


def rerspeu(parent: Rule, ext: ExpansionKind, db: SequenceDatabase):
    """u(parent, s) plus the utility from the new item to the end of the sequence."""
    _, seqs = _child_sequences(parent, ext, "right", db)
    total = 0
    for s in seqs:
        total += _rule_units(parent, s, db) + range_utility(db.upsl(s.sid), s.index(ext.item), len(s))
    return db.value(total)


def parent_of(rule: Rule) -> tuple[Rule, ExpansionKind] | None:
    """The rule one expansion step above ``rule`` on the left-first search path.

    Rules with a multi-item consequent come from a right expansion; otherwise
    from a left expansion. Size-1*1 rules have no parent.
    """
    for side_name, side in (("right", rule.consequent), ("left", rule.antecedent)):
        if sum(map(len, side)) < 2:
            continue
        last = side[-1]
        if len(last) > 1:
            trimmed = side[:-1] + (last[:-1],)
            ext = ExpansionKind(side_name, "I", last[-1])
        else:
            trimmed = side[:-1]
            ext = ExpansionKind(side_name, "S", last[0])
        if side_name == "right":
            return Rule(rule.antecedent, trimmed), ext
        return Rule(trimmed, rule.consequent), ext
    return None
