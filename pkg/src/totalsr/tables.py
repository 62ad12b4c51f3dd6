"""Per-rule utility tables carried along rule expansions.

An LE row describes one sequence that contains a rule's antecedent. Rows for
sequences that hold the antecedent but not the whole rule are *sentinels*
(utility 0, positions ``(alpha, -1, -1)``, indices ``(-1, -1)``); they exist
only so the antecedent support can be counted. The "plus" tables drop the
sentinels and count those sequences in an auxiliary antecedent record table
(ART) instead.

All utilities in rows are integer units (see ``seqdb``).
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from .bounds import left_extendable_items, right_extendable_items
from .rules import Itemsets, Rule, _itemset_sets, _match, _side_text, occurs_in
from .seqdb import UPSL, QSequence, SequenceDatabase, format_number, range_utility


class LEElement(NamedTuple):
    sid: int
    utility: int
    lepeu: int
    repeu: int
    positions: tuple[int, int, int]
    indices: tuple[int, int]


class REElement(NamedTuple):
    sid: int
    utility: int
    repeu: int
    position: int
    index: int


# Same shape; the plus tables simply never hold sentinel rows.
LEElementPlus = LEElement
REElementPlus = REElement


class ART:
    """Antecedent -> sids that contain it but no legal rule occurrence."""

    def __init__(self):
        self._records: dict[Itemsets, set[int]] = {}

    def record(self, antecedent: Itemsets, sid: int) -> None:
        self._records.setdefault(antecedent, set()).add(sid)

    def count(self, antecedent: Itemsets) -> int:
        return len(self._records.get(antecedent, ()))

    def sids(self, antecedent: Itemsets) -> list[int]:
        return sorted(self._records.get(antecedent, ()))

    def keys(self) -> list[Itemsets]:
        return sorted(self._records, key=_side_text)

    def dump(self) -> str:
        return "".join(
            f"{_side_text(x)}: {{{','.join(f's{sid}' for sid in self.sids(x))}}}\n"
            for x in self.keys())


def art_record(art: ART, antecedent: Itemsets, sid: int) -> None:
    art.record(antecedent, sid)


def art_count(art: ART, antecedent: Itemsets) -> int:
    return art.count(antecedent)


def _item_units(upsl: UPSL, index: int) -> int:
    return range_utility(upsl, index, index)


def _rule_units(rule: Rule, seq: QSequence, upsl: UPSL) -> int:
    items = rule.antecedent_items | rule.consequent_items
    return sum(_item_units(upsl, seq.index(i)) for i in items)


def _alpha(antecedent: Itemsets, seq: QSequence) -> int:
    xpos = _match(antecedent, _itemset_sets(seq), 0)
    if xpos is None:
        raise ValueError(f"antecedent does not occur in sequence {seq.sid}")
    return xpos[-1] + 1


def le_element(rule: Rule, seq: QSequence, upsl: UPSL) -> LEElement:
    """LE row of ``rule`` in ``seq``; a sentinel if only the antecedent occurs."""
    alpha = _alpha(rule.antecedent, seq)
    occ = occurs_in(rule, seq)
    if occ is None:
        return LEElement(seq.sid, 0, 0, 0, (alpha, -1, -1), (-1, -1))
    n = len(seq)
    u = _rule_units(rule, seq, upsl)
    left = left_extendable_items(rule, seq)
    right = right_extendable_items(rule, seq)
    u_left = range_utility(upsl, left[0].index, left[-1].index) if left else 0
    u_right = range_utility(upsl, right[0].index, n) if right else 0
    first = left[0].index if left else n
    return LEElement(seq.sid, u, u + u_left if u_left else 0, u + u_right if u_right else 0,
                     (occ.alpha, occ.beta, occ.gamma), (first, n))


def re_element(rule: Rule, seq: QSequence, upsl: UPSL) -> REElement:
    occ = occurs_in(rule, seq)
    if occ is None:
        _alpha(rule.antecedent, seq)
        return REElement(seq.sid, 0, 0, -1, -1)
    u = _rule_units(rule, seq, upsl)
    right = right_extendable_items(rule, seq)
    u_right = range_utility(upsl, right[0].index, len(seq)) if right else 0
    return REElement(seq.sid, u, u + u_right if u_right else 0, occ.gamma, len(seq))


def _antecedent_sequences(rule: Rule, db: SequenceDatabase) -> list[QSequence]:
    sets_ok = []
    for s in db:
        if _match(rule.antecedent, _itemset_sets(s), 0) is not None:
            sets_ok.append(s)
    return sets_ok


def le_table(rule: Rule, db: SequenceDatabase) -> list[LEElement]:
    return [le_element(rule, s, db.upsl(s.sid)) for s in _antecedent_sequences(rule, db)]


def le_plus_table(rule: Rule, db: SequenceDatabase) -> tuple[list[LEElement], ART]:
    rows, art = [], ART()
    for row in le_table(rule, db):
        if row.utility:
            rows.append(row)
        else:
            art.record(rule.antecedent, row.sid)
    return rows, art


def re_table(rule: Rule, db: SequenceDatabase) -> list[REElement]:
    """RE rows a right expansion of ``rule`` would scan.

    Only sequences where the consequent can still grow (nonzero REPEU) are
    listed; the antecedent support travels separately as a fixed count.
    """
    rows = []
    for s in db:
        if occurs_in(rule, s) is None:
            continue
        row = re_element(rule, s, db.upsl(s.sid))
        if row.repeu:
            rows.append(row)
    return rows


class TableMeasures(NamedTuple):
    support_count: int
    antecedent_count: int
    utility: int
    lepeu: int
    repeu: int


def table_measures(table: Iterable[LEElement | REElement], art_count: int = 0) -> TableMeasures:
    sup = ant = u = le = re = 0
    for row in table:
        ant += 1
        if row.utility:
            sup += 1
            u += row.utility
            re += row.repeu
            if isinstance(row, LEElement):
                le += row.lepeu
    return TableMeasures(sup, ant + art_count, u, le, re)


def confidence_of(m: TableMeasures) -> Fraction:
    return Fraction(m.support_count, m.antecedent_count)


def _fmt_tuple(t: Sequence[int]) -> str:
    return "(" + ",".join(str(v) for v in t) + ")"


LE_HEADER = "SID\tUtility\tLEPEU\tREPEU\tPositions\tIndices"
RE_HEADER = "SID\tUtility\tREPEU\tPosition\tIndex"


def dump_le_table(rows: Iterable[LEElement], scale: int = 1) -> str:
    def v(units: int) -> str:
        return format_number(Fraction(units, scale))
    lines = [LE_HEADER]
    for r in rows:
        lines.append(f"s{r.sid}\t{v(r.utility)}\t{v(r.lepeu)}\t{v(r.repeu)}\t"
                     f"{_fmt_tuple(r.positions)}\t{_fmt_tuple(r.indices)}")
    return "\n".join(lines) + "\n"


def dump_re_table(rows: Iterable[REElement], scale: int = 1) -> str:
    def v(units: int) -> str:
        return format_number(Fraction(units, scale))
    lines = [RE_HEADER]
    for r in rows:
        lines.append(f"s{r.sid}\t{v(r.utility)}\t{v(r.repeu)}\t{r.position}\t{r.index}")
    return "\n".join(lines) + "\n"


def dump_upsl(seq: QSequence, upsl: UPSL, scale: int = 1) -> str:
    items = seq.items
    return ("item\t" + "\t".join(items) + "\n"
            + "index\t" + "\t".join(str(k) for k in range(1, len(items) + 1)) + "\n"
            + "us\t" + "\t".join(format_number(Fraction(p, scale)) for p in upsl.prefix) + "\n")
