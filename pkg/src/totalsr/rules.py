"""Totally-ordered sequential rules and their measures, computed by definition.

Everything here works straight from a ``SequenceDatabase`` with no
incremental bookkeeping, so it doubles as ground truth for the miner.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from .seqdb import QSequence, SequenceDatabase, format_number, item_key, sort_items

Itemsets = tuple[tuple[str, ...], ...]


class AntecedentUnsupported(ZeroDivisionError):
    pass


class RuleSyntaxError(ValueError):
    pass


def _canonical(side: Iterable[Iterable[str]]) -> Itemsets:
    return tuple(tuple(sort_items(itemset)) for itemset in side)


def _side_text(side: Itemsets) -> str:
    return ",".join("{" + ",".join(itemset) + "}" for itemset in side)


@dataclass(frozen=True)
class Rule:
    """``antecedent -> consequent``, each an ordered tuple of sorted itemsets."""

    antecedent: Itemsets
    consequent: Itemsets

    def __post_init__(self):
        for name, side in (("antecedent", self.antecedent), ("consequent", self.consequent)):
            if not side or any(not itemset for itemset in side):
                raise ValueError(f"{name} must be a nonempty list of nonempty itemsets")
            for itemset in side:
                keys = [item_key(i) for i in itemset]
                if any(a >= b for a, b in zip(keys, keys[1:])):
                    raise ValueError(f"itemset {itemset} is not strictly increasing")
        x = self.antecedent_items
        y = self.consequent_items
        if len(x) != sum(map(len, self.antecedent)) or len(y) != sum(map(len, self.consequent)):
            raise ValueError("an item may appear only once in a rule side")
        if x & y:
            raise ValueError(f"antecedent and consequent share {sorted(x & y)}")

    @classmethod
    def of(cls, antecedent: Iterable[Iterable[str]], consequent: Iterable[Iterable[str]]) -> Rule:
        """Build a rule, sorting each itemset into item order."""
        return cls(_canonical(antecedent), _canonical(consequent))

    @classmethod
    def parse(cls, text: str) -> Rule:
        left, sep, right = text.partition("->")
        if not sep:
            raise RuleSyntaxError(f"missing '->' in {text!r}")
        return cls.of(_parse_side(left), _parse_side(right))

    @property
    def antecedent_items(self) -> frozenset[str]:
        return frozenset(i for itemset in self.antecedent for i in itemset)

    @property
    def consequent_items(self) -> frozenset[str]:
        return frozenset(i for itemset in self.consequent for i in itemset)

    @property
    def size(self) -> RuleSize:
        return RuleSize(sum(map(len, self.antecedent)), sum(map(len, self.consequent)))

    def __str__(self) -> str:
        return f"{_side_text(self.antecedent)} -> {_side_text(self.consequent)}"


_SIDE_RE = re.compile(r"\{([^{}]*)\}")


def _parse_side(text: str) -> list[list[str]]:
    text = text.strip()
    itemsets = _SIDE_RE.findall(text)
    rebuilt = ",".join("{" + s + "}" for s in itemsets)
    if not itemsets or re.sub(r"\s+", "", text) != re.sub(r"\s+", "", rebuilt):
        raise RuleSyntaxError(f"cannot parse rule side {text!r}")
    out = []
    for body in itemsets:
        items = [tok.strip() for tok in body.split(",")]
        if any(not tok for tok in items):
            raise RuleSyntaxError(f"empty item in {{{body}}}")
        out.append(items)
    return out


class RuleSize(NamedTuple):
    """``k * m``: antecedent and consequent item counts."""

    k: int
    m: int

    def smaller_than(self, other: RuleSize) -> bool:
        return ((self.k <= other.k and self.m < other.m)
                or (self.k < other.k and self.m <= other.m))


class Occurrence(NamedTuple):
    sid: int
    alpha: int
    beta: int
    gamma: int


def _match(side: Itemsets, itemset_sets: Sequence[frozenset[str]], start: int) -> list[int] | None:
    """Greedy earliest embedding of ``side`` into ``itemset_sets[start:]``.

    Returns the 0-based itemset positions used, or None.
    """
    positions = []
    j = start
    for itemset in side:
        want = set(itemset)
        while j < len(itemset_sets) and not want <= itemset_sets[j]:
            j += 1
        if j == len(itemset_sets):
            return None
        positions.append(j)
        j += 1
    return positions


def _itemset_sets(seq: QSequence) -> list[frozenset[str]]:
    return [frozenset(qi.item for qi in itemset) for itemset in seq.itemsets]


def antecedent_occurs_in(antecedent: Itemsets, seq: QSequence) -> bool:
    return _match(antecedent, _itemset_sets(seq), 0) is not None


def occurs_in(rule: Rule, seq: QSequence) -> Occurrence | None:
    sets = _itemset_sets(seq)
    xpos = _match(rule.antecedent, sets, 0)
    if xpos is None:
        return None
    ypos = _match(rule.consequent, sets, xpos[-1] + 1)
    if ypos is None:
        return None
    return Occurrence(seq.sid, xpos[-1] + 1, ypos[0] + 1, ypos[-1] + 1)


def supporting_sids(rule: Rule, db: SequenceDatabase) -> list[int]:
    """seq(r): sids of sequences containing the whole rule."""
    return [s.sid for s in db if occurs_in(rule, s) is not None]


def antecedent_sids(rule: Rule, db: SequenceDatabase) -> list[int]:
    """ant(r): sids of sequences containing the antecedent."""
    return [s.sid for s in db if antecedent_occurs_in(rule.antecedent, s)]


def support(rule: Rule, db: SequenceDatabase) -> Fraction:
    if len(db) == 0:
        return Fraction(0)
    return Fraction(len(supporting_sids(rule, db)), len(db))


def confidence(rule: Rule, db: SequenceDatabase) -> Fraction:
    ant = len(antecedent_sids(rule, db))
    if ant == 0:
        raise AntecedentUnsupported(f"antecedent of {rule} occurs nowhere")
    return Fraction(len(supporting_sids(rule, db)), ant)


def rule_units_in_seq(rule: Rule, seq: QSequence, db: SequenceDatabase) -> int:
    if occurs_in(rule, seq) is None:
        return 0
    items = rule.antecedent_items | rule.consequent_items
    return sum(seq.quantity(i) * db.eutil.units(i) for i in items)


def rule_utility_in_seq(rule: Rule, seq: QSequence, db: SequenceDatabase):
    return db.value(rule_units_in_seq(rule, seq, db))


def rule_units(rule: Rule, db: SequenceDatabase) -> int:
    return sum(rule_units_in_seq(rule, s, db) for s in db)


def rule_utility(rule: Rule, db: SequenceDatabase):
    return db.value(rule_units(rule, db))


@dataclass(frozen=True)
class MinedRule:
    """A rule with its exact measures."""

    rule: Rule
    support_count: int
    antecedent_count: int
    database_size: int
    utility: int | Fraction

    @property
    def support(self) -> Fraction:
        return Fraction(self.support_count, self.database_size) if self.database_size else Fraction(0)

    @property
    def confidence(self) -> Fraction:
        return Fraction(self.support_count, self.antecedent_count)

    def line(self) -> str:
        return (f"{self.rule} #SUP: {fixed4(self.support)} "
                f"#CONF: {fixed4(self.confidence)} #UTIL: {format_number(self.utility)}")


def measure(rule: Rule, db: SequenceDatabase) -> MinedRule:
    return MinedRule(rule, len(supporting_sids(rule, db)), len(antecedent_sids(rule, db)),
                     len(db), rule_utility(rule, db))


def fixed4(value: Fraction) -> str:
    """Round half-up to 4 decimal places."""
    scaled = math.floor(Fraction(value) * 10**4 + Fraction(1, 2))
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled), 10**4)
    return f"{sign}{whole}.{frac:04d}"


def format_rules(mined: Iterable[MinedRule]) -> str:
    return "".join(m.line() + "\n" for m in sorted(mined, key=lambda m: str(m.rule)))
