"""Brute-force rule enumeration used as ground truth for the miner.

Every rule that occurs somewhere is a sub-pattern of some sequence: pick a
subset of the sequence's items, keep their itemset grouping and order, and
cut the resulting pattern between two itemsets. Enumerating those cuts over
all sequences yields every candidate exactly once (after deduplication), and
measures are then computed by definition with ``rules``. Exponential in
sequence length; only for small databases.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterator

from .rules import MinedRule, Rule, measure
from .seqdb import SequenceDatabase, _exact


@dataclass(frozen=True)
class OracleLimits:
    max_antecedent_items: int | None = None
    max_consequent_items: int | None = None
    max_total_items: int | None = None
    max_sequence_items: int = 16

    def allows(self, rule: Rule) -> bool:
        k, m = rule.size
        return ((self.max_antecedent_items is None or k <= self.max_antecedent_items)
                and (self.max_consequent_items is None or m <= self.max_consequent_items)
                and (self.max_total_items is None or k + m <= self.max_total_items))


class OracleTooLarge(ValueError):
    pass


def _subpatterns(itemsets: list[list[str]]) -> Iterator[tuple[tuple[str, ...], ...]]:
    """All patterns with at least two nonempty itemsets embedded in ``itemsets``."""
    choices = []
    for itemset in itemsets:
        subs = [()]
        for r in range(1, len(itemset) + 1):
            subs.extend(combinations(itemset, r))
        choices.append(subs)

    def walk(p: int, acc: list):
        if p == len(choices):
            if len(acc) >= 2:
                yield tuple(acc)
            return
        for sub in choices[p]:
            if sub:
                acc.append(sub)
                yield from walk(p + 1, acc)
                acc.pop()
            else:
                yield from walk(p + 1, acc)

    yield from walk(0, [])


def enumerate_rules(db: SequenceDatabase, limits: OracleLimits = OracleLimits()) -> set[Rule]:
    """Every rule supported by at least one sequence, within ``limits``."""
    out: set[Rule] = set()
    for s in db:
        if len(s) > limits.max_sequence_items:
            raise OracleTooLarge(f"sequence {s.sid} has {len(s)} items; the oracle is exponential")
        itemsets = [[qi.item for qi in itemset] for itemset in s.itemsets]
        for pattern in _subpatterns(itemsets):
            for cut in range(1, len(pattern)):
                rule = Rule(pattern[:cut], pattern[cut:])
                if limits.allows(rule):
                    out.add(rule)
    return out


def oracle_mine(db: SequenceDatabase, minutil, minconf,
                limits: OracleLimits = OracleLimits()) -> list[MinedRule]:
    """All rules meeting both thresholds, sorted by rule text."""
    minutil = _exact(minutil)
    minconf = _exact(minconf)
    found = []
    for rule in enumerate_rules(db, limits):
        m = measure(rule, db)
        if m.utility >= minutil and m.confidence >= minconf:
            found.append(m)
    return sorted(found, key=lambda m: str(m.rule))
