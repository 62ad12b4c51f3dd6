"""Small random databases for differential tests."""
from __future__ import annotations

import random
from fractions import Fraction

from totalsr.seqdb import SequenceDatabase, make_database

ALPHABET = "abcdefgh"


def random_database(seed: int, max_sequences: int = 8, alphabet: int = 8,
                    max_items: int = 7) -> SequenceDatabase:
    rng = random.Random(seed)
    letters = ALPHABET[:alphabet]
    rows = []
    for _ in range(rng.randint(1, max_sequences)):
        items = rng.sample(letters, rng.randint(1, min(max_items, alphabet)))
        itemsets, at = [], 0
        while at < len(items):
            size = rng.choice((1, 1, 1, 2, 2, 3))
            itemsets.append([(i, rng.randint(1, 5)) for i in items[at:at + size]])
            at += size
        rows.append(itemsets)
    eutil = {i: rng.choice((1, 2, 3, 5, Fraction(5, 2), Fraction(13, 10))) for i in letters}
    return make_database(rows, eutil)


def random_thresholds(seed: int, db: SequenceDatabase) -> tuple[Fraction, Fraction]:
    rng = random.Random(seed * 7919 + 1)
    total = sum(db.value(db.sequence_units(s)) for s in db) or 1
    minutil = max(Fraction(1, 10), Fraction(rng.randint(1, 60), 100) * total)
    minconf = Fraction(rng.choice((0, 1, 2, 3, 5, 6, 8, 10)), 10)
    return minutil, minconf
