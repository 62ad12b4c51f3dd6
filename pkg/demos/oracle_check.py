"""Compare every variant with the brute-force enumerator on random small databases."""
from __future__ import annotations

import argparse
import random
from fractions import Fraction

from totalsr.miner import VARIANTS, Thresholds, mine
from totalsr.oracle import oracle_mine
from totalsr.rules import format_rules
from totalsr.seqdb import parse_database

LETTERS = "abcdefgh"


def random_db(rng: random.Random):
    lines = []
    for _ in range(rng.randint(1, 8)):
        pool = rng.sample(LETTERS, rng.randint(1, 7))
        sets = []
        while pool:
            size = rng.randint(1, min(3, len(pool)))
            chunk, pool = sorted(pool[:size]), pool[size:]
            sets.append(" ".join(f"{i}:{rng.randint(1, 4)}" for i in chunk))
        lines.append(" -1 ".join(sets) + " -1 -2")
    used = sorted({tok.split(":")[0] for line in lines for tok in line.split() if ":" in tok})
    eutil = "\n".join(f"{i}:{rng.choice(['1', '2', '3', '2.5'])}" for i in used)
    return parse_database("\n".join(lines), eutil)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    bad = 0
    for trial in range(args.trials):
        db = random_db(rng)
        minutil = max(Fraction(1, 10), Fraction(sum(db.sequence_units(s) for s in db), db.scale) * rng.randint(1, 50) / 100)
        minconf = Fraction(rng.choice([0, 2, 5, 8, 10]), 10)
        expected = format_rules(oracle_mine(db, minutil, minconf))
        for name in VARIANTS:
            if format_rules(mine(db, Thresholds(minutil, minconf), name).rules) != expected:
                bad += 1
                print(f"trial {trial}: {name} disagrees with the oracle")
    print(f"{args.trials} databases x {len(VARIANTS)} variants, {bad} disagreements")


if __name__ == "__main__":
    main()
