"""Show how each pruning strategy shrinks the search on a generated database."""
from __future__ import annotations

from totalsr.datagen import GenParams, generate
from totalsr.miner import VARIANTS, Thresholds, mine


def main() -> None:
    db = generate(GenParams(num_sequences=150, alphabet_size=60, avg_itemsets_per_sequence=3,
                            avg_items_per_itemset=1.5, max_itemsets_per_sequence=6,
                            max_items_per_itemset=3, num_patterns=10, pattern_corruption=0.2, seed=3))
    t = Thresholds(250, "0.3")
    print(f"{'variant':10} {'htsrs':>6} {'candidates':>11} {'peak rows':>10} {'seconds':>8}")
    for name in VARIANTS:
        r = mine(db, t, name)
        s = r.stats
        print(f"{name:10} {len(r.rules):6} {s.candidates_evaluated:11} {s.peak_table_rows:10} "
              f"{s.wall_time['total']:8.2f}")


if __name__ == "__main__":
    main()
