"""Mine the four-sequence toy database under every variant and print the rules."""
from __future__ import annotations

from totalsr.miner import VARIANTS, Thresholds, mine
from totalsr.rules import format_rules
from totalsr.toy import toy_database


def main() -> None:
    db = toy_database()
    t = Thresholds(25, "0.5")
    print(format_rules(mine(db, t, "totalsr+").rules), end="")
    print()
    print(f"{'variant':10} {'rules':>5} {'candidates':>10}")
    for name in VARIANTS:
        result = mine(db, t, name)
        print(f"{name:10} {len(result.rules):5} {result.stats.candidates_evaluated:10}")


if __name__ == "__main__":
    main()
