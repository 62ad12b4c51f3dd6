"""Generate growing synthetic databases and compare the two table layouts."""
from __future__ import annotations

import argparse

from totalsr.datagen import describe, generate, synthetic_like
from totalsr.miner import Thresholds, mine


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="5000,10000")
    ap.add_argument("--minutil", type=int, default=4000)
    args = ap.parse_args()
    t = Thresholds(args.minutil, "0.5")
    for n in map(int, args.sizes.split(",")):
        db = generate(synthetic_like(n))
        print(f"n={n} {describe(db).as_dict()}", flush=True)
        for name in ("totalsr", "totalsr+"):
            r = mine(db, t, name)
            print(f"  {name:9} htsrs={len(r.rules):5} rows={r.stats.peak_table_rows:7} "
                  f"time={r.stats.wall_time['total']:.2f}s", flush=True)


if __name__ == "__main__":
    main()
