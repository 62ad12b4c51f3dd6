"""Print utility tables, prefix sums and bounds for a few toy rules."""
from __future__ import annotations

import sys
import tempfile
from pathlib import Path

from totalsr import cli
from totalsr.toy import TOY_DB, TOY_EUTIL

RULES = ["{e,f},{c} -> {b}", "{e,f} -> {c}", "{e} -> {c}"]


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        db, utl = Path(tmp, "toy.seq"), Path(tmp, "toy.utl")
        db.write_text(TOY_DB)
        utl.write_text(TOY_EUTIL)
        for rule in RULES:
            print(f"==== {rule}")
            sys.stdout.flush()
            cli.main(["inspect", "--db", str(db), "--eutil", str(utl), "--minutil", "25", "--rule", rule])


if __name__ == "__main__":
    main()
