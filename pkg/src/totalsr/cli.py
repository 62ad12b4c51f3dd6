"""Command-line interface: ``totalsr {mine,oracle,inspect,gen,bench,describe}``."""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import bounds, tables
from .datagen import GenParams, InfeasibleParams, describe, generate, synthetic_like, write_database
from .miner import VARIANTS, Thresholds, mine, prune_unpromising_items, variant
from .oracle import OracleLimits, OracleTooLarge, oracle_mine
from .rules import Rule, RuleSyntaxError, format_rules, measure, occurs_in
from .seqdb import SeqDBError, SequenceDatabase, _exact, format_number, load_database

log = logging.getLogger("totalsr")

RULES_HELP = "one rule per line: '<rule> #SUP: <s> #CONF: <c> #UTIL: <u>', sorted by rule text"
BENCH_COLUMNS = ["dataset", "variant", "minutil", "minconf", "candidates", "htsrs", "wall_ms",
                 "peak_table_rows", "timed_out"]


class InputError(Exception):
    """Bad user input; reported with exit status 2."""


def _number(text: str) -> Fraction:
    try:
        return _exact(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _load(args) -> SequenceDatabase:
    for path in (args.db, args.eutil):
        if not Path(path).is_file():
            raise InputError(f"no such file: {path}")
    return load_database(args.db, args.eutil)


def _thresholds(args) -> Thresholds:
    try:
        return Thresholds(args.minutil, args.minconf)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _jsonable(value):
    if isinstance(value, Fraction):
        return format_number(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def run_report(args, db: SequenceDatabase, result, rules_text: str, timings: bool) -> dict:
    """Config echo, dataset statistics, search statistics and output digest."""
    return _jsonable({
        "config": {"variant": args.variant, "minutil": result.thresholds.minutil,
                   "minconf": result.thresholds.minconf, "engine": result.config.engine},
        "dataset": describe(db).as_dict(),
        "stats": result.stats.as_dict(timings=timings),
        "htsrs": len(result.rules),
        "outputs": {"rules_sha256": _digest(rules_text)},
    })


def cmd_mine(args) -> int:
    db = _load(args)
    result = mine(db, _thresholds(args), variant(args.variant),
                  time_limit=args.time_limit, debug=args.debug)
    text = format_rules(result.rules)
    _write(text, args.out)
    if args.stats:
        report = run_report(args, db, result, text, args.timings)
        Path(args.stats).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    if result.stats.timed_out:
        log.warning("time limit reached; the rules file is incomplete")
    return 0


def cmd_oracle(args) -> int:
    db = _load(args)
    t = _thresholds(args)
    limits = OracleLimits(args.max_antecedent, args.max_consequent, args.max_total)
    try:
        found = oracle_mine(db, t.minutil, t.minconf, limits)
    except OracleTooLarge as exc:
        raise InputError(str(exc)) from None
    _write(format_rules(found), args.out)
    return 0


def _bound_line(name: str, value) -> str:
    return f"{name}\t{'-' if value is None else format_number(value)}\n"


def inspect_text(db: SequenceDatabase, rule: Rule, minutil: Fraction | None = None) -> str:
    """Tables, UPSLs and bounds of one rule, in the documented dump format."""
    if minutil is not None:
        db, removed = prune_unpromising_items(db, -(-minutil * db.scale // 1))
        gone = set(removed) & (rule.antecedent_items | rule.consequent_items)
        if gone:
            raise InputError(f"items {sorted(gone)} are removed at minutil {format_number(minutil)}")
    scale = db.scale
    out = [f"rule\t{rule}\n"]
    m = measure(rule, db)
    out.append(f"support\t{m.support_count}/{m.database_size}\n")
    out.append(f"antecedent_support\t{m.antecedent_count}\n")
    out.append(f"utility\t{format_number(m.utility)}\n")
    le = tables.le_table(rule, db)
    out.append("[LE]\n" + tables.dump_le_table(le, scale))
    rows, art = tables.le_plus_table(rule, db)
    out.append("[LE+]\n" + tables.dump_le_table(rows, scale))
    out.append("[ART]\n" + art.dump())
    out.append("[RE]\n" + tables.dump_re_table(tables.re_table(rule, db), scale))
    for row in le:
        seq = db.sequence(row.sid)
        out.append(f"[UPSL s{row.sid}]\n" + tables.dump_upsl(seq, db.upsl(row.sid), scale))
    supported = any(occurs_in(rule, s) for s in db)
    out.append("[BOUNDS]\n")
    out.append(_bound_line("SEU", bounds.seu_rule(db, rule)))
    out.append(_bound_line("LEPEU", bounds.lepeu(rule, db).total if supported else None))
    out.append(_bound_line("REPEU", bounds.repeu(rule, db).total if supported else None))
    up = bounds.parent_of(rule)
    side = up[1].side if up else None
    if up:
        parent, ext = up
        out.append(f"parent\t{parent}\t{ext.side} {ext.mode} {ext.item}\n")
    if side == "left" and supported:
        out.append(_bound_line("LERSU", bounds.lersu(*up, db)))
        out.append(_bound_line("LERSPEU", bounds.lerspeu(*up, db)))
    else:
        out.append(_bound_line("LERSU", None) + _bound_line("LERSPEU", None))
    if side == "right" and supported:
        out.append(_bound_line("RERSU", bounds.rersu(*up, db)))
        out.append(_bound_line("RERSPEU", bounds.rerspeu(*up, db)))
    else:
        out.append(_bound_line("RERSU", None) + _bound_line("RERSPEU", None))
    return "".join(out)


def cmd_inspect(args) -> int:
    db = _load(args)
    try:
        rule = Rule.parse(args.rule)
    except (RuleSyntaxError, ValueError) as exc:
        raise InputError(f"bad rule: {exc}") from None
    _write(inspect_text(db, rule, args.minutil), args.out)
    return 0


def cmd_gen(args) -> int:
    if args.preset == "synthetic":
        params = synthetic_like(args.num_sequences, seed=args.seed)
    else:
        params = GenParams(
            num_sequences=args.num_sequences, alphabet_size=args.alphabet,
            avg_itemsets_per_sequence=args.avg_itemsets, avg_items_per_itemset=args.avg_items,
            max_quantity=args.max_quantity, unit_utility_range=(args.utility_low, args.utility_high),
            seed=args.seed, max_itemsets_per_sequence=args.max_itemsets,
            max_items_per_itemset=args.max_items, num_patterns=args.patterns,
            pattern_corruption=args.pattern_corruption, pattern_probability=args.pattern_probability)
    db = generate(params)
    seq_path, utl_path = write_database(db, args.out)
    for path in (seq_path, utl_path):
        print(f"{_digest(path.read_text())}  {path}")
    return 0


def cmd_describe(args) -> int:
    db = _load(args)
    _write(json.dumps(describe(db).as_dict(), indent=2) + "\n", args.out)
    return 0


def cmd_bench(args) -> int:
    db = _load(args)
    names = args.variants.split(",") if args.variants else list(VARIANTS)
    for name in names:
        variant(name)
    minutils = [_number(v) for v in args.minutil.split(",")]
    cells = [(mu, name) for mu in minutils for name in names]
    dataset = Path(args.db).stem

    def run(cell):
        mu, name = cell
        result = mine(db, Thresholds(mu, args.minconf), variant(name), time_limit=args.time_limit)
        st = result.stats
        return [dataset, name, format_number(mu), format_number(args.minconf), st.candidates_evaluated,
                len(result.rules), round(st.wall_time["total"] * 1000, 3), st.peak_table_rows,
                int(st.timed_out)]

    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        rows = list(pool.map(run, cells))
    out = sys.stdout if args.out in (None, "-") else open(args.out, "w", newline="")
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(BENCH_COLUMNS)
        writer.writerows(rows)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def _add_input(p: argparse.ArgumentParser) -> None:
    p.add_argument("--db", required=True, help="sequence database file")
    p.add_argument("--eutil", required=True, help="external utility file (item:utility per line)")


def _add_thresholds(p: argparse.ArgumentParser, minconf: str = "0.5") -> None:
    p.add_argument("--minutil", type=_number, required=True, help="minimum rule utility (> 0)")
    p.add_argument("--minconf", type=_number, default=_number(minconf),
                   help=f"minimum confidence in [0, 1] (default {minconf})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="totalsr", description="High-utility totally-ordered sequential rule mining.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mine", help="mine high-utility rules", description=RULES_HELP)
    _add_input(p)
    _add_thresholds(p)
    p.add_argument("--variant", default="totalsr+", choices=list(VARIANTS))
    p.add_argument("--out", help="rules file (default stdout)")
    p.add_argument("--stats", help="write a JSON run report here")
    p.add_argument("--timings", action="store_true", help="include wall times in the run report")
    p.add_argument("--time-limit", type=float, help="stop after this many seconds")
    p.add_argument("--debug", action="store_true", help="assert that no rule is generated twice")
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("oracle", help="brute-force reference miner for small inputs")
    _add_input(p)
    _add_thresholds(p)
    p.add_argument("--max-antecedent", type=int)
    p.add_argument("--max-consequent", type=int)
    p.add_argument("--max-total", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("inspect", help="dump the tables and bounds of one rule")
    _add_input(p)
    p.add_argument("--rule", required=True, help="e.g. '{e,f},{c} -> {b}'")
    p.add_argument("--minutil", type=_number, help="first remove items whose SEU is below this")
    p.add_argument("--out")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("gen", help="generate a synthetic database (.seq plus sibling .utl)")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--preset", choices=["none", "synthetic"], default="none",
                   help="'synthetic' uses a large alphabet, ~6 itemsets of ~4 items and planted patterns; other size flags are ignored")
    p.add_argument("--num-sequences", type=int, default=1000)
    p.add_argument("--alphabet", type=int, default=1000)
    p.add_argument("--avg-itemsets", type=float, default=6.22)
    p.add_argument("--avg-items", type=float, default=4.35)
    p.add_argument("--max-itemsets", type=int)
    p.add_argument("--max-items", type=int)
    p.add_argument("--max-quantity", type=int, default=5)
    p.add_argument("--utility-low", type=float, default=1.0)
    p.add_argument("--utility-high", type=float, default=10.0)
    p.add_argument("--patterns", type=int, default=0, help="size of the planted pattern pool")
    p.add_argument("--pattern-corruption", type=float, default=0.0)
    p.add_argument("--pattern-probability", type=float, default=0.5)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="sweep minutil x variant and write CSV",
                       description="CSV columns: " + ",".join(BENCH_COLUMNS))
    _add_input(p)
    p.add_argument("--minutil", required=True, help="comma-separated list")
    p.add_argument("--minconf", type=_number, default=_number("0.6"))
    p.add_argument("--variants", help=f"comma-separated subset of {','.join(VARIANTS)}")
    p.add_argument("--time-limit", type=float)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("describe", help="dataset statistics as JSON")
    _add_input(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_describe)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (InputError, SeqDBError, RuleSyntaxError, InfeasibleParams, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
