"""Search engine for high-utility totally-ordered sequential rules.

The search starts from every 1*1 rule ``<a> -> <b>``, grows the antecedent
first (left expansions) and then the consequent (right expansions). A rule
that has been right-expanded is never left-expanded again, so every rule has
exactly one generation path and the antecedent support is frozen during
right expansions, which makes confidence anti-monotone there.

Two bookkeeping engines are available:

* ``totalsr`` keeps one row per antecedent-supporting sequence in every
  table, with sentinel rows for sequences that hold the antecedent only;
* ``totalsr_plus`` keeps only rows of sequences holding the whole rule and
  counts the remaining antecedent supporters in a per-rule record table.

Every pruning strategy can be switched off independently through
``VariantConfig``; all configurations return the same rule set.

Internal rows are tuples
``(sid, u, lepeu, repeu, alpha, beta, gamma, x_end, y_end)`` where utilities
are integer units, ``alpha/beta/gamma`` are itemset positions and
``x_end/y_end`` the 0-based flat indices of the last antecedent / consequent
item. Sentinel rows have ``u == 0`` and ``beta == gamma == y_end == -1``.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Literal

from .rules import MinedRule, Rule
from .seqdb import UPSL, SequenceDatabase, SequenceIndex, _exact, remove_items, sort_items
from .tables import LEElement

log = logging.getLogger(__name__)

RsBounds = Literal["none", "rsu", "rspeu"]
Engine = Literal["totalsr", "totalsr_plus"]

PRUNE_KEYS = (
    "seu_item", "seu_rule", "left_gate", "right_gate", "confidence",
    "lersu", "rersu", "lerspeu", "rerspeu",
)


@dataclass(frozen=True)
class VariantConfig:
    use_seu_item_pruning: bool = True
    use_seu_rule_pruning: bool = True
    use_pe_bounds: bool = True
    use_rs_bounds: RsBounds = "rspeu"
    use_confidence_pruning: bool = True
    use_upsl: bool = True
    engine: Engine = "totalsr"

    def __post_init__(self):
        if self.use_rs_bounds not in ("none", "rsu", "rspeu"):
            raise ValueError(f"use_rs_bounds must be none, rsu or rspeu, not {self.use_rs_bounds!r}")
        if self.engine not in ("totalsr", "totalsr_plus"):
            raise ValueError(f"unknown engine {self.engine!r}")


_NONE = VariantConfig(False, False, False, "none", False, True)

VARIANTS: dict[str, VariantConfig] = {
    "bald": _NONE,
    "seu": VariantConfig(True, True, False, "none", False, True),
    "seu-": VariantConfig(True, True, False, "none", False, False),
    "rsu": VariantConfig(True, True, True, "rsu", False, True),
    "rspeu": VariantConfig(True, True, True, "rspeu", False, True),
    "totalsr": VariantConfig(True, True, True, "rspeu", True, True),
    "totalsr+": VariantConfig(True, True, True, "rspeu", True, True, "totalsr_plus"),
}


def variant(name: str) -> VariantConfig:
    try:
        return VARIANTS[name]
    except KeyError:
        raise ValueError(f"unknown variant {name!r}; choose from {', '.join(VARIANTS)}") from None


@dataclass(frozen=True)
class Thresholds:
    minutil: Fraction
    minconf: Fraction

    def __post_init__(self):
        object.__setattr__(self, "minutil", _exact(self.minutil))
        object.__setattr__(self, "minconf", _exact(self.minconf))
        if self.minutil <= 0:
            raise ValueError("minutil must be positive")
        if not 0 <= self.minconf <= 1:
            raise ValueError("minconf must lie in [0, 1]")


@dataclass
class MiningStats:
    candidates_evaluated: int = 0
    seed_rules: int = 0
    left_expansions: int = 0
    right_expansions: int = 0
    prune_counters: dict[str, int] = field(default_factory=lambda: dict.fromkeys(PRUNE_KEYS, 0))
    items_removed: int = 0
    peak_table_rows: int = 0
    wall_time: dict[str, float] = field(default_factory=dict)
    timed_out: bool = False

    def as_dict(self, timings: bool = True) -> dict:
        d = asdict(self)
        if not timings:
            d.pop("wall_time")
        return d


@dataclass
class MiningResult:
    rules: list[MinedRule]
    stats: MiningStats
    config: VariantConfig
    thresholds: Thresholds

    def rule_set(self) -> set[Rule]:
        return {m.rule for m in self.rules}


@dataclass(frozen=True)
class Edge:
    """One expansion step actually taken, with the bounds the miner carried.

    Bounds are integer units. ``parent_pe`` is LEPEU(parent) for left edges
    and REPEU(parent) for right edges; ``rs`` / ``rspeu`` are the child's
    LERSU / LERSPEU (left) or RERSU / RERSPEU (right).
    """

    side: str
    parent: Rule
    child: Rule
    child_utility: int
    parent_pe: int
    rs: int
    rspeu: int


class _Timeout(Exception):
    pass


def _item_seu(db: SequenceDatabase) -> dict[str, int]:
    seu: dict[str, int] = {}
    for s in db:
        total = db.sequence_units(s)
        for itemset in s.itemsets:
            for qi in itemset:
                seu[qi.item] = seu.get(qi.item, 0) + total
    return seu


def prune_unpromising_items(db: SequenceDatabase, minutil_units: int) -> tuple[SequenceDatabase, list[str]]:
    """Repeatedly delete items whose SEU is below the threshold until none are."""
    removed: list[str] = []
    while True:
        seu = _item_seu(db)
        victims = [i for i, v in seu.items() if v < minutil_units]
        if not victims:
            return db, sort_items(removed)
        removed.extend(victims)
        db = remove_items(db, victims)


class _Search:
    # how record tables are extended: "probe", "scan" or "auto" (cheaper one)
    art_strategy = "auto"

    def __init__(self, db: SequenceDatabase, thresholds: Thresholds, cfg: VariantConfig,
                 on_edge: Callable[[Edge], None] | None, time_limit: float | None, debug: bool):
        self.db = db
        self.cfg = cfg
        self.plus = cfg.engine == "totalsr_plus"
        self.minutil = math.ceil(thresholds.minutil * db.scale)
        self.conf_num = thresholds.minconf.numerator
        self.conf_den = thresholds.minconf.denominator
        self.stats = MiningStats()
        self.found: list[MinedRule] = []
        self.on_edge = on_edge
        self.deadline = None if time_limit is None else time.perf_counter() + time_limit
        self.seen: set | None = set() if debug else None
        self.live_rows = 0

    # ---- helpers -----------------------------------------------------------

    def _conf_ok(self, sup: int, ant: int) -> bool:
        return sup * self.conf_den >= self.conf_num * ant

    def _rule(self, x, y) -> Rule:
        names = self.names
        return Rule(tuple(tuple(names[r] for r in its) for its in x),
                    tuple(tuple(names[r] for r in its) for its in y))

    def _grow(self, live: int):
        self.live_rows += live
        if self.live_rows > self.stats.peak_table_rows:
            self.stats.peak_table_rows = self.live_rows

    def _evaluate(self, x, y, sup: int, ant: int, usum: int) -> bool:
        st = self.stats
        st.candidates_evaluated += 1
        if self.deadline is not None and st.candidates_evaluated % 256 == 0:
            if time.perf_counter() > self.deadline:
                raise _Timeout
        if self.seen is not None:
            key = (x, y)
            assert key not in self.seen, f"rule generated twice: {self._rule(x, y)}"
            self.seen.add(key)
        conf_ok = self._conf_ok(sup, ant)
        if usum >= self.minutil and conf_ok:
            self.found.append(MinedRule(self._rule(x, y), sup, ant, len(self.db), self.db.value(usum)))
        return conf_ok

    def _next(self, x, y, yset, rows, art, ant, sup, usum, uleft, uright, repeu, conf_ok):
        """Recurse from a freshly evaluated rule that may still grow on the left."""
        cfg = self.cfg
        pc = self.stats.prune_counters
        if uleft > 0:
            if not cfg.use_pe_bounds or usum + uleft + uright >= self.minutil:
                self._left(x, y, yset, rows, art, repeu)
            else:
                pc["left_gate"] += 1
        self._maybe_right(x, y, rows, ant, uright, repeu, conf_ok)

    def _maybe_right(self, x, y, rows, ant, uright, repeu, conf_ok):
        cfg = self.cfg
        pc = self.stats.prune_counters
        if uright <= 0:
            return
        if cfg.use_confidence_pruning and not conf_ok:
            pc["confidence"] += 1
        elif cfg.use_pe_bounds and repeu < self.minutil:
            pc["right_gate"] += 1
        else:
            self._right(x, y, rows, ant)

    # ---- preprocessing -----------------------------------------------------

    def prepare(self):
        db = self.db
        cfg = self.cfg
        if cfg.use_seu_item_pruning:
            db, removed = prune_unpromising_items(db, self.minutil)
            self.stats.items_removed = len(removed)
            self.stats.prune_counters["seu_item"] = len(removed)
        self.work_db = db
        self.names = db.items
        rank = {name: r for r, name in enumerate(self.names)}
        max_sid = max((s.sid for s in db), default=0)
        self.seqs: list[SequenceIndex | None] = [None] * (max_sid + 1)
        for s in db:
            idx = SequenceIndex(s, rank, db.eutil)
            if not cfg.use_upsl:
                idx.total = sum(idx.utils)
            self.seqs[s.sid] = idx

    def _span(self, s: SequenceIndex, lo: int, hi: int) -> int:
        """Utility of flat indices ``lo..hi-1``."""
        if self.cfg.use_upsl:
            return s.prefix[hi] - s.prefix[lo]
        return sum(s.utils[lo:hi])

    # ---- seeds -------------------------------------------------------------

    def run(self):
        occ: dict[int, list[tuple[int, int]]] = {}
        for s in self.seqs:
            if s is None:
                continue
            for k, it in enumerate(s.items):
                occ.setdefault(it, []).append((s.sid, k))
        cfg = self.cfg
        st = self.stats
        span = self._span
        minutil = self.minutil
        for a in sorted(occ):
            occurrences = occ[a]
            # pass 1: SEU of each seed <a> -> <b>
            if cfg.use_seu_rule_pruning:
                seu: dict[int, int] = {}
                for sid, i in occurrences:
                    s = self.seqs[sid]
                    total = s.total
                    items = s.items
                    for j in range(s.end_of[s.pos[i]] + 1, s.n):
                        b = items[j]
                        seu[b] = seu.get(b, 0) + total
                keep = {b for b, v in seu.items() if v >= minutil}
                st.prune_counters["seu_rule"] += len(seu) - len(keep)
                if not keep:
                    continue
            else:
                keep = None
            # pass 2: tables of the surviving seeds
            legal: dict[int, list[tuple]] = {}
            for sid, i in occurrences:
                s = self.seqs[sid]
                items, pos, utils = s.items, s.pos, s.utils
                n = s.n
                ua = utils[i]
                alpha = pos[i]
                for j in range(s.end_of[alpha] + 1, n):
                    b = items[j]
                    if keep is not None and b not in keep:
                        continue
                    beta = pos[j]
                    u = ua + utils[j]
                    uleft = span(s, i + 1, s.end_of[beta - 1] + 1)
                    uright = span(s, j + 1, n)
                    row = (sid, u, u + uleft if uleft else 0, u + uright if uright else 0,
                           alpha, beta, beta, i, j)
                    legal.setdefault(b, []).append(row)
            for b in sorted(legal):
                self._seed(a, b, legal[b], occurrences)

    def _seed(self, a: int, b: int, legal_rows: list[tuple], occurrences):
        st = self.stats
        st.seed_rules += 1
        x = ((a,),)
        y = ((b,),)
        yset = frozenset((b,))
        if self.plus:
            legal_sids = {r[0] for r in legal_rows}
            art = {sid: i for sid, i in occurrences if sid not in legal_sids}
            rows = legal_rows
            ant = len(rows) + len(art)
        else:
            art = None
            rows = []
            it = iter(legal_rows)
            nxt = next(it, None)
            for sid, i in occurrences:
                if nxt is not None and nxt[0] == sid:
                    rows.append(nxt)
                    nxt = next(it, None)
                else:
                    rows.append((sid, 0, 0, 0, self.seqs[sid].pos[i], -1, -1, i, -1))
            ant = len(rows)
        self._grow(len(rows))
        sup = len(legal_rows)
        usum = uleft = uright = repeu = 0
        for r in legal_rows:
            usum += r[1]
            repeu += r[3]
            if r[2]:
                uleft += r[2] - r[1]
            if r[3]:
                uright += r[3] - r[1]
        conf_ok = self._evaluate(x, y, sup, ant, usum)
        self._next(x, y, yset, rows, art, ant, sup, usum, uleft, uright, repeu, conf_ok)
        self._grow(-len(rows))

    # ---- left expansion ----------------------------------------------------

    def _left(self, x, y, yset, rows, art, repeu_r):
        st = self.stats
        st.left_expansions += 1
        plus = self.plus
        use_upsl = self.cfg.use_upsl
        seqs = self.seqs
        # phase 1: child key -> [rows, legal count, antecedent-only sids (plus engine)]
        acc: dict[int, list] = {}
        built = 0
        for row in rows:
            sid, u, lepeu, repeu, a, b, g, xe, ye = row
            s = seqs[sid]
            items, pos = s.items, s.pos
            n = s.n
            if u:
                utils, prefix = s.utils, s.prefix
                last = s.end_of[b - 1]
                uright = repeu - u if repeu else 0
                top = prefix[last + 1]
                for k in range(xe + 1, last + 1):
                    p = pos[k]
                    key = items[k] * 2 + (p != a)
                    u2 = u + utils[k]
                    uleft2 = top - prefix[k + 1] if use_upsl else sum(utils[k + 1:last + 1])
                    c = acc.get(key)
                    if c is None:
                        c = acc[key] = [[], 0, None]
                    c[0].append((sid, u2, u2 + uleft2 if uleft2 else 0, u2 + uright if uright else 0,
                                 p, b, g, k, ye))
                    c[1] += 1
                built += last - xe
                # items at or after the consequent's first itemset: antecedent-only
                for k in range(last + 1, n):
                    it = items[k]
                    if it in yset:
                        continue
                    key = it * 2 + 1
                    c = acc.get(key)
                    if c is None:
                        c = acc[key] = [[], 0, None]
                    if plus:
                        if c[2] is None:
                            c[2] = {}
                        c[2][sid] = k
                    else:
                        c[0].append((sid, 0, 0, 0, pos[k], -1, -1, k, -1))
                        built += 1
            else:
                for k in range(xe + 1, n):
                    it = items[k]
                    if it in yset:
                        continue
                    p = pos[k]
                    key = it * 2 + (p != a)
                    c = acc.get(key)
                    if c is None:
                        c = acc[key] = [[], 0, None]
                    c[0].append((sid, 0, 0, 0, p, -1, -1, k, -1))
                    built += 1

        # phase 2: filter on the completed bounds, then evaluate and recurse
        self._grow(built)
        rs = self.cfg.use_rs_bounds
        pc = st.prune_counters
        minutil = self.minutil
        edges = self.on_edge is not None
        parent_lepeu = {r[0]: r[2] for r in rows} if rs == "rsu" or edges else None
        survivors = []
        for key in sorted(acc):
            c = acc[key]
            legal = c[1]
            if not legal:
                continue
            child_rows = c[0]
            rsu = rspeu = None
            if rs == "rspeu" or edges:
                rspeu = sum(r[2] or r[1] for r in child_rows)
                if rs == "rspeu" and repeu_r + rspeu < minutil:
                    pc["lerspeu"] += 1
                    continue
            if rs == "rsu" or edges:
                rsu = sum(parent_lepeu[r[0]] for r in child_rows if r[1])
                if rs == "rsu" and repeu_r + rsu < minutil:
                    pc["lersu"] += 1
                    continue
            survivors.append((key, c, rsu, rspeu))
        if plus and art and survivors:
            self._extend_art(art, survivors)
        for key, c, rsu, rspeu in survivors:
            legal = c[1]
            child_rows = c[0]
            item, smode = divmod(key, 2)
            if smode:
                x2 = x + ((item,),)
            else:
                x2 = x[:-1] + (x[-1] + (item,),)
            usum = uleft = uright = repeu = 0
            for r in child_rows:
                u = r[1]
                if u:
                    usum += u
                    if r[2]:
                        uleft += r[2] - u
                    if r[3]:
                        uright += r[3] - u
                        repeu += r[3]
            if plus:
                art2 = c[2] or {}
                ant = legal + len(art2)
            else:
                art2 = None
                ant = len(child_rows)
            conf_ok = self._evaluate(x2, y, legal, ant, usum)
            if edges:
                self.on_edge(Edge("left", self._rule(x, y), self._rule(x2, y), usum,
                                  sum(parent_lepeu.values()), rsu, rspeu))
            self._next(x2, y, yset, child_rows, art2, ant, legal, usum, uleft, uright, repeu, conf_ok)
        self._grow(-built)

    # ---- right expansion ---------------------------------------------------

    def _right(self, x, y, rows, ant):
        st = self.stats
        st.right_expansions += 1
        plus = self.plus
        use_upsl = self.cfg.use_upsl
        seqs = self.seqs
        acc: dict[int, list] = {}
        built = 0
        for row in rows:
            sid, u, lepeu, repeu, a, b, g, xe, ye = row
            if not repeu:
                continue
            s = seqs[sid]
            items, pos, utils, prefix = s.items, s.pos, s.utils, s.prefix
            n = s.n
            top = prefix[n]
            for k in range(ye + 1, n):
                p = pos[k]
                key = items[k] * 2 + (p != g)
                u2 = u + utils[k]
                uright2 = top - prefix[k + 1] if use_upsl else sum(utils[k + 1:])
                c = acc.get(key)
                if c is None:
                    c = acc[key] = []
                c.append((sid, u2, 0, u2 + uright2 if uright2 else 0, a, b, p, xe, k))
            built += n - ye - 1

        self._grow(built)
        rs = self.cfg.use_rs_bounds
        pc = st.prune_counters
        minutil = self.minutil
        edges = self.on_edge is not None
        parent_repeu = {r[0]: r[3] for r in rows} if rs == "rsu" or edges else None
        for key in sorted(acc):
            child_rows = acc[key]
            if rs == "rspeu" or edges:
                rspeu = sum(r[3] or r[1] for r in child_rows)
                if rs == "rspeu" and rspeu < minutil:
                    pc["rerspeu"] += 1
                    continue
            if rs == "rsu" or edges:
                rsu = sum(parent_repeu[r[0]] for r in child_rows)
                if rs == "rsu" and rsu < minutil:
                    pc["rersu"] += 1
                    continue
            item, smode = divmod(key, 2)
            if smode:
                y2 = y + ((item,),)
            else:
                y2 = y[:-1] + (y[-1] + (item,),)
            legal = len(child_rows)
            usum = uright = repeu = 0
            for r in child_rows:
                usum += r[1]
                if r[3]:
                    uright += r[3] - r[1]
                    repeu += r[3]
            if not plus:
                child_rows = self._with_sentinels(rows, child_rows)
                self._grow(len(child_rows) - legal)
            conf_ok = self._evaluate(x, y2, legal, ant, usum)
            if edges:
                self.on_edge(Edge("right", self._rule(x, y), self._rule(x, y2), usum,
                                  sum(parent_repeu.values()), rsu, rspeu))
            self._maybe_right(x, y2, child_rows, ant, uright, repeu, conf_ok)
            if not plus:
                self._grow(legal - len(child_rows))
        self._grow(-built)

    def _extend_art(self, art: dict[int, int], survivors) -> None:
        """Add to each surviving child's record the parent's antecedent-only
        sequences in which the child's antecedent still occurs.

        Either probe every (child, sequence) pair through the item index or
        scan each recorded sequence once, whichever touches fewer entries.
        """
        seqs = self.seqs
        for sv in survivors:
            if sv[1][2] is None:
                sv[1][2] = {}
        strategy = self.art_strategy
        if strategy == "auto":
            scan_cost = sum(seqs[sid].n - xe for sid, xe in art.items())
            strategy = "probe" if len(survivors) * len(art) <= scan_cost else "scan"
        if strategy == "probe":
            for key, c, _, _ in survivors:
                item, smode = divmod(key, 2)
                rec = c[2]
                for sid, xe in art.items():
                    s = seqs[sid]
                    k = s.index_of.get(item)
                    if k is not None and k > xe and (s.pos[k] > s.pos[xe]) == bool(smode):
                        rec[sid] = k
            return
        wanted = {key: c[2] for key, c, _, _ in survivors}
        for sid, xe in art.items():
            s = seqs[sid]
            items, pos = s.items, s.pos
            a = pos[xe]
            for k in range(xe + 1, s.n):
                rec = wanted.get(items[k] * 2 + (pos[k] != a))
                if rec is not None:
                    rec[sid] = k

    @staticmethod
    def _with_sentinels(parent_rows, child_rows):
        """Interleave sentinel rows so every antecedent supporter has a row."""
        out = []
        it = iter(child_rows)
        nxt = next(it, None)
        for r in parent_rows:
            if nxt is not None and nxt[0] == r[0]:
                out.append(nxt)
                nxt = next(it, None)
            else:
                out.append((r[0], 0, 0, 0, r[4], -1, -1, r[7], -1))
        return out


def mine(db: SequenceDatabase, thresholds: Thresholds, cfg: VariantConfig | str = "totalsr", *,
         on_edge: Callable[[Edge], None] | None = None, time_limit: float | None = None,
         debug: bool = False) -> MiningResult:
    """Return every rule with utility >= minutil and confidence >= minconf.

    The result does not depend on ``cfg``; the configuration only changes how
    much of the search space is visited (see ``MiningResult.stats``).
    ``on_edge`` receives every expansion step taken, for auditing bounds.
    """
    if isinstance(cfg, str):
        cfg = variant(cfg)
    t0 = time.perf_counter()
    search = _Search(db, thresholds, cfg, on_edge, time_limit, debug)
    search.prepare()
    t1 = time.perf_counter()
    try:
        search.run()
    except _Timeout:
        search.stats.timed_out = True
        log.warning("time limit reached after %d candidates; result is partial",
                    search.stats.candidates_evaluated)
    t2 = time.perf_counter()
    stats = search.stats
    stats.wall_time = {"preprocess": t1 - t0, "search": t2 - t1, "total": t2 - t0}
    rules = sorted(search.found, key=lambda m: str(m.rule))
    return MiningResult(rules, stats, cfg, thresholds)


def mine_plus(db: SequenceDatabase, thresholds: Thresholds, **kwargs) -> MiningResult:
    """Mine with every strategy on and the record-table bookkeeping."""
    return mine(db, thresholds, VARIANTS["totalsr+"], **kwargs)


@dataclass
class Preprocessed:
    """What the search starts from: the reduced database and the seed tables."""

    db: SequenceDatabase
    upsls: dict[int, UPSL]
    # seed rule -> (LE rows, antecedent-only sids); the rows include the
    # sentinels for the totalsr engine and the sids are the ART otherwise
    seeds: dict[Rule, tuple[list[LEElement], list[int]]]


def preprocess(db: SequenceDatabase, thresholds: Thresholds,
               cfg: VariantConfig | str = "totalsr") -> Preprocessed:
    """Run item pruning and build the surviving 1*1 seed rules with their tables.

    Meant for inspection and tests; ``mine`` does the same work lazily.
    """
    if isinstance(cfg, str):
        cfg = variant(cfg)
    search = _Search(db, thresholds, cfg, None, None, False)
    search.prepare()
    seeds = {}

    def capture(x, y, yset, rows, art, *rest):
        seeds[search._rule(x, y)] = (le_rows_public(rows, search.seqs), sorted(art or ()))

    search._evaluate = lambda *args: True
    search._next = capture
    search.run()
    work = search.work_db
    return Preprocessed(work, {s.sid: work.upsl(s.sid) for s in work}, seeds)


def le_rows_public(rows, seqs) -> list[LEElement]:
    """Convert internal rows to ``LEElement`` (1-based indices)."""
    out = []
    for sid, u, lepeu, repeu, a, b, g, xe, ye in rows:
        if not u:
            out.append(LEElement(sid, 0, 0, 0, (a, -1, -1), (-1, -1)))
            continue
        s = seqs[sid]
        last = s.end_of[b - 1]
        first = xe + 2 if xe + 1 <= last else s.n
        out.append(LEElement(sid, u, lepeu, repeu, (a, b, g), (first, s.n)))
    return out
