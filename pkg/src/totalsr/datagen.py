"""Deterministic synthetic quantitative sequence databases.

Sequences are drawn independently from per-sequence random streams derived
from one seed, so the first ``n`` sequences of a larger database equal a
database generated with ``num_sequences = n``. Optionally a pool of short
sequential patterns is embedded into sequences (as in IBM-style generators)
so that rules recur across sequences instead of being almost all unique.
"""
from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from .seqdb import (ExternalUtilityTable, QItem, QSequence, SequenceDatabase, format_database,
                    format_eutil, item_key)

_UTIL_KEY = 0
_POOL_KEY = 1
_SEQ_KEY = 2


class InfeasibleParams(ValueError):
    pass


@dataclass(frozen=True)
class GenParams:
    num_sequences: int = 1000
    alphabet_size: int = 1000
    avg_itemsets_per_sequence: float = 6.22
    avg_items_per_itemset: float = 4.35
    max_quantity: int = 5
    unit_utility_range: tuple[float, float] = (1.0, 10.0)
    seed: int = 0
    max_itemsets_per_sequence: int | None = None
    max_items_per_itemset: int | None = None
    num_patterns: int = 0
    pattern_itemsets: float = 2.0
    pattern_items_per_itemset: float = 1.5
    pattern_probability: float = 0.5
    pattern_corruption: float = 0.0

    def validate(self) -> None:
        if self.num_sequences < 0:
            raise InfeasibleParams("num_sequences must be >= 0")
        if self.alphabet_size < 1 or self.max_quantity < 1:
            raise InfeasibleParams("alphabet_size and max_quantity must be positive")
        if self.avg_itemsets_per_sequence < 1 or self.avg_items_per_itemset < 1:
            raise InfeasibleParams("averages must be at least 1")
        low, high = self.unit_utility_range
        if not 0 < low <= high:
            raise InfeasibleParams("unit utility range must satisfy 0 < low <= high")
        if self.avg_items_per_itemset > self.alphabet_size:
            raise InfeasibleParams("itemsets cannot on average be larger than the alphabet")
        for cap, avg, name in ((self.max_itemsets_per_sequence, self.avg_itemsets_per_sequence, "itemsets"),
                               (self.max_items_per_itemset, self.avg_items_per_itemset, "items")):
            if cap is not None and cap < avg:
                raise InfeasibleParams(f"cap on {name} ({cap}) is below its average ({avg})")
        if (not 0 <= self.pattern_probability <= 1 or not 0 <= self.pattern_corruption < 1
                or self.num_patterns < 0):
            raise InfeasibleParams("bad pattern parameters")


class _Lengths:
    """Shifted geometric on 1.., optionally truncated at ``cap``, with a given mean."""

    def __init__(self, mean: float, cap: int | None):
        self.cap = cap
        if mean <= 1:
            self.p, self.cdf = 1.0, None
            return
        if cap is None:
            self.p, self.cdf = 1.0 / mean, None
            return
        k = np.arange(1, cap + 1)
        if mean > (cap + 1) / 2:
            raise InfeasibleParams(f"a decreasing length distribution capped at {cap} cannot average {mean}")

        def weights(p: float) -> np.ndarray:
            return (1 - p) ** (k - 1)

        def gap(p: float) -> float:
            w = weights(p)
            return float((k * w).sum() / w.sum()) - mean

        p = 0.0 if gap(0.0) <= 0 else brentq(gap, 0.0, 1.0)
        w = weights(p)
        self.p = p
        self.cdf = np.cumsum(w / w.sum())

    def draw(self, rng: np.random.Generator) -> int:
        if self.cdf is not None:
            return int(min(np.searchsorted(self.cdf, rng.random(), side="right"), self.cap - 1)) + 1
        if self.p >= 1.0:
            return 1
        return int(rng.geometric(self.p))


def _token(i: int) -> str:
    return str(i + 1)


def _unit_utilities(params: GenParams) -> ExternalUtilityTable:
    rng = np.random.default_rng(np.random.SeedSequence(params.seed, spawn_key=(_UTIL_KEY,)))
    low, high = params.unit_utility_range
    raw = rng.uniform(low, high, size=params.alphabet_size)
    return ExternalUtilityTable({
        _token(i): Fraction(Decimal(f"{min(max(v, low), high):.2f}")) for i, v in enumerate(raw)})


def _pattern_pool(params: GenParams) -> tuple[list[list[list[int]]], np.ndarray]:
    rng = np.random.default_rng(np.random.SeedSequence(params.seed, spawn_key=(_POOL_KEY,)))
    sets = _Lengths(params.pattern_itemsets, None)
    items = _Lengths(params.pattern_items_per_itemset, None)
    pool = []
    for _ in range(params.num_patterns):
        shape = [items.draw(rng) for _ in range(max(2, sets.draw(rng)))]
        total = min(sum(shape), params.alphabet_size)
        chosen = rng.choice(params.alphabet_size, size=total, replace=False).tolist()
        pattern, at = [], 0
        for size in shape:
            part = chosen[at:at + size]
            at += size
            if part:
                pattern.append(part)
        pool.append(pattern)
    weights = rng.exponential(1.0, size=params.num_patterns)
    return pool, weights / weights.sum() if params.num_patterns else weights


def _sequence(params: GenParams, sid: int, sets: _Lengths, items: _Lengths,
              pool, weights) -> list[list[tuple[int, int]]]:
    rng = np.random.default_rng(np.random.SeedSequence(params.seed, spawn_key=(_SEQ_KEY, sid)))
    n_sets = sets.draw(rng)
    sizes = [items.draw(rng) for _ in range(n_sets)]
    planted: list[list[int]] = [[] for _ in range(n_sets)]
    if pool and rng.random() < params.pattern_probability:
        pattern = pool[int(rng.choice(len(pool), p=weights))]
        if params.pattern_corruption:
            # drop each planted item independently, as IBM-style generators do
            pattern = [kept for part in pattern
                       if (kept := [i for i in part if rng.random() >= params.pattern_corruption])]
        if len(pattern) <= n_sets:
            slots = sorted(rng.choice(n_sets, size=len(pattern), replace=False).tolist())
            for slot, part in zip(slots, pattern):
                planted[slot] = list(part)
                sizes[slot] = max(sizes[slot], len(part))
    used = {i for part in planted for i in part}
    need = sum(sizes) - len(used)
    if sum(sizes) > params.alphabet_size:
        raise InfeasibleParams(
            f"sequence {sid} needs {sum(sizes)} distinct items but the alphabet has {params.alphabet_size}")
    draw = rng.choice(params.alphabet_size, size=need + len(used), replace=False).tolist()
    fill = [i for i in draw if i not in used][:need]
    at = 0
    out = []
    for size, part in zip(sizes, planted):
        extra = size - len(part)
        items = part + fill[at:at + extra]
        at += extra
        qty = rng.integers(1, params.max_quantity + 1, size=len(items)).tolist()
        out.append(list(zip(items, qty)))
    return out


def generate(params: GenParams) -> SequenceDatabase:
    """Build a database from ``params``; identical params give identical output."""
    params.validate()
    eutil = _unit_utilities(params)
    pool, weights = _pattern_pool(params)
    sets = _Lengths(params.avg_itemsets_per_sequence, params.max_itemsets_per_sequence)
    items = _Lengths(params.avg_items_per_itemset, params.max_items_per_itemset)
    seqs = []
    for sid in range(1, params.num_sequences + 1):
        rows = _sequence(params, sid, sets, items, pool, weights)
        itemsets = tuple(
            tuple(sorted((QItem(_token(i), q) for i, q in itemset), key=lambda qi: item_key(qi.item)))
            for itemset in rows)
        seqs.append(QSequence(sid, itemsets))
    used = {qi.item for s in seqs for itemset in s.itemsets for qi in itemset}
    return SequenceDatabase(tuple(seqs), eutil.restricted(used))


def write_database(db: SequenceDatabase, path: str | Path) -> tuple[Path, Path]:
    """Write ``path`` and a sibling ``.utl`` file; return both paths."""
    path = Path(path)
    utl = path.with_suffix(".utl")
    path.write_text(format_database(db))
    utl.write_text(format_eutil(db.eutil))
    return path, utl


@dataclass(frozen=True)
class DatasetStats:
    sequences: int
    items: int
    avg_itemsets: float
    max_itemsets: int
    avg_items_per_sequence: float
    avg_items_per_itemset: float

    def as_dict(self) -> dict:
        return {"|D|": self.sequences, "|I|": self.items, "avg(S)": self.avg_itemsets,
                "max(S)": self.max_itemsets, "avg(Seq)": self.avg_items_per_sequence,
                "avg(Ele)": self.avg_items_per_itemset}


def describe(db: SequenceDatabase) -> DatasetStats:
    n = len(db)
    if n == 0:
        return DatasetStats(0, 0, 0.0, 0, 0.0, 0.0)
    sets = [len(s.itemsets) for s in db]
    items = [len(s) for s in db]
    total_sets = sum(sets)
    return DatasetStats(n, len(db.items), sum(sets) / n, max(sets), sum(items) / n,
                        sum(items) / total_sets if total_sets else 0.0)


def synthetic_like(num_sequences: int, seed: int = 0, **overrides) -> GenParams:
    """Parameters for large, sparse databases: 7312 items, ~6 itemsets of ~4 items.

    Itemset counts are capped at 20 (the mean is preserved) and a small pool
    of corrupted patterns is planted so that rules recur across sequences.
    """
    base = dict(num_sequences=num_sequences, alphabet_size=7312, avg_itemsets_per_sequence=6.22,
                avg_items_per_itemset=4.35, seed=seed, max_itemsets_per_sequence=20,
                num_patterns=50, pattern_corruption=0.3, pattern_probability=0.8)
    base.update(overrides)
    return GenParams(**base)
