"""Quantitative sequence databases.

A database is a list of sequences; each sequence is an ordered list of
itemsets of ``(item, quantity)`` pairs, and every item carries a positive
unit utility from an external table. An item appears at most once per
sequence.

Utilities are kept as integers in *units* of ``1 / eutil.scale``. The scale
is 1 when every unit utility is integral and ``10**4`` otherwise, so every
sum of products is exact and reproducible. ``SequenceDatabase.value`` turns
units back into an exact number (``int`` or ``Fraction``).

File formats
------------
Database: one sequence per line, ``item:quantity`` tokens, ``-1`` closes an
itemset and ``-2`` ends the line::

    a:2 b:1 -1 c:2 -1 d:4 f:2 -1 -2

External utilities: one ``item:unit_utility`` per line, e.g. ``c:3``.
Blank lines and lines starting with ``#`` are ignored in both files.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

FIXED_POINT_SCALE = 10**4
_FORBIDDEN_IN_ITEM = set(",{}:")


class SeqDBError(ValueError):
    """Base class for database loading and validation errors."""


class Malformed(SeqDBError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class DuplicateItemInSequence(SeqDBError):
    def __init__(self, sid: int, item: str):
        super().__init__(f"item {item!r} occurs more than once in sequence {sid}")
        self.sid = sid
        self.item = item


class UnknownItem(SeqDBError):
    def __init__(self, item: str):
        super().__init__(f"item {item!r} has no external utility")
        self.item = item


class NonPositiveQuantityOrUtility(SeqDBError):
    pass


class ItemAbsent(LookupError):
    pass


class IndexOutOfRange(IndexError):
    pass


def item_key(token: str) -> tuple[int, bytes]:
    """Shortlex sort key: shorter tokens first, then bytewise."""
    raw = token.encode()
    return (len(raw), raw)


def sort_items(tokens: Iterable[str]) -> list[str]:
    return sorted(tokens, key=item_key)


def check_item_token(token: str) -> None:
    if not token or token in ("-1", "-2") or any(c.isspace() for c in token):
        raise ValueError(f"invalid item token {token!r}")
    if _FORBIDDEN_IN_ITEM & set(token):
        raise ValueError(f"item token {token!r} may not contain any of ',{{}}:'")


class ExternalUtilityTable(Mapping[str, Fraction]):
    """Unit utility per item, stored exactly."""

    def __init__(self, values: Mapping[str, object]):
        table: dict[str, Fraction] = {}
        for item, raw in values.items():
            value = _exact(raw)
            if value <= 0:
                raise NonPositiveQuantityOrUtility(
                    f"unit utility of {item!r} must be positive, got {raw}")
            table[item] = value
        self._values = table
        if all(v.denominator == 1 for v in table.values()):
            self.scale = 1
        else:
            self.scale = FIXED_POINT_SCALE
            for item, v in table.items():
                if (v * self.scale).denominator != 1:
                    raise NonPositiveQuantityOrUtility(
                        f"unit utility of {item!r} has more than 4 decimal places")
        self._units = {item: int(v * self.scale) for item, v in table.items()}

    def __getitem__(self, item: str) -> Fraction:
        return self._values[item]

    def __iter__(self) -> Iterator[str]:
        return iter(self._values)

    def __len__(self) -> int:
        return len(self._values)

    def units(self, item: str) -> int:
        return self._units[item]

    def restricted(self, items: Iterable[str]) -> ExternalUtilityTable:
        return ExternalUtilityTable({i: self._values[i] for i in items})


def _exact(raw: object) -> Fraction:
    if isinstance(raw, Fraction):
        return raw
    if isinstance(raw, float):
        raw = repr(raw)
    try:
        return Fraction(Decimal(str(raw)))
    except (InvalidOperation, ValueError) as exc:
        raise ValueError(f"not a number: {raw!r}") from exc


def format_number(value: int | Fraction) -> str:
    """Exact decimal rendering (`28`, `3.25`); falls back to a ratio."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    den = value.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{value.numerator}/{value.denominator}"
    digits = max(twos, fives)
    text = str(Decimal(value.numerator) / Decimal(value.denominator))
    if "E" in text or "e" in text:
        text = f"{Decimal(value.numerator) / Decimal(value.denominator):.{digits}f}"
    return text


class QItem(NamedTuple):
    item: str
    quantity: int


@dataclass(frozen=True)
class QSequence:
    """One quantitative sequence.

    ``position`` is the 1-based itemset ordinal of an item and ``index`` its
    1-based ordinal in the flattened sequence.
    """

    sid: int
    itemsets: tuple[tuple[QItem, ...], ...]
    _where: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        where = {}
        index = 0
        for position, itemset in enumerate(self.itemsets, 1):
            for qi in itemset:
                index += 1
                where[qi.item] = (position, index, qi.quantity)
        object.__setattr__(self, "_where", where)

    def __len__(self) -> int:
        return len(self._where)

    def __contains__(self, item: str) -> bool:
        return item in self._where

    @property
    def items(self) -> list[str]:
        return [qi.item for itemset in self.itemsets for qi in itemset]

    def position(self, item: str) -> int:
        return self._locate(item)[0]

    def index(self, item: str) -> int:
        return self._locate(item)[1]

    def quantity(self, item: str) -> int:
        return self._locate(item)[2]

    def _locate(self, item: str) -> tuple[int, int, int]:
        try:
            return self._where[item]
        except KeyError:
            raise ItemAbsent(f"item {item!r} not in sequence {self.sid}") from None


@dataclass(frozen=True)
class UPSL:
    """Utility prefix sums of one sequence.

    ``prefix[k - 1]`` is the total utility (in units) of the first ``k``
    items, so ``prefix`` has one entry per item.
    """

    prefix: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.prefix)


def build_upsl(seq: QSequence, eutil: ExternalUtilityTable) -> UPSL:
    total = 0
    out = []
    for itemset in seq.itemsets:
        for qi in itemset:
            total += qi.quantity * eutil.units(qi.item)
            out.append(total)
    return UPSL(tuple(out))


def range_utility(upsl: UPSL, from_index: int, to_index: int) -> int:
    """Utility of flat indices ``from_index..to_index`` (1-based, inclusive)."""
    if not 1 <= from_index <= to_index <= len(upsl.prefix):
        raise IndexOutOfRange(
            f"range [{from_index}, {to_index}] outside 1..{len(upsl.prefix)}")
    before = upsl.prefix[from_index - 2] if from_index > 1 else 0
    return upsl.prefix[to_index - 1] - before


@dataclass(frozen=True)
class SequenceDatabase:
    sequences: tuple[QSequence, ...]
    eutil: ExternalUtilityTable

    def __len__(self) -> int:
        return len(self.sequences)

    def __iter__(self) -> Iterator[QSequence]:
        return iter(self.sequences)

    @cached_property
    def _by_sid(self) -> dict[int, QSequence]:
        return {s.sid: s for s in self.sequences}

    def sequence(self, sid: int) -> QSequence:
        return self._by_sid[sid]

    @cached_property
    def items(self) -> list[str]:
        """Distinct items occurring in the database, in item order."""
        return sort_items({qi.item for s in self.sequences
                           for itemset in s.itemsets for qi in itemset})

    @property
    def scale(self) -> int:
        return self.eutil.scale

    def value(self, units: int) -> int | Fraction:
        """Convert integer utility units back to an exact number."""
        if self.eutil.scale == 1:
            return units
        v = Fraction(units, self.eutil.scale)
        return v.numerator if v.denominator == 1 else v

    def units(self, utility: object) -> Fraction:
        return _exact(utility) * self.eutil.scale

    def upsl(self, sid: int) -> UPSL:
        cache = self.__dict__.setdefault("_upsl_cache", {})
        if sid not in cache:
            cache[sid] = build_upsl(self.sequence(sid), self.eutil)
        return cache[sid]

    def sequence_units(self, seq: QSequence) -> int:
        return sum(qi.quantity * self.eutil.units(qi.item)
                   for itemset in seq.itemsets for qi in itemset)


def item_units(db: SequenceDatabase, item: str, sid: int) -> int:
    seq = db.sequence(sid)
    return seq.quantity(item) * db.eutil.units(item)


def item_utility(db: SequenceDatabase, item: str, sid: int) -> int | Fraction:
    """q(item, s) times the item's unit utility, as an exact number."""
    return db.value(item_units(db, item, sid))


def _canonical_itemset(itemset: Iterable[QItem], sid: int) -> tuple[QItem, ...]:
    out = tuple(sorted(itemset, key=lambda qi: item_key(qi.item)))
    if not out:
        raise SeqDBError(f"empty itemset in sequence {sid}")
    return out


def make_database(rows: Sequence[Sequence[Sequence[tuple[str, int]]]],
                  eutil: Mapping[str, object] | ExternalUtilityTable,
                  sids: Sequence[int] | None = None) -> SequenceDatabase:
    """Validate and build a database from nested ``(item, quantity)`` lists."""
    table = eutil if isinstance(eutil, ExternalUtilityTable) else ExternalUtilityTable(eutil)
    sequences = []
    for n, row in enumerate(rows):
        sid = sids[n] if sids is not None else n + 1
        seen: set[str] = set()
        itemsets = []
        for itemset in row:
            qitems = []
            for item, quantity in itemset:
                check_item_token(item)
                if item in seen:
                    raise DuplicateItemInSequence(sid, item)
                seen.add(item)
                if item not in table:
                    raise UnknownItem(item)
                if int(quantity) != quantity or quantity < 1:
                    raise NonPositiveQuantityOrUtility(
                        f"quantity of {item!r} in sequence {sid} must be a positive integer")
                qitems.append(QItem(item, int(quantity)))
            itemsets.append(_canonical_itemset(qitems, sid))
        sequences.append(QSequence(sid, tuple(itemsets)))
    return SequenceDatabase(tuple(sequences), table)


def _content_lines(text: str) -> Iterator[tuple[int, str]]:
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if stripped and not stripped.startswith("#"):
            yield lineno, stripped


def parse_eutil(text: str) -> ExternalUtilityTable:
    values: dict[str, object] = {}
    for lineno, line in _content_lines(text):
        item, sep, raw = line.rpartition(":")
        if not sep or not item or len(line.split()) != 1:
            raise Malformed(lineno, f"expected 'item:unit_utility', got {line!r}")
        try:
            check_item_token(item)
            value = _exact(raw)
        except ValueError as exc:
            raise Malformed(lineno, str(exc)) from None
        if item in values:
            raise Malformed(lineno, f"duplicate external utility for {item!r}")
        values[item] = value
    return ExternalUtilityTable(values)


def parse_database(db_text: str, eutil_text: str) -> SequenceDatabase:
    eutil = parse_eutil(eutil_text)
    rows = []
    for lineno, line in _content_lines(db_text):
        tokens = line.split()
        if tokens[-1] != "-2":
            raise Malformed(lineno, "sequence must end with -2")
        row: list[list[tuple[str, int]]] = []
        current: list[tuple[str, int]] = []
        for tok in tokens[:-1]:
            if tok == "-1":
                if not current:
                    raise Malformed(lineno, "empty itemset")
                row.append(current)
                current = []
                continue
            if tok == "-2":
                raise Malformed(lineno, "-2 before end of line")
            item, sep, raw = tok.rpartition(":")
            if not sep or not item:
                raise Malformed(lineno, f"expected 'item:quantity', got {tok!r}")
            try:
                check_item_token(item)
                quantity = int(raw)
            except ValueError as exc:
                raise Malformed(lineno, str(exc)) from None
            if quantity < 1:
                raise NonPositiveQuantityOrUtility(
                    f"line {lineno}: quantity of {item!r} must be >= 1")
            current.append((item, quantity))
        if current:
            raise Malformed(lineno, "itemset not terminated by -1")
        rows.append(row)
    return make_database(rows, eutil)


def load_database(db_path, eutil_path) -> SequenceDatabase:
    with open(db_path, encoding="utf-8") as f:
        db_text = f.read()
    with open(eutil_path, encoding="utf-8") as f:
        eutil_text = f.read()
    return parse_database(db_text, eutil_text)


def format_database(db: SequenceDatabase) -> str:
    lines = []
    for seq in db.sequences:
        toks = []
        for itemset in seq.itemsets:
            toks.extend(f"{qi.item}:{qi.quantity}" for qi in itemset)
            toks.append("-1")
        toks.append("-2")
        lines.append(" ".join(toks))
    return "\n".join(lines) + ("\n" if lines else "")


def format_eutil(eutil: ExternalUtilityTable) -> str:
    return "".join(f"{item}:{format_number(eutil[item])}\n" for item in sort_items(eutil))


def remove_items(db: SequenceDatabase, victims: Iterable[str]) -> SequenceDatabase:
    """Drop ``victims`` everywhere; emptied itemsets vanish, emptied sequences stay."""
    victims = set(victims)
    if not victims:
        return db
    sequences = []
    for seq in db.sequences:
        itemsets = []
        for itemset in seq.itemsets:
            kept = tuple(qi for qi in itemset if qi.item not in victims)
            if kept:
                itemsets.append(kept)
        sequences.append(QSequence(seq.sid, tuple(itemsets)))
    return SequenceDatabase(tuple(sequences), db.eutil)


class SequenceIndex:
    """Flat, integer-ranked view of one sequence for the search engine.

    All indices here are 0-based flat indices. ``prefix[k]`` is the utility
    of the first ``k`` items (``prefix[0] == 0``), ``end_of[p]`` the flat index
    of the last item of itemset ``p`` (1-based position).
    """

    __slots__ = ("sid", "items", "pos", "utils", "prefix", "end_of", "index_of", "n", "total")

    def __init__(self, seq: QSequence, rank: Mapping[str, int], eutil: ExternalUtilityTable):
        self.sid = seq.sid
        items, pos, utils = [], [], []
        end_of = [-1]
        for p, itemset in enumerate(seq.itemsets, 1):
            for qi in itemset:
                items.append(rank[qi.item])
                pos.append(p)
                utils.append(qi.quantity * eutil.units(qi.item))
            end_of.append(len(items) - 1)
        prefix = [0]
        for u in utils:
            prefix.append(prefix[-1] + u)
        self.items = items
        self.pos = pos
        self.utils = utils
        self.prefix = prefix
        self.end_of = end_of
        self.index_of = {it: k for k, it in enumerate(items)}
        self.n = len(items)
        self.total = prefix[-1]
