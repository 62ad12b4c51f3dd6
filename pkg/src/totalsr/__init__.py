"""Mining high-utility totally-ordered sequential rules."""
from __future__ import annotations

from .miner import VARIANTS, MiningResult, MiningStats, Thresholds, VariantConfig, mine, mine_plus
from .rules import MinedRule, Rule, format_rules
from .seqdb import SequenceDatabase, load_database, parse_database

__all__ = [
    "VARIANTS", "MiningResult", "MiningStats", "Thresholds", "VariantConfig", "mine", "mine_plus",
    "MinedRule", "Rule", "format_rules", "SequenceDatabase", "load_database", "parse_database",
]
