from __future__ import annotations

from fractions import Fraction

import pytest

from totalsr.rules import (AntecedentUnsupported, Occurrence, Rule, RuleSize, RuleSyntaxError,
                           antecedent_sids, confidence, fixed4, format_rules, measure, occurs_in,
                           rule_utility, supporting_sids, support)

R1 = Rule.parse("{e,f},{c} -> {b}")
R2 = Rule.parse("{e} -> {c}")
R3 = Rule.parse("{e,f} -> {c}")
R4 = Rule.parse("{e,f} -> {c},{b}")


def test_parse_and_render():
    assert str(R1) == "{e,f},{c} -> {b}"
    assert R1.antecedent == (("e", "f"), ("c",))
    assert Rule.parse(" { f , e } , {c}->{b} ") == R1
    assert Rule.of([["f", "e"], ["c"]], [["b"]]) == R1
    assert R1.size == RuleSize(3, 1)


@pytest.mark.parametrize("text", ["{a}", "{a} -> ", "{a} -> {}", "{a} -> {b", "a -> {b}",
                                  "{a,} -> {b}", "{a} -> {b} x"])
def test_parse_rejects(text):
    with pytest.raises(RuleSyntaxError):
        Rule.parse(text)


def test_rule_validation():
    with pytest.raises(ValueError):
        Rule.parse("{a} -> {a}")
    with pytest.raises(ValueError):
        Rule.parse("{a},{a} -> {b}")
    with pytest.raises(ValueError):
        Rule((("b", "a"),), (("c",),))
    with pytest.raises(ValueError):
        Rule((), (("c",),))


def test_rule_size_order():
    assert RuleSize(1, 1).smaller_than(RuleSize(1, 2))
    assert RuleSize(1, 1).smaller_than(RuleSize(2, 1))
    assert not RuleSize(2, 1).smaller_than(RuleSize(1, 2))
    assert not RuleSize(2, 2).smaller_than(RuleSize(2, 2))


def test_occurrences(toy):
    assert occurs_in(R1, toy.sequence(4)) == Occurrence(4, 2, 4, 4)
    assert occurs_in(R1, toy.sequence(3)) == Occurrence(3, 3, 4, 4)
    assert occurs_in(R1, toy.sequence(2)) is None
    assert supporting_sids(R1, toy) == [3, 4]
    assert antecedent_sids(R1, toy) == [2, 3, 4]


@pytest.mark.parametrize("rule, sup, conf, util", [
    (R1, Fraction(1, 2), Fraction(2, 3), 28),
    (R2, Fraction(3, 4), Fraction(1), 25),
    (R3, Fraction(3, 4), Fraction(1), 34),
    (R4, Fraction(1, 2), Fraction(2, 3), 28),
])
def test_table3_measures(toy, rule, sup, conf, util):
    assert support(rule, toy) == sup
    assert confidence(rule, toy) == conf
    assert rule_utility(rule, toy) == util


def test_order_sensitive_utility(toy):
    assert rule_utility(Rule.parse("{a,b} -> {c},{d}"), toy) == 15
    assert rule_utility(Rule.parse("{a,b} -> {d},{c}"), toy) == 10


def test_confidence_requires_antecedent(toy):
    with pytest.raises(AntecedentUnsupported):
        confidence(Rule.parse("{z} -> {a}"), toy)
    assert support(Rule.parse("{z} -> {a}"), toy) == 0


@pytest.mark.parametrize("value, text", [
    (Fraction(2, 3), "0.6667"), (Fraction(1, 8), "0.1250"), (Fraction(1, 20000), "0.0001"),
    (Fraction(1), "1.0000"), (Fraction(0), "0.0000"), (Fraction(99999, 100000), "1.0000"),
])
def test_fixed4(value, text):
    assert fixed4(value) == text


def test_rules_file_lines(toy):
    text = format_rules([measure(r, toy) for r in (R2, R4, R1, R3)])
    assert text.splitlines() == [
        "{e,f} -> {c} #SUP: 0.7500 #CONF: 1.0000 #UTIL: 34",
        "{e,f} -> {c},{b} #SUP: 0.5000 #CONF: 0.6667 #UTIL: 28",
        "{e,f},{c} -> {b} #SUP: 0.5000 #CONF: 0.6667 #UTIL: 28",
        "{e} -> {c} #SUP: 0.7500 #CONF: 1.0000 #UTIL: 25",
    ]
