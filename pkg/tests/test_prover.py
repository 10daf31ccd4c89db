from __future__ import annotations

import itertools
import random

import pytest

from counterchain import (
    FactId,
    Literal,
    State,
    Status,
    Theory,
    count_models,
    entails,
    licensed_patterns,
    parse_rule,
    propagate,
    theory_for,
)
from counterchain.prover import (
    Direction,
    PropagationContradiction,
    UniverseTooLargeError,
    match_pattern,
    verify_catalog,
)

from .oracles import oracle_count_models, oracle_entails, random_theory

F = FactId


def lit(text: str) -> Literal:
    from counterchain import parse_literal
    return parse_literal(text)


def th(*rules: str, extra=()) -> Theory:
    return theory_for([parse_rule(r) for r in rules], [F(i) for i in extra])


def test_count_models_single_implication():
    assert count_models(th("[F0] -> [F5]"), State()) == 3


def test_count_models_xor_forces_other_side():
    assert count_models(th("[F0] xor [F1]"), State({F(0): True})) == 1


def test_count_models_direct_violation():
    theory = th("[F0] -> [F1]")
    assert count_models(theory, State({F(0): True, F(1): False})) == 0


def test_count_models_free_facts_power_of_two():
    for n in range(1, 11):
        theory = Theory((), tuple(F(i) for i in range(n)))
        assert count_models(theory, State()) == 2 ** n


def test_universe_cap():
    with pytest.raises(UniverseTooLargeError):
        Theory((), tuple(F(i) for i in range(25)))


def test_entails_modus_tollens():
    result = entails(th("[F0] -> [F5]"), State({F(5): False}), lit("[F0]=False"))
    assert result.status is Status.ENTAILED


def test_entails_disjunctive_consequent():
    theory = th("[F7] -> ([F8] or [F5])")
    result = entails(theory, State({F(7): True, F(8): False}), lit("[F5]=True"))
    assert result.status is Status.ENTAILED


def test_entails_returns_countermodel():
    theory = th("[F2] -> ([F6] and [F7])")
    result = entails(theory, State({F(6): False, F(7): True}), lit("[F2]=True"))
    assert result.status is Status.NOT_ENTAILED
    witness = result.witness
    assert witness is not None
    assert witness.holds(lit("[F2]=False"))
    assert witness.holds(lit("[F6]=False"))
    assert witness.holds(lit("[F7]=True"))


def test_entails_inconsistent_state():
    theory = th("[F0] -> [F1]")
    result = entails(theory, State({F(0): True, F(1): False}), lit("[F0]=True"))
    assert result.status is Status.INCONSISTENT
    assert result.witness is None


def test_propagate_xor():
    theory = th("[F9] xor [F12]", extra=(9, 12))
    out = propagate(theory, State({F(12): False}))
    assert out.holds(lit("[F9]=True"))


def test_propagate_no_rules_identity():
    theory = Theory((), (F(0),))
    s = State({F(0): True})
    assert propagate(theory, s) == s


def test_propagate_contradiction_raises():
    theory = th("[F0] -> [F1]", "[F0] xor [F1]")
    with pytest.raises(PropagationContradiction):
        propagate(theory, State({F(0): True, F(1): False}))


def test_catalog_verifies_sound():
    assert verify_catalog()


def test_impl_patterns_exclude_converse():
    rule = parse_rule("[F0] -> [F1]")
    pats = licensed_patterns(rule)
    assert len(pats) == 2
    derived = {(p.bind_derived(rule), p.direction) for p in pats}
    assert (lit("[F1]=True"), Direction.FORWARD) in derived
    assert (lit("[F0]=False"), Direction.BACKWARD) in derived
    # converse: concluding the antecedent true from the consequent is absent
    assert match_pattern(rule, [lit("[F1]=True")], lit("[F0]=True")) is None


def test_xor_bare_patterns_both_directions():
    rule = parse_rule("[F0] xor [F1]")
    assert match_pattern(rule, [lit("[F0]=False")], lit("[F1]=True")) is not None
    assert match_pattern(rule, [lit("[F1]=True")], lit("[F0]=False")) is not None


def test_xor_ante_backward_equalizes_sides():
    rule = parse_rule("([F3] xor [F5]) -> [F6]")
    pat = match_pattern(rule, [lit("[F6]=False"), lit("[F5]=True")], lit("[F3]=True"))
    assert pat is not None and pat.direction is Direction.BACKWARD


def test_match_allows_extra_known_supports():
    rule = parse_rule("([F3] or [F4]) -> [F1]")
    pat = match_pattern(rule, [lit("[F3]=True"), lit("[F4]=False")], lit("[F1]=True"))
    assert pat is not None and pat.direction is Direction.FORWARD


def _random_theory(rng: random.Random, n_facts: int, n_rules: int) -> Theory:
    return random_theory(rng, n_facts, n_rules)


def test_count_models_matches_oracle_on_random_theories():
    rng = random.Random(7)
    for _ in range(120):
        n = rng.randint(3, 7)
        theory = _random_theory(rng, n, rng.randint(1, 4))
        fixed = {F(i): rng.random() < 0.5 for i in range(n) if rng.random() < 0.4}
        assert count_models(theory, State(fixed)) == oracle_count_models(theory, fixed)


def test_propagate_sound_on_500_random_theories():
    rng = random.Random(11)
    for _ in range(500):
        n = rng.randint(4, 10)
        theory = _random_theory(rng, n, rng.randint(1, 5))
        fixed = {F(i): rng.random() < 0.5 for i in range(n) if rng.random() < 0.35}
        state = State(fixed)
        if count_models(theory, state) == 0:
            continue
        try:
            closure = propagate(theory, state)
        except PropagationContradiction:
            continue
        for literal in closure.literals():
            assert entails(theory, state, literal).status is Status.ENTAILED


def test_entails_monotone_in_state():
    rng = random.Random(13)
    for _ in range(150):
        n = rng.randint(3, 6)
        theory = _random_theory(rng, n, rng.randint(1, 4))
        base = {F(i): rng.random() < 0.5 for i in range(n) if rng.random() < 0.3}
        state = State(base)
        query = Literal(F(rng.randrange(n)), rng.random() < 0.5)
        before = entails(theory, state, query)
        extra_fact = F(rng.randrange(n))
        if extra_fact in state.facts():
            continue
        bigger = state.with_literal(Literal(extra_fact, rng.random() < 0.5))
        after = entails(theory, bigger, query)
        if before.status is Status.ENTAILED:
            assert after.status in (Status.ENTAILED, Status.INCONSISTENT)


def test_entails_agrees_with_truth_table_oracle_exhaustive_small():
    rng = random.Random(17)
    for _ in range(200):
        n = rng.randint(3, 5)
        theory = _random_theory(rng, n, rng.randint(1, 3))
        for bits in itertools.product([None, False, True], repeat=n):
            fixed = {F(i): b for i, b in enumerate(bits) if b is not None}
            query = Literal(F(rng.randrange(n)), rng.random() < 0.5)
            got = entails(theory, State(fixed), query).status.value
            assert got == oracle_entails(theory, fixed, query)
        break  # one exhaustive theory is enough here; random sweep below


def test_entails_agrees_with_oracle_random_queries():
    rng = random.Random(19)
    for _ in range(400):
        n = rng.randint(3, 8)
        theory = _random_theory(rng, n, rng.randint(1, 5))
        fixed = {F(i): rng.random() < 0.5 for i in range(n) if rng.random() < 0.4}
        query = Literal(F(rng.randrange(n)), rng.random() < 0.5)
        got = entails(theory, State(fixed), query).status.value
        assert got == oracle_entails(theory, fixed, query)


def test_countermodel_witness_properties():
    from .oracles import rule_satisfied

    rng = random.Random(23)
    seen = 0
    for _ in range(300):
        n = rng.randint(3, 7)
        theory = _random_theory(rng, n, rng.randint(1, 4))
        fixed = {F(i): rng.random() < 0.5 for i in range(n) if rng.random() < 0.3}
        query = Literal(F(rng.randrange(n)), rng.random() < 0.5)
        result = entails(theory, State(fixed), query)
        if result.status is not Status.NOT_ENTAILED:
            assert result.witness is None
            continue
        seen += 1
        witness = result.witness
        assignment = {lit.fact: lit.value for lit in witness.literals()}
        assert set(assignment) == set(theory.universe)  # full assignment
        assert assignment[query.fact] != query.value    # falsifies the query
        for fact, value in fixed.items():
            assert assignment[fact] == value            # extends the state
        for rule in theory.rules:
            assert rule_satisfied(rule, assignment)     # satisfies the theory
    assert seen >= 50
