import random

import pytest
from hypothesis import given, settings

from oracles import pairwise_bisimilar
from servicecomp.automata import (
    Nfa,
    ServiceAutomaton,
    enabled_actions,
    is_isomorphic,
    minimize_bisim,
    parse_automaton,
    parse_nfa,
    serialize_automaton,
)
from servicecomp.errors import (
    DuplicateTransitionError,
    InvalidAutomatonError,
    MissingInitialError,
    SyntaxFormatError,
    UnknownReferenceError,
    UnknownStateError,
)
from servicecomp.generators import det_corpus, random_automaton
from servicecomp.reductions import pspace_encode
from strategies import automata

ONE_STATE = "states: s\nalphabet: a\ninitial: s\ntrans: s a -> s\n"


def test_parse_one_state():
    a = parse_automaton(ONE_STATE)
    assert a.states == ("s",)
    assert a.num_transitions == 1
    assert a.delta("s", "a") == "s"


def test_duplicate_transition_is_reported():
    text = "states: s s2\nalphabet: a\ninitial: s\ntrans: s a -> s\ntrans: s a -> s2\n"
    with pytest.raises(DuplicateTransitionError) as exc:
        parse_automaton(text)
    assert exc.value.kind == "duplicate-transition"
    assert exc.value.line == 5


def test_missing_initial():
    with pytest.raises(MissingInitialError) as exc:
        parse_automaton("states: s\nalphabet: a\ntrans: s a -> s\n")
    assert exc.value.kind == "missing-initial"


def test_unknown_reference_has_position():
    with pytest.raises(UnknownReferenceError) as exc:
        parse_automaton("states: s\nalphabet: a\ninitial: s\ntrans: s b -> s\n", "x.saut")
    assert (exc.value.line, exc.value.column) == (4, 10)
    assert "x.saut:4:10" in str(exc.value)


def test_syntax_error():
    with pytest.raises(SyntaxFormatError) as exc:
        parse_automaton("states: s\nalphabet: a\ninitial: s\ntrans: s a s\n")
    assert exc.value.kind == "syntax"
    with pytest.raises(SyntaxFormatError):
        parse_automaton("states: s:x\n")


def test_error_kinds_are_distinct():
    kinds = {cls.kind for cls in (SyntaxFormatError, DuplicateTransitionError, UnknownReferenceError, MissingInitialError)}
    assert len(kinds) == 4


def test_comments_and_nfa_choice():
    text = "automaton N  # header\nstates: p q\nalphabet: a\ninitial: p\ntrans: p a -> p\ntrans: p a -> q\n"
    n = parse_nfa(text)
    assert isinstance(n, Nfa)
    assert n.targets("p", "a") == ("p", "q")
    assert not n.is_deterministic()


def test_serialize_byte_identical_after_round_trip():
    a = parse_automaton(ONE_STATE)
    once = serialize_automaton(a)
    assert serialize_automaton(parse_automaton(once)) == once


def test_serialize_keeps_declaration_order():
    a = ServiceAutomaton("A", ["z", "a", "m"], ["y", "x"], "m", {("m", "x"): "z", ("z", "y"): "a", ("m", "y"): "a"})
    text = serialize_automaton(a)
    assert text == (
        "automaton A\nstates: z a m\nalphabet: y x\ninitial: m\n"
        "trans: z y -> a\ntrans: m y -> a\ntrans: m x -> z\n"
    )
    b = parse_automaton(text)
    assert b.states == a.states and b.alphabet == a.alphabet
    assert list(b.transitions()) == list(a.transitions())


def test_round_trip_random_automata():
    rng = random.Random(7)
    for k in range(100):
        a = random_automaton(rng, rng.randint(1, 8), ["a", "b", "c"], 0.5, f"R{k}")
        b = parse_automaton(serialize_automaton(a))
        assert b == a
        assert parse_automaton(serialize_automaton(b)) == b


@settings(max_examples=60, deadline=None)
@given(automata())
def test_round_trip_property(a):
    b = parse_automaton(serialize_automaton(a))
    assert b == a
    assert is_isomorphic(a, b)


def test_generated_gadgets_round_trip():
    inst = pspace_encode(det_corpus(count=4, min_each=2)[0])
    for x in inst.services + [inst.goal]:
        y = parse_automaton(serialize_automaton(x))
        assert y == x and y.is_deterministic()


def test_invalid_construction():
    with pytest.raises(InvalidAutomatonError):
        ServiceAutomaton("A", ["s"], ["a"], "t", {})
    with pytest.raises(InvalidAutomatonError):
        ServiceAutomaton("A", ["s"], ["a"], "s", {("s", "b"): "s"})
    with pytest.raises(InvalidAutomatonError):
        ServiceAutomaton("A", ["s s"], ["a"], "s s", {})


def test_enabled_actions():
    a = ServiceAutomaton("A", ["s", "t"], ["a", "b"], "s", {("s", "a"): "t"})
    assert enabled_actions(a, "t") == frozenset()
    assert enabled_actions(a, "s") == {"a"}
    with pytest.raises(UnknownStateError):
        enabled_actions(a, "zz")


def test_top_enables_every_label():
    inst = pspace_encode(det_corpus(count=4, min_each=2)[0])
    for a in inst.services:
        assert enabled_actions(a, "top") == set(a.alphabet)


def test_enabled_matches_scan():
    rng = random.Random(3)
    for _ in range(30):
        a = random_automaton(rng, 6, ["a", "b", "c", "d"], 0.4)
        for s in a.states:
            scan = {lab for (src, lab, _) in a.transitions() if src == s}
            assert enabled_actions(a, s) == scan
            assert enabled_actions(a, s) <= set(a.alphabet)


def test_minimize_idempotent_on_minimal():
    a = ServiceAutomaton("A", ["s", "t"], ["a", "b"], "s", {("s", "a"): "t", ("t", "b"): "t"})
    m = minimize_bisim(a)
    assert is_isomorphic(m, a)
    assert minimize_bisim(m) == m


def test_minimize_merges_equivalent_states():
    a = ServiceAutomaton("A", ["s", "t1", "t2"], ["a", "b"], "s",
                         {("s", "a"): "t1", ("s", "b"): "t2", ("t1", "a"): "s", ("t2", "a"): "s"})
    m = minimize_bisim(a)
    assert len(m.states) == 2
    assert "{t1+t2}" in m.states


def test_minimize_matches_pairwise_oracle():
    rng = random.Random(11)
    for _ in range(8):
        a = random_automaton(rng, 50, ["a", "b"], 0.6)
        m = minimize_bisim(a)
        reach = a.reachable_states()
        rel = pairwise_bisimilar(a)
        classes = {frozenset(t for t in reach if (s, t) in rel) for s in reach}
        assert len(m.states) == len(classes)
        assert len(m.states) <= len(a.states)
        # no two quotient states are bisimilar, and the quotient is bisimilar to a
        mrel = pairwise_bisimilar(m)
        assert all(s == t for s, t in mrel)
        assert (a.initial, m.initial) in pairwise_bisimilar(a, m)


@settings(max_examples=40, deadline=None)
@given(automata(max_states=7))
def test_minimize_properties(a):
    m = minimize_bisim(a)
    assert m.is_deterministic()
    assert len(m.states) <= len(a.states)
    assert minimize_bisim(m) == m
    assert (a.initial, m.initial) in pairwise_bisimilar(a, m)
