import random

from instances import bisim_instances
from oracles import pairwise_bisimilar
from servicecomp.automata import Nfa, ServiceAutomaton, minimize_bisim
from servicecomp.bisimulation import (
    ConditionAWitness,
    ConditionBWitness,
    bisim_oracle,
    check_bisimilar,
    condition_A,
    condition_B,
    format_bisim_report,
)
from servicecomp.generators import product_as_goal, random_automaton, random_disjoint_services
from servicecomp.product import ProductView, explicit_product, product
from servicecomp.simulation import simulates


def ab_services():
    a1 = ServiceAutomaton("A1", ["p", "p1"], ["a"], "p", {("p", "a"): "p1"})
    a2 = ServiceAutomaton("A2", ["q", "q1"], ["b"], "q", {("q", "b"): "q1"})
    return product(a1, a2)


def test_explicit_product_goal_is_bisimilar():
    p = ab_services()
    v = check_bisimilar(product_as_goal(p), p)
    assert v.bisimilar
    assert format_bisim_report(v) == "VERDICT: BISIMILAR\n"


def test_single_interleaving_fails_condition_a():
    p = ab_services()
    b = ServiceAutomaton("B", ["s0", "s1", "s2"], ["a", "b"], "s0", {("s0", "a"): "s1", ("s1", "b"): "s2"})
    v = check_bisimilar(b, p)
    assert not v.bisimilar and v.failed == "condition-A"
    w = v.witness
    assert isinstance(w, ConditionAWitness)
    assert w.trace == ()
    assert w.goal_enabled == {"a"} and w.product_enabled == {"a", "b"}
    assert w.label == "b"
    assert w.replay(v.goal, p)
    assert not bisim_oracle(b, explicit_product(p))
    assert format_bisim_report(v).startswith("VERDICT: NOT-BISIMILAR\nFAILED: condition-A\n")


def test_foreign_label_fails_condition_a():
    a = ServiceAutomaton("A", ["p"], ["a", "z"], "p", {("p", "a"): "p", ("p", "z"): "p"})
    b = ServiceAutomaton("B", ["s"], ["a"], "s", {("s", "a"): "s"})
    ok, w = condition_A(minimize_bisim(b), product(a))
    assert not ok and w.label == "z"


def test_n1_goal_equal_to_service():
    rng = random.Random(3)
    for _ in range(20):
        a = random_automaton(rng, 5, ["a", "b"], 0.6)
        p = product(a)
        b_min = minimize_bisim(a)
        assert condition_A(b_min, p) == (True, None)
        assert condition_B(b_min, p) == (True, None)
        assert check_bisimilar(a, p).bisimilar


def test_crafted_condition_b_failure():
    # three one-shot services; the goal is their cube except that the
    # non-banal order "b a" leads to a copy of {a,b} that refuses c
    svc = [ServiceAutomaton(f"A{i}", [f"p{i}", f"d{i}"], [lab], f"p{i}", {(f"p{i}", lab): f"d{i}"})
           for i, lab in enumerate("abc", start=1)]
    p = product(*svc)
    trans = {
        ("e", "a"): "A", ("e", "b"): "B", ("e", "c"): "C",
        ("A", "b"): "AB", ("A", "c"): "AC", ("B", "a"): "BA", ("B", "c"): "BC",
        ("C", "a"): "AC", ("C", "b"): "BC",
        ("AB", "c"): "ABC", ("AC", "b"): "ABC", ("BC", "a"): "ABC",
    }
    b = ServiceAutomaton("G", ["e", "A", "B", "C", "AB", "BA", "AC", "BC", "ABC"], ["a", "b", "c"], "e", trans)
    assert condition_A(minimize_bisim(b), p)[0]
    v = check_bisimilar(b, p)
    assert not v.bisimilar and v.failed == "condition-B"
    w = v.witness
    assert (w.process, w.label) == (1, "a")
    assert [lab for lab, _ in w.first_run] == ["b", "a"]
    assert [lab for lab, _ in w.second_run] == ["a", "b"]
    assert w.replay(v.goal, p)
    assert not bisim_oracle(b, explicit_product(p))
    report = format_bisim_report(v)
    assert report == "VERDICT: NOT-BISIMILAR\nFAILED: condition-B\nTRACE: b@2 a@1\nTRACE: a@1 b@2\n"


def test_condition_b_witness_shape():
    seen_b = 0
    for goal, p in bisim_instances(17, 300):
        v = check_bisimilar(goal, p)
        if v.failed == "condition-B":
            w = v.witness
            assert isinstance(w, ConditionBWitness)
            assert w.replay(v.goal, p)
            movers = [i for _, i in w.second_run]
            assert movers == sorted(movers)
            seen_b += 1
    assert seen_b >= 1


def test_bisim_oracle_basics():
    x = ServiceAutomaton("X", ["s"], ["a"], "s", {("s", "a"): "s"})
    y = ServiceAutomaton("Y", ["t"], ["a"], "t", {})
    assert bisim_oracle(x, x)
    assert not bisim_oracle(x, y)


def test_bisim_oracle_matches_pairwise_fixpoint():
    rng = random.Random(23)
    agree_true = 0
    for k in range(100):
        x = random_automaton(rng, 30, ["a", "b"], 0.15, "X", "x")
        if k % 2:
            # renamed copy plus a clone of the initial state, bisimilar to x
            edges = [(s.replace("x", "y"), lab, t.replace("x", "y")) for s, lab, t in x.transitions()]
            edges += [("y_clone", lab, t) for s, lab, t in edges if s == "y0"]
            y = Nfa("Y", [s.replace("x", "y") for s in x.states] + ["y_clone"], ["a", "b"], "y_clone", edges)
        else:
            y = Nfa("Y", [f"y{j}" for j in range(30)], ["a", "b"], "y0",
                    [(f"y{rng.randrange(30)}", rng.choice("ab"), f"y{rng.randrange(30)}") for _ in range(20)])
        expected = (x.initial, y.initial) in pairwise_bisimilar(x, y)
        assert bisim_oracle(x, y) == expected
        agree_true += expected
    assert agree_true >= 50


def test_check_matches_oracle_on_random_instances():
    bis = 0
    for goal, p in bisim_instances(5, 150):
        v = check_bisimilar(goal, p)
        expected = bisim_oracle(goal, explicit_product(p))
        assert v.bisimilar == expected
        if not v.bisimilar:
            assert v.witness.replay(v.goal, p)
        else:
            assert simulates(goal, p).simulated
            bis += 1
    assert bis >= 20


def test_product_goal_passes_both_conditions():
    rng = random.Random(29)
    for _ in range(30):
        p = ProductView(random_disjoint_services(rng, rng.randint(1, 3), max_states=3))
        b_min = minimize_bisim(product_as_goal(p))
        assert condition_A(b_min, p)[0] and condition_B(b_min, p)[0]
