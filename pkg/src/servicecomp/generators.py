"""Seeded random automata, instances and machines for tests and corpus runs."""
from __future__ import annotations

import random

from .automata import ServiceAutomaton
from .product import ProductView, explicit_product
from .turing import EXIST, UNIV, Move, TuringMachine, stays_on_tape, tm_loops, atm_has_infinite_computation


def random_automaton(rng: random.Random, n_states: int, labels, density=0.5, name="A", prefix="s"):
    states = [f"{prefix}{k}" for k in range(n_states)]
    labels = list(labels)
    trans = {}
    for s in states:
        for a in labels:
            if rng.random() < density:
                trans[(s, a)] = rng.choice(states)
    return ServiceAutomaton(name, states, labels, states[0], trans)


def random_disjoint_services(rng, n, max_states=4, labels_per_service=2, density=0.6):
    services = []
    for i in range(1, n + 1):
        labels = [f"x{i}_{k}" for k in range(labels_per_service)]
        services.append(random_automaton(rng, rng.randint(1, max_states), labels, density, f"A{i}", f"q{i}_"))
    return services


def random_shared_services(rng, n, max_states=4, pool=3, density=0.5):
    labels_pool = [f"c{k}" for k in range(pool)]
    services = []
    for i in range(1, n + 1):
        labels = rng.sample(labels_pool, rng.randint(1, pool))
        services.append(random_automaton(rng, rng.randint(1, max_states), labels, density, f"A{i}", f"q{i}_"))
    return services


def unfold_goal(rng, p: ProductView, n_states, name="B", keep=0.8, extra_labels=()):
    """A deterministic goal that follows product runs, then gets perturbed.

    Goal states track one product state each; every goal transition copies
    a product move with probability ``keep``.  Labels in ``extra_labels``
    are occasionally added to make the goal harder to simulate.
    """
    goal_states = [f"b{k}" for k in range(n_states)]
    tracked = {goal_states[0]: p.initial}
    trans = {}
    frontier = [goal_states[0]]
    used = 1
    while frontier:
        s = frontier.pop(0)
        g = tracked[s]
        by_label = {}
        for lab, _, h in p.moves(g):
            by_label.setdefault(lab, []).append(h)
        for lab in sorted(by_label):
            if rng.random() > keep:
                continue
            h = rng.choice(by_label[lab])
            if used < n_states and rng.random() < 0.7:
                t = goal_states[used]
                used += 1
                tracked[t] = h
                frontier.append(t)
            else:
                t = rng.choice(goal_states[:used])
            trans[(s, lab)] = t
        for lab in extra_labels:
            if rng.random() < 0.15:
                trans[(s, lab)] = rng.choice(goal_states[:used])
    states = goal_states[:used]
    alphabet = list(p.alphabet) + [x for x in extra_labels if x not in p.alphabet]
    trans = {k: v for k, v in trans.items() if v in states}
    return ServiceAutomaton(name, states, alphabet, states[0], trans)


def random_sim_instance(rng, disjoint=True, max_goal=8, max_n=4, max_states=4):
    n = rng.randint(1, max_n)
    services = (random_disjoint_services if disjoint else random_shared_services)(rng, n, max_states)
    p = ProductView(services)
    if rng.random() < 0.7:
        goal = unfold_goal(rng, p, rng.randint(1, max_goal), keep=rng.choice([0.6, 0.9, 1.0]))
    else:
        goal = random_automaton(rng, rng.randint(1, max_goal), list(p.alphabet), 0.4, "B", "b")
    return goal, p


def product_as_goal(p: ProductView, name="B") -> ServiceAutomaton:
    """The explicit product as a goal; fails if the product is nondeterministic."""
    nfa = explicit_product(p)
    svc = nfa.to_service()
    return ServiceAutomaton(name, svc.states, svc.alphabet, svc.initial, svc.transition_map())


# -- machines ------------------------------------------------------------------

def random_det_tm(rng, n_states=None, n_symbols=None, block=0.25, name="M"):
    n_states = n_states or rng.randint(2, 4)
    n_symbols = n_symbols or rng.randint(2, 3)
    Q = [f"q{k}" for k in range(n_states)]
    G = ["a", "b", "c"][:n_symbols]
    trans = {}
    for q in Q:
        for a in G:
            if rng.random() >= block:
                trans[(q, a)] = [Move(rng.choice(Q), rng.choice(G), rng.choice("lr"))]
    return TuringMachine(name, "det", Q, G, "q0", trans)


def random_alt_tm(rng, n_states=None, n_symbols=None, block=0.2, name="M"):
    n_states = n_states or rng.randint(2, 3)
    n_symbols = n_symbols or 2
    Q = [f"q{k}" for k in range(n_states)]
    G = ["a", "b"][:n_symbols]
    mode = {q: rng.choice([EXIST, UNIV]) for q in Q}
    pairs = [(q, b) for q in Q for b in G]
    trans = {}
    for q in Q:
        for a in G:
            if rng.random() < block:
                continue
            d = rng.choice("lr")
            first, second = rng.sample(pairs, 2)
            trans[(q, a)] = [Move(first[0], first[1], d), Move(second[0], second[1], d)]
    return TuringMachine(name, "alt", Q, G, "q0", trans, mode)


def _with_input(m, w):
    return TuringMachine(m.name, m.kind, m.states, m.tape, m.initial, m.trans, m.mode, w)


def det_corpus(seed=2024, count=30, min_each=10, max_tries=20000):
    """Deterministic machines with inputs, balanced between loops and halts.

    Only machines whose head never tries to leave the tape and which have
    moves in both directions are kept, so every blocking position is
    observable by the gadget.
    """
    rng = random.Random(seed)
    loops, halts = [], []
    for k in range(max_tries):
        m = random_det_tm(rng, name=f"det{k}")
        if not (m.has_direction("l") and m.has_direction("r")):
            continue
        n = rng.randint(2, 4)
        w = tuple(rng.choice(m.tape) for _ in range(n))
        m = _with_input(m, w)
        if not stays_on_tape(m):
            continue
        bucket = loops if tm_loops(m) else halts
        if len(bucket) < count - min_each:
            bucket.append(m)
        if len(loops) + len(halts) >= count and len(loops) >= min_each and len(halts) >= min_each:
            break
    return loops + halts


def alt_corpus(seed=2024, count=20, min_each=6, max_tries=20000, max_n=3):
    rng = random.Random(seed)
    yes, no = [], []
    for k in range(max_tries):
        m = random_alt_tm(rng, name=f"alt{k}")
        if not m.has_direction("r"):
            continue
        n = rng.randint(2, max_n)
        w = tuple(rng.choice(m.tape) for _ in range(n))
        m = _with_input(m, w)
        if not stays_on_tape(m):
            continue
        bucket = yes if atm_has_infinite_computation(m) else no
        if len(bucket) < count - min_each:
            bucket.append(m)
        if len(yes) + len(no) >= count and len(yes) >= min_each and len(no) >= min_each:
            break
    return yes + no
