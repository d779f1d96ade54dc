"""Delegators: which service performs each action requested by the goal.

A delegator is a positional policy over pairs of the simulation relation:
given the goal state, the global state and the requested action it names
the service that must move.  Pairs whose global state contains an
absorbing component are covered by a rule instead of table entries: the
least service able to perform the action moves, which keeps the absorbing
component in place.
"""
from __future__ import annotations

from .automata import ServiceAutomaton
from .errors import SynthesisImpossibleError, SyntaxFormatError, TraceNotExecutableError
from .product import ProductView, global_state_name
from .simulation import SimulationRelation


class Delegator:
    def __init__(self, goal: ServiceAutomaton, product: ProductView, policy: dict,
                 absorbing=None, relation: SimulationRelation | None = None):
        self.goal = goal
        self.product = product
        self.policy = dict(policy)
        self.absorbing = absorbing
        self.relation = relation

    def _absorbing(self, g) -> bool:
        return self.absorbing is not None and any(q in ab for q, ab in zip(g, self.absorbing))

    def choose(self, s, g, label) -> int:
        """Service index that must perform ``label`` from ``(s, g)``."""
        i = self.policy.get((s, g, label))
        if i is not None:
            return i
        if self._absorbing(g):
            for j, _ in self.product._successors(g, label):
                return j
        raise KeyError((s, g, label))

    def __call__(self, s, g, label) -> int:
        return self.choose(s, g, label)

    def __len__(self):
        return len(self.policy)

    def step(self, s, g, label):
        i = self.choose(s, g, label)
        for j, h in self.product._successors(g, label):
            if j == i:
                return i, h
        raise KeyError((s, g, label))


def synthesize(rel: SimulationRelation) -> Delegator:
    """Least-index delegator implementing ``rel``."""
    if not rel.holds_initially():
        raise SynthesisImpossibleError("the goal is not simulated: no delegator exists")
    b, p = rel.goal, rel.product
    policy = {}
    for s, g in rel.pairs:
        if rel.is_absorbing(g):
            continue
        for lab, s2 in b.out_edges(s):
            for i, h in p._successors(g, lab):
                if (s2, h) in rel:
                    policy[(s, g, lab)] = i
                    break
            else:
                raise AssertionError(f"relation not closed at ({s}, {global_state_name(g)}) on {lab}")
    return Delegator(b, p, policy, rel._absorbing, rel)


def replay(d: Delegator, trace) -> list:
    """Run a goal trace through the delegator.

    Returns ``(mover, global state)`` after each step.  Raises
    :class:`TraceNotExecutableError` when the goal itself cannot follow.
    """
    s, g = d.goal.initial, d.product.initial
    out = []
    for k, lab in enumerate(trace):
        s2 = d.goal.delta(s, lab)
        if s2 is None:
            raise TraceNotExecutableError(k, lab)
        i, g = d.step(s, g, lab)
        s = s2
        out.append((i, g))
    return out


def serialize_delegator(d: Delegator) -> str:
    b = d.goal
    rows = sorted(d.policy.items(), key=lambda kv: (b.state_index(kv[0][0]), kv[0][1], kv[0][2]))
    lines = [f"deleg: {s} {'|'.join(g)} {lab} -> {i}" for (s, g, lab), i in rows]
    if d.absorbing is not None:
        for i, (a, ab) in enumerate(zip(d.product.services, d.absorbing), start=1):
            lines.extend(f"absorbing: {i} {q}" for q in a.states if q in ab)
    return "\n".join(lines) + ("\n" if lines else "")


def parse_delegator(text: str, goal: ServiceAutomaton, product: ProductView, source=None) -> Delegator:
    policy = {}
    absorbing = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        if line[0] == "deleg:" and len(line) == 6 and line[4] == "->":
            _, s, g, lab, _, i = line
            policy[(s, tuple(g.split("|")), lab)] = int(i)
        elif line[0] == "absorbing:" and len(line) == 3:
            if absorbing is None:
                absorbing = [set() for _ in product.services]
            absorbing[int(line[1]) - 1].add(line[2])
        else:
            raise SyntaxFormatError("expected 'deleg:' or 'absorbing:' line", lineno, 1, source)
    if absorbing is not None:
        absorbing = [frozenset(x) for x in absorbing]
    return Delegator(goal, product, policy, absorbing)

