"""Fully asynchronous product of service automata.

Global states are plain tuples of component state names.  Services are
numbered from 1, so a mover index ``i`` refers to ``view.services[i - 1]``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

from .automata import Nfa, ServiceAutomaton, _Automaton
from .errors import CapExceededError, InvalidAutomatonError, MalformedGlobalStateError

GlobalState = tuple


def global_state_name(g: GlobalState) -> str:
    return "(" + "|".join(g) + ")"


def parse_global_state(text: str) -> GlobalState:
    return tuple(text.strip("()").split("|"))


class ProductView:
    """On-the-fly view of ``A1 x ... x An`` with interleaving semantics.

    Nothing is materialized: successors are generated per query.  Components
    may be :class:`Nfa` instances; the product is nondeterministic anyway.
    """

    def __init__(self, services: Sequence[_Automaton]):
        if not services:
            raise InvalidAutomatonError("a product needs at least one service")
        self.services = tuple(services)
        alphabet = []
        seen = set()
        for a in self.services:
            for lab in a.alphabet:
                if lab not in seen:
                    seen.add(lab)
                    alphabet.append(lab)
        self.alphabet = tuple(alphabet)
        self.initial = tuple(a.initial for a in self.services)
        movers = {}
        for i, a in enumerate(self.services, start=1):
            for lab in a.alphabet:
                movers.setdefault(lab, []).append(i)
        self._movers = {lab: tuple(ix) for lab, ix in movers.items()}

    @property
    def n(self) -> int:
        return len(self.services)

    def __repr__(self):
        return f"ProductView({[a.name for a in self.services]})"

    def check(self, g) -> None:
        if not isinstance(g, tuple) or len(g) != self.n:
            raise MalformedGlobalStateError(f"expected a {self.n}-tuple, got {g!r}")
        for i, (a, q) in enumerate(zip(self.services, g), start=1):
            if q not in a:
                raise MalformedGlobalStateError(f"component {i}: {q!r} is not a state of {a.name}")

    def owners(self, label) -> tuple:
        """Indices of services whose alphabet contains ``label``."""
        return self._movers.get(label, ())

    def successors(self, g: GlobalState, label) -> list:
        """``(mover, successor)`` pairs for ``label`` at ``g``, ascending mover."""
        self.check(g)
        return self._successors(g, label)

    def _successors(self, g, label):
        out = []
        for i in self._movers.get(label, ()):
            for t in self.services[i - 1].targets(g[i - 1], label):
                out.append((i, g[: i - 1] + (t,) + g[i:]))
        return out

    def enabled(self, g: GlobalState) -> frozenset:
        return frozenset(lab for q, a in zip(g, self.services) for lab in a.enabled(q))

    def moves(self, g: GlobalState) -> list:
        """Every ``(label, mover, successor)`` from ``g``."""
        out = []
        for i, (q, a) in enumerate(zip(g, self.services), start=1):
            for lab, t in a.out_edges(q):
                out.append((lab, i, g[: i - 1] + (t,) + g[i:]))
        return out

    def overlap(self):
        """First ``(label, i, j)`` shared by two services, or ``None``."""
        for lab, ix in self._movers.items():
            if len(ix) > 1:
                return lab, ix[0], ix[1]
        return None

    def is_disjoint(self) -> bool:
        return self.overlap() is None


def product(*services) -> ProductView:
    if len(services) == 1 and not isinstance(services[0], _Automaton):
        services = tuple(services[0])
    return ProductView(services)


def reachable_global_states(p: ProductView, state_cap: int = 10**6) -> list:
    seen = {p.initial}
    order = [p.initial]
    queue = deque(order)
    while queue:
        g = queue.popleft()
        for _, _, h in p.moves(g):
            if h not in seen:
                seen.add(h)
                if len(seen) > state_cap:
                    raise CapExceededError("state", state_cap, len(seen))
                order.append(h)
                queue.append(h)
    return order


def explicit_product(p: ProductView, state_cap: int = 10**6) -> Nfa:
    """Materialize the reachable part of the product as an :class:`Nfa`.

    States are named ``(t1|...|tn)``.  Raises :class:`CapExceededError`
    when more than ``state_cap`` global states are reachable.
    """
    order = reachable_global_states(p, state_cap)
    trans = []
    for g in order:
        src = global_state_name(g)
        for lab, _, h in p.moves(g):
            trans.append((src, lab, global_state_name(h)))
    return Nfa("product", [global_state_name(g) for g in order], p.alphabet,
               global_state_name(p.initial), trans)


# -- banal sequences -----------------------------------------------------

@dataclass(frozen=True)
class BanalPoint:
    """A node of the banal exploration.

    ``phase`` is the service currently allowed to move; services after it
    are still in their initial states.  ``trace`` is the banal run leading
    here as ``(label, mover)`` pairs.
    """

    phase: int
    goal_state: str | None
    global_state: GlobalState
    trace: tuple


def iter_banal(p: ProductView, goal: ServiceAutomaton | None = None) -> Iterator[BanalPoint]:
    """Breadth-first enumeration of banal runs, one point per node.

    A node is ``(phase, global state, goal state)``; each is expanded once.
    With a ``goal``, its state is tracked along the labels and extensions on
    which the goal blocks are not pursued.
    """
    start = (1, p.initial, goal.initial if goal is not None else None)
    parent = {start: None}
    queue = deque([start])

    def trace_of(node):
        steps = []
        while parent[node] is not None:
            node, step = parent[node]
            if step is not None:
                steps.append(step)
        return tuple(reversed(steps))

    while queue:
        node = queue.popleft()
        phase, g, s = node
        yield BanalPoint(phase, s, g, trace_of(node))
        svc = p.services[phase - 1]
        for lab, t in svc.out_edges(g[phase - 1]):
            if goal is not None:
                s2 = goal.delta(s, lab)
                if s2 is None:
                    continue
            else:
                s2 = None
            nxt = (phase, g[: phase - 1] + (t,) + g[phase:], s2)
            if nxt not in parent:
                parent[nxt] = (node, (lab, phase))
                queue.append(nxt)
        if phase < p.n:
            nxt = (phase + 1, g, s)
            if nxt not in parent:
                parent[nxt] = (node, None)
                queue.append(nxt)


def banal_runs(
    p: ProductView,
    visit: Callable[[tuple, str | None, GlobalState], object],
    goal: ServiceAutomaton | None = None,
) -> None:
    """Call ``visit(trace, goal_state, global_state)`` once per distinct
    configuration reached by a banal run, in canonical (breadth-first) order.

    A truthy return value from ``visit`` stops the enumeration.
    """
    seen = set()
    for pt in iter_banal(p, goal):
        key = (pt.goal_state, pt.global_state)
        if key in seen:
            continue
        seen.add(key)
        if visit(pt.trace, pt.goal_state, pt.global_state):
            return


def replay_trace(p: ProductView, trace, start=None) -> GlobalState:
    """Apply ``(label, mover)`` steps; raises ValueError if a step is illegal."""
    g = p.initial if start is None else start
    for k, (lab, i) in enumerate(trace):
        nxt = [h for j, h in p._successors(g, lab) if j == i]
        if not nxt:
            raise ValueError(f"step {k}: service {i} cannot do {lab!r} at {global_state_name(g)}")
        g = nxt[0]
    return g
