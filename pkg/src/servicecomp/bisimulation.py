"""Bisimilarity between a deterministic goal and an asynchronous product.

The decision uses banal runs only (all moves of service 1, then of service
2, and so on):

* condition A -- at every banally reachable configuration the goal and the
  product enable the same actions;
* condition B -- moving one extra action of service ``i`` past any banal
  continuation of services ``i+1..n`` leads the (minimized) goal to the
  same state either way.

Both together are necessary and sufficient.  :func:`bisim_oracle` is a
plain partition refinement on explicit automata, used for cross-checks.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .automata import ServiceAutomaton, _Automaton, minimize_bisim
from .errors import InvalidAutomatonError
from .product import ProductView, iter_banal, replay_trace
from .simulation import format_trace


@dataclass
class ConditionAWitness:
    """A banal run after which goal and product enable different actions."""

    trace: tuple
    goal_state: str
    global_state: tuple
    label: str
    goal_enabled: frozenset
    product_enabled: frozenset

    def replay(self, goal, p) -> bool:
        s = goal.run([lab for lab, _ in self.trace])
        g = replay_trace(p, self.trace)
        if s is None:
            return False
        return (self.label in goal.enabled(s)) != (self.label in p.enabled(g))

    def lines(self):
        return [("TRACE: " + format_trace(self.trace)).rstrip(), f"LABEL: {self.label}"]


@dataclass
class ConditionBWitness:
    """Two runs reaching the same global state but different goal states.

    ``second_run`` is banal (prefix, extra action, suffix); ``first_run``
    performs the extra action of ``process`` after the suffix.
    """

    process: int
    label: str
    prefix: tuple
    suffix: tuple
    goal_states: tuple

    @property
    def first_run(self):
        return self.prefix + self.suffix + ((self.label, self.process),)

    @property
    def second_run(self):
        return self.prefix + ((self.label, self.process),) + self.suffix

    def replay(self, goal, p) -> bool:
        g1 = replay_trace(p, self.first_run)
        g2 = replay_trace(p, self.second_run)
        s1 = goal.run([lab for lab, _ in self.first_run])
        s2 = goal.run([lab for lab, _ in self.second_run])
        return g1 == g2 and s1 is not None and s2 is not None and s1 != s2

    def lines(self):
        return [
            ("TRACE: " + format_trace(self.first_run)).rstrip(),
            ("TRACE: " + format_trace(self.second_run)).rstrip(),
        ]


@dataclass
class BisimVerdict:
    bisimilar: bool
    failed: str | None = None
    witness: ConditionAWitness | ConditionBWitness | None = None
    goal: ServiceAutomaton | None = None

    def __bool__(self):
        return self.bisimilar


def condition_A(b_min: ServiceAutomaton, p: ProductView):
    """``(True, None)`` or ``(False, ConditionAWitness)``."""
    seen = set()
    for pt in iter_banal(p, b_min):
        key = (pt.goal_state, pt.global_state)
        if key in seen:
            continue
        seen.add(key)
        eb = b_min.enabled(pt.goal_state)
        ep = p.enabled(pt.global_state)
        if eb != ep:
            lab = min(eb ^ ep)
            return False, ConditionAWitness(pt.trace, pt.goal_state, pt.global_state, lab, eb, ep)
    return True, None


def condition_B(b_min: ServiceAutomaton, p: ProductView):
    """``(True, None)`` or ``(False, ConditionBWitness)``.

    Assumes condition A holds; a goal that cannot follow one of the
    explored runs is reported as an assertion failure.
    """
    n = p.n
    parent = {}
    for pt in iter_banal(p, b_min):
        i = pt.phase
        if i == n:
            continue
        g, s = pt.global_state, pt.goal_state
        for lab, _ in p.services[i - 1].out_edges(g[i - 1]):
            s_y = b_min.delta(s, lab)
            assert s_y is not None, "condition A must hold before condition B"
            start = (i, lab, i + 1, g, s, s_y)
            if start in parent:
                continue
            parent[start] = ("start", pt.trace)
            queue = deque([start])
            while queue:
                node = queue.popleft()
                _, _, j, g_x, s_x, s_y2 = node
                if b_min.delta(s_x, lab) != s_y2:
                    return False, _b_witness(parent, node, b_min)
                svc = p.services[j - 1]
                for c, t in svc.out_edges(g_x[j - 1]):
                    nx, ny = b_min.delta(s_x, c), b_min.delta(s_y2, c)
                    assert nx is not None and ny is not None, "condition A must hold before condition B"
                    nxt = (i, lab, j, g_x[: j - 1] + (t,) + g_x[j:], nx, ny)
                    if nxt not in parent:
                        parent[nxt] = (node, (c, j))
                        queue.append(nxt)
                if j < n:
                    nxt = (i, lab, j + 1, g_x, s_x, s_y2)
                    if nxt not in parent:
                        parent[nxt] = (node, None)
                        queue.append(nxt)
    return True, None


def _b_witness(parent, node, b_min):
    i, lab, _, _, s_x, s_y = node
    steps = []
    cur = node
    while parent[cur][0] != "start":
        cur, step = parent[cur]
        if step is not None:
            steps.append(step)
    prefix = parent[cur][1]
    return ConditionBWitness(i, lab, prefix, tuple(reversed(steps)), (b_min.delta(s_x, lab), s_y))


def check_bisimilar(b: ServiceAutomaton, p: ProductView) -> BisimVerdict:
    """Minimize ``b`` then check conditions A and B."""
    if not b.is_deterministic():
        raise InvalidAutomatonError("the goal must be deterministic")
    b_min = minimize_bisim(b)
    ok, wit = condition_A(b_min, p)
    if not ok:
        return BisimVerdict(False, "condition-A", wit, b_min)
    ok, wit = condition_B(b_min, p)
    if not ok:
        return BisimVerdict(False, "condition-B", wit, b_min)
    return BisimVerdict(True, None, None, b_min)


def format_bisim_report(v: BisimVerdict) -> str:
    if v.bisimilar:
        return "VERDICT: BISIMILAR\n"
    lines = ["VERDICT: NOT-BISIMILAR", f"FAILED: {v.failed}"]
    if v.witness is not None:
        lines.extend(v.witness.lines())
    return "\n".join(lines) + "\n"


# -- oracle ----------------------------------------------------------------

def bisim_oracle(x: _Automaton, y: _Automaton) -> bool:
    """Bisimilarity of the initial states by splitter-based refinement.

    Blocks of the disjoint union are split by the predecessor sets of
    splitter blocks, one label at a time, until stable.
    """
    nodes = [(0, s) for s in x.states] + [(1, s) for s in y.states]
    pre = {}  # (label, node) -> predecessors
    for tag, a in ((0, x), (1, y)):
        for s, lab, t in a.transitions():
            pre.setdefault((lab, (tag, t)), []).append((tag, s))
    labels = sorted(set(x.alphabet) | set(y.alphabet))

    block_of = {v: 0 for v in nodes}
    blocks = {0: set(nodes)}
    next_id = 1
    pending = deque([0])
    queued = {0}
    while pending:
        splitter = pending.popleft()
        queued.discard(splitter)
        members = list(blocks.get(splitter, ()))
        for lab in labels:
            hit = {}
            for v in members:
                for u in pre.get((lab, v), ()):
                    hit.setdefault(block_of[u], set()).add(u)
            for bid, inside in hit.items():
                whole = blocks[bid]
                if len(inside) == len(whole):
                    continue
                whole -= inside
                nid = next_id
                next_id += 1
                blocks[nid] = inside
                for u in inside:
                    block_of[u] = nid
                for b_ in (bid, nid):
                    if b_ not in queued:
                        queued.add(b_)
                        pending.append(b_)
            if splitter in blocks:
                members = list(blocks[splitter])
    return block_of[(0, x.initial)] == block_of[(1, y.initial)]
