"""Simulation of a goal automaton by an asynchronous product.

The main entry point, :func:`simulates`, solves the simulation game on the
pairs reachable from ``(goal.initial, product.initial)`` by a greatest
fixpoint with a FIFO deletion worklist.  :func:`simulation_oracle` is the
naive full-space fixpoint over an explicit product and is kept as an
independent check.  :func:`simulates_disjoint` is the polynomial procedure
for pairwise disjoint alphabets.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .automata import ServiceAutomaton, _Automaton, one_state
from .errors import AlphabetsNotDisjointError, CapExceededError
from .product import GlobalState, ProductView, explicit_product, global_state_name

DEFAULT_PAIR_CAP = 10**7


def absorbing_states(p: ProductView, labels) -> list:
    """Per component, the states carrying a self-loop on every label in ``labels``.

    A global state with one such component simulates any goal state whose
    future only uses ``labels``: that component can answer every move in place.
    """
    labels = tuple(labels)
    return [
        frozenset(u for u in a.states if all(u in a.targets(u, lab) for lab in labels))
        for a in p.services
    ]


class SimulationRelation:
    """Surviving pairs of the simulation game.

    ``pairs`` holds the explicitly explored pairs that survived.  When the
    relation was computed with the absorbing shortcut, every pair whose
    global state has an absorbing component is a member as well, whether or
    not it was explored; ``in`` accounts for that.
    """

    def __init__(self, goal, product, pairs, absorbing=None):
        self.goal = goal
        self.product = product
        self.pairs = frozenset(pairs)
        self._absorbing = absorbing

    def is_absorbing(self, g: GlobalState) -> bool:
        if self._absorbing is None:
            return False
        return any(q in ab for q, ab in zip(g, self._absorbing))

    def __contains__(self, pair) -> bool:
        return pair in self.pairs or self.is_absorbing(pair[1])

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)

    @property
    def initial_pair(self):
        return (self.goal.initial, self.product.initial)

    def holds_initially(self) -> bool:
        return self.initial_pair in self

    def violations(self):
        """Pairs breaking the closure condition, as ``(pair, label)``."""
        p, b = self.product, self.goal
        for s, g in self.pairs:
            for lab, s2 in b.out_edges(s):
                if not any((s2, h) in self for _, h in p._successors(g, lab)):
                    yield (s, g), lab

    def is_closed(self) -> bool:
        return next(self.violations(), None) is None


@dataclass
class Counterexample:
    """One branch of a winning attack on the simulation.

    ``trace`` lists ``(label, mover)`` steps; the defender's answers follow
    the ascending-mover rule.  At the end the goal is in
    ``goal_states[-1]``, the product in ``global_states[-1]``, and the goal
    enables ``stuck_action`` which no service can perform there.
    """

    trace: tuple
    stuck_action: str
    goal_states: tuple
    global_states: tuple
    description: str = ""

    def replay(self, goal, product) -> bool:
        """Re-execute the trace and confirm the stuck action really is stuck."""
        s, g = goal.initial, product.initial
        for (lab, i), s_next, g_next in zip(self.trace, self.goal_states[1:], self.global_states[1:]):
            if s_next not in goal.targets(s, lab):
                return False
            if (i, g_next) not in product._successors(g, lab):
                return False
            s, g = s_next, g_next
        return bool(goal.targets(s, self.stuck_action)) and not product._successors(g, self.stuck_action)


@dataclass
class SimulationVerdict:
    simulated: bool
    relation: SimulationRelation | None = None
    counterexample: Counterexample | None = None
    stats: dict = field(default_factory=dict)

    def __bool__(self):
        return self.simulated


class _Game:
    """Explored simulation game with deletion bookkeeping."""

    def __init__(self, b, p, pair_cap, absorbing):
        self.b, self.p = b, p
        self.absorbing = absorbing_states(p, b.used_labels()) if absorbing else None
        self.pairs = []
        self.index = {}
        # per pair: None for absorbing pairs, else list of (label, goal target, [(mover, child)])
        self.obligations = []
        self._explore(pair_cap)
        self._delete()

    def _is_absorbing(self, g):
        return self.absorbing is not None and any(q in ab for q, ab in zip(g, self.absorbing))

    def _explore(self, pair_cap):
        b, p = self.b, self.p
        index, pairs = self.index, self.pairs
        start = (b.initial, p.initial)
        index[start] = 0
        pairs.append(start)
        k = 0
        while k < len(pairs):
            s, g = pairs[k]
            k += 1
            if self._is_absorbing(g):
                self.obligations.append(None)
                continue
            obs = []
            for lab, s2 in b.out_edges(s):
                kids = []
                for i, h in p._successors(g, lab):
                    pair = (s2, h)
                    j = index.get(pair)
                    if j is None:
                        j = index[pair] = len(pairs)
                        pairs.append(pair)
                        if len(pairs) > pair_cap:
                            raise CapExceededError("pair", pair_cap, len(pairs))
                    kids.append((i, j))
                obs.append((lab, s2, kids))
            self.obligations.append(obs)

    def _delete(self):
        n = len(self.pairs)
        self.alive = [True] * n
        self.death = [None] * n
        preds = [[] for _ in range(n)]
        count = {}
        for pid, obs in enumerate(self.obligations):
            if obs is None:
                continue
            for k, (_, _, kids) in enumerate(obs):
                distinct = {j for _, j in kids}
                count[(pid, k)] = len(distinct)
                for j in distinct:
                    preds[j].append((pid, k))
        clock = 0
        queue = deque()
        for pid, obs in enumerate(self.obligations):
            if obs is not None and any(count[(pid, k)] == 0 for k in range(len(obs))):
                self.alive[pid] = False
                self.death[pid] = clock
                clock += 1
                queue.append(pid)
        while queue:
            dead = queue.popleft()
            for pid, k in preds[dead]:
                if not self.alive[pid]:
                    continue
                count[(pid, k)] -= 1
                if count[(pid, k)] == 0:
                    self.alive[pid] = False
                    self.death[pid] = clock
                    clock += 1
                    queue.append(pid)

    def relation(self):
        live = [pair for pair, ok in zip(self.pairs, self.alive) if ok]
        return SimulationRelation(self.b, self.p, live, self.absorbing)

    def counterexample(self):
        b = self.b
        cur = 0
        trace, goal_states, global_states = [], [self.pairs[0][0]], [self.pairs[0][1]]
        while True:
            t = self.death[cur]
            best = None
            for lab, s2, kids in self.obligations[cur]:
                if all(self.death[j] is not None and self.death[j] < t for _, j in kids):
                    key = (lab, b.state_index(s2))
                    if best is None or key < best[0]:
                        best = (key, lab, s2, kids)
            _, lab, s2, kids = best
            if not kids:
                s, g = self.pairs[cur]
                desc = (
                    f"goal state {s} enables {lab} but no service can perform it "
                    f"in {global_state_name(g)}"
                )
                return Counterexample(tuple(trace), lab, tuple(goal_states), tuple(global_states), desc)
            mover, child = kids[0]
            trace.append((lab, mover))
            cur = child
            goal_states.append(self.pairs[cur][0])
            global_states.append(self.pairs[cur][1])


def largest_simulation(
    b: _Automaton,
    p: ProductView,
    pair_cap: int = DEFAULT_PAIR_CAP,
    absorbing: bool = True,
) -> SimulationRelation:
    """Greatest simulation restricted to game-reachable pairs.

    With ``absorbing`` (default) pairs whose global state contains a
    component that self-loops on every goal label are accepted without
    being expanded.
    """
    return _Game(b, p, pair_cap, absorbing).relation()


def simulates(
    b: _Automaton,
    p: ProductView,
    pair_cap: int = DEFAULT_PAIR_CAP,
    absorbing: bool = True,
) -> SimulationVerdict:
    """Decide whether the product simulates ``b`` from the initial states."""
    game = _Game(b, p, pair_cap, absorbing)
    rel = game.relation()
    stats = {"pairs": len(game.pairs), "surviving": len(rel)}
    if game.alive[0]:
        return SimulationVerdict(True, rel, None, stats)
    return SimulationVerdict(False, rel, game.counterexample(), stats)


# -- independent oracle ---------------------------------------------------

def full_simulation(b: _Automaton, a: _Automaton) -> set:
    """Naive greatest fixpoint over all of ``states(b) x states(a)``."""
    rel = {(s, q) for s in b.states for q in a.states}
    changed = True
    while changed:
        changed = False
        for s, q in list(rel):
            for lab, s2 in b.out_edges(s):
                if not any((s2, q2) in rel for q2 in a.targets(q, lab)):
                    rel.discard((s, q))
                    changed = True
                    break
    return rel


def simulation_oracle(b: _Automaton, p: ProductView, state_cap: int = 10**6) -> bool:
    """Decide simulation by building the product explicitly."""
    nfa = explicit_product(p, state_cap)
    return (b.initial, nfa.initial) in full_simulation(b, nfa)


# -- disjoint alphabets ---------------------------------------------------

def simulates_component(b: ServiceAutomaton, p: ProductView, i: int) -> bool:
    """Simulation of ``b`` by the product where every service but ``i`` is
    replaced by a one-state automaton looping on its alphabet.

    When service ``i`` shares no label with the others this is a joint
    reachability search over (goal state, state of service ``i``).  Shared
    labels give the defender a real choice, so that case falls back to the
    game solver on the two-component product.
    """
    if not 1 <= i <= p.n:
        raise IndexError(f"service index {i} out of range 1..{p.n}")
    comp = p.services[i - 1]
    own = set(comp.alphabet)
    others = []
    seen = set()
    for j, a in enumerate(p.services, start=1):
        if j != i:
            for lab in a.alphabet:
                if lab not in seen:
                    seen.add(lab)
                    others.append(lab)
    if own & seen or not comp.is_deterministic() or not b.is_deterministic():
        parts = [comp] if not others else [comp, one_state("rest", others)]
        return simulates(b, ProductView(parts)).simulated

    start = (b.initial, p.initial[i - 1])
    seen_pairs = {start}
    queue = deque([start])
    while queue:
        s, u = queue.popleft()
        for lab, s2 in b.out_edges(s):
            if lab in own:
                u2 = comp.targets(u, lab)
                if not u2:
                    return False
                nxt = (s2, u2[0])
            elif lab in seen:
                nxt = (s2, u)
            else:
                return False
            if nxt not in seen_pairs:
                seen_pairs.add(nxt)
                queue.append(nxt)
    return True


def simulates_disjoint(b: ServiceAutomaton, p: ProductView) -> bool:
    """Polynomial decision procedure for pairwise disjoint alphabets."""
    clash = p.overlap()
    if clash is not None:
        raise AlphabetsNotDisjointError(*clash)
    return all(simulates_component(b, p, i) for i in range(1, p.n + 1))


# -- reports ---------------------------------------------------------------

def format_trace(trace) -> str:
    return " ".join(f"{lab}@{i}" for lab, i in trace)


def parse_trace(text: str) -> tuple:
    out = []
    for tok in text.split():
        lab, _, i = tok.rpartition("@")
        out.append((lab, int(i)))
    return tuple(out)


def format_sim_report(verdict: SimulationVerdict) -> str:
    if verdict.simulated:
        return "VERDICT: SIMULATED\n"
    lines = ["VERDICT: NOT-SIMULATED"]
    cx = verdict.counterexample
    if cx is not None:
        lines.append(("TRACE: " + format_trace(cx.trace)).rstrip())
        lines.append(f"STUCK: {cx.stuck_action}")
    return "\n".join(lines) + "\n"


def parse_sim_report(text: str) -> dict:
    out = {}
    for line in text.splitlines():
        key, _, val = line.partition(":")
        val = val.strip()
        if key == "VERDICT":
            out["simulated"] = val == "SIMULATED"
        elif key == "TRACE":
            out["trace"] = parse_trace(val)
        elif key == "STUCK":
            out["stuck"] = val
    return out
