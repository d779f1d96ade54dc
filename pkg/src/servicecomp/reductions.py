"""Hardness gadgets: Turing machines encoded as simulation instances.

Label minting (flat names for structured letters):

========================  =====================
letter                    label
========================  =====================
``q a_i``                 ``q.a.i``
``q a_i d``               ``q.a.i.r`` / ``q.a.i.l``
``q a_i d 1`` / ``2``     ``q.a.i.r.1`` / ``q.a.i.r.2``
``zeta``                  ``zeta``
========================  =====================

States of a cell automaton are ``a`` (tape symbol), ``q.a`` (head on the
cell), ``q.a.d`` (pending existential move) and ``top``.  Goal states are
``s``, ``choice``, ``q.b.i.d`` and ``mid(<src>,<x>+<y>)`` for the middle of
a two-letter edge.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path

from .automata import Nfa, ServiceAutomaton, _Automaton, parse_any, serialize_automaton
from .errors import EncodingPreconditionError
from .product import ProductView
from .turing import TmConfiguration, TuringMachine, initial_configuration, parse_tm, serialize_tm, tm_successors, leaves_tape

TOP = "top"
ZETA = "zeta"
HASH = "hash"
DOLLAR = "dollar"
DIRS = ("l", "r")


@dataclass
class ReductionInstance:
    services: list
    goal: _Automaton
    meta: dict = field(default_factory=dict)

    def product(self) -> ProductView:
        return ProductView(self.services)

    @property
    def kind(self):
        return self.meta.get("kind")


def label_head(q, a, i):
    return f"{q}.{a}.{i}"


def label_move(q, b, i, d, copy=None):
    return f"{q}.{b}.{i}.{d}" if copy is None else f"{q}.{b}.{i}.{d}.{copy}"


def cell_name(cell) -> str:
    """State name of a configuration letter: ``a`` or ``q.a``."""
    return f"{cell[0]}.{cell[1]}" if isinstance(cell, tuple) else cell


def glue(k: ServiceAutomaton, keep="s", drop="e", name="B") -> ServiceAutomaton:
    """Merge ``drop`` into ``keep`` by redirecting edges; ``drop`` must be a sink."""
    trans = {}
    for s, a, t in k.transitions():
        if s == drop:
            raise EncodingPreconditionError(f"state {drop!r} has outgoing edges")
        trans[(s, a)] = keep if t == drop else t
    states = [s for s in k.states if s != drop]
    return ServiceAutomaton(name, states, k.alphabet, keep, trans)


def _check_common(m, w, kind):
    if m.kind != kind:
        raise EncodingPreconditionError(f"expected a {kind} machine, got {m.kind}")
    w = tuple(m.input if w is None else w)
    if len(w) < 2:
        raise EncodingPreconditionError("the input must have length at least 2")
    if not m.has_direction("r"):
        raise EncodingPreconditionError("the machine needs at least one right move")
    for a in w:
        if a not in m.tape:
            raise EncodingPreconditionError(f"input symbol {a!r} not in tape alphabet")
    return w


def _add(trans, s, a, t):
    old = trans.get((s, a))
    if old is not None and old != t:
        raise EncodingPreconditionError(f"construction is not deterministic at ({s}, {a})")
    trans[(s, a)] = t


# -- deterministic machines --------------------------------------------------

def pspace_encode(m: TuringMachine, w=None) -> ReductionInstance:
    """One cell automaton per tape position and a goal cycling through K."""
    w = _check_common(m, w, "det")
    n = len(w)
    Q, G = m.states, m.tape

    def delta_i(i):
        return [label_head(q, a, i) for q in Q for a in G] + [
            label_move(q, a, i, d) for q in Q for a in G for d in DIRS
        ]

    alphabet = [lab for i in range(1, n + 1) for lab in delta_i(i)]
    states = list(G) + [f"{q}.{a}" for q in Q for a in G] + [TOP]
    services = []
    for i in range(1, n + 1):
        own = delta_i(i)
        trans = {}
        for a in G:
            heads = {label_head(q, a, i): f"{q}.{a}" for q in Q}
            for lab in own:
                _add(trans, a, lab, heads.get(lab, TOP))
        for q in Q:
            for a in G:
                moves = m.moves(q, a)
                if not moves:
                    continue
                mv = moves[0]
                good = label_move(mv.state, mv.symbol, i, mv.direction)
                for lab in own:
                    _add(trans, f"{q}.{a}", lab, mv.symbol if lab == good else TOP)
        for lab in alphabet:
            _add(trans, TOP, lab, TOP)
        init = f"{m.initial}.{w[0]}" if i == 1 else w[i - 1]
        services.append(ServiceAutomaton(f"A{i}", states, alphabet, init, trans))

    right = sorted({(mv.state, mv.symbol) for _, _, mv in m.all_moves() if mv.direction == "r"})
    left = sorted({(mv.state, mv.symbol) for _, _, mv in m.all_moves() if mv.direction == "l"})
    k_states = ["s", "e"] + [f"{q}.{b}.{i}.{d}" for q in Q for b in G for i in range(1, n + 1) for d in DIRS]
    trans = {}
    for i in range(1, n):
        for q2, b in right:
            mid = f"{q2}.{b}.{i}.r"
            _add(trans, "s", label_move(q2, b, i, "r"), mid)
            for c in G:
                _add(trans, mid, label_head(q2, c, i + 1), "e")
        for q2, b in left:
            mid = f"{q2}.{b}.{i + 1}.l"
            _add(trans, "s", label_move(q2, b, i + 1, "l"), mid)
            for c in G:
                _add(trans, mid, label_head(q2, c, i), "e")
    k = ServiceAutomaton("K", k_states, alphabet, "s", trans)
    goal = glue(k)
    meta = {"kind": "pspace", "tm": m, "input": w, "n": n, "K": k}
    return ReductionInstance(services, goal, meta)


# -- alternating machines ----------------------------------------------------

def _two_letter(trans, states, src, x, y, tgt):
    mid = f"mid({src},{x}+{y})"
    if mid not in states:
        states.append(mid)
    _add(trans, src, x, mid)
    _add(trans, mid, y, tgt)


def exptime_encode(m: TuringMachine, w=None) -> ReductionInstance:
    """Two automata per tape cell, one per alternative move, plus the goal.

    Two departures from the textbook gadget keep it sound:

    * universal head states answer ``zeta`` by moving to ``top``, otherwise
      ``zeta`` from the goal could never be matched in universal
      configurations;
    * head and pending states escape to ``top`` only on move letters of
      their own copy.  Escaping on head letters ``q.c.i`` would let the copy
      that already received the head swallow the second letter of the
      doubled transfer and reach ``top`` on the correct path.
    """
    w = _check_common(m, w, "alt")
    n = len(w)
    Q, G = m.states, m.tape

    def delta_copy(i, copy):
        return [label_head(q, a, i) for q in Q for a in G] + [
            label_move(q, a, i, d, copy) for q in Q for a in G for d in DIRS
        ]

    alphabet = []
    seen = set()
    for i in range(1, n + 1):
        for copy in (1, 2):
            for lab in delta_copy(i, copy):
                if lab not in seen:
                    seen.add(lab)
                    alphabet.append(lab)
    alphabet_c = alphabet + [ZETA]
    states = [TOP] + list(G) + [f"{q}.{a}" for q in Q for a in G] + [
        f"{q}.{a}.{d}" for q in Q for a in G for d in DIRS
    ]

    services = []
    for i in range(1, n + 1):
        for copy in (1, 2):
            own = delta_copy(i, copy)
            own_moves = [label_move(q, a, i, d, copy) for q in Q for a in G for d in DIRS]
            trans = {}
            for a in G:
                heads = {label_head(q, a, i): f"{q}.{a}" for q in Q}
                for lab in own:
                    _add(trans, a, lab, heads.get(lab, TOP))
            for q in Q:
                for a in G:
                    moves = m.moves(q, a)
                    if not moves:
                        continue
                    src = f"{q}.{a}"
                    if not m.is_existential(q):
                        good = {label_move(mv.state, mv.symbol, i, mv.direction, copy): mv.symbol for mv in moves}
                        for lab in own_moves:
                            _add(trans, src, lab, good.get(lab, TOP))
                        _add(trans, src, ZETA, TOP)
                    else:
                        # copy 1 reaches the first move through zeta, copy 2 the second
                        via, direct = (moves[0], moves[1]) if copy == 1 else (moves[1], moves[0])
                        pending = f"{via.state}.{via.symbol}.{via.direction}"
                        direct_lab = label_move(direct.state, direct.symbol, i, direct.direction, copy)
                        via_lab = label_move(via.state, via.symbol, i, via.direction, copy)
                        _add(trans, src, ZETA, pending)
                        for lab in own_moves:
                            _add(trans, src, lab, direct.symbol if lab == direct_lab else TOP)
                        for lab in own_moves:
                            _add(trans, pending, lab, via.symbol if lab == via_lab else TOP)
            for lab in alphabet_c:
                _add(trans, TOP, lab, TOP)
            init = f"{m.initial}.{w[0]}" if i == 1 else w[i - 1]
            name = f"A{i}p" if copy == 1 else f"A{i}pp"
            services.append(ServiceAutomaton(name, states, alphabet_c, init, trans))

    def targets(d, existential):
        return sorted({
            (mv.state, mv.symbol)
            for q, _, mv in m.all_moves()
            if mv.direction == d and m.is_existential(q) == existential
        })

    k_states = ["s", "e", "choice"] + [
        f"{q}.{b}.{i}.{d}" for q in Q for b in G for i in range(1, n + 1) for d in DIRS
    ]
    base_states = len(k_states)
    trans = {}
    _add(trans, "s", ZETA, "choice")
    entered = []
    for src, existential in (("s", False), ("choice", True)):
        for i in range(1, n):
            for q2, b in targets("r", existential):
                tgt = f"{q2}.{b}.{i}.r"
                _two_letter(trans, k_states, src, label_move(q2, b, i, "r", 1), label_move(q2, b, i, "r", 2), tgt)
                entered.append((tgt, q2, i + 1))
            for q2, b in targets("l", existential):
                tgt = f"{q2}.{b}.{i + 1}.l"
                _two_letter(trans, k_states, src, label_move(q2, b, i + 1, "l", 1), label_move(q2, b, i + 1, "l", 2), tgt)
                entered.append((tgt, q2, i))
    done = set()
    for tgt, q2, pos in entered:
        if tgt in done:
            continue
        done.add(tgt)
        for c in G:
            lab = label_head(q2, c, pos)
            _two_letter(trans, k_states, tgt, lab, lab, "e")
    k = ServiceAutomaton("K", k_states, alphabet_c, "s", trans)
    goal = glue(k)
    meta = {"kind": "exptime", "tm": m, "input": w, "n": n, "K": k, "K_core_states": base_states}
    return ReductionInstance(services, goal, meta)


# -- correspondence helpers --------------------------------------------------

def corresponding_state(inst: ReductionInstance, c: TmConfiguration) -> tuple:
    """Global state encoding configuration ``c``."""
    cells = [cell_name(x) for x in c.word()]
    if inst.kind == "exptime":
        return tuple(x for cell in cells for x in (cell, cell))
    return tuple(cells)


def is_proper(g) -> bool:
    return TOP not in g


def initial_global_state(inst: ReductionInstance) -> tuple:
    return corresponding_state(inst, initial_configuration(inst.meta["tm"], inst.meta["input"]))


# -- stepping checks ---------------------------------------------------------

def goal_cycles(goal: _Automaton, max_len: int) -> list:
    """Words leading from the initial state back to it for the first time.

    Entries are ``(word, status)`` in depth-first declaration order, where
    status is ``"closed"``, ``"dead"`` (the goal has no move afterwards) or
    ``"open"`` (still away from the initial state after ``max_len`` letters).
    """
    out = []

    def walk(state, word):
        for lab, t in goal.out_edges(state):
            w = word + (lab,)
            if t == goal.initial:
                out.append((w, "closed"))
            elif len(w) >= max_len:
                out.append((w, "open"))
            else:
                walk(t, w)
        if not goal.enabled(state) and word:
            out.append((word, "dead"))

    walk(goal.initial, ())
    return out


def run_word(p: ProductView, starts, word) -> list:
    """Sets of global states reached after each prefix of ``word``."""
    cur = set(starts)
    sets = []
    for lab in word:
        cur = {h for g in cur for _, h in p._successors(g, lab)}
        sets.append(cur)
    return sets


def stepping_violations(inst: ReductionInstance, c: TmConfiguration, zeta_targets=None) -> list:
    """Compare one round of the goal from ``c`` with the machine's successors.

    A round is a word of ``L(K)``.  For a configuration with successors the
    words ending in a proper global state must be exactly one per successor
    and land on its encoding, and every word must be executable.  For a
    blocking configuration some word must be unexecutable.  Existential
    configurations of the alternating gadget must additionally reach exactly
    two global states on ``zeta``.  Returns human-readable violations.
    """
    m = inst.meta["tm"]
    p = inst.product()
    g = corresponding_state(inst, c)
    succ = tm_successors(m, c)
    expected = {corresponding_state(inst, d) for d in succ}
    max_len = 5 if inst.kind == "exptime" else 2
    problems = []
    proper_ends = []
    stuck = False
    for word, status in goal_cycles(inst.goal, max_len):
        sets = run_word(p, [g], word)
        if not sets[-1]:
            stuck = True
            continue
        if status == "dead":
            continue
        if status == "open":
            problems.append(f"{c}: word {' '.join(word)} does not close a round")
            continue
        ends = {h for h in sets[-1] if is_proper(h)}
        if ends:
            proper_ends.append((word, ends))
    if not succ:
        if not stuck:
            problems.append(f"{c}: blocking configuration but every round is executable")
        return problems
    if stuck:
        problems.append(f"{c}: some round is unexecutable although successors exist")
    landed = [frozenset(ends) for _, ends in proper_ends]
    if sorted(map(sorted, landed)) != sorted([x] for x in expected) or len(landed) != len(succ):
        problems.append(f"{c}: proper rounds land on {[sorted(x) for x in landed]}, expected {sorted(expected)}")
    if inst.kind == "exptime" and m.is_existential(c.state):
        after = run_word(p, [g], (ZETA,))[0]
        if len(after) != 2:
            problems.append(f"{c}: zeta reaches {len(after)} global states, expected 2")
    return problems


def all_configurations(m: TuringMachine, n: int, on_tape=True):
    """Every configuration over ``n`` cells, in a fixed order.

    With ``on_tape`` the configurations whose move would leave the tape are
    skipped; the gadgets have no letters for such moves.
    """
    for tape in itertools.product(m.tape, repeat=n):
        for head in range(1, n + 1):
            for q in m.states:
                c = TmConfiguration(tape, head, q)
                if not (on_tape and leaves_tape(m, c)):
                    yield c


# -- constant alphabet -------------------------------------------------------

def label_encoding(labels, base) -> dict:
    """Enumerate ``labels`` as ``(letter, index)`` with letters from ``base``."""
    base = tuple(base)
    return {lab: (base[k % len(base)], k // len(base) + 1) for k, lab in enumerate(labels)}


def _chain_name(s, t, a, l, k):
    return f"({s},{t},{a},{l},{k})"


def transform_automaton(x: _Automaton, enc: dict, base) -> tuple:
    """Replace each ``s -(a,l)-> t`` by ``s -a-> c0 -#-> ... -#-> cl -$-> t``.

    Returns the new automaton and a list of ``(s, label, t, chain)`` records.
    The result is an :class:`Nfa` when two labels leaving one state share
    their base letter.
    """
    states = list(x.states)
    known = set(states)
    edges = []
    chains = []
    for s, lab, t in x.transitions():
        a, l = enc[lab]
        chain = [_chain_name(s, t, a, l, k) for k in range(l + 1)]
        for c in chain:
            if c in known:
                raise EncodingPreconditionError(f"chain state name {c!r} collides")
            known.add(c)
        states.extend(chain)
        edges.append((s, a, chain[0]))
        edges.extend((chain[k - 1], HASH, chain[k]) for k in range(1, l + 1))
        edges.append((chain[-1], DOLLAR, t))
        chains.append((s, lab, t, tuple(chain)))
    alphabet = tuple(base) + (HASH, DOLLAR)
    nfa = Nfa(x.name, states, alphabet, x.initial, edges)
    return (nfa.to_service() if nfa.is_deterministic() else nfa), chains


def const_alphabet_transform(inst: ReductionInstance, base=("a", "b")) -> ReductionInstance:
    """Re-encode every automaton over ``base + (hash, dollar)``."""
    base = tuple(base)
    if len(base) < 2 or len(set(base)) != len(base):
        raise EncodingPreconditionError("the base alphabet needs at least 2 distinct letters")
    if HASH in base or DOLLAR in base:
        raise EncodingPreconditionError("hash and dollar are reserved")
    labels = []
    seen = set()
    for x in [*inst.services, inst.goal]:
        for lab in x.alphabet:
            if lab not in seen:
                seen.add(lab)
                labels.append(lab)
    enc = label_encoding(labels, base)
    services, chains = [], {}
    for x in inst.services:
        y, ch = transform_automaton(x, enc, base)
        services.append(y)
        chains[x.name] = ch
    goal, ch = transform_automaton(inst.goal, enc, base)
    chains[inst.goal.name] = ch
    meta = dict(inst.meta)
    meta.update({"const_alphabet": base, "encoding": enc, "chains": chains, "source": inst})
    return ReductionInstance(services, goal, meta)


# -- instance files -----------------------------------------------------------

def write_instance(inst: ReductionInstance, directory, expected=None) -> Path:
    """Write ``<service>.saut`` files, ``goal.saut`` and ``meta.json``."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    names = []
    for x in inst.services:
        fname = f"{x.name}.saut"
        (d / fname).write_text(serialize_automaton(x), encoding="utf-8")
        names.append(fname)
    (d / "goal.saut").write_text(serialize_automaton(inst.goal), encoding="utf-8")
    meta = {
        "kind": inst.meta.get("kind"),
        "services": names,
        "goal": "goal.saut",
        "expected_simulated": expected,
        "n": inst.meta.get("n"),
        "input": list(inst.meta.get("input", ())),
        "const_alphabet": list(inst.meta["const_alphabet"]) if "const_alphabet" in inst.meta else None,
    }
    if isinstance(inst.meta.get("tm"), TuringMachine):
        meta["tm"] = serialize_tm(inst.meta["tm"])
    (d / "meta.json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    return d


def read_instance(directory) -> ReductionInstance:
    d = Path(directory)
    meta = json.loads((d / "meta.json").read_text(encoding="utf-8"))
    services = [parse_any((d / f).read_text(encoding="utf-8"), str(d / f)) for f in meta["services"]]
    goal = parse_any((d / meta["goal"]).read_text(encoding="utf-8"), str(d / meta["goal"]))
    if meta.get("tm"):
        meta["tm"] = parse_tm(meta["tm"])
    meta["input"] = tuple(meta.get("input") or ())
    return ReductionInstance(services, goal, meta)
