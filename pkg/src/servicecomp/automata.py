"""Finite automata without acceptance: services, goals and explicit products.

Two concrete classes share one representation:

* :class:`ServiceAutomaton` -- deterministic, partial transition function.
* :class:`Nfa` -- a transition *relation*; used for explicit products and
  for automata produced by transformations that may introduce choice.

Both are immutable.  States and labels are plain strings, compared by name,
so two automata sharing a label name share the action.
"""
from __future__ import annotations

import re
from collections import deque
from typing import Iterable, Iterator, Mapping

from .errors import (
    DuplicateTransitionError,
    InvalidAutomatonError,
    MissingInitialError,
    SyntaxFormatError,
    UnknownReferenceError,
    UnknownStateError,
)

NAME_RE = re.compile(r"[A-Za-z0-9_.+(){}|,'-]+\Z")


def valid_name(name: str) -> bool:
    return isinstance(name, str) and NAME_RE.match(name) is not None and name != "->"


def _check_names(kind, names, owner):
    seen = set()
    for n in names:
        if not valid_name(n):
            raise InvalidAutomatonError(f"{owner}: invalid {kind} name {n!r}")
        if n in seen:
            raise InvalidAutomatonError(f"{owner}: duplicate {kind} {n!r}")
        seen.add(n)


class _Automaton:
    __slots__ = ("name", "states", "alphabet", "initial", "_out", "_state_index", "_label_index")

    deterministic = False

    def __init__(self, name, states, alphabet, initial, out):
        self.name = name
        self.states = tuple(states)
        self.alphabet = tuple(alphabet)
        self.initial = initial
        self._state_index = {s: k for k, s in enumerate(self.states)}
        self._label_index = {a: k for k, a in enumerate(self.alphabet)}
        if not valid_name(name):
            raise InvalidAutomatonError(f"invalid automaton name {name!r}")
        _check_names("state", self.states, name)
        _check_names("label", self.alphabet, name)
        if initial not in self._state_index:
            raise InvalidAutomatonError(f"{name}: initial state {initial!r} is not a state")
        # out[state][label] -> tuple of targets, both levels in declaration order
        self._out = {s: {} for s in self.states}
        for (s, a), targets in out.items():
            if s not in self._state_index:
                raise InvalidAutomatonError(f"{name}: transition from unknown state {s!r}")
            if a not in self._label_index:
                raise InvalidAutomatonError(f"{name}: transition on unknown label {a!r}")
            for t in targets:
                if t not in self._state_index:
                    raise InvalidAutomatonError(f"{name}: transition to unknown state {t!r}")
            if targets:
                self._out[s][a] = tuple(sorted(set(targets), key=self._state_index.__getitem__))
        for s in self.states:
            row = self._out[s]
            self._out[s] = {a: row[a] for a in sorted(row, key=self._label_index.__getitem__)}

    # -- queries ---------------------------------------------------------
    def __contains__(self, state):
        return state in self._state_index

    def targets(self, state, label) -> tuple:
        """All successors of ``state`` on ``label`` (empty when disabled)."""
        return self._out[state].get(label, ())

    def out_edges(self, state):
        """``(label, target)`` pairs leaving ``state`` in canonical order."""
        return [(a, t) for a, ts in self._out[state].items() for t in ts]

    def enabled(self, state) -> frozenset:
        try:
            return frozenset(self._out[state])
        except KeyError:
            raise UnknownStateError(state) from None

    def transitions(self) -> Iterator[tuple]:
        """Every ``(source, label, target)`` in canonical order."""
        for s in self.states:
            for a, ts in self._out[s].items():
                for t in ts:
                    yield (s, a, t)

    @property
    def num_transitions(self) -> int:
        return sum(len(ts) for row in self._out.values() for ts in row.values())

    def used_labels(self) -> frozenset:
        return frozenset(a for row in self._out.values() for a in row)

    def is_deterministic(self) -> bool:
        return all(len(ts) <= 1 for row in self._out.values() for ts in row.values())

    def reachable_states(self) -> list:
        seen = {self.initial}
        order = [self.initial]
        queue = deque(order)
        while queue:
            s = queue.popleft()
            for _, t in self.out_edges(s):
                if t not in seen:
                    seen.add(t)
                    order.append(t)
                    queue.append(t)
        return sorted(order, key=self._state_index.__getitem__)

    def state_index(self, state) -> int:
        return self._state_index[state]

    def _key(self):
        return (self.name, self.states, self.alphabet, self.initial, tuple(self.transitions()))

    def __eq__(self, other):
        return type(self) is type(other) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return (
            f"{type(self).__name__}({self.name!r}, states={len(self.states)}, "
            f"labels={len(self.alphabet)}, transitions={self.num_transitions})"
        )


class ServiceAutomaton(_Automaton):
    """Deterministic automaton with a partial transition function.

    ``transitions`` maps ``(state, label)`` to a single target state; a
    missing key means the action is disabled in that state.
    """

    __slots__ = ()
    deterministic = True

    def __init__(
        self,
        name: str,
        states: Iterable[str],
        alphabet: Iterable[str],
        initial: str,
        transitions: Mapping[tuple, str],
    ):
        super().__init__(name, states, alphabet, initial, {k: (t,) for k, t in transitions.items()})

    def delta(self, state, label):
        """The unique successor, or ``None`` when ``label`` is disabled."""
        ts = self._out[state].get(label)
        return ts[0] if ts else None

    def transition_map(self) -> dict:
        return {(s, a): t for s, a, t in self.transitions()}

    def run(self, word, start=None):
        """State reached by reading ``word``; ``None`` if it blocks."""
        s = self.initial if start is None else start
        for a in word:
            s = self.delta(s, a)
            if s is None:
                return None
        return s

    def to_nfa(self) -> "Nfa":
        return Nfa(self.name, self.states, self.alphabet, self.initial, self.transitions())


class Nfa(_Automaton):
    """Automaton whose transition relation may offer several targets.

    ``transitions`` is either a mapping ``(state, label) -> iterable of
    targets`` or an iterable of ``(state, label, target)`` triples.
    """

    __slots__ = ()

    def __init__(self, name, states, alphabet, initial, transitions):
        if isinstance(transitions, Mapping):
            out = {k: tuple(v) for k, v in transitions.items()}
        else:
            out = {}
            for s, a, t in transitions:
                out.setdefault((s, a), []).append(t)
        super().__init__(name, states, alphabet, initial, out)

    def to_service(self) -> ServiceAutomaton:
        if not self.is_deterministic():
            raise InvalidAutomatonError(f"{self.name}: automaton is not deterministic")
        return ServiceAutomaton(
            self.name, self.states, self.alphabet, self.initial,
            {(s, a): t for s, a, t in self.transitions()},
        )


def enabled_actions(a: _Automaton, state) -> frozenset:
    """Labels with at least one outgoing transition at ``state``."""
    if state not in a:
        raise UnknownStateError(state)
    return a.enabled(state)


# -- text format ---------------------------------------------------------

_KEYS = ("states:", "alphabet:", "initial:", "trans:")


def _tokens(line):
    """Whitespace-separated tokens with their 1-based columns."""
    return [(m.group(0), m.start() + 1) for m in re.finditer(r"\S+", line)]


def _read(text, source, allow_choice):
    name = None
    states, alphabet = [], []
    initial = None
    trans = []  # (s, a, t, line, col_s, col_a, col_t)
    declared_at = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        toks = _tokens(line)
        if not toks:
            continue
        head, col = toks[0]
        rest = toks[1:]
        if head == "automaton":
            if len(rest) != 1 or not valid_name(rest[0][0]):
                raise SyntaxFormatError("expected 'automaton <name>'", lineno, col, source)
            if name is not None:
                raise SyntaxFormatError("second 'automaton' header", lineno, col, source)
            name = rest[0][0]
        elif head in ("states:", "alphabet:"):
            bucket = states if head == "states:" else alphabet
            kind = head[:-1]
            for tok, c in rest:
                if not valid_name(tok):
                    raise SyntaxFormatError(f"invalid name {tok!r}", lineno, c, source)
                if (kind, tok) in declared_at:
                    raise SyntaxFormatError(f"{kind} {tok!r} declared twice", lineno, c, source)
                declared_at[(kind, tok)] = (lineno, c)
                bucket.append(tok)
        elif head == "initial:":
            if len(rest) != 1:
                raise SyntaxFormatError("expected 'initial: <state>'", lineno, col, source)
            if initial is not None:
                raise SyntaxFormatError("second 'initial' line", lineno, col, source)
            initial = (rest[0][0], lineno, rest[0][1])
        elif head == "trans:":
            if len(rest) != 4 or rest[2][0] != "->":
                raise SyntaxFormatError("expected 'trans: <state> <label> -> <state>'", lineno, col, source)
            (s, cs), (a, ca), _, (t, ct) = rest
            for tok, c in ((s, cs), (a, ca), (t, ct)):
                if not valid_name(tok):
                    raise SyntaxFormatError(f"invalid name {tok!r}", lineno, c, source)
            trans.append((s, a, t, lineno, cs, ca, ct))
        else:
            raise SyntaxFormatError(f"unknown directive {head!r}", lineno, col, source)

    if initial is None:
        raise MissingInitialError("no 'initial:' line", 0, 0, source)
    state_set, label_set = set(states), set(alphabet)
    init_name, il, ic = initial
    if init_name not in state_set:
        raise UnknownReferenceError(f"initial state {init_name!r} not declared", il, ic, source)
    out = {}
    for s, a, t, ln, cs, ca, ct in trans:
        if s not in state_set:
            raise UnknownReferenceError(f"state {s!r} not declared", ln, cs, source)
        if a not in label_set:
            raise UnknownReferenceError(f"label {a!r} not declared", ln, ca, source)
        if t not in state_set:
            raise UnknownReferenceError(f"state {t!r} not declared", ln, ct, source)
        targets = out.setdefault((s, a), [])
        if not allow_choice and targets:
            raise DuplicateTransitionError(f"second transition on ({s}, {a})", ln, cs, source)
        if t not in targets:
            targets.append(t)
    return name or "A", states, alphabet, init_name, out


def parse_automaton(text: str, source: str | None = None) -> ServiceAutomaton:
    """Read a deterministic automaton from ``.saut`` text."""
    name, states, alphabet, initial, out = _read(text, source, allow_choice=False)
    return ServiceAutomaton(name, states, alphabet, initial, {k: v[0] for k, v in out.items()})


def parse_nfa(text: str, source: str | None = None) -> Nfa:
    """Read ``.saut`` text allowing several targets per (state, label)."""
    name, states, alphabet, initial, out = _read(text, source, allow_choice=True)
    return Nfa(name, states, alphabet, initial, out)


def parse_any(text: str, source: str | None = None):
    """ServiceAutomaton when the text is deterministic, Nfa otherwise."""
    nfa = parse_nfa(text, source)
    return nfa.to_service() if nfa.is_deterministic() else nfa


def serialize_automaton(a: _Automaton) -> str:
    """Canonical ``.saut`` rendering (declaration order throughout)."""
    lines = [
        f"automaton {a.name}",
        " ".join(["states:", *a.states]),
        " ".join(["alphabet:", *a.alphabet]),
        f"initial: {a.initial}",
    ]
    lines.extend(f"trans: {s} {lab} -> {t}" for s, lab, t in a.transitions())
    return "\n".join(lines) + "\n"


def load_automaton(path, allow_choice=False):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_any(text, str(path)) if allow_choice else parse_automaton(text, str(path))


# -- structural utilities ------------------------------------------------

def bisimulation_classes(a: _Automaton, states=None) -> dict:
    """Map each state to a block id of the coarsest bisimulation.

    Plain signature refinement: a state's signature is the set of
    ``(label, successor block)`` pairs.  Works for nondeterministic input.
    """
    states = list(a.states if states is None else states)
    block = {s: 0 for s in states}
    count = 1
    while True:
        sigs = {}
        new_block = {}
        for s in states:
            sig = (block[s], frozenset((lab, block[t]) for lab, t in a.out_edges(s)))
            new_block[s] = sigs.setdefault(sig, len(sigs))
        if len(sigs) == count:
            return new_block
        block, count = new_block, len(sigs)


def minimize_bisim(b: ServiceAutomaton) -> ServiceAutomaton:
    """Bisimulation quotient of the reachable part of ``b``.

    Merged classes are named ``{s1+s2+...}`` with members sorted; singleton
    classes keep their original name.
    """
    reach = b.reachable_states()
    block = bisimulation_classes(b, reach)
    members = {}
    for s in reach:
        members.setdefault(block[s], []).append(s)
    names = {}
    for blk, ms in members.items():
        names[blk] = ms[0] if len(ms) == 1 else "{" + "+".join(sorted(ms)) + "}"
    states = [names[block[s]] for s in reach if members[block[s]][0] == s]
    trans = {}
    for s in reach:
        if members[block[s]][0] != s:
            continue
        for lab, t in b.out_edges(s):
            trans[(names[block[s]], lab)] = names[block[t]]
    return ServiceAutomaton(b.name, states, b.alphabet, names[block[b.initial]], trans)


def is_isomorphic(x: _Automaton, y: _Automaton) -> bool:
    """Isomorphism of the reachable parts of two deterministic automata."""
    if set(x.alphabet) != set(y.alphabet):
        return False
    f = {x.initial: y.initial}
    queue = deque([x.initial])
    while queue:
        s = queue.popleft()
        u = f[s]
        ex, ey = x._out[s], y._out[u]
        if set(ex) != set(ey):
            return False
        for lab, ts in ex.items():
            if len(ts) != 1 or len(ey[lab]) != 1:
                raise InvalidAutomatonError("is_isomorphic expects deterministic automata")
            t, v = ts[0], ey[lab][0]
            if t in f:
                if f[t] != v:
                    return False
            else:
                f[t] = v
                queue.append(t)
    return len(set(f.values())) == len(f)


def one_state(name: str, labels: Iterable[str], state: str = "top") -> ServiceAutomaton:
    """A single state with a self-loop on every label."""
    labels = tuple(labels)
    return ServiceAutomaton(name, [state], labels, state, {(state, a): state for a in labels})
