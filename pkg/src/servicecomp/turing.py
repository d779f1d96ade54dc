"""Linear-space Turing machines: models, ``.tm`` format and ground-truth solvers.

Tape positions are numbered ``1..n``; the head never leaves the input
cells.  A move that would leave the tape is treated as blocked.
"""
from __future__ import annotations

import math
import re
from collections import deque
from dataclasses import dataclass

from .errors import CapExceededError, InvalidMachineError, SyntaxFormatError

_SYMBOL_RE = re.compile(r"[A-Za-z0-9_]+\Z")
EXIST, UNIV = "exist", "univ"
DEFAULT_CONFIG_CAP = 10**6


@dataclass(frozen=True)
class Move:
    state: str
    symbol: str
    direction: str  # "l" or "r"

    def __str__(self):
        return f"{self.state} {self.symbol} {self.direction.upper()}"


class TuringMachine:
    """Deterministic (``kind="det"``) or alternating (``kind="alt"``) machine.

    ``trans`` maps ``(state, symbol)`` to an ordered tuple of :class:`Move`.
    Alternating machines have either no move or exactly two distinct moves in
    the same direction; ``mode`` tells whether a state is existential or
    universal.
    """

    def __init__(self, name, kind, states, tape, initial, trans, mode=None, input=None):
        self.name = name
        self.kind = kind
        self.states = tuple(states)
        self.tape = tuple(tape)
        self.initial = initial
        self.trans = {k: tuple(v) for k, v in trans.items() if v}
        self.mode = dict(mode or {})
        self.input = tuple(input) if input is not None else None
        self._validate()

    def _validate(self):
        if self.kind not in ("det", "alt"):
            raise InvalidMachineError(f"unknown kind {self.kind!r}")
        for sym in self.states + self.tape:
            if not _SYMBOL_RE.match(sym):
                raise InvalidMachineError(f"invalid name {sym!r}: use letters, digits and '_'")
        if len(set(self.states)) != len(self.states) or len(set(self.tape)) != len(self.tape):
            raise InvalidMachineError("duplicate state or tape symbol")
        if set(self.states) & set(self.tape):
            raise InvalidMachineError("state and tape symbol names must differ")
        if "top" in self.tape:
            raise InvalidMachineError("'top' is reserved")
        if self.initial not in self.states:
            raise InvalidMachineError(f"initial state {self.initial!r} unknown")
        for (q, a), moves in self.trans.items():
            if q not in self.states or a not in self.tape:
                raise InvalidMachineError(f"transition on unknown ({q}, {a})")
            for mv in moves:
                if mv.state not in self.states or mv.symbol not in self.tape or mv.direction not in "lr":
                    raise InvalidMachineError(f"bad move {mv} from ({q}, {a})")
            if self.kind == "det" and len(moves) > 1:
                raise InvalidMachineError(f"deterministic machine has {len(moves)} moves on ({q}, {a})")
            if self.kind == "alt":
                if len(moves) != 2:
                    raise InvalidMachineError(f"alternating machine needs 0 or 2 moves on ({q}, {a})")
                if moves[0] == moves[1]:
                    raise InvalidMachineError(f"the two moves on ({q}, {a}) must be distinct")
                if moves[0].direction != moves[1].direction:
                    raise InvalidMachineError(f"the two moves on ({q}, {a}) must share a direction")
        if self.kind == "alt":
            for q in self.states:
                if self.mode.get(q) not in (EXIST, UNIV):
                    raise InvalidMachineError(f"state {q!r} needs mode exist or univ")
        if self.input is not None:
            for a in self.input:
                if a not in self.tape:
                    raise InvalidMachineError(f"input symbol {a!r} not in tape alphabet")

    def moves(self, q, a) -> tuple:
        return self.trans.get((q, a), ())

    def all_moves(self):
        for (q, a), moves in self.trans.items():
            for mv in moves:
                yield q, a, mv

    def has_direction(self, d) -> bool:
        return any(mv.direction == d for _, _, mv in self.all_moves())

    def is_existential(self, q) -> bool:
        return self.mode.get(q, EXIST) == EXIST

    def __repr__(self):
        return f"TuringMachine({self.name!r}, {self.kind}, |Q|={len(self.states)}, |G|={len(self.tape)})"


@dataclass(frozen=True)
class TmConfiguration:
    tape: tuple
    head: int  # 1-based
    state: str

    def cell(self, i):
        """The i-th letter of the configuration word: a symbol or (state, symbol)."""
        sym = self.tape[i - 1]
        return (self.state, sym) if i == self.head else sym

    def word(self):
        return tuple(self.cell(i) for i in range(1, len(self.tape) + 1))

    def __str__(self):
        return " ".join(f"[{c[0]}.{c[1]}]" if isinstance(c, tuple) else c for c in self.word())


def initial_configuration(m: TuringMachine, w=None) -> TmConfiguration:
    w = tuple(m.input if w is None else w)
    if not w:
        raise InvalidMachineError("empty input word")
    return TmConfiguration(w, 1, m.initial)


def tm_successors(m: TuringMachine, c: TmConfiguration) -> list:
    """Successor configurations in transition order; off-tape moves block."""
    n = len(c.tape)
    out = []
    for mv in m.moves(c.state, c.tape[c.head - 1]):
        head = c.head + (1 if mv.direction == "r" else -1)
        if not 1 <= head <= n:
            continue
        tape = c.tape[: c.head - 1] + (mv.symbol,) + c.tape[c.head:]
        out.append(TmConfiguration(tape, head, mv.state))
    return out


def config_space_bound(m: TuringMachine, n: int) -> int:
    return len(m.states) * n * len(m.tape) ** n


def tm_loops(m: TuringMachine, w=None, cap: int = DEFAULT_CONFIG_CAP) -> bool:
    """Whether the deterministic computation on ``w`` is infinite."""
    c = initial_configuration(m, w)
    bound = config_space_bound(m, len(c.tape))
    if bound > cap:
        raise CapExceededError("configuration", cap, bound)
    seen = set()
    for _ in range(bound + 1):
        if c in seen:
            return True
        seen.add(c)
        succ = tm_successors(m, c)
        if not succ:
            return False
        c = succ[0]
    return True


def configuration_graph(m: TuringMachine, w=None, cap: int = DEFAULT_CONFIG_CAP) -> dict:
    """Reachable configurations mapped to their successor lists."""
    start = initial_configuration(m, w)
    graph = {}
    queue = deque([start])
    graph[start] = None
    while queue:
        c = queue.popleft()
        succ = tm_successors(m, c)
        graph[c] = succ
        for d in succ:
            if d not in graph:
                graph[d] = None
                if len(graph) > cap:
                    raise CapExceededError("configuration", cap, len(graph))
                queue.append(d)
    return graph


def configuration_distances(m: TuringMachine, w=None, cap: int = DEFAULT_CONFIG_CAP) -> dict:
    """Number of steps within which Environment can force a blocking
    configuration (``math.inf`` when Computer avoids blocking forever).

    Blocking configurations have distance 0; an existential configuration
    needs all successors forced (one plus the maximum), a universal one any
    successor (one plus the minimum).
    """
    graph = configuration_graph(m, w, cap)
    preds = {c: [] for c in graph}
    remaining = {}
    for c, succ in graph.items():
        remaining[c] = len(set(succ))
        for d in set(succ):
            preds[d].append(c)
    dist = {}
    queue = deque()
    for c, succ in graph.items():
        if not succ:
            dist[c] = 0
            queue.append(c)
    while queue:
        d = queue.popleft()
        for c in preds[d]:
            if c in dist:
                continue
            if m.is_existential(c.state):
                remaining[c] -= 1
                if remaining[c] == 0:
                    dist[c] = dist[d] + 1
                    queue.append(c)
            else:
                dist[c] = dist[d] + 1
                queue.append(c)
    return {c: dist.get(c, math.inf) for c in graph}


def atm_has_infinite_computation(m: TuringMachine, w=None, cap: int = DEFAULT_CONFIG_CAP) -> bool:
    """Whether Computer can avoid blocking forever from the initial configuration."""
    dist = configuration_distances(m, w, cap)
    return dist[initial_configuration(m, w)] == math.inf


def leaves_tape(m: TuringMachine, c: TmConfiguration) -> bool:
    """Whether some move from ``c`` would push the head off the tape."""
    n = len(c.tape)
    for mv in m.moves(c.state, c.tape[c.head - 1]):
        if (mv.direction == "r" and c.head == n) or (mv.direction == "l" and c.head == 1):
            return True
    return False


def stays_on_tape(m: TuringMachine, w=None, cap: int = DEFAULT_CONFIG_CAP) -> bool:
    """No reachable configuration has a move that would leave the tape."""
    return not any(leaves_tape(m, c) for c in configuration_graph(m, w, cap))


# -- text format -----------------------------------------------------------

def parse_tm(text: str, source=None) -> TuringMachine:
    name, kind, states, tape, initial, inp = None, None, None, None, None, None
    mode = {}
    trans = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = raw.split("#", 1)[0].split()
        if not toks:
            continue
        head, rest = toks[0], toks[1:]
        if head == "tm":
            if len(rest) != 1:
                raise SyntaxFormatError("expected 'tm <name>'", lineno, 1, source)
            name = rest[0]
        elif head == "kind:":
            if rest not in (["det"], ["alt"]):
                raise SyntaxFormatError("kind must be det or alt", lineno, 1, source)
            kind = rest[0]
        elif head == "states:":
            states = rest
        elif head == "tape:":
            tape = rest
        elif head == "initial:":
            if len(rest) != 1:
                raise SyntaxFormatError("expected 'initial: <state>'", lineno, 1, source)
            initial = rest[0]
        elif head == "input:":
            inp = rest
        elif head == "mode:":
            if len(rest) % 2:
                raise SyntaxFormatError("mode expects '<state> exist|univ' pairs", lineno, 1, source)
            for q, md in zip(rest[::2], rest[1::2]):
                if md not in (EXIST, UNIV):
                    raise SyntaxFormatError(f"unknown mode {md!r}", lineno, 1, source)
                mode[q] = md
        elif head == "trans:":
            if len(rest) != 6 or rest[2] != "->" or rest[5].lower() not in ("l", "r"):
                raise SyntaxFormatError("expected 'trans: q a -> q2 b L|R'", lineno, 1, source)
            q, a, _, q2, b, d = rest
            trans.setdefault((q, a), []).append(Move(q2, b, d.lower()))
        else:
            raise SyntaxFormatError(f"unknown directive {head!r}", lineno, 1, source)
    if kind is None or states is None or tape is None or initial is None:
        raise SyntaxFormatError("missing one of kind/states/tape/initial", 0, 0, source)
    return TuringMachine(name or "M", kind, states, tape, initial, trans, mode, inp)


def serialize_tm(m: TuringMachine) -> str:
    lines = [f"tm {m.name}", f"kind: {m.kind}", "states: " + " ".join(m.states), "tape: " + " ".join(m.tape)]
    if m.kind == "alt":
        lines.append("mode: " + " ".join(f"{q} {m.mode[q]}" for q in m.states))
    lines.append(f"initial: {m.initial}")
    for q in m.states:
        for a in m.tape:
            for mv in m.moves(q, a):
                lines.append(f"trans: {q} {a} -> {mv}")
    if m.input is not None:
        lines.append("input: " + " ".join(m.input))
    return "\n".join(lines) + "\n"


def load_tm(path) -> TuringMachine:
    with open(path, encoding="utf-8") as fh:
        return parse_tm(fh.read(), str(path))
