"""Batch comparison of the simulation checker against machine oracles.

A corpus is a list of jobs, one per Turing machine.  Each job encodes the
machine (deterministic machines with the linear-space gadget, alternating
ones with the doubled gadget), optionally re-encodes it over a constant
alphabet or mutates one edge of the goal's round automaton, and compares
the checker's verdict with the oracle.
"""
from __future__ import annotations

import json
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .automata import ServiceAutomaton
from .generators import alt_corpus, det_corpus
from .reductions import (
    ReductionInstance,
    all_configurations,
    const_alphabet_transform,
    exptime_encode,
    glue,
    pspace_encode,
    stepping_violations,
)
from .simulation import DEFAULT_PAIR_CAP, simulates
from .turing import TuringMachine, atm_has_infinite_computation, load_tm, tm_loops


@dataclass(frozen=True)
class Mutation:
    """Redirect the goal-round edge ``source -label->`` to ``target``."""

    source: str
    label: str
    target: str

    def __str__(self):
        return f"{self.source} -{self.label}-> {self.target}"


@dataclass
class Job:
    machine: TuringMachine
    mutation: Mutation | None = None
    const_alphabet: tuple | None = None
    stepping: bool = False
    pair_cap: int = DEFAULT_PAIR_CAP

    @property
    def name(self):
        name = self.machine.name
        if self.mutation is not None:
            name += f"[{self.mutation}]"
        if self.const_alphabet:
            name += "[const]"
        return name


@dataclass
class Row:
    name: str
    oracle: bool
    checker: bool
    agree: bool
    seconds: float
    stepping_violations: int = 0
    notes: list = field(default_factory=list)


def encode(m: TuringMachine) -> ReductionInstance:
    return pspace_encode(m) if m.kind == "det" else exptime_encode(m)


def oracle_verdict(m: TuringMachine) -> bool:
    return tm_loops(m) if m.kind == "det" else atm_has_infinite_computation(m)


def mutate(inst: ReductionInstance, mutation: Mutation) -> ReductionInstance:
    """Same services, goal rebuilt from the mutated round automaton."""
    k = inst.meta["K"]
    if mutation.target not in k.states:
        raise KeyError(f"unknown round state {mutation.target!r}")
    trans = k.transition_map()
    if (mutation.source, mutation.label) not in trans:
        raise KeyError(f"no edge {mutation.source} -{mutation.label}->")
    trans[(mutation.source, mutation.label)] = mutation.target
    k2 = ServiceAutomaton(k.name, k.states, k.alphabet, k.initial, trans)
    meta = dict(inst.meta, K=k2, mutation=mutation)
    return ReductionInstance(inst.services, glue(k2), meta)


def random_mutation(inst: ReductionInstance, rng: random.Random) -> Mutation:
    k = inst.meta["K"]
    s, lab, t = rng.choice(list(k.transitions()))
    t2 = rng.choice([x for x in k.states if x != t])
    return Mutation(s, lab, t2)


def stepping_check(inst: ReductionInstance) -> list:
    """Stepping violations over every on-tape configuration."""
    m = inst.meta["tm"]
    out = []
    for c in all_configurations(m, inst.meta["n"]):
        out.extend(stepping_violations(inst, c))
    return out


def run_job(job: Job) -> Row:
    t0 = time.perf_counter()
    inst = encode(job.machine)
    if job.mutation is not None:
        inst = mutate(inst, job.mutation)
    violations = stepping_check(inst) if job.stepping else []
    checked = const_alphabet_transform(inst, job.const_alphabet) if job.const_alphabet else inst
    checker = simulates(checked.goal, checked.product(), job.pair_cap).simulated
    oracle = oracle_verdict(job.machine)
    agree = checker == oracle and not violations
    return Row(job.name, oracle, checker, agree, time.perf_counter() - t0, len(violations), violations[:3])


def run_corpus(jobs, workers: int = 1) -> list:
    """Rows in job order; ``workers > 1`` spreads jobs over processes."""
    jobs = list(jobs)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run_job, jobs))
    return [run_job(j) for j in jobs]


def mutation_jobs(machines, count, seed=0, stepping=True) -> list:
    """``count`` single-edge mutations on machines drawn with ``seed``."""
    rng = random.Random(seed)
    machines = list(machines)
    jobs = []
    for _ in range(count):
        m = rng.choice(machines)
        jobs.append(Job(m, random_mutation(encode(m), rng), stepping=stepping))
    return jobs


# -- corpus files ----------------------------------------------------------------

def load_jobs(path) -> tuple:
    """Read a JSON corpus description; returns ``(jobs, workers)``.

    Keys (all optional): ``machines`` (paths of ``.tm`` files relative to the
    description), ``random`` (list of ``{"kind": "det"|"alt", "seed", "count"}``),
    ``mutations`` (list of ``{"machine", "seed"}`` or
    ``{"machine", "source", "label", "target"}``), ``stepping``,
    ``const_alphabet``, ``pair_cap``, ``workers``.
    """
    path = Path(path)
    spec = json.loads(path.read_text(encoding="utf-8"))
    machines = [load_tm(path.parent / f) for f in spec.get("machines", [])]
    for block in spec.get("random", []):
        gen = det_corpus if block.get("kind", "det") == "det" else alt_corpus
        kwargs = {k: block[k] for k in ("seed", "count") if k in block}
        machines.extend(gen(**kwargs))
    common = {
        "stepping": bool(spec.get("stepping", False)),
        "const_alphabet": tuple(spec["const_alphabet"]) if spec.get("const_alphabet") else None,
        "pair_cap": int(spec.get("pair_cap", DEFAULT_PAIR_CAP)),
    }
    jobs = [Job(m, **common) for m in machines]
    by_name = {m.name: m for m in machines}
    for mut in spec.get("mutations", []):
        m = by_name[mut["machine"]]
        if "source" in mut:
            mutation = Mutation(mut["source"], mut["label"], mut["target"])
        else:
            mutation = random_mutation(encode(m), random.Random(mut.get("seed", 0)))
        jobs.append(Job(m, mutation, **common))
    return jobs, int(spec.get("workers", 1))


def format_table(rows, timing=True) -> str:
    header = ["instance", "oracle", "checker", "agree"] + (["seconds"] if timing else [])
    lines = ["\t".join(header)]
    for r in rows:
        cells = [r.name, _yn(r.oracle), _yn(r.checker), _yn(r.agree)]
        if timing:
            cells.append(f"{r.seconds:.3f}")
        lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"


def _yn(x):
    return "yes" if x else "no"
