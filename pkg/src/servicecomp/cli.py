"""Command-line front end.

Exit status: 0 when the property holds (simulated, bisimilar, delegator
written, corpus agrees), 1 when it does not, 2 on errors and exceeded caps.
Every report ends with a ``MANIFEST:`` line holding the command, inputs,
parameters and verdict as JSON; ``--manifest PATH`` also writes it to a
sidecar file together with wall-clock timing, and ``servicecomp rerun PATH``
replays it.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .automata import load_automaton
from .bisimulation import bisim_oracle, check_bisimilar, format_bisim_report
from .corpus import format_table, load_jobs, oracle_verdict, run_corpus
from .delegator import serialize_delegator, synthesize
from .errors import AlphabetsNotDisjointError, CapExceededError, ServiceCompError
from .product import ProductView, explicit_product
from .reductions import const_alphabet_transform, exptime_encode, pspace_encode, write_instance
from .simulation import (
    DEFAULT_PAIR_CAP,
    SimulationVerdict,
    format_sim_report,
    largest_simulation,
    simulates,
    simulates_disjoint,
    simulation_oracle,
)
from .turing import load_tm

DEFAULT_STATE_CAP = 10**6


class Outcome:
    def __init__(self, status, report, verdict):
        self.status = status
        self.report = report
        self.verdict = verdict


def _load_instance(args, deterministic_goal=False):
    goal = load_automaton(args.goal, allow_choice=not deterministic_goal)
    services = [load_automaton(f, allow_choice=True) for f in args.services]
    return goal, ProductView(services)


def cmd_check_sim(args) -> Outcome:
    goal, p = _load_instance(args)
    if args.disjoint_fast and args.oracle:
        raise ServiceCompError("--disjoint-fast and --oracle are exclusive")
    if args.disjoint_fast:
        ok = simulates_disjoint(goal, p)
        report = format_sim_report(SimulationVerdict(ok, None, None, {}))
    elif args.oracle:
        ok = simulation_oracle(goal, p, args.state_cap)
        report = format_sim_report(SimulationVerdict(ok, None, None, {}))
    else:
        v = simulates(goal, p, args.pair_cap)
        ok = v.simulated
        report = format_sim_report(v)
    return Outcome(0 if ok else 1, report, "SIMULATED" if ok else "NOT-SIMULATED")


def cmd_check_bisim(args) -> Outcome:
    goal, p = _load_instance(args, deterministic_goal=True)
    if args.oracle:
        ok = bisim_oracle(goal, explicit_product(p, args.state_cap))
        report = "VERDICT: BISIMILAR\n" if ok else "VERDICT: NOT-BISIMILAR\n"
    else:
        v = check_bisimilar(goal, p)
        ok = v.bisimilar
        report = format_bisim_report(v)
    return Outcome(0 if ok else 1, report, "BISIMILAR" if ok else "NOT-BISIMILAR")


def cmd_synth(args) -> Outcome:
    goal, p = _load_instance(args)
    rel = largest_simulation(goal, p, args.pair_cap)
    if not rel.holds_initially():
        return Outcome(1, "VERDICT: NOT-SIMULATED\n", "UNSOLVABLE")
    d = synthesize(rel)
    Path(args.out).write_text(serialize_delegator(d), encoding="utf-8")
    return Outcome(0, f"VERDICT: SIMULATED\nDELEGATOR: {args.out}\n", "SYNTHESIZED")


def cmd_encode(args) -> Outcome:
    m = load_tm(args.tm)
    inst = pspace_encode(m) if args.kind == "pspace" else exptime_encode(m)
    expected = oracle_verdict(m)
    if args.const_alphabet:
        inst = const_alphabet_transform(inst, tuple(args.const_alphabet.split(",")))
    out = write_instance(inst, args.out, expected)
    files = sorted(p.name for p in out.iterdir())
    report = f"OUT: {out}\nSERVICES: {len(inst.services)}\nEXPECTED: {'SIMULATED' if expected else 'NOT-SIMULATED'}\n"
    report += "".join(f"FILE: {f}\n" for f in files)
    return Outcome(0, report, "SIMULATED" if expected else "NOT-SIMULATED")


def cmd_corpus(args) -> Outcome:
    jobs, workers = load_jobs(args.spec)
    if args.workers is not None:
        workers = args.workers
    rows = run_corpus(jobs, workers)
    bad = sum(not r.agree for r in rows)
    table = format_table(rows, timing=args.timing)
    report = table + f"INSTANCES: {len(rows)}\nDISAGREEMENTS: {bad}\n"
    return Outcome(0 if bad == 0 else 1, report, f"{len(rows) - bad}/{len(rows)} agree")


COMMANDS = {
    "check-sim": cmd_check_sim,
    "check-bisim": cmd_check_bisim,
    "synth": cmd_synth,
    "encode": cmd_encode,
    "corpus": cmd_corpus,
}

# argument names recorded in the manifest, per command
INPUTS = {
    "check-sim": ("goal", "services"),
    "check-bisim": ("goal", "services"),
    "synth": ("goal", "services"),
    "encode": ("tm",),
    "corpus": ("spec",),
}
PARAMETERS = {
    "check-sim": ("pair_cap", "state_cap", "oracle", "disjoint_fast"),
    "check-bisim": ("state_cap", "oracle"),
    "synth": ("pair_cap", "out"),
    "encode": ("kind", "const_alphabet", "out"),
    "corpus": ("workers", "timing"),
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="servicecomp",
        description="Composition synthesis for services modeled as deterministic automata.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    sub = ap.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    def common(sp, pair=True, state=True):
        sp.add_argument("goal", help="goal automaton (.saut)")
        sp.add_argument("services", nargs="+", help="available services (.saut), in product order")
        if pair:
            sp.add_argument("--pair-cap", type=int, default=DEFAULT_PAIR_CAP, help="maximum number of game pairs")
        if state:
            sp.add_argument("--state-cap", type=int, default=DEFAULT_STATE_CAP,
                            help="maximum explicit product size for --oracle")
        sp.add_argument("--manifest", help="write the run manifest (with timing) to this JSON file")

    sp = sub.add_parser("check-sim", help="decide whether the product simulates the goal", formatter_class=fmt)
    common(sp)
    sp.add_argument("--oracle", action="store_true", help="use the explicit full-space fixpoint")
    sp.add_argument("--disjoint-fast", action="store_true",
                    help="polynomial check for pairwise disjoint alphabets (error otherwise)")

    sp = sub.add_parser("check-bisim", help="decide whether goal and product are bisimilar", formatter_class=fmt)
    common(sp, pair=False)
    sp.add_argument("--oracle", action="store_true", help="partition refinement on the explicit product")

    sp = sub.add_parser("synth", help="synthesize a delegator", formatter_class=fmt)
    common(sp, state=False)
    sp.add_argument("--out", required=True, help="delegator file to write")

    sp = sub.add_parser("encode", help="encode a Turing machine as a simulation instance", formatter_class=fmt)
    sp.add_argument("tm", help="machine description (.tm) with an input line")
    sp.add_argument("--kind", choices=("pspace", "exptime"), required=True,
                    help="pspace for deterministic machines, exptime for alternating ones")
    sp.add_argument("--const-alphabet", metavar="A,B,...",
                    help="re-encode over these letters plus hash and dollar")
    sp.add_argument("--out", required=True, help="output directory")
    sp.add_argument("--manifest", help="write the run manifest (with timing) to this JSON file")

    sp = sub.add_parser("corpus", help="compare checker and oracle over a corpus", formatter_class=fmt)
    sp.add_argument("spec", help="corpus description (JSON)")
    sp.add_argument("--workers", type=int, default=None, help="worker processes (default: from the description)")
    sp.add_argument("--timing", action="store_true", help="include per-instance seconds in the table")
    sp.add_argument("--manifest", help="write the run manifest (with timing) to this JSON file")

    sp = sub.add_parser("rerun", help="replay a run manifest", formatter_class=fmt)
    sp.add_argument("manifest_file", help="manifest written by --manifest")
    return ap


def manifest_of(args, verdict) -> dict:
    cmd = args.command
    return {
        "command": cmd,
        "inputs": {k: getattr(args, k) for k in INPUTS[cmd]},
        "parameters": {k: getattr(args, k, None) for k in PARAMETERS[cmd]},
        "verdict": verdict,
    }


def args_from_manifest(path) -> argparse.Namespace:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    cmd = data["command"]
    if cmd not in COMMANDS:
        raise ServiceCompError(f"unknown command {cmd!r} in manifest")
    ns = argparse.Namespace(command=cmd, manifest=None)
    for k in PARAMETERS[cmd]:
        setattr(ns, k, None)
    for k, v in {**data.get("inputs", {}), **data.get("parameters", {})}.items():
        setattr(ns, k, v)
    for k, default in (("pair_cap", DEFAULT_PAIR_CAP), ("state_cap", DEFAULT_STATE_CAP)):
        if getattr(ns, k, None) is None:
            setattr(ns, k, default)
    return ns


def run(args) -> int:
    t0 = time.perf_counter()
    try:
        outcome = COMMANDS[args.command](args)
    except CapExceededError as e:
        outcome = Outcome(2, f"ERROR: cap-exceeded: {e}\n", "ERROR")
    except AlphabetsNotDisjointError as e:
        outcome = Outcome(2, f"ERROR: {e}\n", "ERROR")
    except (ServiceCompError, OSError, KeyError, ValueError) as e:
        outcome = Outcome(2, f"ERROR: {e}\n", "ERROR")
    manifest = manifest_of(args, outcome.verdict)
    sys.stdout.write(outcome.report)
    sys.stdout.write("MANIFEST: " + json.dumps(manifest, sort_keys=True) + "\n")
    if getattr(args, "manifest", None):
        sidecar = dict(manifest, timing={"wall_seconds": round(time.perf_counter() - t0, 6)}, exit_status=outcome.status)
        Path(args.manifest).write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return outcome.status


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "rerun":
        try:
            args = args_from_manifest(args.manifest_file)
        except (OSError, ValueError, KeyError, ServiceCompError) as e:
            sys.stdout.write(f"ERROR: cannot read manifest: {e}\n")
            return 2
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
