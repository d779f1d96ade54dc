"""Turing machines encoded as composition instances.

A looping machine yields a simulated instance, a halting one does not; the
alternating encoding does the same for infinite alternating computations.
"""
from pathlib import Path

from servicecomp import exptime_encode, pspace_encode, simulates
from servicecomp.reductions import all_configurations, stepping_violations
from servicecomp.turing import atm_has_infinite_computation, load_tm, tm_loops

here = Path(__file__).parent / "machines"

for name in ["det_loops", "det_halts"]:
    m = load_tm(here / f"{name}.tm")
    inst = pspace_encode(m)
    v = simulates(inst.goal, inst.product())
    print(f"{name}: loops={tm_loops(m)} simulated={v.simulated} services={len(inst.services)} "
          f"goal states={len(inst.goal.states)}")
    if not v.simulated:
        print("  stuck on", v.counterexample.stuck_action, "after", len(v.counterexample.trace), "steps")

for name in ["alt_survives", "alt_blocks"]:
    m = load_tm(here / f"{name}.tm")
    inst = exptime_encode(m)
    v = simulates(inst.goal, inst.product())
    print(f"{name}: infinite={atm_has_infinite_computation(m)} simulated={v.simulated} "
          f"services={len(inst.services)}")

# every configuration steps to exactly its successors
m = load_tm(here / "det_loops.tm")
inst = pspace_encode(m)
bad = sum(len(stepping_violations(inst, c)) for c in all_configurations(m, len(m.input)))
print("stepping violations:", bad)
