"""Two services, one goal: check simulation, build a delegator, replay traces."""
import random

from servicecomp import ServiceAutomaton, largest_simulation, product, replay, serialize_delegator, synthesize
from servicecomp.simulation import format_sim_report, simulates

# a search service that must be reset between queries, and a payment service
search = ServiceAutomaton("Search", ["idle", "busy"], ["query", "reset"], "idle",
                          {("idle", "query"): "busy", ("busy", "reset"): "idle"})
pay = ServiceAutomaton("Pay", ["ready"], ["charge", "reset"], "ready",
                       {("ready", "charge"): "ready", ("ready", "reset"): "ready"})

# the client wants: query, charge any number of times, reset, repeat
goal = ServiceAutomaton("Client", ["s0", "s1"], ["query", "charge", "reset"], "s0",
                        {("s0", "query"): "s1", ("s1", "charge"): "s1", ("s1", "reset"): "s0"})

p = product(search, pay)
print(format_sim_report(simulates(goal, p)), end="")

d = synthesize(largest_simulation(goal, p))
print(serialize_delegator(d), end="")

# "reset" is shared; the delegator must hand it to Search so the next query works
for lab, i in [("reset", i) for (s, g, lab), i in d.policy.items() if lab == "reset"]:
    print("reset ->", p.services[i - 1].name)

rng = random.Random(0)
trace = []
s = goal.initial
for _ in range(8):
    lab, s = rng.choice(goal.out_edges(s))
    trace.append(lab)
for lab, (i, g) in zip(trace, replay(d, trace)):
    print(f"{lab:>7} by {p.services[i - 1].name:<6} -> {g}")

# dropping the reset from Search makes the goal unrealizable
stuck = ServiceAutomaton("Search", ["idle", "busy"], ["query", "reset"], "idle", {("idle", "query"): "busy"})
print(format_sim_report(simulates(goal, product(stuck, pay))), end="")
