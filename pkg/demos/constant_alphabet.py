"""Re-encode an instance over two letters plus hash and dollar."""
import random

from servicecomp import const_alphabet_transform, simulates
from servicecomp.generators import random_sim_instance
from servicecomp.reductions import ReductionInstance

rng = random.Random(7)
for _ in range(5):
    goal, p = random_sim_instance(rng, disjoint=False, max_goal=5, max_n=3)
    t = const_alphabet_transform(ReductionInstance(list(p.services), goal), ("a", "b"))
    before = simulates(goal, p).simulated
    after = simulates(t.goal, t.product()).simulated
    letters = sorted(set().union(*[set(x.alphabet) for x in t.services + [t.goal]]))
    print(f"labels {len(p.alphabet):2d} -> {letters}  goal states {len(goal.states)} -> {len(t.goal.states)}  "
          f"verdict {before} -> {after}")
