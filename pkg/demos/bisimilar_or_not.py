"""When is a goal exactly the interleaving of its services?"""
from servicecomp import ServiceAutomaton, check_bisimilar, product
from servicecomp.bisimulation import format_bisim_report
from servicecomp.generators import product_as_goal

a = ServiceAutomaton("A", ["p", "p1"], ["a"], "p", {("p", "a"): "p1"})
b = ServiceAutomaton("B", ["q", "q1"], ["b"], "q", {("q", "b"): "q1"})
p = product(a, b)

# the full interleaving diamond is bisimilar to the product
print(format_bisim_report(check_bisimilar(product_as_goal(p), p)), end="")

# a goal that fixes one order refuses b at the start
one_order = ServiceAutomaton("G", ["s0", "s1", "s2"], ["a", "b"], "s0", {("s0", "a"): "s1", ("s1", "b"): "s2"})
v = check_bisimilar(one_order, p)
print(format_bisim_report(v), end="")
print("goal enables", sorted(v.witness.goal_enabled), "product enables", sorted(v.witness.product_enabled))

# a cube where the order "b then a" leads to a state that refuses c
svc = [ServiceAutomaton(f"A{i}", [f"p{i}", f"d{i}"], [lab], f"p{i}", {(f"p{i}", lab): f"d{i}"})
       for i, lab in enumerate("abc", start=1)]
cube = {
    ("e", "a"): "A", ("e", "b"): "B", ("e", "c"): "C",
    ("A", "b"): "AB", ("A", "c"): "AC", ("B", "a"): "BA", ("B", "c"): "BC",
    ("C", "a"): "AC", ("C", "b"): "BC",
    ("AB", "c"): "ABC", ("AC", "b"): "ABC", ("BC", "a"): "ABC",
}
g = ServiceAutomaton("G", ["e", "A", "B", "C", "AB", "BA", "AC", "BC", "ABC"], ["a", "b", "c"], "e", cube)
print(format_bisim_report(check_bisimilar(g, product(*svc))), end="")
