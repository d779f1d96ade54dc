"""Composition synthesis for services modeled as deterministic automata."""
from .automata import (
    Nfa,
    ServiceAutomaton,
    enabled_actions,
    load_automaton,
    minimize_bisim,
    parse_automaton,
    parse_nfa,
    serialize_automaton,
)
from .bisimulation import bisim_oracle, check_bisimilar, condition_A, condition_B
from .delegator import Delegator, parse_delegator, replay, serialize_delegator, synthesize
from .product import ProductView, banal_runs, explicit_product, product
from .reductions import (
    ReductionInstance,
    const_alphabet_transform,
    exptime_encode,
    pspace_encode,
    read_instance,
    write_instance,
)
from .simulation import (
    SimulationRelation,
    full_simulation,
    largest_simulation,
    simulates,
    simulates_component,
    simulates_disjoint,
)
from .turing import (
    TmConfiguration,
    TuringMachine,
    atm_has_infinite_computation,
    load_tm,
    parse_tm,
    tm_loops,
    tm_successors,
)

__version__ = "0.1.0"

__all__ = [
    "Nfa",
    "ServiceAutomaton",
    "enabled_actions",
    "load_automaton",
    "minimize_bisim",
    "parse_automaton",
    "parse_nfa",
    "serialize_automaton",
    "bisim_oracle",
    "check_bisimilar",
    "condition_A",
    "condition_B",
    "Delegator",
    "parse_delegator",
    "replay",
    "serialize_delegator",
    "synthesize",
    "ProductView",
    "banal_runs",
    "explicit_product",
    "product",
    "ReductionInstance",
    "const_alphabet_transform",
    "exptime_encode",
    "pspace_encode",
    "read_instance",
    "write_instance",
    "SimulationRelation",
    "full_simulation",
    "largest_simulation",
    "simulates",
    "simulates_component",
    "simulates_disjoint",
    "TmConfiguration",
    "TuringMachine",
    "atm_has_infinite_computation",
    "load_tm",
    "parse_tm",
    "tm_loops",
    "tm_successors",
]
