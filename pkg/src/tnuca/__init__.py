"""Temporally non-uniform cellular automata: two local rules on a finite ring,
applied according to a time schedule."""

from .dynamics import (
    build_phase_graph,
    evolve,
    partial_transition_diagram,
    recurrence_analysis,
)
from .graphs import (
    alternating_euler_circuit,
    build_combined_diagram,
    build_single_diagram,
    connected_components,
    fully_eulerian,
    fully_hamiltonian,
)
from .reach import (
    check_prop_not_reversible,
    classify,
    classify_reversible,
    find_restricted_initial_set,
    is_restricted_surjective,
    run_restriction_chain,
    theorem1_core,
    verify_restricted_injective,
    verify_restricted_reversible,
)
from .rules import (
    BudgetExceeded,
    Configuration,
    GlobalMap,
    LocalRule,
    apply_local,
    build_global_map,
    eca,
    global_step,
    rule_from_code,
)
from .sequences import F, G, RuleSequence, parse_sequence, period_of, rule_at, sequence_prefix

__version__ = "0.1.0"
