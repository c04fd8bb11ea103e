"""Density-operator quantum automata: simulation and qubit-count minimization."""

from .automaton import (
    Comparison,
    Observable,
    QuantumAutomaton,
    behavior,
    factor_product,
    finiteness_period,
    is_finite_automaton,
    output_dist,
    run_word,
    sober_reduce,
    states_equivalent,
    step,
    validate,
)
from .fileio import gen_instance, load, save
from .linalg import Tolerance
from .minimizer import MinimizationOptions, MinimizationReport, minimize, reduce_at, verify_equivalence

__all__ = [
    "Comparison", "Observable", "QuantumAutomaton", "behavior", "factor_product",
    "finiteness_period", "is_finite_automaton", "output_dist", "run_word", "sober_reduce",
    "states_equivalent", "step", "validate", "gen_instance", "load", "save", "Tolerance",
    "MinimizationOptions", "MinimizationReport", "minimize", "reduce_at", "verify_equivalence",
]
