"""Entanglement of formation and Holevo capacity for qubit channels."""

from .channels import (
    CapacityResult,
    KrausChannel,
    SolverConfig,
    holevo_capacity,
    lift,
    msw_crosscheck,
    representability_probe,
)
from .counterexample import paper_state, question_one_test
from .wootters import concurrence, optimal_decomposition

__version__ = "0.1.0"
