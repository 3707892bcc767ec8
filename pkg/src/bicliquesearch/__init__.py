"""Deterministic continuous-time quantum-walk search on complete bipartite graphs."""

from .errors import DomainError, ResourceError
from .graph import BicliqueInstance, adjacency_full, adjacency_reduced, lift, project
from .walk import (
    ReducedSpectrum, oracle_full, oracle_reduced, search_operator, search_spectrum,
    walk_operator_full, walk_operator_reduced,
)
from .search import (
    SearchReport, SearchSchedule, evolution_time, make_schedule, min_iterations,
    predicted_overlap, run_search, run_two_part_search,
)
from .counting import (
    CountEstimate, counting_error_bound, counting_time, estimate_k, qpe_distribution,
    run_counting, best_estimate_probabilities, theorem2_probabilities,
)
from .circuit import (
    Gate, GateSequence, assemble_unitary, build_oracle_circuit, build_phase_core,
    build_qtilde, build_walk_circuit, gate_count, pad_instance,
)

__version__ = "0.1.0"
