"""Carrier scheduling toolkit for backscatter-augmented IoT networks.

Interchangeable schedulers (exact optimizer, greedy heuristic, GNN-based
iterative classifier) over a shared instance/schedule model, with a
constraint validator, energy/latency metrics, a benchmark harness, JSON
wire formats, a CLI and a schedule-request HTTP service.
"""

from .core import (Interrogation, ProblemInstance, Role, Schedule,
                   ScheduleCost, Timeslot, Topology, ValidationReport,
                   Violation, ViolationKind, schedule_cost, validate_schedule)
from .exact import SolverBudget, solve_optimal
from .features import PeMode, build_feature_matrix, laplacian_eigenvalues, \
    node_degrees
from .generate import GeneratorConfig, GraphModel, generate_corpus, \
    generate_instance
from .gnn import (CachedInstance, InferencePolicy, RepairMode, forward,
                  next_timeslot, schedule_with_gnn)
from .heuristic import solve_heuristic
from .metrics import (FIREFLY, RadioParams, avg_energy_per_tag,
                      carriers_saved, carriers_saved_pct, completion_rate,
                      energy_saved_pct, timeslots_saved, timeslots_saved_pct)
from .weights import (GnnConfig, GnnModel, load_weights, load_weights_file,
                      random_model, save_weights, save_weights_file)

__version__ = "0.1.0"
