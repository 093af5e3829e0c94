"""Rotor-router walk laboratory.

Simulate deterministic walks under arbitrary rotor configurations, build the
adversarial configurations with closed-form cover times, and compute the
Markov-chain quantities (hitting times, K(v), local divergence, lambda2,
electrical flows) behind the cover-time upper bounds.
"""

from .adversary import (BUILDERS, cycle_inward_config, euler_avoid_config,
                        expander_tree_config, hypercube_lex_config,
                        lollipop_config, random_config, torus_origin_config,
                        tree_mixed_config)
from .analytics import (BoundReport, Chain, ChainAnalytics, MCResult,
                        analyze_chain, bound_evaluators, build_chain,
                        electrical_flow, flow_conservation_residual,
                        fundamental_matrix, hitting_times, k_functional,
                        lambda2, local_divergence, mc_hitting_time,
                        mc_random_walk, triple_identity_residual)
from .backend import active_backend, available_backends, set_backend
from .errors import (CapExceeded, ChainMismatch, DimensionMismatch,
                     DivisibilityError, EvenSide, GraphTooSmall,
                     InvalidParameters, NonConvergent, RotorLabError,
                     SingularSystem, WrongFamily)
from .graphs import (FamilyId, Graph, bfs_layers, build_family, cycle_graph,
                     complete_graph, graph_from_edges, hypercube_graph,
                     kary_tree_graph, lollipop_graph, path_graph,
                     random_connected_graph, random_regular_graph, star_graph,
                     torus_graph, tree_anchored_expander_graph, validate)
from .rotor import (RotorConfiguration, Trace, WalkState, canonical_config,
                    check_balance, check_edge_interleaving, concentration_check,
                    config_from_text, config_text, lazify, run_recorded,
                    run_steps, run_until_edge_cover, run_until_vertex_cover,
                    step, trace_text, validate_config)

__version__ = "0.1.0"
