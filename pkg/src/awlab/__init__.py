"""Verification laboratory for exit-time bounds of reversible walks under
anchored isoperimetric inequalities: exact Green fields on weighted graphs,
linearised level-set profiles, comparison-ODE bound curves, isoperimetric
constant estimation, reproducible random environments and percolation
clusters, and seeded Monte Carlo walks."""

from . import errors
from .bounds import (BoundCurve, ProfileFunction, bound_exit,
                     bound_occupation, closed_form_bound, eval_F,
                     numeric_bound_curve, solve_bound_curve,
                     transience_diagnostic)
from .environments import (EnvironmentLaw, LatticeBox, environment_graph,
                           lattice_box_graph, percolation_cluster,
                           sample_environment, write_environment)
from .graph import (BoundaryEdges, Region, WeightedGraph, as_region, boundary,
                    build_graph, hop_ball, hop_distance, hop_distances_from,
                    is_connected, read_graph, region_hash, write_graph)
from .green import (GreenField, check_level_sets, exit_time_exact,
                    flow_through, green_killed, harmonic_residual, level_set,
                    level_sweep, occupation_truncated, write_green_csv)
from .isoperimetry import (BetacReport, IsoReport, cis_exhaustive,
                           cis_levelsets, cis_sampled, verify_betac)
from .profiles import (EduReport, FactorTwoReport, LevelProfile, check_edu,
                       factor_two_check, integral_u, left_derivative,
                       profile_u, profile_u_occupation, write_profile_csv)
from .walk import (EstimateReport, simulate_displacement, simulate_exit,
                   simulate_occupation)

__version__ = "0.1.0"
