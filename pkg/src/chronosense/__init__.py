"""Traffic-aware sensing-time allocation for cognitive-radio sub-bands."""
from .allocation import (
    AGP,
    AP,
    GP,
    Constraints,
    Explicit,
    SensingAllocation,
    agp_solutions,
    ap_solutions,
    assign_times,
    enumerate_partitions,
    expand_scheme,
    gp_solutions,
    greedy_allocation,
    solve_linear_diophantine,
)
from .coding import entropy, huffman_lengths, kraft_sum, scale_to_budget
from .errors import (
    ChronosenseError,
    DegenerateModelError,
    EnumerationBoundError,
    InfeasibleError,
    InputError,
    NoFixedPointError,
    NoRootsError,
    NumericalError,
)
from .pipeline import PlanConfig, PlanReport, emit_report, load_traces, plan
from .stochastic import (
    MomentSummary,
    ParetoPoint,
    Policy,
    agp_fixed_point,
    agp_moments,
    ap_fixed_point,
    ap_moments,
    gp_fixed_point,
    gp_moments,
    moments,
    pareto_front,
    select_solution,
)
from .traffic import OccupancyProfile, fit_ar, occupancy_profile, predict_next
from .varmatrix import VarianceMatrix, build_g

__version__ = "0.1.0"
