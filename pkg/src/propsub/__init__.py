"""Proportional chore division with subsidy, via market equilibrium rounding."""

from .audit import (
    SubsidyReport,
    brute_force_opt_subsidy,
    certify_fpo,
    pareto_check_integral,
    prop_check,
    subsidy,
)
from .decomposition import TreePiece, decompose, preassign_degree_one
from .equilibrium import (
    ConsumptionGraph,
    Equilibrium,
    FractionalAllocation,
    assemble_equilibrium,
    consumption_graph,
    solve_dual,
    solve_equilibrium,
    solve_primal,
)
from .instance import (
    Instance,
    IntegralAllocation,
    normalize,
    parse_instance,
    preprocess_zero_disutility,
    serialize_instance,
)
from .pipeline import Solution, solve
from .reduction import ReducedInstance, reduce_to_identical, rounding_cost
from .rounding import round_forest, round_piece

__version__ = "0.1.0"
