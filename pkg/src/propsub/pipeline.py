"""End-to-end solve: equilibrium, reduction, decomposition, rounding, audit."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .audit import SubsidyReport, certify_fpo, prop_check, subsidy
from .decomposition import StepCounter, TreePiece, decompose, preassign_degree_one
from .equilibrium import (
    ConsumptionGraph,
    Equilibrium,
    consumption_graph,
    dual_objective,
    primal_objective,
    solve_equilibrium,
)
from .instance import (
    Instance,
    IntegralAllocation,
    kept_chores,
    normalize,
    preprocess_zero_disutility,
    scale_disutilities,
)
from .reduction import ReducedInstance, reduce_to_identical, rounding_cost
from .rounding import PieceRounding, round_forest


@dataclass(frozen=True)
class Solution:
    original: Instance
    zero_preassigned: dict[int, int]
    kept: tuple[int, ...]
    # Zero chores removed, disutilities scaled to max 1.
    processed: Instance
    # Original chores, same scaling as ``processed``.
    normalized_full: Instance
    equilibrium: Equilibrium
    reduced: ReducedInstance
    graph: ConsumptionGraph
    degree_one: dict[int, int]
    pieces: tuple[TreePiece, ...]
    piece_roundings: tuple[PieceRounding, ...]
    # Rounding over processed chores.
    rounding: IntegralAllocation
    # Over original chores.
    allocation: IntegralAllocation
    report: SubsidyReport
    processed_subsidy: Fraction
    rcost_original: Fraction
    rcost_reduced: Fraction
    primal_value: Fraction
    dual_value: Fraction

    @property
    def piece_cost_total(self) -> Fraction:
        return sum((r.cost for r in self.piece_roundings), Fraction(0))


def solve(inst: Instance, jobs: int = 1, counter: StepCounter | None = None) -> Solution:
    stripped, zero_pre = preprocess_zero_disutility(inst)
    processed = normalize(stripped)
    factor = processed.scale / inst.scale
    full = scale_disutilities(inst, factor) if factor != 1 else inst

    eq = solve_equilibrium(processed)
    reduced = reduce_to_identical(eq, processed)
    graph = consumption_graph(eq.alloc)
    deg1, rest = preassign_degree_one(graph, eq.alloc)
    pieces = decompose(rest, counter)
    rounding, piece_roundings = round_forest(pieces, eq.alloc, reduced.common, deg1, jobs=jobs)

    kept = kept_chores(inst.m, zero_pre)
    owner = dict(zero_pre)
    for local, c in enumerate(kept):
        owner[c] = rounding.owner[local]
    allocation = IntegralAllocation(tuple(owner[c] for c in range(inst.m)), n=inst.n)

    fpo = certify_fpo(eq, rounding)
    report = subsidy(full, allocation, fpo_certified=fpo)
    return Solution(
        original=inst,
        zero_preassigned=zero_pre,
        kept=tuple(kept),
        processed=processed,
        normalized_full=full,
        equilibrium=eq,
        reduced=reduced,
        graph=graph,
        degree_one=deg1,
        pieces=tuple(pieces),
        piece_roundings=tuple(piece_roundings),
        rounding=rounding,
        allocation=allocation,
        report=report,
        processed_subsidy=subsidy(processed, rounding).total,
        rcost_original=rounding_cost(processed, eq.alloc, rounding),
        rcost_reduced=rounding_cost(reduced, eq.alloc, rounding),
        primal_value=primal_objective(processed, eq.alloc.x),
        dual_value=dual_objective(processed, eq.payments, eq.dual_h),
    )


def is_prop(sol: Solution) -> bool:
    return prop_check(sol.processed, sol.equilibrium.alloc)
