"""Solve-report JSON and its independent re-verification.

A report embeds the instance and the full equilibrium, so ``verify`` never
re-solves an LP; it only re-derives the (deterministic) preprocessing.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any

from .audit import certify_fpo, per_agent_subsidy, prop_check, subsidy_bound
from .equilibrium import CertificateViolation, Equilibrium, FractionalAllocation, check_equilibrium
from .instance import (
    IntegralAllocation,
    format_rational,
    instance_from_dict,
    kept_chores,
    normalize,
    parse_rational,
    preprocess_zero_disutility,
    scale_disutilities,
)
from .pipeline import Solution, is_prop

CHECKS = ("prop", "equilibrium", "rounding", "subsidy-arithmetic", "bound")


class ReportError(ValueError):
    """The report document is structurally unusable."""


def _rats(values) -> list[str]:
    return [format_rational(v) for v in values]


def build_report(sol: Solution, decimal: bool = False, dump_pieces: bool = False) -> dict[str, Any]:
    eq = sol.equilibrium
    rep = sol.report
    doc: dict[str, Any] = {
        "instance": sol.original.to_dict(),
        "scale": format_rational(sol.processed.scale),
        "kept_chores": list(sol.kept),
        "zero_preassigned": {str(c): i for c, i in sorted(sol.zero_preassigned.items())},
        "x": eq.alloc.to_lists(),
        "p": _rats(eq.payments),
        "alpha": _rats(eq.mpb),
        "h": _rats(eq.dual_h),
        "allocation": list(sol.allocation.owner),
        "bundles": sol.allocation.bundles(),
        "per_agent_subsidy": _rats(rep.per_agent_subsidy),
        "total_subsidy": format_rational(rep.total),
        "total_subsidy_original_units": format_rational(rep.total_original_units),
        "bound": format_rational(rep.bound),
        "rounding_cost": {
            "instance": format_rational(sol.rcost_original),
            "reduced": format_rational(sol.rcost_reduced),
            "pieces": format_rational(sol.piece_cost_total),
        },
        "objective": {"primal": format_rational(sol.primal_value), "dual": format_rational(sol.dual_value)},
        "certificates": {
            "prop": is_prop(sol),
            "equilibrium": True,
            "acyclic": sol.graph.is_acyclic,
            "strong-duality": sol.primal_value == sol.dual_value,
            "rounding": True,
            "fpo": rep.fpo_certified,
            "bound": rep.bound_satisfied,
        },
    }
    if dump_pieces:
        doc["pieces"] = [
            dict(pr.piece.to_dict(), owner={str(c): i for c, i in sorted(pr.owner.items())}, cost=format_rational(pr.cost))
            for pr in sol.piece_roundings
        ]
    if decimal:
        doc["decimal"] = {
            "per_agent_subsidy": [float(v) for v in rep.per_agent_subsidy],
            "total_subsidy": float(rep.total),
            "total_subsidy_original_units": float(rep.total_original_units),
            "bound": float(rep.bound),
            "p": [float(v) for v in eq.payments],
            "alpha": [float(v) for v in eq.mpb],
        }
    return doc


def _field(doc: dict, key: str) -> Any:
    if key not in doc:
        raise ReportError(f"missing field {key!r}")
    return doc[key]


def verify_report(doc: Any) -> tuple[str | None, str]:
    """Re-check every certificate. Returns ``(failed_check, message)``; ``failed_check`` is None on success.

    Raises :class:`ReportError` (or an instance error) for documents that
    cannot be interpreted at all.
    """
    if not isinstance(doc, dict):
        raise ReportError("report must be a JSON object")
    original = instance_from_dict(_field(doc, "instance"))
    stripped, zero_pre = preprocess_zero_disutility(original)
    processed = normalize(stripped)
    factor = processed.scale / original.scale
    full = scale_disutilities(original, factor) if factor != 1 else original
    if list(_field(doc, "kept_chores")) != kept_chores(original.m, zero_pre):
        raise ReportError("kept_chores does not match the instance")

    try:
        x = [[parse_rational(v, f"$.x[{i}][{c}]") for c, v in enumerate(row)] for i, row in enumerate(_field(doc, "x"))]
        p = [parse_rational(v, f"$.p[{c}]") for c, v in enumerate(_field(doc, "p"))]
        alpha = [parse_rational(v, f"$.alpha[{i}]") for i, v in enumerate(_field(doc, "alpha"))]
        h = [parse_rational(v, f"$.h[{i}]") for i, v in enumerate(_field(doc, "h"))]
        per = [parse_rational(v, f"$.per_agent_subsidy[{i}]") for i, v in enumerate(_field(doc, "per_agent_subsidy"))]
        total = parse_rational(_field(doc, "total_subsidy"), "$.total_subsidy")
        bound = parse_rational(_field(doc, "bound"), "$.bound")
        owner = [int(v) for v in _field(doc, "allocation")]
    except (TypeError, ValueError) as exc:
        raise ReportError(str(exc)) from None

    if len(x) != processed.n or any(len(row) != processed.m for row in x):
        return "prop", "x has the wrong shape"
    try:
        alloc = FractionalAllocation.build(x, processed)
    except ValueError as exc:
        return "prop", f"x is not a fractional allocation: {exc}"
    if not prop_check(processed, alloc):
        return "prop", "x is not proportional"

    if len(p) != processed.m or len(alpha) != processed.n or len(h) != processed.n:
        return "equilibrium", "p/alpha/h have the wrong length"
    if any(pc <= 0 for pc in p):
        return "equilibrium", "non-positive payment"
    if any(hi < 0 for hi in h) or any(a != 1 / (1 + hi) for a, hi in zip(alpha, h)):
        return "equilibrium", "alpha is not 1/(1+h)"
    try:
        check_equilibrium(processed, alloc.x, p, alpha)
    except CertificateViolation as exc:
        return "equilibrium", str(exc)

    if len(owner) != original.m or any(not 0 <= i < original.n for i in owner):
        return "rounding", "allocation does not cover every chore"
    allocation = IntegralAllocation(tuple(owner), n=original.n)
    for c, i in zero_pre.items():
        if original.disutilities[owner[c]][c] != 0:
            return "rounding", f"zero-disutility chore {c} given to agent {owner[c]} with positive disutility"
    rounding = IntegralAllocation(tuple(owner[c] for c in kept_chores(original.m, zero_pre)), n=original.n)
    for local, i in enumerate(rounding.owner):
        if alloc.x[i][local] <= 0:
            return "rounding", f"chore {local} (processed index) owned off the consumption graph"
    eq = Equilibrium(processed, alloc, tuple(p), tuple(alpha), tuple(h))
    if not certify_fpo(eq, rounding):
        return "rounding", "allocation with payments is not a market equilibrium"

    expected = per_agent_subsidy(full, allocation)
    if list(expected) != per or sum(per, Fraction(0)) != total:
        return "subsidy-arithmetic", "per-agent or total subsidy does not recompute"

    if bound != subsidy_bound(original.n):
        return "bound", "bound is not n/3 - 1/6"
    if total > bound:
        return "bound", f"total subsidy {total} exceeds bound {bound}"
    return None, "all certificates verified"
