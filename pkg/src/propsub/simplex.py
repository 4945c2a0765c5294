"""Exact two-phase primal simplex over :class:`~fractions.Fraction`.

Solves ``min c.x  s.t.  A x = b, x >= 0`` with Bland's rule, so it always
terminates and is deterministic. Returned solutions are basic (vertices).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_ZERO = Fraction(0)


@dataclass(frozen=True)
class LPResult:
    status: str
    x: tuple[Fraction, ...] = ()
    objective: Fraction = _ZERO
    basis: tuple[int, ...] = ()
    pivots: int = 0


class _Tableau:
    """Dense rows ``[a_0 .. a_{k-1} | rhs]`` plus a reduced-cost row."""

    def __init__(self, rows: list[list[Fraction]], basis: list[int]):
        self.rows = rows
        self.basis = basis
        self.ncols = len(rows[0]) - 1 if rows else 0
        self.cost: list[Fraction] = []
        self.pivots = 0

    def set_objective(self, c: Sequence[Fraction]) -> None:
        cost = list(c) + [_ZERO]
        for r, j in enumerate(self.basis):
            cj = cost[j]
            if cj:
                row = self.rows[r]
                for k, v in enumerate(row):
                    if v:
                        cost[k] -= cj * v
        self.cost = cost

    def pivot(self, r: int, j: int) -> None:
        row = self.rows[r]
        piv = row[j]
        if piv != 1:
            row = [v / piv for v in row]
            self.rows[r] = row
        nz = [k for k, v in enumerate(row) if v]
        for other in (*self.rows, self.cost):
            if other is row:
                continue
            f = other[j]
            if f:
                for k in nz:
                    other[k] -= f * row[k]
        self.basis[r] = j
        self.pivots += 1

    def run(self, allowed: int) -> str:
        """Bland-rule iterations over columns ``< allowed``."""
        while True:
            enter = next((j for j in range(allowed) if self.cost[j] < 0), None)
            if enter is None:
                return OPTIMAL
            best: tuple[Fraction, int, int] | None = None
            for r, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    key = (row[-1] / a, self.basis[r], r)
                    if best is None or key < best:
                        best = key
            if best is None:
                return UNBOUNDED
            self.pivot(best[2], enter)

    def solution(self, width: int) -> list[Fraction]:
        x = [_ZERO] * width
        for r, j in enumerate(self.basis):
            if j < width:
                x[j] = self.rows[r][-1]
        return x


def _unit_column(A: list[list[Fraction]], r: int, j: int) -> bool:
    return A[r][j] > 0 and all(A[s][j] == 0 for s in range(len(A)) if s != r)


def solve_standard_form(
    c: Sequence[Fraction], A: Sequence[Sequence[Fraction]], b: Sequence[Fraction]
) -> LPResult:
    nvars = len(c)
    rows_in = [[Fraction(v) for v in row] for row in A]
    rhs = [Fraction(v) for v in b]
    for r in range(len(rows_in)):
        if rhs[r] < 0:
            rows_in[r] = [-v for v in rows_in[r]]
            rhs[r] = -rhs[r]

    # Reuse positive unit columns (slacks) as the starting basis where possible.
    basis: list[int | None] = [None] * len(rows_in)
    used: set[int] = set()
    for r in range(len(rows_in)):
        for j in range(nvars):
            if j not in used and _unit_column(rows_in, r, j):
                basis[r] = j
                used.add(j)
                a = rows_in[r][j]
                if a != 1:
                    rows_in[r] = [v / a for v in rows_in[r]]
                    rhs[r] /= a
                break

    n_art = sum(1 for j in basis if j is None)
    rows: list[list[Fraction]] = []
    art = nvars
    for r, row in enumerate(rows_in):
        extra = [_ZERO] * n_art
        if basis[r] is None:
            extra[art - nvars] = Fraction(1)
            basis[r] = art
            art += 1
        rows.append(row + extra + [rhs[r]])
    tab = _Tableau(rows, [j for j in basis if j is not None])

    if n_art:
        tab.set_objective([_ZERO] * nvars + [Fraction(1)] * n_art)
        tab.run(nvars + n_art)
        if -tab.cost[-1] != 0:
            return LPResult(INFEASIBLE, pivots=tab.pivots)
        # Drive zero-level artificials out of the basis; drop redundant rows.
        r = 0
        while r < len(tab.rows):
            if tab.basis[r] >= nvars:
                j = next((j for j in range(nvars) if tab.rows[r][j] != 0), None)
                if j is None:
                    del tab.rows[r]
                    del tab.basis[r]
                    continue
                tab.pivot(r, j)
            r += 1
        tab.rows = [row[:nvars] + [row[-1]] for row in tab.rows]
        tab.ncols = nvars

    tab.set_objective(c)
    status = tab.run(nvars)
    if status != OPTIMAL:
        return LPResult(status, pivots=tab.pivots)
    x = tab.solution(nvars)
    obj = sum((ci * xi for ci, xi in zip(c, x) if xi), _ZERO)
    return LPResult(OPTIMAL, tuple(x), obj, tuple(tab.basis), tab.pivots)
