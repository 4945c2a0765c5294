"""Subsidy accounting, certificate checks and brute-force oracles.

The oracles here deliberately share no code with the solver path: they
enumerate integral allocations, piece roundings or LP bases directly.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import lcm
from typing import Iterable, Sequence

from .equilibrium import Equilibrium, FractionalAllocation
from .instance import Instance, IntegralAllocation

DEFAULT_BUDGET = 10**7

_ZERO = Fraction(0)


class IncompleteAllocation(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class SubsidyReport:
    allocation: IntegralAllocation
    per_agent_subsidy: tuple[Fraction, ...]
    total: Fraction
    bound: Fraction
    bound_satisfied: bool
    fpo_certified: bool = False
    scale: Fraction = Fraction(1)

    @property
    def total_original_units(self) -> Fraction:
        return self.total * self.scale


def subsidy_bound(n: int) -> Fraction:
    return Fraction(n, 3) - Fraction(1, 6)


def _check_complete(inst: Instance, A: IntegralAllocation) -> None:
    if len(A.owner) != inst.m:
        raise IncompleteAllocation(f"allocation covers {len(A.owner)} of {inst.m} chores")
    for c, i in enumerate(A.owner):
        if not 0 <= i < inst.n:
            raise IncompleteAllocation(f"chore {c} owned by unknown agent {i}")


def per_agent_subsidy(inst: Instance, A: IntegralAllocation) -> tuple[Fraction, ...]:
    _check_complete(inst, A)
    loads = [_ZERO] * inst.n
    for c, i in enumerate(A.owner):
        loads[i] += inst.disutilities[i][c]
    return tuple(max(_ZERO, loads[i] - inst.prop_share(i)) for i in range(inst.n))


def subsidy(inst: Instance, A: IntegralAllocation, *, fpo_certified: bool = False) -> SubsidyReport:
    """Exact PROP-subsidy of ``A``. Amounts are in ``inst``'s (normalized) units."""
    per = per_agent_subsidy(inst, A)
    total = sum(per, _ZERO)
    bound = subsidy_bound(inst.n)
    return SubsidyReport(A, per, total, bound, total <= bound, fpo_certified, inst.scale)


def prop_check(inst: Instance, alloc: FractionalAllocation) -> bool:
    for i in range(inst.n):
        load = sum((d * v for d, v in zip(inst.disutilities[i], alloc.x[i])), _ZERO)
        if load > inst.prop_share(i):
            return False
    return True


def certify_fpo(eq: Equilibrium, A: IntegralAllocation) -> bool:
    """True iff ``(A, p)`` is a market equilibrium with the same ``alpha``.

    By the first welfare theorem that makes ``A`` fractionally Pareto-optimal.
    """
    inst, p, alpha = eq.instance, eq.payments, eq.mpb
    if len(A.owner) != inst.m or any(pc <= 0 for pc in p):
        return False
    for i in range(inst.n):
        for c in range(inst.m):
            if inst.disutilities[i][c] < alpha[i] * p[c]:
                return False
    return all(inst.disutilities[i][c] == alpha[i] * p[c] for c, i in enumerate(A.owner))


# ---------------------------------------------------------------- enumeration


def _integer_tables(inst: Instance) -> tuple[list[list[int]], list[int], int]:
    """Disutilities and proportional shares over a common denominator."""
    shares = [inst.prop_share(i) for i in range(inst.n)]
    den = lcm(*(v.denominator for row in inst.disutilities for v in row), *(s.denominator for s in shares))
    d = [[int(v * den) for v in row] for row in inst.disutilities]
    return d, [int(s * den) for s in shares], den


def _check_budget(inst: Instance, budget: int) -> None:
    if inst.n**inst.m > budget:
        raise BudgetExceeded(f"{inst.n}^{inst.m} allocations exceed budget {budget}")


def _best_in_chunk(args: tuple[list[list[int]], list[int], int, int]) -> tuple[int, tuple[int, ...]]:
    """Best allocation among those giving chore 0 to agent ``first``."""
    d, shares, m, first = args
    n = len(shares)
    best_val: int | None = None
    best: tuple[int, ...] = ()
    for tail in product(range(n), repeat=m - 1):
        owner = (first,) + tail
        loads = [0] * n
        for c, i in enumerate(owner):
            loads[i] += d[i][c]
        val = 0
        for i in range(n):
            if loads[i] > shares[i]:
                val += loads[i] - shares[i]
        if best_val is None or val < best_val:
            best_val, best = val, owner
    assert best_val is not None
    return best_val, best


def brute_force_opt_subsidy(
    inst: Instance, budget: int = DEFAULT_BUDGET, jobs: int = 1
) -> tuple[Fraction, IntegralAllocation]:
    """Minimum PROP-subsidy over all ``n^m`` integral allocations.

    Allocations are visited in mixed-radix order (chore 0 most significant);
    the first minimizer wins. Chunking by chore 0's owner keeps that order
    when ``jobs > 1``.
    """
    _check_budget(inst, budget)
    d, shares, den = _integer_tables(inst)
    if inst.m == 0:
        return Fraction(sum(max(0, -s) for s in shares), den), IntegralAllocation((), n=inst.n)
    chunks = [(d, shares, inst.m, i) for i in range(inst.n)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_best_in_chunk, chunks))
    else:
        results = [_best_in_chunk(ch) for ch in chunks]
    val, owner = min(results, key=lambda r: r[0])
    return Fraction(val, den), IntegralAllocation(owner, n=inst.n)


def pareto_check_integral(inst: Instance, A: IntegralAllocation, budget: int = DEFAULT_BUDGET) -> bool:
    """True iff no integral allocation Pareto-dominates ``A``."""
    _check_complete(inst, A)
    _check_budget(inst, budget)
    d, _, _ = _integer_tables(inst)
    n = inst.n
    base = [0] * n
    for c, i in enumerate(A.owner):
        base[i] += d[i][c]
    for owner in product(range(n), repeat=inst.m):
        loads = [0] * n
        for c, i in enumerate(owner):
            loads[i] += d[i][c]
        if all(l <= b for l, b in zip(loads, base)) and any(l < b for l, b in zip(loads, base)):
            return False
    return True


def enumerate_roundings(alloc: FractionalAllocation, chores: Iterable[int]) -> Iterable[dict[int, int]]:
    """Every consumption-respecting assignment of ``chores``, in lexicographic order."""
    chores = sorted(chores)
    options = [[i for i in range(alloc.n) if alloc.x[i][c] > 0] for c in chores]
    for owners in product(*options):
        yield dict(zip(chores, owners))


def min_rounding_cost(common: Sequence[Fraction], alloc: FractionalAllocation, chores: Iterable[int]) -> Fraction:
    """Cheapest rounding of ``chores`` under identical disutilities, by enumeration."""
    chores = sorted(chores)
    best: Fraction | None = None
    for owner in enumerate_roundings(alloc, chores):
        cost = _ZERO
        for i in range(alloc.n):
            delta = sum((common[c] for c in chores if owner[c] == i), _ZERO) - sum(
                (common[c] * alloc.x[i][c] for c in chores), _ZERO
            )
            cost += max(delta, _ZERO)
        if best is None or cost < best:
            best = cost
    assert best is not None
    return best


# --------------------------------------------------------- LP vertex oracle


def _solve_square(M: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """Gauss-Jordan on a square system; ``None`` if singular."""
    k = len(M)
    aug = [row[:] + [rhs[r]] for r, row in enumerate(M)]
    for col in range(k):
        piv = next((r for r in range(col, k) if aug[r][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [v / pv for v in aug[col]]
        for r in range(k):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [aug[r][k] for r in range(k)]


def lp_optimum_by_vertex_enumeration(
    c: Sequence[Fraction], A: Sequence[Sequence[Fraction]], b: Sequence[Fraction]
) -> Fraction | None:
    """Minimum of ``c.x`` over ``{A x = b, x >= 0}`` by trying every basis.

    Assumes ``A`` has full row rank and the optimum is attained. Only for
    tiny systems.
    """
    rows, cols = len(A), len(c)
    best: Fraction | None = None
    for basis in combinations(range(cols), rows):
        M = [[Fraction(A[r][j]) for j in basis] for r in range(rows)]
        sol = _solve_square(M, [Fraction(v) for v in b])
        if sol is None or any(v < 0 for v in sol):
            continue
        val = sum((Fraction(c[j]) * v for j, v in zip(basis, sol)), _ZERO)
        if best is None or val < best:
            best = val
    return best


def proportionality_lp(inst: Instance) -> tuple[list[Fraction], list[list[Fraction]], list[Fraction]]:
    """Standard-form data ``(c, A, b)`` of the proportionality LP with agent slacks."""
    n, m = inst.n, inst.m
    width = n * m + n
    A, b = [], []
    for i in range(n):
        row = [_ZERO] * width
        for c in range(m):
            row[i * m + c] = inst.disutilities[i][c]
        row[n * m + i] = Fraction(1)
        A.append(row)
        b.append(inst.prop_share(i))
    for c in range(m):
        row = [_ZERO] * width
        for i in range(n):
            row[i * m + c] = Fraction(1)
        A.append(row)
        b.append(Fraction(1))
    cost = [inst.disutilities[i][c] for i in range(n) for c in range(m)] + [_ZERO] * n
    return cost, A, b
