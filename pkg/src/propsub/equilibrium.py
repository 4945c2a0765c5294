"""Proportional market equilibrium via the exact LP and its dual.

The primal LP minimizes total disutility subject to every agent receiving at
most her proportional share; any optimal vertex is proportional and has an
acyclic consumption graph. The dual supplies chore payments ``p`` and
multipliers ``h``; ``alpha_i = 1/(1+h_i)`` is agent ``i``'s
minimum-pain-per-buck.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Sequence

from .instance import Instance
from .simplex import OPTIMAL, solve_standard_form

_ZERO = Fraction(0)
_ONE = Fraction(1)


class SolverInvariantError(RuntimeError):
    """The LP solver produced something a vertex optimum cannot be."""


class CertificateViolation(ValueError):
    def __init__(self, reason: str, agent: int | None = None, chore: int | None = None):
        where = ""
        if agent is not None or chore is not None:
            where = f" at (agent={agent}, chore={chore})"
        super().__init__(f"{reason}{where}")
        self.reason = reason
        self.agent = agent
        self.chore = chore


@dataclass(frozen=True)
class FractionalAllocation:
    x: tuple[tuple[Fraction, ...], ...]
    bundle_disutility: tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        x = tuple(tuple(Fraction(v) for v in row) for row in self.x)
        object.__setattr__(self, "x", x)
        for i, row in enumerate(x):
            for c, v in enumerate(row):
                if not 0 <= v <= 1:
                    raise ValueError(f"x[{i}][{c}] = {v} outside [0, 1]")
        for c in range(self.m):
            s = sum((row[c] for row in x), _ZERO)
            if s != 1:
                raise ValueError(f"chore {c} shares sum to {s}, not 1")

    @classmethod
    def build(cls, x: Sequence[Sequence[Fraction]], inst: Instance) -> FractionalAllocation:
        rows = tuple(tuple(Fraction(v) for v in row) for row in x)
        cache = tuple(
            sum((d * v for d, v in zip(inst.disutilities[i], rows[i]) if v), _ZERO)
            for i in range(inst.n)
        )
        return cls(rows, cache)

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def m(self) -> int:
        return len(self.x[0]) if self.x else 0

    def share(self, i: int, c: int) -> Fraction:
        return self.x[i][c]

    def is_integral(self) -> bool:
        return all(v in (0, 1) for row in self.x for v in row)

    def to_lists(self) -> list[list[str]]:
        return [[str(v) for v in row] for row in self.x]


@dataclass(frozen=True)
class ConsumptionGraph:
    """Bipartite agent/chore graph; ``agents_of`` lists the active chores only."""

    n: int
    agents_of: Mapping[int, tuple[int, ...]] = field(compare=False)

    @cached_property
    def chores_of(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {i: [] for i in range(self.n)}
        for c in sorted(self.agents_of):
            for i in self.agents_of[c]:
                out[i].append(c)
        return {i: tuple(cs) for i, cs in out.items()}

    @property
    def chores(self) -> list[int]:
        return sorted(self.agents_of)

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.agents_of.values())

    def degree(self, c: int) -> int:
        return len(self.agents_of[c])

    @cached_property
    def components(self) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
        """Connected components as ``(agents, chores)``, isolated agents included."""
        seen_a: set[int] = set()
        seen_c: set[int] = set()
        comps = []
        for start in range(self.n):
            if start in seen_a:
                continue
            agents, chores = [start], []
            seen_a.add(start)
            queue = deque([start])
            while queue:
                i = queue.popleft()
                for c in self.chores_of[i]:
                    if c in seen_c:
                        continue
                    seen_c.add(c)
                    chores.append(c)
                    for j in self.agents_of[c]:
                        if j not in seen_a:
                            seen_a.add(j)
                            agents.append(j)
                            queue.append(j)
            comps.append((tuple(sorted(agents)), tuple(sorted(chores))))
        return comps

    @property
    def is_acyclic(self) -> bool:
        vertices = self.n + len(self.agents_of)
        return self.edge_count == vertices - len(self.components)

    def restrict(self, chores) -> ConsumptionGraph:
        return ConsumptionGraph(self.n, {c: self.agents_of[c] for c in sorted(chores)})

    def to_dict(self) -> dict:
        return {
            "agents_of": {str(c): list(a) for c, a in sorted(self.agents_of.items())},
            "components": [[list(a), list(c)] for a, c in self.components],
            "acyclic": self.is_acyclic,
        }


def consumption_graph(alloc: FractionalAllocation) -> ConsumptionGraph:
    agents_of = {
        c: tuple(i for i in range(alloc.n) if alloc.x[i][c] > 0) for c in range(alloc.m)
    }
    return ConsumptionGraph(alloc.n, agents_of)


@dataclass(frozen=True)
class Equilibrium:
    instance: Instance
    alloc: FractionalAllocation
    payments: tuple[Fraction, ...]
    mpb: tuple[Fraction, ...]
    dual_h: tuple[Fraction, ...]


def primal_objective(inst: Instance, x: Sequence[Sequence[Fraction]]) -> Fraction:
    return sum(
        (inst.disutilities[i][c] * x[i][c] for i in range(inst.n) for c in range(inst.m)),
        _ZERO,
    )


def dual_objective(inst: Instance, payments: Sequence[Fraction], dual_h: Sequence[Fraction]) -> Fraction:
    return sum(payments, _ZERO) - sum(
        (h * inst.prop_share(i) for i, h in enumerate(dual_h)), _ZERO
    )


def solve_primal(inst: Instance) -> FractionalAllocation:
    """Optimal vertex of the proportionality LP.

    Variables are ``x[i][c]`` (index ``i*m + c``) followed by one slack per
    agent. Rows: one proportionality row per agent, one column-sum row per
    chore.
    """
    n, m = inst.n, inst.m
    if m == 0:
        return FractionalAllocation.build([[] for _ in range(n)], inst)
    nx = n * m
    width = nx + n
    A: list[list[Fraction]] = []
    b: list[Fraction] = []
    for i in range(n):
        row = [_ZERO] * width
        for c in range(m):
            row[i * m + c] = inst.disutilities[i][c]
        row[nx + i] = _ONE
        A.append(row)
        b.append(inst.prop_share(i))
    for c in range(m):
        row = [_ZERO] * width
        for i in range(n):
            row[i * m + c] = _ONE
        A.append(row)
        b.append(_ONE)
    cost = [inst.disutilities[i][c] for i in range(n) for c in range(m)] + [_ZERO] * n

    res = solve_standard_form(cost, A, b)
    if res.status != OPTIMAL:
        raise SolverInvariantError(f"proportionality LP reported {res.status}")
    x = [[res.x[i * m + c] for c in range(m)] for i in range(n)]
    alloc = FractionalAllocation.build(x, inst)
    if not consumption_graph(alloc).is_acyclic:
        raise SolverInvariantError("vertex solution has a cyclic consumption graph")
    return alloc


def solve_dual(inst: Instance) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    """Optimal ``(p, h)`` of the dual LP.

    ``p`` is free, so it is split as ``p+ - p-``. Each dual row
    ``p_c - h_i d_i(c) <= d_i(c)`` gets a slack, which also gives a feasible
    starting basis because every ``d_i(c) > 0``.
    """
    n, m = inst.n, inst.m
    if m == 0:
        return (), tuple(_ZERO for _ in range(n))
    nslack = n * m
    width = 2 * m + n + nslack
    A: list[list[Fraction]] = []
    b: list[Fraction] = []
    for i in range(n):
        for c in range(m):
            row = [_ZERO] * width
            d = inst.disutilities[i][c]
            row[c] = _ONE
            row[m + c] = -_ONE
            row[2 * m + i] = -d
            row[2 * m + n + i * m + c] = _ONE
            A.append(row)
            b.append(d)
    cost = (
        [-_ONE] * m
        + [_ONE] * m
        + [inst.prop_share(i) for i in range(n)]
        + [_ZERO] * nslack
    )
    res = solve_standard_form(cost, A, b)
    if res.status != OPTIMAL:
        raise SolverInvariantError(f"dual LP reported {res.status}")
    p = tuple(res.x[c] - res.x[m + c] for c in range(m))
    h = tuple(res.x[2 * m + i] for i in range(n))
    return p, h


def assemble_equilibrium(
    inst: Instance,
    alloc: FractionalAllocation,
    payments: Sequence[Fraction],
    dual_h: Sequence[Fraction],
) -> Equilibrium:
    """Turn LP solutions into a checked market equilibrium.

    Raises :class:`CertificateViolation` naming the first failing pair.
    """
    p = tuple(Fraction(v) for v in payments)
    h = tuple(Fraction(v) for v in dual_h)
    if len(p) != inst.m or len(h) != inst.n:
        raise CertificateViolation("dimension mismatch")
    for i, hi in enumerate(h):
        if hi < 0:
            raise CertificateViolation("negative dual multiplier", agent=i)
    for c, pc in enumerate(p):
        if pc <= 0:
            raise CertificateViolation("non-positive payment", chore=c)
    alpha = tuple(1 / (1 + hi) for hi in h)
    check_equilibrium(inst, alloc.x, p, alpha)
    return Equilibrium(inst, alloc, p, alpha, h)


def check_equilibrium(
    inst: Instance,
    x: Sequence[Sequence[Fraction]],
    payments: Sequence[Fraction],
    alpha: Sequence[Fraction],
) -> None:
    for i in range(inst.n):
        for c in range(inst.m):
            d = inst.disutilities[i][c]
            priced = alpha[i] * payments[c]
            if d < priced:
                raise CertificateViolation("disutility below alpha*p", agent=i, chore=c)
            if x[i][c] > 0 and d != priced:
                raise CertificateViolation("held chore not at minimum pain per buck", agent=i, chore=c)


def solve_equilibrium(inst: Instance) -> Equilibrium:
    alloc = solve_primal(inst)
    p, h = solve_dual(inst)
    return assemble_equilibrium(inst, alloc, p, h)
