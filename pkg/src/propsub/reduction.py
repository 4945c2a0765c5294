"""Identical-disutility reduction and rounding cost."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .equilibrium import Equilibrium, FractionalAllocation
from .instance import Instance, IntegralAllocation

_ZERO = Fraction(0)


class NotARounding(ValueError):
    pass


@dataclass(frozen=True)
class ReducedInstance:
    """Every agent values chore ``c`` at ``common[c] = p_c / p_max``."""

    base: Instance
    common: tuple[Fraction, ...]
    p_max: Fraction

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def m(self) -> int:
        return len(self.common)

    def disutility(self, i: int, c: int) -> Fraction:
        return self.common[c]

    def as_instance(self) -> Instance:
        return Instance(self.base.weights, tuple(self.common for _ in range(self.n)))


def reduce_to_identical(eq: Equilibrium, inst: Instance | None = None) -> ReducedInstance:
    base = inst if inst is not None else eq.instance
    if not eq.payments:
        return ReducedInstance(base, (), Fraction(1))
    p_max = max(eq.payments)
    return ReducedInstance(base, tuple(p / p_max for p in eq.payments), p_max)


Owners = Union[IntegralAllocation, Mapping[int, int], Sequence[int]]


def _owner_map(A: Owners) -> Mapping[int, int] | Sequence[int]:
    return A.owner if isinstance(A, IntegralAllocation) else A


def rounding_cost(
    inst: Instance | ReducedInstance,
    alloc: FractionalAllocation,
    A: Owners,
    scope: Iterable[int] | None = None,
) -> Fraction:
    """Sum over agents of ``(d_i(A_i ∩ S) - d_i(x_i restricted to S))^+``.

    ``scope`` defaults to every chore. ``A`` may be partial as long as it
    covers the scope.
    """
    owner = _owner_map(A)
    chores = list(range(alloc.m)) if scope is None else sorted(set(scope))
    delta = [_ZERO] * alloc.n
    for c in chores:
        i = owner[c]
        if alloc.x[i][c] <= 0:
            raise NotARounding(f"chore {c} owned by agent {i} with zero share")
        delta[i] += inst.disutility(i, c)
        for j in range(alloc.n):
            s = alloc.x[j][c]
            if s:
                delta[j] -= inst.disutility(j, c) * s
    return sum((v for v in delta if v > 0), _ZERO)
