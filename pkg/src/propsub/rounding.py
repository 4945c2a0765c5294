"""Per-piece rounding under a common disutility ``dhat``.

Each piece is rounded to the cheapest consumption-respecting assignment;
ties go to the lexicographically smallest owner vector (chores in index
order). The known worst-case guarantees are 1/2 (Type 1, scaled by
``dhat``), 2/3 (Type 2) and (k+h-1)/3 (Type 3).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Mapping, Sequence

from .decomposition import PieceKind, TreePiece
from .equilibrium import FractionalAllocation
from .instance import IntegralAllocation

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class PieceRounding:
    piece: TreePiece
    owner: Mapping[int, int]
    cost: Fraction

    def owner_vector(self) -> tuple[int, ...]:
        return tuple(self.owner[c] for c in sorted(self.owner))


def piece_cost(
    piece: TreePiece, x: FractionalAllocation, dhat: Sequence[Fraction], owner: Mapping[int, int]
) -> Fraction:
    total = _ZERO
    for i in piece.all_agents():
        delta = _ZERO
        for c in piece.chores:
            if owner[c] == i:
                delta += dhat[c]
            delta -= dhat[c] * x.x[i][c]
        if delta > 0:
            total += delta
    return total


def piece_bound(piece: TreePiece, dhat: Sequence[Fraction]) -> Fraction:
    if piece.kind is PieceKind.TYPE1:
        return dhat[piece.chores[0]] / 2
    if piece.kind is PieceKind.TYPE2:
        return Fraction(2, 3)
    return Fraction(piece.k + piece.h - 1, 3)


def forest_bound(n: int) -> Fraction:
    return Fraction(n, 3) - Fraction(1, 6)


def round_type1(piece: TreePiece, x: FractionalAllocation, dhat: Sequence[Fraction]) -> PieceRounding:
    (c,) = piece.chores
    i1, i2 = piece.agents
    winner = i1 if x.x[i1][c] >= x.x[i2][c] else i2
    cost = dhat[c] * (1 - x.x[winner][c])
    return PieceRounding(piece, {c: winner}, cost)


def round_type2(piece: TreePiece, x: FractionalAllocation, dhat: Sequence[Fraction]) -> PieceRounding:
    c1, c2 = piece.chores
    i1, i2, i3 = piece.agents
    best: tuple[Fraction, dict[int, int]] | None = None
    for o1, o2 in product(sorted((i1, i2)), sorted((i2, i3))):
        owner = {c1: o1, c2: o2}
        cost = piece_cost(piece, x, dhat, owner)
        if best is None or cost < best[0]:
            best = (cost, owner)
    assert best is not None
    return PieceRounding(piece, best[1], best[0])


def _branch_choice(
    c: int, a: int, b: int, a_has_hub: bool, hub: int, x: FractionalAllocation, dhat: Sequence[Fraction]
) -> tuple[Fraction, int]:
    """Cheapest owner of branch chore ``c`` and the cost borne by ``a`` and ``b``.

    Agent ``a`` couples the hub and ``c``; ``b`` only touches ``c``.
    """
    d_hub, d_c = dhat[hub], dhat[c]
    base_a = (d_hub if a_has_hub else _ZERO) - x.x[a][hub] * d_hub - x.x[a][c] * d_c
    base_b = -x.x[b][c] * d_c
    options = []
    for owner in sorted((a, b)):
        da = base_a + (d_c if owner == a else _ZERO)
        db = base_b + (d_c if owner == b else _ZERO)
        options.append((max(da, _ZERO) + max(db, _ZERO), owner))
    return min(options)


def round_type3(piece: TreePiece, x: FractionalAllocation, dhat: Sequence[Fraction]) -> PieceRounding:
    hub = piece.hub
    branch_of = {a: (c, b) for c, a, b in piece.branches}
    best: tuple[Fraction, tuple[int, ...], dict[int, int]] | None = None
    for r in piece.agents:
        if x.x[r][hub] <= 0:
            continue
        owner = {hub: r}
        cost = _ZERO
        for a in piece.agents:
            if a in branch_of:
                c, b = branch_of[a]
                part, who = _branch_choice(c, a, b, a == r, hub, x, dhat)
                owner[c] = who
                cost += part
            elif a == r:
                cost += (1 - x.x[a][hub]) * dhat[hub]
        vec = tuple(owner[c] for c in sorted(owner))
        if best is None or (cost, vec) < best[:2]:
            best = (cost, vec, owner)
    assert best is not None
    return PieceRounding(piece, best[2], best[0])


def round_piece(piece: TreePiece, x: FractionalAllocation, dhat: Sequence[Fraction]) -> PieceRounding:
    if piece.kind is PieceKind.TYPE1:
        return round_type1(piece, x, dhat)
    if piece.kind is PieceKind.TYPE2:
        return round_type2(piece, x, dhat)
    return round_type3(piece, x, dhat)


def round_forest(
    pieces: Sequence[TreePiece],
    x: FractionalAllocation,
    dhat: Sequence[Fraction],
    preassigned: Mapping[int, int],
    jobs: int = 1,
) -> tuple[IntegralAllocation, list[PieceRounding]]:
    """Round every piece and merge with the pre-assigned chores."""
    if jobs > 1 and len(pieces) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda p: round_piece(p, x, dhat), pieces))
    else:
        results = [round_piece(p, x, dhat) for p in pieces]
    owner: dict[int, int] = dict(preassigned)
    for res in results:
        for c, i in res.owner.items():
            if c in owner:
                raise ValueError(f"chore {c} appears in two pieces")
            owner[c] = i
    if sorted(owner) != list(range(x.m)):
        missing = sorted(set(range(x.m)) - set(owner))
        raise ValueError(f"chores not covered by pieces or pre-assignment: {missing}")
    return IntegralAllocation(tuple(owner[c] for c in range(x.m)), n=x.n), results
