"""Split a consumption forest into chore-disjoint Type 1/2/3 pieces.

Type 1: one chore ``c`` shared by agents ``i1, i2``.
Type 2: chores ``c1 = {i1, i2}`` and ``c2 = {i2, i3}``.
Type 3: a hub chore shared by ``a_1..a_k`` (``k >= 3``) plus up to ``k``
branch chores ``c_j = {a_j, b_j}``.

Every chore handed to this module must have degree at least 2; degree-1
chores are already integral and are split off by :func:`preassign_degree_one`.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .equilibrium import ConsumptionGraph, FractionalAllocation


class PieceKind(str, Enum):
    TYPE1 = "type1"
    TYPE2 = "type2"
    TYPE3 = "type3"


class ChoreDegreeViolation(ValueError):
    pass


class PreconditionViolation(ValueError):
    pass


class PieceInvariantError(AssertionError):
    pass


@dataclass(frozen=True)
class TreePiece:
    """A typed subtree.

    ``chores``: Type 1 ``(c,)``; Type 2 ``(c1, c2)``; Type 3 ``(hub, c_1, ..., c_h)``.
    ``agents``: Type 1 ``(i1, i2)``; Type 2 ``(i1, i2, i3)`` with ``i2`` shared;
    Type 3 the hub's agents ``a_1..a_k``.
    ``branches``: Type 3 only, ``(c_j, a_j, b_j)`` triples.
    """

    kind: PieceKind
    chores: tuple[int, ...]
    agents: tuple[int, ...]
    branches: tuple[tuple[int, int, int], ...] = ()

    @property
    def hub(self) -> int:
        return self.chores[0]

    @property
    def k(self) -> int:
        return len(self.agents)

    @property
    def h(self) -> int:
        return len(self.branches)

    def all_agents(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.agents) | {b for _, _, b in self.branches}))

    def edge_count(self) -> int:
        if self.kind is PieceKind.TYPE1:
            return 2
        if self.kind is PieceKind.TYPE2:
            return 4
        return self.k + 2 * self.h

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind.value, "chores": list(self.chores)}
        if self.kind is PieceKind.TYPE1:
            out["roles"] = {"c": self.chores[0], "i1": self.agents[0], "i2": self.agents[1]}
        elif self.kind is PieceKind.TYPE2:
            c1, c2 = self.chores
            i1, i2, i3 = self.agents
            out["roles"] = {"c1": c1, "c2": c2, "i1": i1, "i2": i2, "i3": i3}
        else:
            out["roles"] = {
                "hub": self.hub,
                "a": list(self.agents),
                "branches": [{"c": c, "a": a, "b": b} for c, a, b in self.branches],
            }
        return out


class StepCounter:
    """Counts elementary steps so tests can assert complexity budgets."""

    def __init__(self) -> None:
        self.count = 0

    def tick(self, k: int = 1) -> None:
        self.count += k


def _tick(counter: StepCounter | None, k: int = 1) -> None:
    if counter is not None:
        counter.count += k


def type1(c: int, i1: int, i2: int) -> TreePiece:
    return TreePiece(PieceKind.TYPE1, (c,), tuple(sorted((i1, i2))))


def type2(i1: int, i2: int, i3: int, c1: int, c2: int) -> TreePiece:
    """``c1`` joins ``i1, i2``; ``c2`` joins ``i2, i3``. Normalized to ``c1 < c2``."""
    if c2 < c1:
        i1, i3, c1, c2 = i3, i1, c2, c1
    return TreePiece(PieceKind.TYPE2, (c1, c2), (i1, i2, i3))


def type3(hub: int, spokes: Iterable[int], branches: Iterable[tuple[int, int, int]]) -> TreePiece:
    br = tuple(sorted(branches))
    return TreePiece(PieceKind.TYPE3, (hub,) + tuple(c for c, _, _ in br), tuple(sorted(spokes)), br)


def check_piece(piece: TreePiece, graph: ConsumptionGraph) -> None:
    """Raise :class:`PieceInvariantError` unless ``piece`` matches ``graph`` exactly."""

    def agents(c: int) -> set[int]:
        if c not in graph.agents_of:
            raise PieceInvariantError(f"chore {c} not in graph")
        return set(graph.agents_of[c])

    if piece.kind is PieceKind.TYPE1:
        (c,) = piece.chores
        i1, i2 = piece.agents
        if i1 == i2 or agents(c) != {i1, i2}:
            raise PieceInvariantError(f"type1 {piece}: chore {c} has agents {agents(c)}")
    elif piece.kind is PieceKind.TYPE2:
        c1, c2 = piece.chores
        i1, i2, i3 = piece.agents
        if len({i1, i2, i3}) != 3 or agents(c1) != {i1, i2} or agents(c2) != {i2, i3}:
            raise PieceInvariantError(f"type2 {piece} does not match graph")
    else:
        spokes = set(piece.agents)
        if piece.k < 3 or len(spokes) != piece.k:
            raise PieceInvariantError(f"type3 {piece}: k must be >= 3")
        if not 0 <= piece.h <= piece.k:
            raise PieceInvariantError(f"type3 {piece}: h out of range")
        if agents(piece.hub) != spokes:
            raise PieceInvariantError(f"type3 {piece}: hub agents mismatch")
        seen_a: set[int] = set()
        seen_b: set[int] = set()
        for c, a, b in piece.branches:
            if a not in spokes or b in spokes or a in seen_a or b in seen_b:
                raise PieceInvariantError(f"type3 {piece}: bad branch {(c, a, b)}")
            if agents(c) != {a, b}:
                raise PieceInvariantError(f"type3 {piece}: branch chore {c} mismatch")
            seen_a.add(a)
            seen_b.add(b)
        if piece.chores != (piece.hub,) + tuple(c for c, _, _ in piece.branches):
            raise PieceInvariantError(f"type3 {piece}: chore list mismatch")


def preassign_degree_one(
    graph: ConsumptionGraph, alloc: FractionalAllocation | None = None
) -> tuple[dict[int, int], ConsumptionGraph]:
    """Give every degree-1 chore to its only agent and drop it from the graph."""
    pre: dict[int, int] = {}
    for c in graph.chores:
        agents = graph.agents_of[c]
        if len(agents) == 1:
            (i,) = agents
            if alloc is not None and alloc.x[i][c] != 1:
                raise ChoreDegreeViolation(f"chore {c} has one agent but share {alloc.x[i][c]}")
            pre[c] = i
    rest = [c for c in graph.chores if c not in pre]
    return pre, graph.restrict(rest)


def split_all_degree_two(
    graph: ConsumptionGraph,
    chores: Iterable[int] | None = None,
    counter: StepCounter | None = None,
) -> list[TreePiece]:
    """Partition degree-2 chores into Type 2 pieces plus at most one Type 1 per tree.

    Each chore is an edge of the agent tree. Edges are paired bottom-up: at
    every agent, unpaired child edges are matched two at a time; an odd one
    out is matched with the edge to the parent, or becomes the single Type 1
    piece at the root.
    """
    S = sorted(graph.chores if chores is None else set(chores))
    adj: dict[int, list[tuple[int, int]]] = {}
    for c in S:
        ends = graph.agents_of[c]
        if len(ends) != 2:
            raise ChoreDegreeViolation(f"chore {c} has degree {len(ends)}, expected 2")
        u, v = ends
        adj.setdefault(u, []).append((c, v))
        adj.setdefault(v, []).append((c, u))
        _tick(counter)

    pieces: list[TreePiece] = []
    visited: set[int] = set()
    for root in sorted(adj):
        if root in visited:
            continue
        parent: dict[int, tuple[int, int] | None] = {root: None}
        order: list[int] = []
        stack = [root]
        visited.add(root)
        while stack:
            v = stack.pop()
            order.append(v)
            for c, u in adj[v]:
                _tick(counter)
                up = parent[v]
                if up is not None and up[0] == c:
                    continue
                if u in visited:
                    raise PreconditionViolation("agent graph contains a cycle")
                visited.add(u)
                parent[u] = (c, v)
                stack.append(u)

        pending: dict[int, list[tuple[int, int]]] = {v: [] for v in order}
        for v in reversed(order):
            _tick(counter)
            open_edges = sorted(pending[v])
            while len(open_edges) >= 2:
                (ca, a), (cb, b) = open_edges[0], open_edges[1]
                del open_edges[:2]
                pieces.append(type2(a, v, b, ca, cb))
            up = parent[v]
            if open_edges:
                cl, leaf = open_edges[0]
                if up is None:
                    pieces.append(type1(cl, v, leaf))
                else:
                    pieces.append(type2(leaf, v, up[1], cl, up[0]))
            elif up is not None:
                pending[up[1]].append((up[0], v))
    return pieces


def _collect(
    graph: ConsumptionGraph,
    S: set[int],
    start_chores: Iterable[int],
    seen_agents: set[int],
    counter: StepCounter | None,
) -> list[int]:
    """Chores of ``S`` reachable from ``start_chores`` without revisiting ``seen_agents``."""
    seen_agents = set(seen_agents)
    out: list[int] = []
    seen_chores: set[int] = set()
    queue = deque(c for c in start_chores if c in S)
    seen_chores.update(queue)
    while queue:
        c = queue.popleft()
        out.append(c)
        for i in graph.agents_of[c]:
            _tick(counter)
            if i in seen_agents:
                continue
            seen_agents.add(i)
            for c2 in graph.chores_of[i]:
                _tick(counter)
                if c2 in S and c2 not in seen_chores:
                    seen_chores.add(c2)
                    queue.append(c2)
    return sorted(out)


def split_with_high_degree(
    graph: ConsumptionGraph,
    chores: Iterable[int] | None = None,
    counter: StepCounter | None = None,
) -> list[TreePiece]:
    """Partition a tree with some chore of degree >= 3 into Type 2 and Type 3 pieces.

    Roots the tree at the lowest-index chore of degree >= 3 (the hub). For
    each hub agent ``a``: if a descendant chore has degree >= 3, recurse on
    ``a``'s subtree. Otherwise split even child subtrees and pairs of odd
    child subtrees as degree-2 trees; a single leftover odd child chore joins
    the hub's Type 3 piece as a branch ``(c*, a, b)`` and ``b``'s subtree
    (even, possibly empty) is split as a degree-2 tree.
    """
    S = set(graph.chores if chores is None else chores)
    hubs = sorted(c for c in S if graph.degree(c) >= 3)
    if not hubs:
        raise PreconditionViolation("no chore of degree >= 3")
    hub = hubs[0]
    spokes = graph.agents_of[hub]
    pieces: list[TreePiece] = []
    branches: list[tuple[int, int, int]] = []

    for a in spokes:
        children = [c for c in graph.chores_of[a] if c in S and c != hub]
        below = _collect(graph, S, children, {a}, counter)
        if any(graph.degree(c) >= 3 for c in below):
            pieces.extend(split_with_high_degree(graph, below, counter))
            continue
        odd: list[tuple[int, list[int]]] = []
        for c in sorted(children):
            sub = _collect(graph, S, [c], {a}, counter)
            if len(sub) % 2:
                odd.append((c, sub))
            else:
                pieces.extend(split_all_degree_two(graph, sub, counter))
        for (_, s1), (_, s2) in zip(odd[0:-1:2], odd[1::2]):
            pieces.extend(split_all_degree_two(graph, s1 + s2, counter))
        if len(odd) % 2:
            c_star, sub = odd[-1]
            (b,) = [i for i in graph.agents_of[c_star] if i != a]
            branches.append((c_star, a, b))
            rest = [c for c in sub if c != c_star]
            if rest:
                pieces.extend(split_all_degree_two(graph, rest, counter))

    pieces.append(type3(hub, spokes, branches))
    return pieces


def decompose(graph: ConsumptionGraph, counter: StepCounter | None = None) -> list[TreePiece]:
    """Decompose every tree of the forest; pieces partition ``graph.chores``."""
    if not graph.is_acyclic:
        raise PreconditionViolation("consumption graph is not a forest")
    for c in graph.chores:
        if graph.degree(c) < 2:
            raise ChoreDegreeViolation(f"chore {c} has degree {graph.degree(c)}; preassign it first")
    pieces: list[TreePiece] = []
    for _, chores in graph.components:
        if not chores:
            continue
        if any(graph.degree(c) >= 3 for c in chores):
            pieces.extend(split_with_high_degree(graph, chores, counter))
        else:
            pieces.extend(split_all_degree_two(graph, chores, counter))
    return pieces
