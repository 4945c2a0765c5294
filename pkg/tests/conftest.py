from __future__ import annotations

import random
from fractions import Fraction as F

import pytest

from propsub.equilibrium import FractionalAllocation, consumption_graph
from propsub.instance import Instance

# Filled by tests/test_acceptance.py, printed at the end of the session.
ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")


@pytest.fixture
def worked_instance() -> Instance:
    return Instance(
        (F(2, 15), F(8, 15), F(1, 3)),
        ((F(1, 2), F(1), F(1, 2)), (F(1), F(1), F(1)), (F(1), F(2, 3), F(1, 3))),
    )


@pytest.fixture
def worked_x() -> list[list[F]]:
    return [[F(1, 3), F(0), F(0)], [F(2, 3), F(2, 3), F(0)], [F(0), F(1, 3), F(1)]]


@pytest.fixture
def worked_p() -> tuple[F, ...]:
    return (F(1), F(1), F(1, 2))


def alloc_from_edges(n: int, chore_shares: list[dict[int, F]]) -> FractionalAllocation:
    """Fractional allocation with ``x[i][c] = chore_shares[c][i]``."""
    m = len(chore_shares)
    x = [[F(0)] * m for _ in range(n)]
    for c, shares in enumerate(chore_shares):
        for i, s in shares.items():
            x[i][c] = F(s)
    return FractionalAllocation(tuple(tuple(r) for r in x))


def tree_alloc(n: int, chore_agents: list[tuple[int, ...]]) -> FractionalAllocation:
    """Equal split of every chore among its agents."""
    return alloc_from_edges(n, [{i: F(1, len(a)) for i in a} for a in chore_agents])


def tree_graph(n: int, chore_agents: list[tuple[int, ...]]):
    return consumption_graph(tree_alloc(n, chore_agents))


def random_shares(rng: random.Random, k: int, den: int = 60) -> list[F]:
    """``k`` positive rationals summing to 1."""
    raw = [rng.randint(1, den) for _ in range(k)]
    s = sum(raw)
    return [F(r, s) for r in raw]


def random_tree(rng: random.Random, chores: int, max_degree: int = 4, p_high: float = 0.3):
    """Random bipartite tree in which every chore has degree >= 2.

    Returns ``(n_agents, chore_agents)``.
    """
    n = 1
    chore_agents: list[tuple[int, ...]] = []
    for _ in range(chores):
        anchor = rng.randrange(n)
        deg = rng.randint(3, max_degree) if rng.random() < p_high else 2
        new = list(range(n, n + deg - 1))
        n += deg - 1
        agents = [anchor, *new]
        chore_agents.append(tuple(sorted(agents)))
    return n, chore_agents


def random_tree_alloc(rng: random.Random, chores: int, **kw) -> FractionalAllocation:
    n, chore_agents = random_tree(rng, chores, **kw)
    return alloc_from_edges(n, [dict(zip(a, random_shares(rng, len(a)))) for a in chore_agents])
