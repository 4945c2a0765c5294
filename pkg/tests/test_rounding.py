import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import alloc_from_edges, random_shares
from propsub.audit import min_rounding_cost
from propsub.decomposition import type1, type2, type3
from propsub.reduction import ReducedInstance, rounding_cost
from propsub.rounding import (
    _branch_choice,
    forest_bound,
    piece_bound,
    round_forest,
    round_type1,
    round_type2,
    round_type3,
)


def test_type1_larger_share_wins():
    x = alloc_from_edges(2, [{0: F(3, 5), 1: F(2, 5)}])
    r = round_type1(type1(0, 0, 1), x, [F(1)])
    assert r.owner == {0: 0} and r.cost == F(2, 5)


def test_type1_tie_goes_to_lower_agent():
    x = alloc_from_edges(2, [{0: F(1, 2), 1: F(1, 2)}])
    r = round_type1(type1(0, 0, 1), x, [F(3, 4)])
    assert r.owner == {0: 0} and r.cost == F(3, 8)


def test_type1_scaled():
    x = alloc_from_edges(2, [{0: F(1, 10), 1: F(9, 10)}])
    r = round_type1(type1(0, 0, 1), x, [F(1, 2)])
    assert r.owner == {0: 1} and r.cost == F(1, 20)


def test_type2_half_shares():
    half = F(1, 2)
    x = alloc_from_edges(3, [{0: half, 1: half}, {1: half, 2: half}])
    r = round_type2(type2(0, 1, 2, 0, 1), x, [F(1), F(1)])
    assert r.cost == F(1, 2)
    assert r.owner == {0: 0, 1: 1}


def test_type2_worked_path():
    x = alloc_from_edges(3, [{0: F(1, 3), 1: F(2, 3)}, {1: F(2, 3), 2: F(1, 3)}])
    r = round_type2(type2(0, 1, 2, 0, 1), x, [F(1), F(1)])
    assert r.cost == F(2, 3)
    # A = ({}, {c1}, {c2}) is also optimal
    assert rounding_cost(_reduced([F(1), F(1)], 3), x, {0: 1, 1: 2}) == F(2, 3)


def test_type2_integral_is_free():
    x = alloc_from_edges(3, [{0: F(1)}, {2: F(1)}])
    # degree-1 chores never reach rounding in the pipeline, but the cost formula still holds
    r = round_type2(type2(0, 1, 2, 0, 1), x, [F(1), F(1)])
    assert r.cost == 0


def test_type3_symmetric_hub():
    third = F(1, 3)
    x = alloc_from_edges(3, [{0: third, 1: third, 2: third}])
    r = round_type3(type3(0, (0, 1, 2), ()), x, [F(1)])
    assert r.cost == F(2, 3) == piece_bound(r.piece, [F(1)])
    assert r.owner == {0: 0}


def test_type3_largest_share_receives_hub():
    x = alloc_from_edges(3, [{0: F(1, 10), 1: F(1, 10), 2: F(4, 5)}])
    r = round_type3(type3(0, (0, 1, 2), ()), x, [F(1)])
    assert r.owner == {0: 2} and r.cost == F(1, 5)


def test_type3_full_branches():
    rng = random.Random(3)
    for _ in range(50):
        y = random_shares(rng, 3)
        z = [F(rng.randint(1, 9), 10) for _ in range(3)]
        d = [F(rng.randint(1, 10), 10) for _ in range(4)]
        shares = [{0: y[0], 1: y[1], 2: y[2]}] + [{j: z[j], 3 + j: 1 - z[j]} for j in range(3)]
        x = alloc_from_edges(6, shares)
        r = round_type3(type3(0, (0, 1, 2), [(1 + j, j, 3 + j) for j in range(3)]), x, d)
        assert r.cost <= F(3, 2)


def _reduced(common, n):
    from propsub.instance import Instance

    base = Instance(tuple([F(1, n)] * n), tuple(tuple(common) for _ in range(n)))
    return ReducedInstance(base, tuple(common), F(1))


fracs = st.fractions(min_value=-3, max_value=3, max_denominator=20)


@given(fracs, fracs, fracs)
def test_min_max_inequality(a, b, c):
    assert min(c + a, max(c, b)) <= max(c, (a + b + c) / 2)


unit = st.fractions(min_value=0, max_value=1, max_denominator=30)
open_unit = unit.filter(lambda v: 0 < v < 1)
pos_unit = unit.filter(lambda v: v > 0)


@given(open_unit, open_unit, pos_unit, pos_unit, st.booleans())
def test_branch_minimum_meets_closed_forms(y, z, d_hub, d_c, receives_hub):
    # agents: a = 0, b = 1, filler = 2 holds the rest of the hub
    x = alloc_from_edges(3, [{0: y, 2: 1 - y}, {0: z, 1: 1 - z}])
    cost, _ = _branch_choice(1, 0, 1, receives_hub, 0, x, [d_hub, d_c])
    if receives_hub:
        bound = max((1 - y) * d_hub, ((1 - y) * d_hub + d_c) / 2)
        assert cost <= bound <= (1 + (1 - y) * d_hub) / 2
    else:
        bound = max(F(0), (d_c - d_hub * y) / 2)
        assert cost <= bound <= (1 - d_hub * y) / 2


def _type3_case_bound(k, h):
    if h == 0:
        return F(k - 1, k)
    if h <= k - 2:
        return F(h, 2) + F(1, 2)
    if h == k - 1:
        return F(h, 2) + F(1, 4)
    return F(h, 2)


@pytest.mark.parametrize("seed", range(200))
def test_type3_case_analysis_bounds(seed):
    rng = random.Random(seed)
    k = rng.randint(3, 5)
    h = rng.randint(0, k)
    piece, x, d = random_type3(rng, k, h)
    r = round_type3(piece, x, d)
    assert r.cost <= _type3_case_bound(k, h) <= piece_bound(piece, d)


def random_type3(rng, k, h):
    y = random_shares(rng, k)
    spokes = list(range(k))
    shares = [dict(zip(spokes, y))]
    branches = []
    for j in range(h):
        z = F(rng.randint(1, 29), 30)
        shares.append({j: z, k + j: 1 - z})
        branches.append((1 + j, j, k + j))
    d = [F(rng.randint(1, 20), 20) for _ in range(1 + h)]
    return type3(0, spokes, branches), alloc_from_edges(k + h, shares), d


def random_type2(rng):
    s1, s2 = F(rng.randint(1, 29), 30), F(rng.randint(1, 29), 30)
    x = alloc_from_edges(3, [{0: s1, 1: 1 - s1}, {1: s2, 2: 1 - s2}])
    d = [F(rng.randint(1, 20), 20) for _ in range(2)]
    return type2(0, 1, 2, 0, 1), x, d


@pytest.mark.parametrize("seed", range(100))
def test_pieces_are_optimal_and_bounded(seed):
    rng = random.Random(10_000 + seed)
    k = rng.randint(3, 5)
    for piece, x, d in (random_type2(rng), random_type3(rng, k, rng.randint(0, min(k, 8 - k)))):
        r = (round_type2 if piece.kind.value == "type2" else round_type3)(piece, x, d)
        assert r.cost == min_rounding_cost(d, x, piece.chores)
        assert r.cost == rounding_cost(_reduced(d, x.n), x, r.owner, piece.chores)
        assert r.cost <= piece_bound(piece, d)


def test_round_forest_worked(worked_x):
    from propsub.equilibrium import FractionalAllocation

    x = FractionalAllocation(tuple(tuple(r) for r in worked_x))
    piece = type2(0, 1, 2, 0, 1)
    A, results = round_forest([piece], x, [F(1), F(1), F(1, 2)], {2: 2})
    assert sum(r.cost for r in results) == F(2, 3) <= forest_bound(3)
    assert A.owner[2] == 2
    assert rounding_cost(_reduced([F(1), F(1), F(1, 2)], 3), x, A) == F(2, 3)


def test_round_forest_only_preassigned():
    x = alloc_from_edges(2, [{0: F(1)}, {1: F(1)}])
    A, results = round_forest([], x, [F(1), F(1)], {0: 0, 1: 1})
    assert A.owner == (0, 1) and results == []


def test_round_forest_two_type1_trees():
    half = F(1, 2)
    x = alloc_from_edges(4, [{0: half, 1: half}, {2: half, 3: half}])
    pieces = [type1(0, 0, 1), type1(1, 2, 3)]
    A, results = round_forest(pieces, x, [F(1), F(1)], {}, jobs=2)
    total = sum(r.cost for r in results)
    assert total == 1 <= forest_bound(4) == F(7, 6)
    assert A.owner == (0, 2)


def test_round_forest_rejects_gaps():
    x = alloc_from_edges(2, [{0: F(1, 2), 1: F(1, 2)}])
    with pytest.raises(ValueError):
        round_forest([], x, [F(1)], {})
