import random
from fractions import Fraction as F
from itertools import product

import pytest

from propsub.audit import (
    BudgetExceeded,
    IncompleteAllocation,
    brute_force_opt_subsidy,
    certify_fpo,
    pareto_check_integral,
    prop_check,
    subsidy,
)
from propsub.equilibrium import Equilibrium, FractionalAllocation, solve_equilibrium
from propsub.generate import generate
from propsub.instance import Instance, IntegralAllocation
from propsub.pipeline import solve


def identical(n, m):
    return Instance(tuple([F(1, n)] * n), tuple(tuple([F(1)] * m) for _ in range(n)))


EXAMPLE_PO = Instance((F(1, 2), F(1, 2)), ((F(1), F(1), F(100), F(100)), (F(100), F(100), F(1), F(1))))


def naive_opt(inst):
    """Fraction-only enumeration, independent of the integer-scaled oracle."""
    best = None
    for owner in product(range(inst.n), repeat=inst.m):
        total = sum(
            (max(F(0), inst.bundle(i, [c for c in range(inst.m) if owner[c] == i]) - inst.prop_share(i)) for i in range(inst.n)),
            F(0),
        )
        best = total if best is None else min(best, total)
    return best


def test_worked_subsidy(worked_instance):
    rep = subsidy(worked_instance, IntegralAllocation.from_bundles([[], [0], [1, 2]]))
    assert rep.total == F(1, 3)
    assert rep.per_agent_subsidy == (F(0), F(0), F(1, 3))
    assert rep.bound == F(5, 6) and rep.bound_satisfied


def test_lower_bound_instance_subsidy():
    rep = subsidy(identical(4, 2), IntegralAllocation((0, 1), n=4))
    assert rep.total == 1 == F(2 * (4 - 2), 4)


def test_prop_integral_allocation_has_no_subsidy():
    rep = subsidy(EXAMPLE_PO, IntegralAllocation((0, 1, 0, 1), n=2))
    assert rep.total == 0


def test_incomplete_allocation():
    with pytest.raises(IncompleteAllocation):
        subsidy(identical(2, 3), IntegralAllocation((0, 1), n=2))


def test_brute_force_five_identical_chores():
    val, A = brute_force_opt_subsidy(identical(2, 5))
    assert val == F(1, 2)
    assert sorted(len(b) for b in A.bundles()) == [2, 3]


def test_brute_force_four_agents_two_chores():
    assert brute_force_opt_subsidy(identical(4, 2))[0] == 1


def test_brute_force_single_agent():
    inst = Instance((F(1),), ((F(1, 3), F(1)),))
    assert brute_force_opt_subsidy(inst)[0] == 0


def test_brute_force_budget():
    with pytest.raises(BudgetExceeded):
        brute_force_opt_subsidy(identical(3, 5), budget=100)


@pytest.mark.parametrize("seed", range(15))
def test_brute_force_matches_naive(seed):
    rng = random.Random(seed)
    inst = generate("uniform-rational", rng.randint(1, 3), rng.randint(0, 4), seed)
    assert brute_force_opt_subsidy(inst)[0] == naive_opt(inst)


def test_brute_force_parallel_chunks_agree():
    inst = generate("uniform-rational", 3, 5, 11)
    assert brute_force_opt_subsidy(inst, jobs=2) == brute_force_opt_subsidy(inst)


def test_pareto_example():
    assert not pareto_check_integral(EXAMPLE_PO, IntegralAllocation((0, 1, 0, 1), n=2))
    assert pareto_check_integral(EXAMPLE_PO, IntegralAllocation((0, 0, 1, 1), n=2))


def test_pareto_single_agent():
    inst = Instance((F(1),), ((F(1), F(1, 2)),))
    assert pareto_check_integral(inst, IntegralAllocation((0, 0), n=1))


def test_certify_fpo_on_rounding(worked_instance):
    sol = solve(worked_instance)
    assert certify_fpo(sol.equilibrium, sol.rounding)


def test_certify_fpo_rejects_off_edge_chore(worked_instance):
    eq = solve_equilibrium(worked_instance)
    off = next(
        (c, i) for c in range(worked_instance.m) for i in range(worked_instance.n)
        if worked_instance.disutilities[i][c] > eq.mpb[i] * eq.payments[c]
    )
    owner = [next(i for i in range(worked_instance.n) if eq.alloc.x[i][c] > 0) for c in range(worked_instance.m)]
    owner[off[0]] = off[1]
    assert not certify_fpo(eq, IntegralAllocation(tuple(owner), n=3))


def test_certify_fpo_integral_equilibrium():
    inst = Instance((F(1, 2), F(1, 2)), ((F(1), F(1)), (F(1), F(1))))
    x = FractionalAllocation.build([[F(1), F(0)], [F(0), F(1)]], inst)
    eq = Equilibrium(inst, x, (F(1), F(1)), (F(1), F(1)), (F(0), F(0)))
    assert certify_fpo(eq, IntegralAllocation((0, 1), n=2))


def test_prop_check_cases(worked_instance, worked_x):
    x = FractionalAllocation.build(worked_x, worked_instance)
    assert x.bundle_disutility == (F(1, 6), F(4, 3), F(5, 9))
    assert tuple(worked_instance.prop_share(i) for i in range(3)) == (F(4, 15), F(8, 5), F(2, 3))
    assert prop_check(worked_instance, x)
    hog = FractionalAllocation.build([[F(1)] * 3, [F(0)] * 3, [F(0)] * 3], worked_instance)
    assert not prop_check(worked_instance, hog)
    uniform = FractionalAllocation.build([[w] * 3 for w in worked_instance.weights], worked_instance)
    assert prop_check(worked_instance, uniform)
    assert all(uniform.bundle_disutility[i] == worked_instance.prop_share(i) for i in range(3))


@pytest.mark.parametrize("n", range(1, 7))
def test_lower_bound_family(n):
    for m in range(n):
        assert brute_force_opt_subsidy(identical(n, m))[0] == F(m * (n - m), n)


@pytest.mark.parametrize("seed", range(30))
def test_end_to_end_chain(seed):
    rng = random.Random(77 + seed)
    n, m = rng.randint(1, 6), rng.randint(0, 7)
    if n**m > 50_000:
        m = 4
    sol = solve(generate("uniform-rational", n, m, seed))
    rep = sol.report
    assert rep.total <= sol.rcost_original <= sol.rcost_reduced <= sol.piece_cost_total <= rep.bound
    assert rep.fpo_certified
    assert pareto_check_integral(sol.normalized_full, sol.allocation)
    assert rep.total >= brute_force_opt_subsidy(sol.normalized_full)[0]


def test_zero_chores_flow_through():
    inst = Instance((F(1, 2), F(1, 2)), ((F(0), F(3), F(1)), (F(2), F(0), F(2))))
    sol = solve(inst)
    assert sol.allocation.owner[:2] == (0, 1)
    assert sol.processed.m == 1 and sol.processed.scale == 2
    assert sol.report.total <= sol.report.bound
    only_zero = solve(Instance((F(1, 2), F(1, 2)), ((F(0),), (F(1),))))
    assert only_zero.allocation.owner == (0,) and only_zero.report.total == 0
