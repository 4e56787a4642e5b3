from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bincover.approx import (ContractError, FractionalAssignment, Part, Stage,
                             StageKind, alg_star, fractional_violations, gbc5,
                             gbc5_detailed, maximality_violations, maximalize,
                             merge_splits, modified_profit, shift_round,
                             shift_round_detailed)
from bincover.core import Assignment, Instance, Supply, UsageError, profit
from bincover.exact import exact_opt_unit
from bincover.generators import gen_example1
from bincover.lp import build_lp1, certificate_violations, lp_solve

TWO_BIN = Instance.generalized([(10, 5), (4, 4)], [3, 3])


def test_alg_star_two_bin_example():
    f = alg_star(TWO_BIN)
    assert f.parts == (Part(0, 0, F(3)), Part(1, 0, F(2)), Part(1, 1, F(1)))
    assert modified_profit(TWO_BIN, f) == 11
    assert lp_solve(build_lp1(TWO_BIN).problem).objective == 11


def test_alg_star_without_admissible_items():
    inst = Instance.generalized([(1, 1), (3, 2)], [3, 5])
    f = alg_star(inst)
    assert f.parts == () and modified_profit(inst, f) == 0


def test_alg_star_strict_admissibility():
    inst = Instance.generalized([(1, 1)], [2])
    assert modified_profit(inst, alg_star(inst)) == 0


def test_alg_star_needs_unit_supply():
    with pytest.raises(UsageError):
        alg_star(Instance.variable([1], [1], Supply.INFINITE))


def test_modified_profit_caps_at_full_profit():
    inst = Instance.generalized([(1, 1)], [1, 1])
    f = FractionalAssignment((Part(0, 0, F(1)), Part(1, 0, F(1))))
    assert modified_profit(inst, f) == 1
    assert modified_profit(inst, FractionalAssignment()) == 0


def test_modified_profit_rejects_invalid_mass():
    inst = Instance.generalized([(1, 1), (1, 3)], [2])
    with pytest.raises(ContractError):
        modified_profit(inst, FractionalAssignment((Part(0, 0, F(1)),)))
    with pytest.raises(ContractError):
        modified_profit(inst, FractionalAssignment((Part(0, 1, F(3)),)))
    assert fractional_violations(inst, FractionalAssignment((Part(0, 1, F(2)),))) == []


def test_merge_without_splits_is_identity():
    inst = Instance.generalized([(1, 2), (1, 2)], [1, 1, 1])
    f = FractionalAssignment((Part(0, 0, F(1)), Part(1, 0, F(1)), Part(2, 1, F(1))))
    merged = merge_splits(inst, f)
    assert merged.kind is StageKind.MERGED
    assert merged.assignment == Assignment({0: (0, 1), 1: (2,)})


def test_merge_two_bin_example():
    merged = merge_splits(TWO_BIN, alg_star(TWO_BIN))
    assert merged.assignment == Assignment({0: (0, 1)})
    assert merged.loads(TWO_BIN)[0] == 6 < 2 * 5


def test_merge_rejects_split_that_did_not_fill():
    inst = Instance.generalized([(1, 4), (1, 4)], [3])
    f = FractionalAssignment((Part(0, 0, F(1)), Part(0, 1, F(2))))
    with pytest.raises(ContractError):
        merge_splits(inst, f)


def test_merge_rejects_two_first_parts_on_one_bin():
    inst = Instance.generalized([(1, 2), (1, 4)], [2, 2])
    # both items start on bin 0 with partial parts
    f = FractionalAssignment((Part(0, 0, F(1)), Part(1, 0, F(1)),
                              Part(0, 1, F(1)), Part(1, 1, F(1))))
    with pytest.raises(ContractError):
        merge_splits(inst, f)


def test_merged_first_parts_are_admissible():
    # the first part sits on a bin the item fits, so merging never breaks admissibility
    inst = Instance.generalized([(9, 2), (1, 5)], [F(3, 2), F(3, 2), 4])
    merged = merge_splits(inst, alg_star(inst))
    for i, items in merged.assignment.sets.items():
        assert all(inst.items[j] <= inst.bins[i].demand for j in items)


def stage(sets, kind=StageKind.MERGED):
    return Stage(kind, Assignment(sets))


def test_maximalize_identity_cases():
    inst = Instance.generalized([(1, 1), (1, 1)], [1, F(1, 2)])
    covered = stage({0: (0,)})
    assert maximalize(inst, covered).assignment == covered.assignment
    one_partial = stage({0: (0,), 1: (1,)})
    assert maximalize(inst, one_partial).assignment == one_partial.assignment


def test_maximalize_pulls_items_upward():
    inst = Instance.generalized([(4, 4), (1, 2)], [3, 1])
    out = maximalize(inst, stage({0: (0,), 1: (1,)}))
    assert out.kind is StageKind.MAXIMAL
    assert out.assignment == Assignment({0: (0, 1)})
    assert maximality_violations(inst, out) == []


def test_maximality_violation_is_detected():
    inst = Instance.generalized([(4, 4), (1, 2)], [3, 1])
    assert maximality_violations(inst, stage({0: (0,), 1: (1,)})) == [(0, 1, 1)]


def test_shift_round_identity_when_all_covered():
    inst = Instance.generalized([(2, 1), (1, 1)], [1, 1])
    s = stage({0: (0,), 1: (1,)}, StageKind.MAXIMAL)
    assert shift_round(inst, s) == s.assignment


def test_shift_round_single_partial_bin():
    inst = Instance.generalized([(5, 1), (1, 2)], [1, 1, F(1, 2)])
    s = stage({0: (0,), 1: (2,)}, StageKind.MAXIMAL)
    r = shift_round_detailed(inst, s)
    # all items on bin 1 covers it (5/2 >= 2) but loses bin 0; keeping bin 0 wins
    assert r.candidates["all_on_last"] == 1
    assert r.candidates["shift"] == 5
    assert r.assignment == Assignment({0: (0,)})


def test_shift_round_three_partial_bins():
    inst = Instance.generalized([(3, 1), (4, 2), (4, 4)], [F(1, 2), F(3, 2), 3])
    s = stage({0: (0,), 1: (1,), 2: (2,)}, StageKind.MAXIMAL)
    assert maximality_violations(inst, s) == []
    r = shift_round_detailed(inst, s)
    assert r.assignment == Assignment({0: (1,), 1: (2,)})
    assert r.candidates == {"shift": 7, "all_on_last": 4, "pool_partial": 4}
    assert profit(inst, r.assignment) == 7


def test_gbc5_matching_branch():
    inst = Instance.generalized([(10, 1)], [2])
    a, value = gbc5(inst)
    assert value == 10 and gbc5_detailed(inst).branch == "matching"


def test_gbc5_fractional_branch():
    inst = Instance.generalized([(10, 5)], [3, 3])
    r = gbc5_detailed(inst)
    assert (r.profit, r.branch, r.matching_profit) == (10, "fractional", 0)
    assert exact_opt_unit(inst)[0] == 10


def test_gbc5_example1():
    inst = gen_example1(F(1, 10))
    a, value = gbc5(inst)
    assert profit(inst, a) == value
    assert 5 * value >= F(42, 5)


def test_gbc5_ignores_bins_nothing_can_cover():
    # without dropping the demand-10 bin the greedy would spend the item on it
    inst = Instance.generalized([(10, 10), (1, 3)], [3])
    r = gbc5_detailed(inst)
    assert r.active_bins == (1,)
    assert r.profit == 1 and r.chain_holds()


quarter = st.integers(1, 8).map(lambda k: F(k, 4))


@st.composite
def generalized(draw, max_m=5, max_n=7):
    demands = draw(st.lists(quarter, min_size=1, max_size=max_m))
    profits = draw(st.lists(st.integers(0, 8).map(lambda k: F(k, 2)),
                            min_size=len(demands), max_size=len(demands)))
    items = draw(st.lists(quarter, max_size=max_n))
    return Instance.generalized(zip(profits, demands), items)


@given(generalized())
@settings(max_examples=300, deadline=None)
def test_alg_star_equals_lp_optimum(inst):
    f = alg_star(inst)
    assert fractional_violations(inst, f) == []
    lp = build_lp1(inst)
    sol = lp_solve(lp.problem)
    assert certificate_violations(lp.problem, sol) == []
    assert modified_profit(inst, f) == sol.objective


@given(generalized())
@settings(max_examples=300)
def test_alg_star_splits_only_when_filling(inst):
    f = alg_star(inst)
    load = {}
    first_partial_on = {}
    seen = set()
    for k, p in enumerate(f.parts):
        assert p.amount > 0
        assert inst.items[p.item] <= inst.bins[p.bin].demand
        load[p.bin] = load.get(p.bin, F(0)) + p.amount
        assert load[p.bin] <= inst.bins[p.bin].demand
        if p.item not in seen and p.amount < inst.items[p.item]:
            # a partial first part completes its bin, and only one per bin
            assert load[p.bin] == inst.bins[p.bin].demand
            assert p.bin not in first_partial_on
            first_partial_on[p.bin] = p.item
        seen.add(p.item)


@given(generalized())
@settings(max_examples=300, deadline=None)
def test_chain_and_guarantee(inst):
    r = gbc5_detailed(inst, check=False)
    assert r.raw_value <= 2 * r.maximal_value
    assert r.maximal_value <= 2 * r.fractional_profit
    for i, load in r.merged.loads(inst).items():
        assert load < 2 * inst.bins[i].demand
    for i, load in r.maximal.loads(inst).items():
        assert load < 2 * inst.bins[i].demand
    assert maximality_violations(inst, r.maximal) == []
    for i, items in r.assignment.sets.items():
        assert sum((inst.items[j] for j in items), F(0)) >= inst.bins[i].demand
    assert profit(inst, r.assignment) == r.profit
    assert exact_opt_unit(inst)[0] <= 5 * r.profit
