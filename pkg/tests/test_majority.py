import pytest

from forestsmith.kofn import ChooseSpec, build_choose_bag
from forestsmith.majority import build_reduced_majority, inner_threshold
from forestsmith.trees import input_bits, tree_size, truth_table
from forestsmith.verify import (
    exhaustive_equiv,
    majority_oracle,
    reduced_majority_vote_formula,
)

# The three reduced trees for majority on 5 variables with one pair removed,
# written out literally as Boolean formulas.


def reduced5_tree1(b):
    x1, x2, x3, x4, x5 = b
    return (
        (x1 and x2)
        or (x1 and not x2 and x3)
        or (not x1 and x2 and x3)
        or (not x1 and not x2 and ((x3 and x4) or (x3 and not x4 and x5)))
    )


def reduced5_tree2(b):
    x1, x2, x3, x4, x5 = b
    return (
        (x1 and x2 and (x4 or (x3 and not x4)))
        or (x1 and not x2 and x4)
        or (not x1 and x2 and x4)
        or (not x1 and not x2 and (x4 and x5))
    )


def reduced5_tree3(b):
    x1, x2, x3, x4, x5 = b
    return (
        (x1 and x2 and (x5 or (x3 and x4 and not x5)))
        or (x1 and not x2 and x5)
        or (not x1 and x2 and x5)
    )


def test_inner_threshold_arithmetic():
    assert inner_threshold(3, 1, 1) == 2
    assert inner_threshold(3, 1, 0) == 1
    assert inner_threshold(3, 1, 2) == 3
    with pytest.raises(ValueError):
        inner_threshold(3, 1, 3)


def test_n5_c1_matches_displayed_formulas():
    bag = build_reduced_majority(5, 1)
    assert len(bag) == 3
    formulas = (reduced5_tree1, reduced5_tree2, reduced5_tree3)
    for tree, formula in zip(bag.trees, formulas):
        table = truth_table(tree, 5)
        for i in range(32):
            assert table[i] == int(bool(formula(input_bits(i, 5)))), (formula, i)


@pytest.mark.parametrize(
    "n,c",
    [(5, 1), (7, 1), (7, 2), (9, 1), (9, 2), (9, 3), (11, 2), (11, 4), (13, 5)],
)
def test_vote_equals_majority(n, c):
    bag = build_reduced_majority(n, c)
    assert len(bag) == n - 2 * c
    assert len(bag) % 2 == 1
    assert exhaustive_equiv(bag, majority_oracle, n) is None


@pytest.mark.parametrize("n,c", [(7, 2), (9, 2), (11, 3)])
def test_formula_route_agrees_with_trees(n, c):
    bag = build_reduced_majority(n, c)
    table = truth_table(bag)
    for i in range(1 << n):
        assert table[i] == reduced_majority_vote_formula(n, c, input_bits(i, n))


def test_degenerate_c0_is_single_variable_bag():
    bag = build_reduced_majority(7, 0)
    reference = build_choose_bag(ChooseSpec(7, 4))
    assert len(bag) == 7
    for mine, ref in zip(bag.trees, reference.trees):
        assert truth_table(mine, 7) == truth_table(ref, 7)


def test_size_within_graft_budget():
    for n, c in ((7, 1), (9, 2), (11, 2)):
        m = (n + 1) // 2
        inner_n = n - 2 * c
        inner_max = 1
        for s in range(2 * c + 1):
            k = inner_threshold(m, c, s)
            if 1 <= k <= inner_n:
                inner = build_choose_bag(ChooseSpec(inner_n, k, var_offset=2 * c), n_vars=n)
                inner_max = max(inner_max, max(tree_size(t) for t in inner.trees))
        bag = build_reduced_majority(n, c)
        budget = (4**c - 1) + 4**c * inner_max
        assert max(tree_size(t) for t in bag.trees) <= budget


def test_invalid_parameters():
    with pytest.raises(ValueError, match="odd"):
        build_reduced_majority(6, 1)
    with pytest.raises(ValueError, match="keeps >= 3 trees"):
        build_reduced_majority(5, 2)
    with pytest.raises(ValueError, match="keeps >= 3 trees"):
        build_reduced_majority(9, -1)
