"""Independent oracles and exhaustive equivalence checking.

The oracles here decide by counting bits directly and never touch the tree
machinery, so they stay independent of the constructions they are used to
check. The formula evaluators re-derive the composed constructions by plain
Boolean logic over per-tree outputs, giving a second route around
conjoin/disjoin/prefix_graft.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, Union

from .trees import Bag, Tree, _check_table_width, input_bits, truth_table


def threshold_oracle(k: int, bits: Sequence[int]) -> int:
    """1 iff at least ``k`` of the bits are 1 (k <= 0 always 1, k > len always 0)."""
    return 1 if sum(bits) >= k else 0


def majority_oracle(bits: Sequence[int]) -> int:
    """1 iff more than half of an odd number of bits are 1."""
    if len(bits) % 2 == 0:
        raise ValueError(f"majority needs an odd number of bits, got {len(bits)}")
    return 1 if sum(bits) >= (len(bits) + 1) // 2 else 0


@dataclass(frozen=True, slots=True)
class Counterexample:
    """First input (in canonical index order) where subject and oracle disagree."""

    input: tuple[int, ...]
    expected: int
    actual: int

    def __post_init__(self) -> None:
        if self.expected == self.actual:
            raise ValueError("counterexample requires expected != actual")


def exhaustive_equiv(
    subject: Union[Tree, Bag],
    oracle: Callable[[tuple[int, ...]], int],
    n_vars: int,
) -> Counterexample | None:
    """Compare ``subject`` against ``oracle`` on every input.

    Returns None when they agree everywhere, otherwise the counterexample
    with the smallest canonical input index.
    """
    _check_table_width(n_vars)
    table = truth_table(subject, n_vars)
    for index in range(1 << n_vars):
        bits = input_bits(index, n_vars)
        expected = 1 if oracle(bits) else 0
        actual = table[index]
        if expected != actual:
            return Counterexample(bits, expected, actual)
    return None


def choose_tree_formula(
    n: int, k: int, position: int, bits: Sequence[int], var_offset: int = 0
) -> int:
    """Value of tree ``position`` of the k-out-of-n bag, by direct counting.

    Mirrors the three-case construction without building any tree: constant
    rows, single-variable row, leftmost-zeros row, and ones-after row.
    """
    window = bits[var_offset : var_offset + n]
    if len(window) != n:
        raise ValueError("input too short for the requested window")
    if not 1 <= position <= n:
        raise ValueError(f"position {position} outside 1..{n}")
    m = (n + 1) // 2
    if not 1 <= k <= n:
        raise ValueError(f"threshold {k} outside 1..{n}")
    if k == m:
        return window[position - 1]
    if k < m:
        limit = m - k
        if position <= limit or window[position - 1]:
            return 1
        zeros_before = (position - 1) - sum(window[: position - 1])
        return 1 if zeros_before <= limit - 1 else 0
    run = k - m
    if position > n - run or not window[position - 1]:
        return 0
    return 1 if sum(window[position:]) >= run else 0


def choose_vote_formula(n: int, k: int, bits: Sequence[int], var_offset: int = 0) -> int:
    """Majority vote over the formula-evaluated k-out-of-n trees."""
    fired = sum(
        choose_tree_formula(n, k, position, bits, var_offset)
        for position in range(1, n + 1)
    )
    return 1 if fired >= (n + 1) // 2 else 0


def reduced_majority_profile_formula(
    n: int, c: int, bits: Sequence[int]
) -> tuple[int, ...]:
    """Per-tree outputs of the (n, c) reduced majority bag, by direct counting."""
    m = (n + 1) // 2
    inner_n = n - 2 * c
    zeros_in_prefix = 2 * c - sum(bits[: 2 * c])
    k = m - 2 * c + zeros_in_prefix
    if k < 1:
        return (1,) * inner_n
    if k > inner_n:
        return (0,) * inner_n
    return tuple(
        choose_tree_formula(inner_n, k, position, bits, var_offset=2 * c)
        for position in range(1, inner_n + 1)
    )


def reduced_majority_vote_formula(n: int, c: int, bits: Sequence[int]) -> int:
    profile = reduced_majority_profile_formula(n, c, bits)
    return 1 if sum(profile) >= (len(profile) + 1) // 2 else 0


def reduced_profile_formula(
    votes: Sequence[int],
    designated: int,
    order_ones: Sequence[int] | None = None,
    order_zeros: Sequence[int] | None = None,
) -> tuple[int, ...]:
    """Outputs of the lossily reduced bag, from the original vote profile.

    ``votes`` is the original per-tree profile. ``order_ones`` and
    ``order_zeros`` list original positions (1-based) in slot order for the
    reordered tail used by the both-ones and both-zeros branches; identity
    order is used when omitted. Pure Boolean logic, no tree composition.
    """
    n = len(votes)
    if n % 2 == 0 or n < 5:
        raise ValueError(f"need an odd profile of length >= 5, got {n}")
    k = designated
    slots = tuple(range(3, n + 1))
    ones_order = tuple(order_ones) if order_ones is not None else slots
    zeros_order = tuple(order_zeros) if order_zeros is not None else slots
    if sorted(ones_order) != list(slots) or sorted(zeros_order) != list(slots):
        raise ValueError("orders must permute positions 3..n")
    first, second = votes[0], votes[1]
    out = []
    if first and second:
        u = [votes[p - 1] for p in ones_order]
        for i in range(1, n - 1):
            if i <= k:
                prior_all_one = all(u[: i - 1])
                value = u[i - 1] or (prior_all_one and not u[i - 1])
            else:
                value = u[i - 1]
            out.append(1 if value else 0)
    elif first != second:
        out = [1 if votes[i + 1] else 0 for i in range(1, n - 1)]
    else:
        v = [votes[p - 1] for p in zeros_order]
        for i in range(1, n - 1):
            if i <= k:
                value = v[i - 1] and any(v[i:k])
            else:
                value = v[i - 1]
            out.append(1 if value else 0)
    return tuple(out)


def reduced_vote_formula(
    votes: Sequence[int],
    designated: int,
    order_ones: Sequence[int] | None = None,
    order_zeros: Sequence[int] | None = None,
) -> int:
    profile = reduced_profile_formula(votes, designated, order_ones, order_zeros)
    return 1 if sum(profile) >= (len(profile) + 1) // 2 else 0
