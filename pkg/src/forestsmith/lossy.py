"""Lossy tree-count reduction with exact, distribution-weighted error accounting.

A bag of 2m-1 trees is rebuilt on 2m-3 trees: the first two trees become a
branch condition, and a small designated subset of the remaining trees is
composed so the vote count survives the loss of two slots except on two
narrow profile strata. All weights are non-negative integers and all error
figures exact rationals, so every bound is an exact comparison, never a
tolerance check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Mapping, Sequence

from .trees import (
    LEAF0,
    Bag,
    Tree,
    _check_table_width,
    _tree_table_bits,
    _vote_table_bits,
    conjoin,
    disjoin,
    negate,
    tree_size,
)


@dataclass(frozen=True)
class Distribution:
    """Non-negative integer weights over all 2^n_vars inputs.

    ``weights`` is None for the uniform shortcut (weight 1 per input).
    Probabilities are weight / total; keeping everything integral makes the
    error bounds exact inequalities.
    """

    n_vars: int
    weights: tuple[int, ...] | None = None
    total: int = field(init=False)

    def __post_init__(self) -> None:
        if not isinstance(self.n_vars, int) or self.n_vars < 1:
            raise ValueError(f"n_vars must be a positive integer, got {self.n_vars!r}")
        if self.weights is None:
            object.__setattr__(self, "total", 1 << self.n_vars)
            return
        weights = tuple(self.weights)
        object.__setattr__(self, "weights", weights)
        if len(weights) != 1 << self.n_vars:
            raise ValueError(
                f"need {1 << self.n_vars} weights for {self.n_vars} variables, "
                f"got {len(weights)}"
            )
        for idx, w in enumerate(weights):
            if not isinstance(w, int) or isinstance(w, bool) or w < 0:
                raise ValueError(f"weights[{idx}] must be a non-negative integer, got {w!r}")
        total = sum(weights)
        if total == 0:
            raise ValueError("distribution total must be positive")
        object.__setattr__(self, "total", total)

    @classmethod
    def uniform(cls, n_vars: int) -> "Distribution":
        return cls(n_vars)

    @classmethod
    def from_weights(cls, n_vars: int, weights: Sequence[int]) -> "Distribution":
        return cls(n_vars, tuple(weights))

    def weight(self, index: int) -> int:
        if self.weights is None:
            return 1
        return self.weights[index]

    def weights_vector(self) -> tuple[int, ...]:
        if self.weights is None:
            return (1,) * (1 << self.n_vars)
        return self.weights

    def zero_out(self, indices) -> "Distribution":
        """Copy with the given input indices forced to weight 0."""
        weights = list(self.weights_vector())
        for idx in indices:
            weights[idx] = 0
        return Distribution.from_weights(self.n_vars, weights)


@dataclass(frozen=True)
class WeightProfile:
    """Total input weight carried by each vote profile of a bag."""

    n_trees: int
    weights: Mapping[tuple[int, ...], int]
    total: int = field(init=False)

    def __post_init__(self) -> None:
        clean: dict[tuple[int, ...], int] = {}
        for profile, w in self.weights.items():
            profile = tuple(profile)
            if len(profile) != self.n_trees or any(b not in (0, 1) for b in profile):
                raise ValueError(f"bad vote profile {profile!r}")
            if not isinstance(w, int) or isinstance(w, bool) or w < 0:
                raise ValueError(f"weight of {profile!r} must be a non-negative integer")
            if w:
                clean[profile] = w
        object.__setattr__(self, "weights", clean)
        object.__setattr__(self, "total", sum(clean.values()))

    def case_weight(self, first: int, second: int) -> int:
        """Aggregate weight of profiles whose first two coordinates match."""
        return sum(
            w for b, w in self.weights.items() if b[0] == first and b[1] == second
        )

    def stratum_weight(
        self,
        positions: Sequence[int],
        pattern_bit: int,
        count: int,
        first_two: tuple[int, int] | None = None,
    ) -> int:
        """Weight of profiles with exactly ``count`` pattern bits among ``positions``."""
        out = 0
        for b, w in self.weights.items():
            if first_two is not None and (b[0], b[1]) != first_two:
                continue
            if sum(1 for p in positions if b[p - 1] == pattern_bit) == count:
                out += w
        return out


@dataclass(frozen=True, slots=True)
class SubsetSelection:
    """A designated position subset together with its conditioned weights."""

    positions: tuple[int, ...]
    weight: int
    stratum_weight: int
    pool_size: int
    subset_size: int
    stratum_count: int

    def averaging_bound(self) -> Fraction:
        """The existence bound the argmin subset must meet: C(L,K)/C(H,K) * W^L."""
        return Fraction(
            comb(self.stratum_count, self.subset_size) * self.stratum_weight,
            comb(self.pool_size, self.subset_size),
        )

    def satisfies_bound(self) -> bool:
        return self.weight <= self.averaging_bound()


def weight_profile(bag: Bag, dist: Distribution) -> WeightProfile:
    """Exhaustive vote-profile weights of ``bag`` under ``dist``."""
    if dist.n_vars != bag.n_vars:
        raise ValueError(
            f"distribution over {dist.n_vars} variables, bag over {bag.n_vars}"
        )
    _check_table_width(bag.n_vars)
    tables = [_tree_table_bits(t, bag.n_vars) for t in bag.trees]
    acc: dict[tuple[int, ...], int] = {}
    for index in range(1 << bag.n_vars):
        w = dist.weight(index)
        if w == 0:
            continue
        profile = tuple((t >> index) & 1 for t in tables)
        acc[profile] = acc.get(profile, 0) + w
    result = WeightProfile(len(bag.trees), acc)
    assert result.total == dist.total
    return result


def select_designated_subset(
    profile: WeightProfile,
    positions: Sequence[int],
    subset_size: int,
    stratum_count: int,
    pattern_bit: int = 1,
    first_two: tuple[int, int] | None = None,
) -> SubsetSelection:
    """Argmin choice of the designated positions.

    Among profiles (optionally restricted by their first two coordinates)
    carrying exactly ``stratum_count`` pattern bits over ``positions``, find
    the subset of ``subset_size`` positions minimizing the weight of profiles
    that show the pattern bit on the whole subset. Ties break lexicographically
    on the sorted position list, and the minimum always satisfies the
    averaging bound C(L,K)/C(H,K) * W^L.
    """
    pool = tuple(sorted(positions))
    if len(set(pool)) != len(pool):
        raise ValueError("positions must be distinct")
    if pattern_bit not in (0, 1):
        raise ValueError(f"pattern bit must be 0 or 1, got {pattern_bit}")
    if subset_size < 1:
        raise ValueError(f"subset size must be >= 1, got {subset_size}")
    if subset_size > stratum_count:
        raise ValueError(
            f"subset size {subset_size} exceeds stratum count {stratum_count}"
        )
    if stratum_count > len(pool):
        raise ValueError(
            f"stratum count {stratum_count} exceeds pool size {len(pool)}"
        )
    relevant: list[tuple[tuple[int, ...], int]] = []
    stratum_total = 0
    for b, w in profile.weights.items():
        if first_two is not None and (b[0], b[1]) != first_two:
            continue
        if sum(1 for p in pool if b[p - 1] == pattern_bit) != stratum_count:
            continue
        relevant.append((b, w))
        stratum_total += w
    best: tuple[int, ...] | None = None
    best_weight = 0
    for subset in combinations(pool, subset_size):
        subset_weight = sum(
            w for b, w in relevant if all(b[p - 1] == pattern_bit for p in subset)
        )
        if best is None or subset_weight < best_weight:
            best, best_weight = subset, subset_weight
    assert best is not None
    selection = SubsetSelection(
        best, best_weight, stratum_total, len(pool), subset_size, stratum_count
    )
    assert selection.satisfies_bound()
    return selection


@dataclass(frozen=True)
class ReductionReport:
    """Exact accounting for one two-tree reduction step."""

    trees_before: int
    trees_after: int
    designated_count: int
    designated_ones: tuple[int, ...]
    designated_zeros: tuple[int, ...]
    case_weight_ones: int
    case_weight_zeros: int
    stratum_weight_ones: int
    stratum_weight_zeros: int
    selected_weight_ones: int
    selected_weight_zeros: int
    total_weight: int
    measured_error: Fraction
    error_bound: Fraction
    refined_bound: Fraction
    max_size_before: int
    max_size_after: int
    size_bound_exponent: int
    size_bound_ratio: Fraction

    def __post_init__(self) -> None:
        if not 0 <= self.measured_error <= 1:
            raise ValueError("measured error outside [0, 1]")
        if self.measured_error > self.error_bound:
            raise ValueError("measured error exceeds its bound")


@dataclass(frozen=True)
class IteratedReductionReport:
    """Accounting for a chain of reduction steps with reweighting."""

    steps: tuple[ReductionReport, ...]
    trees_before: int
    trees_after: int
    designated_count: int
    total_weight: int
    measured_error: Fraction
    error_bound: Fraction
    max_size_before: int
    max_size_after: int

    def __post_init__(self) -> None:
        if self.measured_error > self.error_bound:
            raise ValueError("cumulative error exceeds its bound")


def _ordering(selected: Sequence[int], pool: Sequence[int]) -> tuple[int, ...]:
    rest = [p for p in pool if p not in selected]
    return tuple(selected) + tuple(rest)


def _conjoin_chain(parts: Sequence[Tree], final: Tree) -> Tree:
    out = final
    for part in reversed(parts):
        out = conjoin(part, out)
    return out


def _disjoin_chain(parts: Sequence[Tree], final: Tree) -> Tree:
    out = final
    for part in reversed(parts):
        out = disjoin(part, out)
    return out


def _both_ones_component(slot_trees: Sequence[Tree], i: int, designated: int) -> Tree:
    # slot_trees[0] holds slot 3. Designated slots get "slot fires, or every
    # earlier designated slot fires and this one is the first miss"; later
    # slots pass through.
    if i > designated:
        return slot_trees[i - 1]
    first_miss = _conjoin_chain(slot_trees[: i - 1], negate(slot_trees[i - 1]))
    return disjoin(slot_trees[i - 1], first_miss)


def _both_zeros_component(slot_trees: Sequence[Tree], i: int, designated: int) -> Tree:
    # Designated slots get "slot fires and some later designated slot fires";
    # later slots pass through.
    if i > designated:
        return slot_trees[i - 1]
    successors = _disjoin_chain(slot_trees[i:designated], LEAF0)
    return conjoin(slot_trees[i - 1], successors)


def reduce_once(
    bag: Bag,
    dist: Distribution,
    designated: int,
    identity_permutations: bool = False,
) -> tuple[Bag, ReductionReport]:
    """Rebuild a bag of 2m-1 trees on 2m-3 trees, with exact error accounting.

    ``designated`` is the number of tail positions composed specially in the
    both-ones and both-zeros branches; the designated subsets are chosen
    independently per branch to minimize the weight of the only two profile
    strata that can disagree with the original vote. The measured error is
    at most 1/2^designated, exactly. ``identity_permutations`` skips the
    subset search and designates positions 3..designated+2 in both branches
    (a test hook; the bound still holds for the refined, per-subset figures).
    """
    n = len(bag.trees)
    if n < 5:
        raise ValueError(f"need at least 5 trees to drop two, got {n}")
    m = (n + 1) // 2
    if not 1 <= designated <= m - 2:
        raise ValueError(
            f"designated count must be in 1..{m - 2} for {n} trees, got {designated}"
        )
    profile = weight_profile(bag, dist)
    pool = tuple(range(3, n + 1))
    stratum = m - 2
    if identity_permutations:
        forced = pool[:designated]
        sel_ones = SubsetSelection(
            forced,
            _subset_weight(profile, pool, forced, stratum, 1, (1, 1)),
            profile.stratum_weight(pool, 1, stratum, (1, 1)),
            len(pool),
            designated,
            stratum,
        )
        sel_zeros = SubsetSelection(
            forced,
            _subset_weight(profile, pool, forced, stratum, 0, (0, 0)),
            profile.stratum_weight(pool, 0, stratum, (0, 0)),
            len(pool),
            designated,
            stratum,
        )
    else:
        sel_ones = select_designated_subset(profile, pool, designated, stratum, 1, (1, 1))
        sel_zeros = select_designated_subset(profile, pool, designated, stratum, 0, (0, 0))
    order_ones = _ordering(sel_ones.positions, pool)
    order_zeros = _ordering(sel_zeros.positions, pool)

    t = bag.trees
    head, second = t[0], t[1]
    not_head, not_second = negate(head), negate(second)
    ones_slots = [t[p - 1] for p in order_ones]
    zeros_slots = [t[p - 1] for p in order_zeros]
    reduced_trees = []
    for i in range(1, n - 1):
        ones_part = _both_ones_component(ones_slots, i, designated)
        zeros_part = _both_zeros_component(zeros_slots, i, designated)
        passthrough = t[i + 1]
        term_ones = conjoin(head, conjoin(second, ones_part))
        term_hi_lo = conjoin(head, conjoin(not_second, passthrough))
        term_lo_hi = conjoin(not_head, conjoin(second, passthrough))
        term_zeros = conjoin(not_head, conjoin(not_second, zeros_part))
        reduced_trees.append(
            disjoin(disjoin(disjoin(term_ones, term_hi_lo), term_lo_hi), term_zeros)
        )
    reduced = Bag(tuple(reduced_trees), bag.n_vars)

    measured = measure_error(reduced, bag, dist)
    case_ones = profile.case_weight(1, 1)
    case_zeros = profile.case_weight(0, 0)
    refined = Fraction(
        comb(stratum, designated) * (case_ones + case_zeros),
        comb(len(pool), designated) * dist.total,
    )
    bound = Fraction(1, 2**designated)
    size_before = max(tree_size(tree) for tree in t)
    size_after = max(tree_size(tree) for tree in reduced_trees)
    exponent = 2 * designated + 11
    report = ReductionReport(
        trees_before=n,
        trees_after=n - 2,
        designated_count=designated,
        designated_ones=sel_ones.positions,
        designated_zeros=sel_zeros.positions,
        case_weight_ones=case_ones,
        case_weight_zeros=case_zeros,
        stratum_weight_ones=sel_ones.stratum_weight,
        stratum_weight_zeros=sel_zeros.stratum_weight,
        selected_weight_ones=sel_ones.weight,
        selected_weight_zeros=sel_zeros.weight,
        total_weight=dist.total,
        measured_error=measured,
        error_bound=bound,
        refined_bound=refined,
        max_size_before=size_before,
        max_size_after=size_after,
        size_bound_exponent=exponent,
        size_bound_ratio=Fraction(size_after, size_before**exponent),
    )
    # The disagreement set is exactly the two designated strata, so the
    # exhaustive measurement must reproduce the profile-level weights.
    assert measured == Fraction(sel_ones.weight + sel_zeros.weight, dist.total)
    if not identity_permutations:
        assert measured <= refined <= bound
    return reduced, report


def _subset_weight(
    profile: WeightProfile,
    pool: Sequence[int],
    subset: Sequence[int],
    stratum_count: int,
    pattern_bit: int,
    first_two: tuple[int, int],
) -> int:
    out = 0
    for b, w in profile.weights.items():
        if (b[0], b[1]) != first_two:
            continue
        if sum(1 for p in pool if b[p - 1] == pattern_bit) != stratum_count:
            continue
        if all(b[p - 1] == pattern_bit for p in subset):
            out += w
    return out


def disagreement_indices(bag_a: Bag, bag_b: Bag) -> list[int]:
    """Canonical indices of every input where the two bags' votes differ."""
    if bag_a.n_vars != bag_b.n_vars:
        raise ValueError(
            f"bags over different variable counts: {bag_a.n_vars} vs {bag_b.n_vars}"
        )
    _check_table_width(bag_a.n_vars)
    diff = _vote_table_bits(bag_a, bag_a.n_vars) ^ _vote_table_bits(bag_b, bag_b.n_vars)
    out = []
    while diff:
        low = diff & -diff
        out.append(low.bit_length() - 1)
        diff ^= low
    return out


def measure_error(bag_a: Bag, bag_b: Bag, dist: Distribution) -> Fraction:
    """Exact disagreement weight of two bags under ``dist``, as a fraction of total."""
    if dist.n_vars != bag_a.n_vars:
        raise ValueError(
            f"distribution over {dist.n_vars} variables, bags over {bag_a.n_vars}"
        )
    disagree = sum(dist.weight(idx) for idx in disagreement_indices(bag_a, bag_b))
    return Fraction(disagree, dist.total)


def reduce_repeated(
    bag: Bag,
    dist: Distribution,
    designated: int,
    steps: int,
    identity_permutations: bool = False,
) -> tuple[Bag, IteratedReductionReport]:
    """Apply :func:`reduce_once` ``steps`` times, reweighting between steps.

    After each step the inputs where the new bag disagrees with that step's
    input bag get weight 0; the remaining integer weights are kept, so each
    per-step error is exact under the step's own distribution. The cumulative
    error against the original bag under the original distribution is at most
    steps/2^designated.
    """
    if steps < 1:
        raise ValueError(f"step count must be >= 1, got {steps}")
    current_bag, current_dist = bag, dist
    reports: list[ReductionReport] = []
    for step in range(1, steps + 1):
        n = len(current_bag.trees)
        m = (n + 1) // 2
        if n < 5:
            raise ValueError(
                f"iteration {step}: only {n} trees left, cannot drop two more"
            )
        if designated > m - 2:
            raise ValueError(
                f"iteration {step}: designated count {designated} exceeds limit {m - 2} "
                f"for {n} trees"
            )
        reduced, report = reduce_once(
            current_bag, current_dist, designated, identity_permutations
        )
        next_dist = current_dist.zero_out(disagreement_indices(reduced, current_bag))
        reports.append(report)
        current_bag, current_dist = reduced, next_dist
    cumulative = measure_error(current_bag, bag, dist)
    bound = Fraction(steps, 2**designated)
    report = IteratedReductionReport(
        steps=tuple(reports),
        trees_before=len(bag.trees),
        trees_after=len(current_bag.trees),
        designated_count=designated,
        total_weight=dist.total,
        measured_error=cumulative,
        error_bound=bound,
        max_size_before=max(tree_size(t) for t in bag.trees),
        max_size_after=max(tree_size(t) for t in current_bag.trees),
    )
    return current_bag, report
