"""Bags of decision trees computing k-out-of-n threshold functions.

Three construction regimes, keyed by how the threshold k relates to the
majority point m = (n+1)/2 of an odd window of n variables:

  k < m   constant-1 trees followed by "variable or leftmost-zeros" trees,
  k = m   the n single-variable trees,
  k > m   "ones-after" trees padded with constant-0 trees.

All subtrees branch on window variables in increasing index order and prune
as soon as the outcome is forced, which keeps each tree polynomial in n for
a fixed distance |m - k|.
"""

from __future__ import annotations

from dataclasses import dataclass

from .trees import LEAF0, LEAF1, Bag, Node, Tree


@dataclass(frozen=True, slots=True)
class ChooseSpec:
    """Parameters of a k-out-of-n bag over window x_{offset+1}..x_{offset+n}."""

    n: int
    k: int
    var_offset: int = 0

    def __post_init__(self) -> None:
        if self.n % 2 == 0 or self.n < 3:
            raise ValueError(f"window size must be odd and >= 3, got {self.n}")
        if not 1 <= self.k <= self.n:
            raise ValueError(f"threshold must be in 1..{self.n}, got {self.k}")
        if self.var_offset < 0:
            raise ValueError(f"variable offset must be >= 0, got {self.var_offset}")

    @property
    def m(self) -> int:
        return (self.n + 1) // 2


def leftmost_zeros_tree(limit: int, pos: int, n: int, var_offset: int = 0) -> Tree:
    """Tree accepting inputs whose bit at ``pos`` is one of the ``limit`` leftmost zeros.

    Equivalently: window bit ``pos`` is 0 and fewer than ``limit`` zeros occur
    before it. Branches on window positions 1..pos in order, pruning once the
    zero budget is exhausted.
    """
    if limit < 1:
        raise ValueError(f"limit must be >= 1, got {limit}")
    if not 1 <= pos <= n:
        raise ValueError(f"position {pos} outside window 1..{n}")
    memo: dict[tuple[int, int], Tree] = {}

    def walk(j: int, zeros: int) -> Tree:
        key = (j, zeros)
        if key not in memo:
            if j == pos:
                memo[key] = Node(var_offset + j, LEAF1, LEAF0)
            else:
                lo = LEAF0 if zeros + 1 > limit - 1 else walk(j + 1, zeros + 1)
                memo[key] = Node(var_offset + j, lo, walk(j + 1, zeros))
        return memo[key]

    return walk(1, 0)


def ones_after_tree(count: int, pos: int, n: int, var_offset: int = 0) -> Tree:
    """Tree accepting inputs with window bit ``pos`` = 1 and >= ``count`` later ones.

    Returns a bare 0-leaf when fewer than ``count`` positions follow ``pos``.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if not 1 <= pos <= n:
        raise ValueError(f"position {pos} outside window 1..{n}")
    if n - pos < count:
        return LEAF0
    memo: dict[tuple[int, int], Tree] = {}

    def scan(j: int, needed: int) -> Tree:
        if needed == 0:
            return LEAF1
        if n - j + 1 < needed:
            return LEAF0
        key = (j, needed)
        if key not in memo:
            memo[key] = Node(var_offset + j, scan(j + 1, needed), scan(j + 1, needed - 1))
        return memo[key]

    return Node(var_offset + pos, LEAF0, scan(pos + 1, count))


def _var_or_leftmost_zeros_tree(limit: int, pos: int, n: int, var_offset: int) -> Tree:
    # Root queries the position itself: 1 accepts outright, 0 reduces the
    # disjunct to "fewer than `limit` zeros before pos", checked without
    # re-querying the root variable.
    memo: dict[tuple[int, int], Tree] = {}

    def prefix_ok(j: int, zeros: int) -> Tree:
        if j == pos:
            return LEAF1
        key = (j, zeros)
        if key not in memo:
            lo = LEAF0 if zeros + 1 > limit - 1 else prefix_ok(j + 1, zeros + 1)
            memo[key] = Node(var_offset + j, lo, prefix_ok(j + 1, zeros))
        return memo[key]

    return Node(var_offset + pos, prefix_ok(1, 0), LEAF1)


def build_choose_bag(spec: ChooseSpec, n_vars: int | None = None) -> Bag:
    """Bag of ``spec.n`` trees whose majority vote is the k-out-of-n function."""
    n, k, offset = spec.n, spec.k, spec.var_offset
    if n_vars is None:
        n_vars = offset + n
    elif n_vars < offset + n:
        raise ValueError(
            f"n_vars {n_vars} too small for window ending at {offset + n}"
        )
    m = spec.m
    trees: list[Tree]
    if k == m:
        trees = [Node(offset + i, LEAF0, LEAF1) for i in range(1, n + 1)]
    elif k < m:
        limit = m - k
        trees = [LEAF1] * limit
        trees += [
            _var_or_leftmost_zeros_tree(limit, i, n, offset)
            for i in range(limit + 1, n + 1)
        ]
    else:
        run = k - m
        trees = [ones_after_tree(run, i, n, offset) for i in range(1, n - run + 1)]
        trees += [LEAF0] * run
    return Bag(tuple(trees), n_vars)


def build_choose_bag_naive(spec: ChooseSpec, n_vars: int | None = None) -> Bag:
    """Baseline bag: one counting tree deciding the threshold, padded with constants.

    The head tree enumerates inputs position by position, accepting as soon
    as k ones are seen and rejecting once k ones are unreachable. The m-1
    constant-1 and m-1 constant-0 companions make the majority vote equal
    the head tree's decision.
    """
    n, k, offset = spec.n, spec.k, spec.var_offset
    if n_vars is None:
        n_vars = offset + n
    elif n_vars < offset + n:
        raise ValueError(
            f"n_vars {n_vars} too small for window ending at {offset + n}"
        )
    m = spec.m
    memo: dict[tuple[int, int], Tree] = {}

    def count_tree(j: int, have: int) -> Tree:
        if have >= k:
            return LEAF1
        if have + (n - j + 1) < k:
            return LEAF0
        key = (j, have)
        if key not in memo:
            memo[key] = Node(offset + j, count_tree(j + 1, have), count_tree(j + 1, have + 1))
        return memo[key]

    trees = [count_tree(1, 0)] + [LEAF1] * (m - 1) + [LEAF0] * (m - 1)
    return Bag(tuple(trees), n_vars)
