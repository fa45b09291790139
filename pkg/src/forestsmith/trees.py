"""Simple binary decision trees, majority-vote bags, and exact Boolean composition.

Trees are immutable. Composition operations (negate, conjoin, disjoin,
prefix_graft) may share subtree storage internally; all size accounting
reports the fully expanded tree-node count, so shared storage is invisible
to callers.
"""

from __future__ import annotations

import os
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Mapping, Sequence, Union

MAX_TABLE_VARS = 24
SOFT_WARN_VARS = 20
_ENV_CAP = "FORESTSMITH_MAX_L"


@dataclass(frozen=True, slots=True)
class Leaf:
    """Terminal node labeled 0 or 1."""

    label: int

    def __post_init__(self) -> None:
        if self.label not in (0, 1):
            raise ValueError(f"leaf label must be 0 or 1, got {self.label!r}")


@dataclass(frozen=True, slots=True)
class Node:
    """Internal node querying variable ``var`` (1-based).

    ``lo`` is followed when the queried variable is 0, ``hi`` when it is 1.
    """

    var: int
    lo: "Tree"
    hi: "Tree"

    def __post_init__(self) -> None:
        if not isinstance(self.var, int) or isinstance(self.var, bool) or self.var < 1:
            raise ValueError(f"variable index must be a positive integer, got {self.var!r}")


Tree = Union[Leaf, Node]

LEAF0 = Leaf(0)
LEAF1 = Leaf(1)


def _fold(root: Tree, leaf_fn: Callable, node_fn: Callable):
    """Bottom-up fold over the stored node graph.

    Shared subtrees are visited once (memoized by object identity), so the
    cost is linear in stored nodes even when the expanded tree is huge.
    Iterative to stay independent of the recursion limit.
    """
    memo: dict[int, object] = {}
    stack = [root]
    while stack:
        t = stack[-1]
        if id(t) in memo:
            stack.pop()
            continue
        if isinstance(t, Leaf):
            memo[id(t)] = leaf_fn(t)
            stack.pop()
            continue
        lo, hi = t.lo, t.hi
        ready = True
        if id(lo) not in memo:
            stack.append(lo)
            ready = False
        if id(hi) not in memo:
            stack.append(hi)
            ready = False
        if ready:
            memo[id(t)] = node_fn(t, memo[id(lo)], memo[id(hi)])
            stack.pop()
    return memo[id(root)]


def tree_size(tree: Tree) -> int:
    """Number of nodes in the expanded tree, leaves included."""
    return _fold(tree, lambda leaf: 1, lambda node, lo, hi: 1 + lo + hi)


def max_var(tree: Tree) -> int:
    """Largest variable index queried anywhere in the tree (0 for leaves)."""
    return _fold(tree, lambda leaf: 0, lambda node, lo, hi: max(node.var, lo, hi))


def leaf_counts(tree: Tree) -> tuple[int, int]:
    """(number of 0-leaves, number of 1-leaves) in the expanded tree."""
    return _fold(
        tree,
        lambda leaf: (0, 1) if leaf.label else (1, 0),
        lambda node, lo, hi: (lo[0] + hi[0], lo[1] + hi[1]),
    )


def eval_tree(tree: Tree, bits: Sequence[int]) -> int:
    """Follow the queried bits from the root and return the reached leaf label."""
    t = tree
    while isinstance(t, Node):
        if t.var > len(bits):
            raise ValueError(
                f"variable index {t.var} out of range for input of length {len(bits)}"
            )
        t = t.hi if bits[t.var - 1] else t.lo
    return t.label


def negate(tree: Tree) -> Tree:
    """Complement the computed function by swapping every leaf label."""
    return _fold(
        tree,
        lambda leaf: LEAF0 if leaf.label else LEAF1,
        lambda node, lo, hi: Node(node.var, lo, hi),
    )


def conjoin(t1: Tree, t2: Tree) -> Tree:
    """AND of two trees: every 1-leaf of ``t1`` is replaced by ``t2``.

    Expanded size is size(t1) - ones(t1) + ones(t1) * size(t2), within the
    size(t1) + ones(t1) * size(t2) bound.
    """

    def node_fn(node: Node, lo: Tree, hi: Tree) -> Tree:
        if lo is node.lo and hi is node.hi:
            return node
        return Node(node.var, lo, hi)

    return _fold(t1, lambda leaf: t2 if leaf.label else leaf, node_fn)


def disjoin(t1: Tree, t2: Tree) -> Tree:
    """OR of two trees: every 0-leaf of ``t1`` is replaced by ``t2``."""

    def node_fn(node: Node, lo: Tree, hi: Tree) -> Tree:
        if lo is node.lo and hi is node.hi:
            return node
        return Node(node.var, lo, hi)

    return _fold(t1, lambda leaf: leaf if leaf.label else t2, node_fn)


def prefix_graft(prefix_len: int, selector: Mapping[tuple[int, ...], Tree]) -> Tree:
    """Branch on x_1..x_{prefix_len} in order, then behave as the selected subtree.

    ``selector`` must map every prefix assignment (a 0/1 tuple of length
    ``prefix_len``) to the tree grafted onto that outcome.
    """
    if prefix_len < 1:
        raise ValueError(f"prefix length must be >= 1, got {prefix_len}")

    def build(prefix: tuple[int, ...]) -> Tree:
        if len(prefix) == prefix_len:
            try:
                return selector[prefix]
            except KeyError:
                raise ValueError(f"selector missing prefix {prefix}") from None
        return Node(len(prefix) + 1, build(prefix + (0,)), build(prefix + (1,)))

    return build(())


@dataclass(frozen=True, slots=True)
class Bag:
    """Odd-cardinality collection of trees deciding by majority vote."""

    trees: tuple[Tree, ...]
    n_vars: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "trees", tuple(self.trees))
        if len(self.trees) % 2 == 0:
            raise ValueError(
                f"bag must have odd cardinality, got {len(self.trees)} trees"
            )
        if not isinstance(self.n_vars, int) or self.n_vars < 1:
            raise ValueError(f"n_vars must be a positive integer, got {self.n_vars!r}")
        for pos, tree in enumerate(self.trees, start=1):
            worst = max_var(tree)
            if worst > self.n_vars:
                raise ValueError(
                    f"tree {pos} queries variable {worst}, beyond declared {self.n_vars}"
                )

    def __len__(self) -> int:
        return len(self.trees)

    @property
    def majority_threshold(self) -> int:
        """Votes needed to win: M for a bag of 2M-1 trees."""
        return (len(self.trees) + 1) // 2


def vote_profile(bag: Bag, bits: Sequence[int]) -> tuple[int, ...]:
    """Per-tree outputs for one input, in bag order."""
    return tuple(eval_tree(t, bits) for t in bag.trees)


def bag_eval(bag: Bag, bits: Sequence[int]) -> int:
    """Majority vote of the bag's trees on one input."""
    votes = sum(eval_tree(t, bits) for t in bag.trees)
    return 1 if votes >= bag.majority_threshold else 0


def input_bits(index: int, n_vars: int) -> tuple[int, ...]:
    """Canonical decoding: x_1 is the least-significant bit of ``index``."""
    return tuple((index >> j) & 1 for j in range(n_vars))


def input_index(bits: Sequence[int]) -> int:
    """Canonical encoding, inverse of :func:`input_bits`."""
    return sum((1 << j) for j, b in enumerate(bits) if b)


def max_table_vars() -> int:
    """Active truth-table cap: 24, optionally lowered by FORESTSMITH_MAX_L."""
    cap = MAX_TABLE_VARS
    raw = os.environ.get(_ENV_CAP)
    if raw is not None:
        try:
            override = int(raw)
        except ValueError:
            raise ValueError(f"{_ENV_CAP} must be an integer, got {raw!r}") from None
        if override < 1:
            raise ValueError(f"{_ENV_CAP} must be >= 1, got {override}")
        cap = min(cap, override)
    return cap


def _check_table_width(n_vars: int) -> None:
    cap = max_table_vars()
    if n_vars > cap:
        raise ValueError(
            f"refusing exhaustive enumeration over {n_vars} variables (cap {cap})"
        )
    if n_vars > SOFT_WARN_VARS:
        warnings.warn(
            f"enumerating 2^{n_vars} inputs; this may be slow", stacklevel=3
        )


@lru_cache(maxsize=None)
def _variable_masks(n_vars: int) -> tuple[int, ...]:
    masks = []
    size = 1 << n_vars
    for v in range(1, n_vars + 1):
        half = 1 << (v - 1)
        block = half << 1
        seg = ((1 << half) - 1) << half
        while block < size:
            seg |= seg << block
            block <<= 1
        masks.append(seg)
    return tuple(masks)


@dataclass(frozen=True, slots=True)
class TruthTable:
    """Bit vector over all 2^n_vars inputs, packed into an int.

    Bit ``i`` is the function value on the input with canonical index ``i``.
    """

    n_vars: int
    bits: int

    def __post_init__(self) -> None:
        if self.bits < 0 or self.bits >> (1 << self.n_vars):
            raise ValueError("truth-table bits out of range for declared width")

    def __len__(self) -> int:
        return 1 << self.n_vars

    def __getitem__(self, index: int) -> int:
        if not 0 <= index < (1 << self.n_vars):
            raise IndexError(index)
        return (self.bits >> index) & 1

    def to_tuple(self) -> tuple[int, ...]:
        return tuple((self.bits >> i) & 1 for i in range(1 << self.n_vars))

    def ones(self) -> int:
        return self.bits.bit_count()

    def _mask(self) -> int:
        return (1 << (1 << self.n_vars)) - 1

    def __and__(self, other: "TruthTable") -> "TruthTable":
        self._check(other)
        return TruthTable(self.n_vars, self.bits & other.bits)

    def __or__(self, other: "TruthTable") -> "TruthTable":
        self._check(other)
        return TruthTable(self.n_vars, self.bits | other.bits)

    def __xor__(self, other: "TruthTable") -> "TruthTable":
        self._check(other)
        return TruthTable(self.n_vars, self.bits ^ other.bits)

    def __invert__(self) -> "TruthTable":
        return TruthTable(self.n_vars, self.bits ^ self._mask())

    def _check(self, other: "TruthTable") -> None:
        if self.n_vars != other.n_vars:
            raise ValueError("truth tables over different variable counts")


def _tree_table_bits(tree: Tree, n_vars: int) -> int:
    masks = _variable_masks(n_vars)
    full = (1 << (1 << n_vars)) - 1

    def node_fn(node: Node, lo: int, hi: int) -> int:
        if node.var > n_vars:
            raise ValueError(
                f"variable index {node.var} out of range for {n_vars} variables"
            )
        m = masks[node.var - 1]
        return (hi & m) | (lo & ~m & full)

    return _fold(tree, lambda leaf: full if leaf.label else 0, node_fn)


def _lanes_at_least(planes: list[int], k: int, full: int) -> int:
    """Lanes whose per-lane binary counter (little-endian planes) is >= k."""
    if k <= 0:
        return full
    width = max(len(planes), k.bit_length())
    ge = 0
    eq = full
    for j in reversed(range(width)):
        plane = planes[j] if j < len(planes) else 0
        if (k >> j) & 1:
            eq &= plane
        else:
            ge |= eq & plane
            eq &= ~plane & full
    return ge | eq


def _vote_table_bits(bag: Bag, n_vars: int) -> int:
    planes: list[int] = []
    for tree in bag.trees:
        carry = _tree_table_bits(tree, n_vars)
        j = 0
        while carry:
            if j == len(planes):
                planes.append(carry)
                break
            planes[j], carry = planes[j] ^ carry, planes[j] & carry
            j += 1
    full = (1 << (1 << n_vars)) - 1
    return _lanes_at_least(planes, bag.majority_threshold, full)


def truth_table(subject: Union[Tree, Bag], n_vars: int | None = None) -> TruthTable:
    """Exhaustive function table of a tree, or of a bag's majority vote."""
    if isinstance(subject, Bag):
        if n_vars is None:
            n_vars = subject.n_vars
        elif n_vars < subject.n_vars:
            raise ValueError(
                f"bag declares {subject.n_vars} variables, table width {n_vars} too small"
            )
        _check_table_width(n_vars)
        return TruthTable(n_vars, _vote_table_bits(subject, n_vars))
    if n_vars is None:
        raise ValueError("n_vars is required for a bare tree")
    _check_table_width(n_vars)
    return TruthTable(n_vars, _tree_table_bits(subject, n_vars))
