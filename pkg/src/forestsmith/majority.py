"""Exact majority on n variables using a bag of n - 2c trees.

Each tree branches on the first 2c variables, then grafts the matching tree
of an inner k-out-of-(n-2c) bag on the remaining variables: a prefix with s
zeros supplies s missing ones, so the inner threshold is m - 2c + s.
"""

from __future__ import annotations

from itertools import product

from .kofn import ChooseSpec, build_choose_bag
from .trees import LEAF0, LEAF1, Bag, Tree, prefix_graft


def inner_threshold(m: int, c: int, s: int) -> int:
    """Threshold of the inner bag selected by a prefix with ``s`` zeros."""
    if not 0 <= s <= 2 * c:
        raise ValueError(f"zero count {s} outside 0..{2 * c}")
    return m - 2 * c + s


def build_reduced_majority(n: int, c: int) -> Bag:
    """Bag of n - 2c trees whose majority vote equals majority on n variables.

    Requires odd n and 0 <= c <= m - 2 where m = (n+1)/2, so the reduced bag
    keeps at least 3 trees; c = 0 degenerates to the n single-variable trees.
    Inner thresholds that fall outside 1..n-2c are clamped to constant rows
    (always satisfiable, or unsatisfiable).
    """
    if n % 2 == 0 or n < 3:
        raise ValueError(f"variable count must be odd and >= 3, got {n}")
    m = (n + 1) // 2
    if c == 0:
        return build_choose_bag(ChooseSpec(n, m))
    if not 1 <= c <= m - 2:
        raise ValueError(
            f"c must be in 0..{m - 2} so the reduced bag keeps >= 3 trees, got {c}"
        )
    inner_n = n - 2 * c
    rows: list[tuple[Tree, ...]] = []
    for s in range(2 * c + 1):
        k = inner_threshold(m, c, s)
        if k < 1:
            rows.append((LEAF1,) * inner_n)
        elif k > inner_n:
            rows.append((LEAF0,) * inner_n)
        else:
            rows.append(
                build_choose_bag(ChooseSpec(inner_n, k, var_offset=2 * c), n_vars=n).trees
            )
    prefixes = list(product((0, 1), repeat=2 * c))
    trees = []
    for i in range(inner_n):
        selector = {p: rows[2 * c - sum(p)][i] for p in prefixes}
        trees.append(prefix_graft(2 * c, selector))
    return Bag(tuple(trees), n)
