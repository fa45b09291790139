import random

import hypothesis.strategies as st

from forestsmith.trees import Leaf, Node


def tree_strategy(n_vars, max_leaves=16):
    leaves = st.builds(Leaf, st.integers(0, 1))
    return st.recursive(
        leaves,
        lambda children: st.builds(Node, st.integers(1, n_vars), children, children),
        max_leaves=max_leaves,
    )


def make_random_tree(rng: random.Random, n_vars: int, depth: int):
    """Plain seeded tree generator for bulk loops (cheaper than hypothesis)."""
    if depth == 0 or rng.random() < 0.25:
        return Leaf(rng.randrange(2))
    var = rng.randint(1, n_vars)
    return (
        Node(
            var,
            make_random_tree(rng, n_vars, depth - 1),
            make_random_tree(rng, n_vars, depth - 1),
        )
    )
