"""Bags of simple decision trees: construction, composition, reduction, verification."""

from .kofn import (
    ChooseSpec,
    build_choose_bag,
    build_choose_bag_naive,
    leftmost_zeros_tree,
    ones_after_tree,
)
from .lossy import (
    Distribution,
    IteratedReductionReport,
    ReductionReport,
    SubsetSelection,
    WeightProfile,
    measure_error,
    reduce_once,
    reduce_repeated,
    select_designated_subset,
    weight_profile,
)
from .majority import build_reduced_majority, inner_threshold
from .trees import (
    Bag,
    Leaf,
    Node,
    Tree,
    TruthTable,
    bag_eval,
    conjoin,
    disjoin,
    eval_tree,
    input_bits,
    input_index,
    leaf_counts,
    max_table_vars,
    negate,
    prefix_graft,
    tree_size,
    truth_table,
    vote_profile,
)
from .verify import (
    Counterexample,
    exhaustive_equiv,
    majority_oracle,
    threshold_oracle,
)

__all__ = [
    "Bag",
    "ChooseSpec",
    "Counterexample",
    "Distribution",
    "IteratedReductionReport",
    "Leaf",
    "Node",
    "ReductionReport",
    "SubsetSelection",
    "Tree",
    "TruthTable",
    "WeightProfile",
    "bag_eval",
    "build_choose_bag",
    "build_choose_bag_naive",
    "build_reduced_majority",
    "conjoin",
    "disjoin",
    "eval_tree",
    "exhaustive_equiv",
    "inner_threshold",
    "input_bits",
    "input_index",
    "leaf_counts",
    "leftmost_zeros_tree",
    "majority_oracle",
    "max_table_vars",
    "measure_error",
    "negate",
    "ones_after_tree",
    "prefix_graft",
    "reduce_once",
    "reduce_repeated",
    "select_designated_subset",
    "threshold_oracle",
    "tree_size",
    "truth_table",
    "vote_profile",
    "weight_profile",
]
