"""Acceptance gate: every criterion as one test, printing one PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines. All error and bound comparisons are exact (integers and fractions);
the only tolerances are the stated wall-clock budgets.
"""

import csv
import json
import random
import time
from contextlib import contextmanager
from fractions import Fraction
from itertools import combinations
from math import comb

import pytest

from forestsmith.cli import main as cli_main
from forestsmith.io_formats import (
    deserialize_bag,
    random_bag,
    random_distribution,
    serialize_bag,
    serialize_distribution,
)
from forestsmith.kofn import (
    ChooseSpec,
    build_choose_bag,
    leftmost_zeros_tree,
    ones_after_tree,
)
from forestsmith.lossy import (
    Distribution,
    WeightProfile,
    disagreement_indices,
    reduce_once,
    reduce_repeated,
    select_designated_subset,
)
from forestsmith.majority import build_reduced_majority
from forestsmith.trees import (
    Bag,
    conjoin,
    disjoin,
    input_bits,
    leaf_counts,
    negate,
    tree_size,
    truth_table,
    vote_profile,
)
from forestsmith.verify import exhaustive_equiv, majority_oracle, threshold_oracle

from conftest import make_random_tree

SWEEP_N = (3, 5, 7, 9, 11, 13)


@contextmanager
def criterion(number, description):
    started = time.monotonic()
    try:
        yield
    except BaseException:
        print(f"\nACCEPTANCE criterion {number}: FAIL - {description}")
        raise
    elapsed = time.monotonic() - started
    print(f"\nACCEPTANCE criterion {number}: PASS - {description} ({elapsed:.1f}s)")


def test_criterion_01_choose_bag_correctness():
    with criterion(1, "choose-bag vote equals the threshold on every input"):
        started = time.monotonic()
        for n in SWEEP_N:
            for k in range(1, n + 1):
                bag = build_choose_bag(ChooseSpec(n, k))
                ce = exhaustive_equiv(bag, lambda b, k=k: threshold_oracle(k, b), n)
                assert ce is None, (n, k, ce)
        assert time.monotonic() - started < 30.0


def test_criterion_02_displayed_formula_fidelity():
    with criterion(2, "constructed subtrees and n=5 reduced trees match the displays"):
        # Subtree displays, over all 32 inputs of a 5-variable window.
        subtree_cases = [
            (leftmost_zeros_tree(1, 3, 5), lambda b: b[0] and b[1] and not b[2]),
            (
                leftmost_zeros_tree(2, 3, 5),
                lambda b: (b[0] and b[1] and not b[2])
                or (not b[0] and b[1] and not b[2])
                or (b[0] and not b[1] and not b[2]),
            ),
            (
                ones_after_tree(1, 2, 5),
                lambda b: (b[1] and b[2])
                or (b[1] and not b[2] and b[3])
                or (b[1] and not b[2] and not b[3] and b[4]),
            ),
            (
                ones_after_tree(2, 2, 5),
                lambda b: (b[1] and b[2] and b[3])
                or (b[1] and b[2] and not b[3] and b[4])
                or (b[1] and not b[2] and b[3] and b[4]),
            ),
        ]
        for tree, formula in subtree_cases:
            table = truth_table(tree, 5)
            for i in range(32):
                assert table[i] == int(bool(formula(input_bits(i, 5))))

        # The three reduced-majority trees for n=5, c=1, written out literally.
        def tree1(b):
            x1, x2, x3, x4, x5 = b
            return (
                (x1 and x2)
                or (x1 and not x2 and x3)
                or (not x1 and x2 and x3)
                or (not x1 and not x2 and ((x3 and x4) or (x3 and not x4 and x5)))
            )

        def tree2(b):
            x1, x2, x3, x4, x5 = b
            return (
                (x1 and x2 and (x4 or (x3 and not x4)))
                or (x1 and not x2 and x4)
                or (not x1 and x2 and x4)
                or (not x1 and not x2 and (x4 and x5))
            )

        def tree3(b):
            x1, x2, x3, x4, x5 = b
            return (
                (x1 and x2 and (x5 or (x3 and x4 and not x5)))
                or (x1 and not x2 and x5)
                or (not x1 and x2 and x5)
            )

        bag = build_reduced_majority(5, 1)
        assert len(bag) == 3
        for tree, formula in zip(bag.trees, (tree1, tree2, tree3)):
            table = truth_table(tree, 5)
            for i in range(32):
                assert table[i] == int(bool(formula(input_bits(i, 5)))), i


def test_criterion_03_reduced_majority_correctness():
    with criterion(3, "reduced majority bag votes exactly like majority"):
        started = time.monotonic()
        for n in SWEEP_N:
            m = (n + 1) // 2
            for c in range(1, m - 1):
                bag = build_reduced_majority(n, c)
                assert len(bag) == n - 2 * c
                ce = exhaustive_equiv(bag, majority_oracle, n)
                assert ce is None, (n, c, ce)
        assert time.monotonic() - started < 60.0


def test_criterion_04_size_ratios_bounded(tmp_path):
    with criterion(4, "size ratios stay within twice their smallest-n value"):
        kofn_csv = tmp_path / "kofn_sweep.csv"
        maj_csv = tmp_path / "majority_sweep.csv"
        n_list = ",".join(str(n) for n in SWEEP_N)
        assert cli_main(["sweep", "--mode", "kofn", "--csv", str(kofn_csv), "--n-list", n_list]) == 0
        assert cli_main(
            ["sweep", "--mode", "majority", "--csv", str(maj_csv), "--n-list", "5,7,9,11,13"]
        ) == 0

        with open(kofn_csv, newline="") as handle:
            kofn_rows = list(csv.DictReader(handle))
        assert len(kofn_rows) == sum(SWEEP_N)
        assert all(row["verified"] == "True" for row in kofn_rows)
        families = {}
        for row in kofn_rows:
            n, k = int(row["n"]), int(row["k"])
            ratio = Fraction(int(row["max_tree_size"]), int(row["bound"]))
            families.setdefault(k - (n + 1) // 2, []).append((n, ratio))
        for offset, seq in families.items():
            seq.sort()
            first = seq[0][1]
            for n, ratio in seq:
                assert ratio <= 2 * first, (offset, n, ratio, first)

        with open(maj_csv, newline="") as handle:
            maj_rows = list(csv.DictReader(handle))
        assert all(row["verified"] == "True" for row in maj_rows)
        families = {}
        for row in maj_rows:
            n, c = int(row["n"]), int(row["c"])
            ratio = Fraction(int(row["max_tree_size"]), int(row["bound"]))
            families.setdefault(c, []).append((n, ratio))
        for c, seq in families.items():
            seq.sort()
            first = seq[0][1]
            for n, ratio in seq:
                assert ratio <= 2 * first, (c, n, ratio, first)


@pytest.fixture(scope="module")
def lossy_corpus():
    """102 seeded (bag, distribution) scenarios, each reduced at K = 1, 2, 3.

    Records carry the exact report plus the stratum-membership audit used by
    criterion 6, so the expensive pass over the corpus happens once.
    """
    records = []
    started = time.monotonic()
    for seed in range(102):
        n_trees = 9 if seed < 51 else 11
        depth = 2 + seed % 3
        bag = random_bag(seed, n_trees, 8, depth)
        if seed % 2:
            dist = random_distribution(10_000 + seed, 8, 20 + seed % 17)
        else:
            dist = Distribution.uniform(8)
        for designated in (1, 2, 3):
            reduced, report = reduce_once(bag, dist, designated)
            m = (n_trees + 1) // 2
            support_ok = True
            mixed_weight = 0
            for index in disagreement_indices(reduced, bag):
                votes = vote_profile(bag, input_bits(index, 8))
                first_two = (votes[0], votes[1])
                tail = votes[2:]
                if first_two == (1, 1):
                    inside = sum(tail) == m - 2 and all(
                        votes[p - 1] == 1 for p in report.designated_ones
                    )
                elif first_two == (0, 0):
                    inside = sum(1 - b for b in tail) == m - 2 and all(
                        votes[p - 1] == 0 for p in report.designated_zeros
                    )
                else:
                    inside = False
                    mixed_weight += dist.weight(index)
                support_ok &= inside
            records.append(
                {
                    "seed": seed,
                    "designated": designated,
                    "report": report,
                    "support_ok": support_ok,
                    "mixed_weight": mixed_weight,
                }
            )
    elapsed = time.monotonic() - started
    return {"records": records, "elapsed": elapsed}


def test_criterion_05_single_step_error_bound(lossy_corpus):
    with criterion(5, "one-step error is at most 1/2^K, exactly, on 306 runs"):
        records = lossy_corpus["records"]
        assert len(records) == 306
        assert len({r["seed"] for r in records}) == 102
        for record in records:
            report = record["report"]
            designated = record["designated"]
            assert report.measured_error <= Fraction(1, 2**designated)
            finer = Fraction(
                comb(report.trees_before // 2 - 1, designated)
                * (report.case_weight_ones + report.case_weight_zeros),
                comb(report.trees_before - 2, designated) * report.total_weight,
            )
            assert report.refined_bound == finer
            assert report.measured_error <= finer
        assert lossy_corpus["elapsed"] < 300.0


def test_criterion_06_error_support_characterization(lossy_corpus):
    with criterion(6, "all disagreements live in the two designated strata"):
        for record in lossy_corpus["records"]:
            assert record["support_ok"], record["seed"]
            assert record["mixed_weight"] == 0
            report = record["report"]
            assert report.measured_error == Fraction(
                report.selected_weight_ones + report.selected_weight_zeros,
                report.total_weight,
            )


def test_criterion_07_iterated_error_bound():
    with criterion(7, "two-step error is at most 2/8, each step at most 1/8"):
        started = time.monotonic()
        for seed in range(30):
            bag = random_bag(20_000 + seed, 11, 8, 2 + seed % 3)
            if seed % 2:
                dist = random_distribution(30_000 + seed, 8, 25)
            else:
                dist = Distribution.uniform(8)
            reduced, report = reduce_repeated(bag, dist, 3, 2)
            assert len(reduced) == 7
            assert report.measured_error <= Fraction(2, 8)
            assert report.error_bound == Fraction(2, 8)
            assert len(report.steps) == 2
            for step in report.steps:
                assert step.measured_error <= Fraction(1, 8)
        assert time.monotonic() - started < 300.0


def test_criterion_08_subset_selection_bound():
    with criterion(8, "argmin subset meets the exact averaging bound"):
        positions = tuple(range(1, 8))
        rng = random.Random(88)
        for trial in range(1000):
            weights = {}
            for ones in combinations(range(7), 3):
                profile = tuple(1 if i in ones else 0 for i in range(7))
                weights[profile] = rng.randint(0, 1000)
            if not any(weights.values()):
                weights[(1, 1, 1, 0, 0, 0, 0)] = 1
            profile = WeightProfile(7, weights)
            selection = select_designated_subset(profile, positions, 2, 3, 1)
            assert (
                selection.weight * comb(7, 2)
                <= comb(3, 2) * selection.stratum_weight
            ), trial
        uniform = WeightProfile(
            7,
            {
                tuple(1 if i in ones else 0 for i in range(7)): 1
                for ones in combinations(range(7), 3)
            },
        )
        selection = select_designated_subset(uniform, positions, 2, 3, 1)
        assert Fraction(selection.weight) == selection.averaging_bound() == Fraction(5)


def test_criterion_09_worked_example_reproduction(tmp_path):
    with criterion(9, "the 9-to-7 worked example reproduces rows and profiles"):
        bag_path = tmp_path / "nine.bag.json"
        dist_path = tmp_path / "uniform.dist.json"
        out_path = tmp_path / "seven.bag.json"
        report_path = tmp_path / "seven.report.json"
        bag_path.write_text(serialize_bag(build_choose_bag(ChooseSpec(9, 5))))
        dist_path.write_text(serialize_distribution(Distribution.uniform(9)))
        code = cli_main(
            [
                "reduce",
                "--bag", str(bag_path),
                "--dist", str(dist_path),
                "--K", "3",
                "--c", "1",
                "--out", str(out_path),
                "--report", str(report_path),
                "--identity-perms",
            ]
        )
        assert code == 0
        reduced = deserialize_bag(out_path.read_text())
        assert len(reduced) == 7

        # Row structure: with both lead votes 1 the first entry is constant 1;
        # with both lead votes 0 the third entry is constant 0.
        for index in range(512):
            bits = input_bits(index, 9)
            if bits[0] and bits[1]:
                assert vote_profile(reduced, bits)[0] == 1
            if not bits[0] and not bits[1]:
                assert vote_profile(reduced, bits)[2] == 0

        profile_a = vote_profile(reduced, (1, 1, 1, 1, 1, 0, 0, 0, 0))
        assert profile_a == (1, 1, 1, 0, 0, 0, 0)
        assert sum(profile_a) == 3
        profile_b = vote_profile(reduced, (0, 0, 0, 0, 0, 1, 1, 1, 1))
        assert profile_b == (0, 0, 0, 1, 1, 1, 1)
        assert sum(profile_b) == 4

        report = json.loads(report_path.read_text())
        assert report["measured_error"] == "1/256"
        assert report["error_bound"] == "1/8"
        assert report["steps"][0]["designated_ones"] == [3, 4, 5]


def test_criterion_10_algebra_and_round_trips():
    with criterion(10, "10000 random composition triples and byte-exact round trips"):
        rng = random.Random(1010)
        for trial in range(10_000):
            n_vars = rng.randint(2, 10)
            depth = rng.randint(1, 4)
            a = make_random_tree(rng, n_vars, depth)
            b = make_random_tree(rng, n_vars, depth)
            table_a = truth_table(a, n_vars)
            table_b = truth_table(b, n_vars)
            both = conjoin(a, b)
            either = disjoin(a, b)
            flipped = negate(a)
            assert truth_table(both, n_vars) == (table_a & table_b)
            assert truth_table(either, n_vars) == (table_a | table_b)
            assert truth_table(flipped, n_vars) == ~table_a
            zeros_a, ones_a = leaf_counts(a)
            assert tree_size(both) <= tree_size(a) + ones_a * tree_size(b)
            assert tree_size(either) <= tree_size(a) + zeros_a * tree_size(b)
            assert tree_size(flipped) == tree_size(a)
            text = serialize_bag(Bag((a, b, both), n_vars))
            assert serialize_bag(deserialize_bag(text)) == text
