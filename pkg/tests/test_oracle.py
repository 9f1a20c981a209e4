"""Tests for the brute-force verification suites, including perturbed operations."""
from __future__ import annotations

import itertools
from collections import defaultdict

import pytest

from medf_toolkit.coding import decode_seq
from medf_toolkit.construction import is_good, marked_set
from medf_toolkit.errors import BudgetExceeded
from medf_toolkit.model import INF, BoundSpec, TailRule
from medf_toolkit.oracle import (
    SUITES,
    enumerate_contexts,
    sample_contexts,
    shared_ones_after_divergence,
    verify_ad_suite,
    verify_all,
    verify_codec_suite,
    verify_ed_suite,
    verify_injectivity_suite,
    verify_lift_suite,
    verify_tree_suite,
)

GROWING = BoundSpec((2, 5, 45), TailRule.infinity())
TIGHT = BoundSpec((1, 3, 15), TailRule.infinity())
SUCCESSOR = BoundSpec((), TailRule.affine(1, 1))
GAPPED = BoundSpec((INF,), TailRule.interleave([TailRule.affine(1, 1), TailRule.infinity()]))
PURE = BoundSpec((), TailRule.infinity())
CONSTANT = BoundSpec((1, 3, 15), TailRule.constant(400))


# ── Context enumeration ────────────────────────────────────────────────────────

def test_enumerate_contexts_count_and_order():
    contexts = enumerate_contexts(GROWING, 2)
    assert len(contexts) == 2 * 5 * 4
    assert (contexts[0].g, contexts[0].c) == ((0, 0), (0, 0))
    assert (contexts[1].g, contexts[1].c) == ((0, 0), (0, 1))


def test_enumerate_contexts_value_budget():
    assert len(enumerate_contexts(GROWING, 4, value_budget=2)) == 2 * 5 * 45 * 2 * 16


def test_enumerate_contexts_budget():
    with pytest.raises(BudgetExceeded):
        enumerate_contexts(GROWING, 3, budget=100)


def test_sample_contexts_seeded():
    a = sample_contexts(GROWING, 6, 50, seed=11)
    b = sample_contexts(GROWING, 6, 50, seed=11)
    assert [(x.g, x.c) for x in a] == [(y.g, y.c) for y in b]
    assert len({(x.g, x.c) for x in a}) == len(a)
    assert all(len(x) == 6 for x in a)
    assert any(is_good(x.c) and any(x.c) for x in a)


# ── Suites on the real operations ──────────────────────────────────────────────

def test_ad_suite_exhaustive():
    report = verify_ad_suite(GROWING, 3)
    assert report.passed, report.counterexample
    assert report.counts["contexts"] == 3600
    assert report.parameters["mode"] == "exhaustive"


def test_ad_suite_random():
    report = verify_ad_suite(GROWING, 6, sample_count=200, seed=1)
    assert report.passed, report.counterexample
    assert report.parameters["mode"] == "random"
    assert report.parameters["seed"] == 1


def test_ad_suite_random_pure_infinity():
    report = verify_ad_suite(PURE, 12, sample_count=1000, seed=4)
    assert report.passed, report.counterexample
    assert report.counts["contexts"] == 1000


def test_ed_suite_random_pure_infinity():
    report = verify_ed_suite(PURE, 12, sample_count=1000, seed=5)
    assert report.passed, report.counterexample
    assert report.counts["contexts"] == 1000


def test_good_sequences_share_at_most_one_late_one():
    good = [c for c in itertools.product((0, 1), repeat=7) if is_good(c)]
    for c0, c1 in itertools.combinations(good, 2):
        assert len(shared_ones_after_divergence(c0, c1)) <= 1, (c0, c1)


def test_shared_ones_after_divergence():
    # (1, 0, 1, 1) is not good: 2 is not odd
    assert shared_ones_after_divergence((0, 0, 1, 1), (1, 0, 1, 1)) == [2, 3]
    assert shared_ones_after_divergence((1, 1), (1, 1)) == []


def test_shared_mark_fixes_source_prefix():
    # m = 2·#(g↾j) determines g↾j, so rows sharing a mark can differ only in c below j
    prefixes: dict[int, set] = defaultdict(set)
    for ctx in enumerate_contexts(GROWING, 3):
        if is_good(ctx.c):
            for m in marked_set(ctx):
                prefixes[m].add(ctx.g[: len(decode_seq(m // 2))])
    assert prefixes
    assert all(len(p) == 1 for p in prefixes.values())


def test_ed_suite_exhaustive():
    report = verify_ed_suite(GROWING, 3)
    assert report.passed, report.counterexample
    assert report.counts["positions"] == 2


def test_ed_suite_random():
    assert verify_ed_suite(GROWING, 6, sample_count=200, seed=2).passed


def test_injectivity_suite():
    assert verify_injectivity_suite(GROWING, 3).passed
    assert verify_injectivity_suite(TIGHT, 3).passed


def test_tree_suite_exhaustive():
    report = verify_tree_suite(GROWING, 3)
    assert report.passed, report.counterexample
    assert report.counts["p_n"] >= 2
    assert report.counts["t_n"] >= report.counts["p_n"]
    assert report.counts["t_n_minus_p_n"] == report.counts["t_n"] - report.counts["p_n"]


def test_tree_suite_tight_bound():
    report = verify_tree_suite(TIGHT, 3)
    assert report.passed, report.counterexample
    assert verify_tree_suite(GROWING, 2).passed


def test_tree_suite_random_skips_level_counts():
    report = verify_tree_suite(GROWING, 5, sample_count=100, seed=3)
    assert report.passed, report.counterexample
    assert "t_n" not in report.counts


def test_codec_suite():
    report = verify_codec_suite(GROWING, code_limit=10_000)
    assert report.passed, report.counterexample
    assert report.parameters["level_bound"] == 3
    assert report.counts["pairs"] == 3645


def test_codec_suite_pure_infinity():
    report = verify_codec_suite(PURE, code_limit=10_000)
    assert report.passed, report.counterexample


def test_codec_suite_flags_growth_failure():
    report = verify_codec_suite(BoundSpec((2, 4, 100), TailRule.infinity()), code_limit=50)
    assert not report.passed
    assert report.counterexample["check"] == "appropriate"


def test_lift_suite():
    report = verify_lift_suite(SUCCESSOR, 16)
    assert report.passed, report.counterexample
    assert report.parameters["entries"] == [0, 2, 14]
    assert report.counts["members"] == 30


def test_lift_suite_compact():
    report = verify_lift_suite(GAPPED, 10, depth=2, compact_mode=True)
    assert report.passed, report.counterexample
    assert report.parameters["entries"] == [2, 6]


# ── Perturbed operations ───────────────────────────────────────────────────────

def test_ad_suite_catches_wrong_marked_set():
    report = verify_ad_suite(GROWING, 2, marked_set_fn=lambda ctx: frozenset())
    assert not report.passed
    assert report.counterexample["check"] == "marked_set"


def test_ed_suite_catches_copying_everywhere():
    report = verify_ed_suite(GROWING, 2, e_hat_fn=lambda ctx, upto: ctx.g[:upto])
    assert not report.passed
    assert report.counterexample["check"] == "copy_outside_nu"


def test_tree_suite_catches_rejecting_membership():
    report = verify_tree_suite(GROWING, 2, is_tree_node_fn=lambda node: False)
    assert not report.passed
    assert report.counterexample["check"] == "prefix_not_node"


def test_lift_suite_catches_constant_lift():
    report = verify_lift_suite(SUCCESSOR, 15, lift_fn=lambda ctx, f, upto: (0,) * upto)
    assert not report.passed
    assert report.counterexample["check"] == "round_trip"


# ── All suites ─────────────────────────────────────────────────────────────────

def test_verify_all_order():
    reports = verify_all(GROWING, 2)
    assert [r.suite for r in reports] == list(SUITES)
    assert all(r.passed for r in reports)


def test_verify_all_skips_lift_for_finite_liminf():
    reports = verify_all(CONSTANT, 2, suites=("tree", "lift"))
    assert [r.suite for r in reports] == ["tree"]


def test_report_record_excludes_timing():
    report = verify_injectivity_suite(GROWING, 2)
    record = report.to_record()
    assert set(record) == {"suite", "parameters", "passed", "counterexample", "counts"}
    assert report.elapsed >= 0
