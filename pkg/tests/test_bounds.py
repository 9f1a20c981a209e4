"""Tests for bound functions: evaluation, growth, regimes, reindexing."""
from __future__ import annotations

import pytest

from medf_toolkit.bounds import (
    check_growth,
    classify_regime,
    constant_medf,
    eval_bound,
    finite_support_set,
    level_counts,
    reindex_sequence,
    reindex_within,
    reindexed_spec,
)
from medf_toolkit.errors import BoundSpecError, RegimeError, ScanBoundExceeded
from medf_toolkit.model import INF, BoundSpec, TailRule


def _spec(prefix, tail) -> BoundSpec:
    return BoundSpec(tuple(prefix), tail)


GROWING = _spec([2, 5, 45], TailRule.infinity())
SUCCESSOR = _spec([], TailRule.affine(1, 1))


# ── Evaluation ─────────────────────────────────────────────────────────────────

def test_eval_prefix_then_tail():
    assert [eval_bound(GROWING, n) for n in range(5)] == [2, 5, 45, INF, INF]


def test_eval_periodic_uses_absolute_index():
    spec = _spec([7], TailRule.periodic([2, INF]))
    assert [eval_bound(spec, n) for n in range(5)] == [7, INF, 2, INF, 2]


def test_eval_interleave():
    spec = _spec([], TailRule.interleave([TailRule.affine(1, 1), TailRule.infinity()]))
    assert [eval_bound(spec, n) for n in range(4)] == [1, INF, 3, INF]


def test_infinity_orders_above_naturals():
    assert INF > 10**100
    assert not INF < 3
    assert INF == INF
    assert INF != 5
    assert min([INF, 4]) == 4


# ── Validation ─────────────────────────────────────────────────────────────────

def test_zero_prefix_value_rejected():
    with pytest.raises(BoundSpecError):
        _spec([0], TailRule.infinity())


def test_affine_without_offset_needs_prefix():
    with pytest.raises(BoundSpecError):
        _spec([], TailRule.affine(1, 0))
    assert eval_bound(_spec([1], TailRule.affine(1, 0)), 3) == 3


def test_nested_interleave_rejected():
    inner = TailRule.interleave([TailRule.infinity()])
    with pytest.raises(BoundSpecError):
        _spec([1], TailRule.interleave([inner]))


def test_empty_periodic_rejected():
    with pytest.raises(BoundSpecError):
        _spec([1], TailRule.periodic([]))


# ── Growth condition ───────────────────────────────────────────────────────────

def test_level_counts():
    assert level_counts(GROWING, 4) == [1, 4, 40, 3600, INF]


def test_growth_holds_for_tight_prefix():
    report = check_growth(GROWING, 6)
    assert report.passed
    assert report.sums[:4] == (1, 5, 45, 3645)
    assert report.sums[4] is INF


def test_growth_holds_at_the_tight_bound():
    # every partial sum meets F exactly: 1, 1 + 1·2 = 3, 3 + 3·4 = 15
    report = check_growth(_spec([1, 3, 15], TailRule.infinity()), 5)
    assert report.passed
    assert report.sums[:3] == (1, 3, 15)


def test_growth_fails_for_successor():
    # Σ through n=1 is 1 + 1·2 = 3 > F(1) = 2
    assert check_growth(SUCCESSOR, 4).first_failure == 1


def test_growth_fails_for_small_constant():
    report = check_growth(_spec([], TailRule.constant(2)), 5)
    assert not report.passed
    # Σ through n=1 is 1 + 2·2 = 5 > 2
    assert report.first_failure == 1


def test_growth_fails_at_first_bad_level():
    report = check_growth(_spec([2, 4], TailRule.infinity()), 3)
    assert report.first_failure == 1


# ── Regimes ────────────────────────────────────────────────────────────────────

def test_regime_constant_is_liminf_finite():
    regime = classify_regime(_spec([5], TailRule.constant(2)))
    assert regime.kind == "liminf_finite"
    assert regime.liminf == 2
    assert not regime.lim_infinite


def test_regime_periodic_with_inf_takes_finite_liminf():
    regime = classify_regime(_spec([], TailRule.periodic([INF, 3])))
    assert regime.kind == "liminf_finite"
    assert regime.liminf == 3


def test_regime_affine_is_lim_infinite():
    regime = classify_regime(SUCCESSOR)
    assert regime.kind == "lim_infinite"
    assert regime.compactable


def test_regime_infinity_tail():
    regime = classify_regime(GROWING)
    assert regime.kind == "lim_infinite"
    assert not regime.compactable
    assert regime.liminf is INF


def test_regime_mixed():
    spec = _spec([], TailRule.interleave([TailRule.affine(1, 1), TailRule.infinity()]))
    regime = classify_regime(spec)
    assert regime.kind == "mixed_compactable"
    assert regime.infinite_often


def test_finite_support_set():
    spec = _spec([1, INF], TailRule.interleave([TailRule.affine(1, 1), TailRule.infinity()]))
    assert finite_support_set(spec, 5) == [0, 2, 4]


def test_constant_medf_clips_small_coordinates():
    spec = _spec([1, 5], TailRule.constant(3))
    family = constant_medf(spec)
    assert [c.value for c in family] == [0, 1, 2]
    assert family[2].prefix(4) == (0, 2, 2, 2)


def test_constant_medf_needs_finite_liminf():
    with pytest.raises(RegimeError):
        constant_medf(SUCCESSOR)


# ── Reindexing ─────────────────────────────────────────────────────────────────

def test_reindex_successor():
    seq = reindex_sequence(SUCCESSOR, 4)
    assert seq.entries == (0, 2, 14, 374)
    assert seq.range_set == frozenset({0, 2, 14, 374})


def test_reindex_entries_satisfy_growth_on_composite():
    seq = reindex_sequence(SUCCESSOR, 4)
    assert check_growth(reindexed_spec(seq), 3).passed


def test_reindex_restricted_to_finite_skips_infinite_coordinates():
    spec = _spec([], TailRule.interleave([TailRule.affine(1, 1), TailRule.infinity()]))
    restricted = reindex_sequence(spec, 4, restrict_to_finite=True)
    assert restricted.entries == (0, 2, 14, 374)
    assert all(eval_bound(spec, e) is not INF for e in restricted.entries)
    unrestricted = reindex_sequence(spec, 2)
    assert unrestricted.entries == (0, 1)


def test_reindex_needs_lim_infinite():
    with pytest.raises(RegimeError):
        reindex_sequence(_spec([], TailRule.constant(4)), 2)


def test_reindex_restrict_needs_finite_often():
    with pytest.raises(RegimeError):
        reindex_sequence(GROWING, 2, restrict_to_finite=True)


def test_reindex_scan_bound():
    with pytest.raises(ScanBoundExceeded):
        reindex_sequence(SUCCESSOR, 4, scan_bound=100)


def test_reindex_within_matches_sequence():
    assert reindex_within(SUCCESSOR, 15).entries == (0, 2, 14)
    assert reindex_within(SUCCESSOR, 14).entries == (0, 2)


def test_reindex_zero_count_still_checks_regime():
    assert reindex_sequence(SUCCESSOR, 0).entries == ()
    with pytest.raises(RegimeError):
        reindex_sequence(_spec([], TailRule.constant(4)), 0)


def _direct_sum(spec: BoundSpec, entries: tuple[int, ...], m: int) -> int:
    total = 0
    for l in range(m + 1):
        product = 1
        for k in range(l):
            product *= eval_bound(spec, entries[k])
        total += product << l
    return total


def test_reindex_entries_are_least_by_direct_sums():
    seq = reindex_sequence(SUCCESSOR, 4)
    previous = -1
    for m, entry in enumerate(seq.entries):
        need = _direct_sum(SUCCESSOR, seq.entries, m)
        assert need <= eval_bound(SUCCESSOR, entry)
        assert all(need > eval_bound(SUCCESSOR, n) for n in range(previous + 1, entry))
        previous = entry
