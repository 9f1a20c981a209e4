"""Tests for lifting the family from F∘e to F, and for diagonalization."""
from __future__ import annotations

import pytest

from medf_toolkit.bounds import eval_bound
from medf_toolkit.construction import e_hat_prefix
from medf_toolkit.errors import PreconditionError, RegimeError
from medf_toolkit.lift import (
    build_lift_context,
    diagonal_start,
    diagonalize,
    lift_member_prefix,
    lift_membership,
    lift_value,
    restrict_to_E,
)
from medf_toolkit.model import INF, BoundSpec, TailRule
from medf_toolkit.oracle import enumerate_contexts

SUCCESSOR = BoundSpec((), TailRule.affine(1, 1))
GROWING = BoundSpec((2, 5, 45), TailRule.infinity())
# F = ∞, ∞, 3, ∞, 5, ∞, 7, …
GAPPED = BoundSpec((INF,), TailRule.interleave([TailRule.affine(1, 1), TailRule.infinity()]))


# ── Context ────────────────────────────────────────────────────────────────────

def test_context_entries():
    assert build_lift_context(SUCCESSOR, 15).entries == (0, 2, 14)
    assert build_lift_context(GROWING, 6).entries == (0, 1, 2, 3, 4, 5)


def test_compact_context_skips_infinite_coordinates():
    ctx = build_lift_context(GAPPED, 10, compact_mode=True)
    assert ctx.entries == (2, 6)
    assert all(eval_bound(GAPPED, e) is not INF for e in ctx.entries)


def test_restrict_to_E():
    ctx = build_lift_context(SUCCESSOR, 15)
    assert restrict_to_E(ctx, (5, 6, 7, 8)) == (5, 7)


# ── Lifted values ──────────────────────────────────────────────────────────────

def test_lift_value_on_E_copies_f():
    ctx = build_lift_context(SUCCESSOR, 15)
    assert lift_value(ctx, (0, 1), 0) == 0
    assert lift_value(ctx, (0, 1), 2) == 1


def test_lift_value_off_E():
    ctx = build_lift_context(SUCCESSOR, 15)
    # #((0)) = 1 < F(1) = 2
    assert lift_value(ctx, (0, 1), 1) == 1
    # #((0, 0)) = 2 < F(3) = 4, though (0, 0) is not a family member
    assert lift_value(ctx, (0, 0), 3) == 2
    # #((0, 1)) = 5 ≥ F(3) = 4 falls back to #((0)) = 1
    assert lift_value(ctx, (0, 1), 3) == 1


def test_lift_value_past_horizon():
    ctx = build_lift_context(SUCCESSOR, 3)
    with pytest.raises(PreconditionError):
        lift_value(ctx, (0, 1), 3)


def test_lift_member_prefix():
    ctx = build_lift_context(SUCCESSOR, 15)
    assert lift_member_prefix(ctx, (0, 1), 3) == (0, 1, 1)


def test_lift_member_prefix_extends_horizon():
    ctx = build_lift_context(SUCCESSOR, 3)
    g = lift_member_prefix(ctx, (0, 1, 0), 15)
    assert len(g) == 15
    assert (g[0], g[2], g[14]) == (0, 1, 0)
    assert all(v < eval_bound(SUCCESSOR, n) for n, v in enumerate(g))


def test_lift_member_prefix_rejects_non_member():
    ctx = build_lift_context(SUCCESSOR, 15)
    with pytest.raises(PreconditionError):
        lift_member_prefix(ctx, (0, 0), 3)


def test_lift_member_prefix_rejects_short_f():
    ctx = build_lift_context(SUCCESSOR, 15)
    with pytest.raises(PreconditionError):
        lift_member_prefix(ctx, (0,), 3)


def test_compact_lift_is_zero_below_first_entry():
    ctx = build_lift_context(GAPPED, 10, compact_mode=True)
    assert lift_member_prefix(ctx, (0,), 6) == (0, 0, 0, 1, 1, 1)


# ── Membership ─────────────────────────────────────────────────────────────────

def test_lift_membership_round_trip():
    ctx = build_lift_context(SUCCESSOR, 15)
    g = lift_member_prefix(ctx, (0, 1), 3)
    assert lift_membership(ctx, g)


def test_lift_membership_rejects_perturbation():
    ctx = build_lift_context(SUCCESSOR, 15)
    assert not lift_membership(ctx, (0, 0, 1))
    assert not lift_membership(ctx, (0, 1, 3))
    assert not lift_membership(ctx, (0, 2, 1))


def test_lift_membership_trivial_reindex():
    # every coordinate is in E, so membership is tree membership
    ctx = build_lift_context(GROWING, 3)
    for c in enumerate_contexts(GROWING, 3)[::97]:
        assert lift_membership(ctx, e_hat_prefix(c, 3))


def test_lift_keeps_agreement_with_functions_on_E():
    ctx = build_lift_context(SUCCESSOR, 16)
    f = (0, 1, 0)
    g = lift_member_prefix(ctx, f, 16)
    # h agrees with f at e_0 and e_2 and differs everywhere else
    h = tuple(
        f[ctx.entries.index(n)] if n in (0, 14) else (g[n] + 1) % eval_bound(SUCCESSOR, n)
        for n in range(16)
    )
    assert [n for n in range(16) if g[n] == h[n]] == [0, 14]


def test_lift_agreements_of_members_follow_E():
    ctx = build_lift_context(SUCCESSOR, 16)
    f0, f1 = (0, 1, 0), (0, 2, 0)
    g0, g1 = lift_member_prefix(ctx, f0, 16), lift_member_prefix(ctx, f1, 16)
    on_E = [i for i, (a, b) in enumerate(zip(f0, f1)) if a == b]
    assert all(g0[ctx.entries[i]] == g1[ctx.entries[i]] for i in on_E)


# ── Diagonalization ────────────────────────────────────────────────────────────

def test_diagonal_start():
    assert diagonal_start(SUCCESSOR, 2, 5) == 2
    assert diagonal_start(SUCCESSOR, 0, 5) == 0


def test_diagonal_start_horizon_too_small():
    with pytest.raises(PreconditionError):
        diagonal_start(SUCCESSOR, 5, 3)


def test_diagonalize_differs_from_every_member():
    members = [(0, 0, 0, 0, 0), (1, 1, 1, 1, 1)]
    g = diagonalize(SUCCESSOR, members, 5)
    assert g == (0, 0, 2, 2, 2)
    for m in members:
        assert all(g[n] != m[n] for n in range(2, 5))


def test_diagonalize_stays_in_range():
    members = [tuple(min(k, n) for n in range(12)) for k in range(4)]
    g = diagonalize(SUCCESSOR, members, 12)
    assert all(v < eval_bound(SUCCESSOR, n) for n, v in enumerate(g))
    n0 = diagonal_start(SUCCESSOR, 4, 12)
    assert all(g[n] not in {m[n] for m in members} for n in range(n0, 12))


def test_diagonalize_needs_lim_infinite():
    with pytest.raises(RegimeError):
        diagonalize(BoundSpec((), TailRule.constant(3)), [(0, 0)], 2)
