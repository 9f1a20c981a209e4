"""lift.py — carrying the family from ∏_{n∈E} F(n) to all of ∏_n F(n).

A member f of the family built on F∘e is lifted to ĝ(f): ĝ(f)(e_k) = f(k), and
at n ∉ E, ĝ(f)(n) is #((f↾m)∘e) for the largest m ≤ n whose code is below F(n).
(f↾m)∘e reads f at the entries of E below m, in e-order.

In compact mode E is drawn from the finite-support set D and ĝ(f) is 0 below e_0.
"""
from __future__ import annotations

import bisect
import logging

from .bounds import classify_regime, eval_bound, reindex_within, reindexed_spec
from .coding import encode_seq
from .errors import PreconditionError, RegimeError
from .model import BoundSpec, FinSeq, LiftContext, TreeNode
from .tree import is_tree_node

logger = logging.getLogger(__name__)


def build_lift_context(spec: BoundSpec, horizon: int, compact_mode: bool = False) -> LiftContext:
    """E ∩ [0, horizon) with the matching reindex mode."""
    reindex = reindex_within(spec, horizon, restrict_to_finite=compact_mode)
    logger.debug("lift context for %s: E below %d = %s", spec.describe(), horizon, reindex.entries)
    return LiftContext(spec, reindex, compact_mode, horizon)


def _covering(ctx: LiftContext, length: int) -> LiftContext:
    if length <= ctx.horizon:
        return ctx
    return build_lift_context(ctx.spec, length, ctx.compact_mode)


def _count_below(ctx: LiftContext, m: int) -> int:
    """|E ∩ [0, m)|."""
    return bisect.bisect_left(ctx.entries, m)


def restrict_to_E(ctx: LiftContext, g: FinSeq) -> FinSeq:
    """⟨g(e_0), g(e_1), …⟩ over the entries e_k < len(g)."""
    return tuple(g[e] for e in ctx.entries if e < len(g))


def lift_value(ctx: LiftContext, f_on_E: FinSeq, n: int) -> int:
    """ĝ(f)(n), with no check that f_on_E belongs to the family."""
    if n >= ctx.horizon:
        raise PreconditionError(f"coordinate {n} is past the context horizon {ctx.horizon}")
    entries = ctx.entries
    k = _count_below(ctx, n)
    if k < len(entries) and entries[k] == n:
        if k >= len(f_on_E):
            raise PreconditionError(f"f is not defined at e_{k} = {n}")
        return f_on_E[k]
    if ctx.compact_mode and (not entries or n < entries[0]):
        return 0
    if k > len(f_on_E):
        raise PreconditionError(f"f has {len(f_on_E)} entries, coordinate {n} needs {k}")
    bound = eval_bound(ctx.spec, n)
    for m in range(n, -1, -1):
        code = encode_seq(f_on_E[: _count_below(ctx, m)])
        if code < bound:
            return code
    # m = 0 gives #∅ = 0 < F(n)
    raise AssertionError("unreachable")


def lift_member_prefix(ctx: LiftContext, f_on_E: FinSeq, upto: int) -> FinSeq:
    """ĝ(f)↾upto for a family member f on F∘e."""
    ctx = _covering(ctx, upto)
    needed = _count_below(ctx, upto)
    if len(f_on_E) < needed:
        raise PreconditionError(f"f has {len(f_on_E)} entries, ĝ↾{upto} needs {needed}")
    head = f_on_E[:needed]
    if not is_tree_node(TreeNode(head, reindexed_spec(ctx.reindex))):
        raise PreconditionError(f"{head} is not a family prefix on F∘e")
    return tuple(lift_value(ctx, head, n) for n in range(upto))


def lift_membership(ctx: LiftContext, g: FinSeq) -> bool:
    ctx = _covering(ctx, len(g))
    for n, v in enumerate(g):
        if not (isinstance(v, int) and 0 <= v) or not v < eval_bound(ctx.spec, n):
            return False
    f_on_E = restrict_to_E(ctx, g)
    # T is closed under initial segments: the whole restriction covers every g↾n
    if not is_tree_node(TreeNode(f_on_E, reindexed_spec(ctx.reindex))):
        return False
    members = ctx.reindex.range_set
    return all(g[n] == lift_value(ctx, f_on_E, n) for n in range(len(g)) if n not in members)


# ── Diagonalization ────────────────────────────────────────────────────────────

def diagonal_start(spec: BoundSpec, k: int, horizon: int) -> int:
    """Least n0 < horizon with F(n) > k for every n0 ≤ n < horizon."""
    n0 = horizon
    while n0 > 0 and eval_bound(spec, n0 - 1) > k:
        n0 -= 1
    if n0 == horizon and horizon > 0:
        raise PreconditionError(f"F({horizon - 1}) ≤ {k}: horizon {horizon} is too small")
    return n0


def diagonalize(spec: BoundSpec, members: list[FinSeq], horizon: int) -> FinSeq:
    """g↾horizon differing from every member at each n ≥ n0.

    g(n) is the least value no member takes at n; before n0 it is 0.
    """
    regime = classify_regime(spec)
    if not regime.lim_infinite:
        raise RegimeError(f"diagonalization needs lim F = ∞, got liminf {regime.liminf}")
    n0 = diagonal_start(spec, len(members), horizon)
    out: list[int] = []
    for n in range(horizon):
        if n < n0:
            out.append(0)
            continue
        taken = {m[n] for m in members if n < len(m)}
        v = 0
        while v in taken:
            v += 1
        out.append(v)
    logger.debug("diagonalized %d members from n0=%d", len(members), n0)
    return tuple(out)
