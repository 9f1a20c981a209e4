"""construction.py — residue classes, goodness, marked sets, ⊲_g, e and ê on finite prefixes.

Everything here works on finite data: a context (g, c) of length N stands for
every infinite pair extending it, and each value returned is one that all
those extensions share.
"""
from __future__ import annotations

import itertools
import logging

from .bounds import eval_bound
from .coding import decode_pair, encode_pair, pair_level, prefix_codes
from .errors import CodecError
from .model import BitSeq, BoundSpec, ConstructionContext, FinSeq, MarkedSet, PairCode

logger = logging.getLogger(__name__)


# ── Residue classes and goodness ───────────────────────────────────────────────

def _residue(c: BitSeq) -> int:
    return sum(bit << i for i, bit in enumerate(c))


def residue_member(n: int, c: BitSeq) -> bool:
    """n ∈ I_c̄: the low len(c̄) binary digits of n spell c̄."""
    return n % (1 << len(c)) == _residue(c)


def _one_positions(c: BitSeq) -> list[int]:
    return [i for i, bit in enumerate(c) if bit == 1]


def is_good(c: BitSeq) -> bool:
    for n0, n1 in itertools.pairwise(_one_positions(c)):
        if not residue_member(n1, c[: n0 + 1]):
            return False
    return True


def good_prefixes(c: BitSeq) -> list[bool]:
    """[c↾n is good for n = 0..len(c)]; once False it stays False."""
    flags = [True] * (len(c) + 1)
    for n0, n1 in itertools.pairwise(_one_positions(c)):
        if not residue_member(n1, c[: n0 + 1]):
            for n in range(n1 + 1, len(c) + 1):
                flags[n] = False
            break
    return flags


# ── Marks ──────────────────────────────────────────────────────────────────────

def _marks(g: FinSeq, sources: list[bool], value_bound: int | None) -> dict[int, int]:
    """{2·#(g↾n): n < len(g), sources[n]} below value_bound, mapped to their source n."""
    bound = None if value_bound is None else (value_bound + 1) // 2
    out: dict[int, int] = {}
    for n, code in prefix_codes(g, bound):
        if n < len(g) and sources[n]:
            out[2 * code] = n
    return out


def e_value(spec: BoundSpec, g: FinSeq, c: BitSeq, n: int) -> int:
    """e(g, c)(n) = #_F(g↾n, c↾n)."""
    return encode_pair(spec, PairCode(g[:n], c[:n]))


def marked_set(ctx: ConstructionContext, value_bound: int | None = None) -> MarkedSet:
    """ν(g, c): marks 2·#(g↾n) with c(n) = 1, minus {n < N : g(n) = e(g, c)(n)}.

    value_bound limits the result to marks below it; without one every mark
    is computed, and marks are doubly exponential in N.
    """
    g, c = ctx.g, ctx.c
    marks = _marks(g, [bit == 1 for bit in c], value_bound)
    kept = set()
    for m in marks:
        if m < len(g) and g[m] == e_value(ctx.spec, g, c, m):
            continue
        kept.add(m)
    return frozenset(kept)


def marked_class(spec: BoundSpec, g: FinSeq, c: BitSeq, value_bound: int) -> set[int]:
    """I_g[c̄] ∩ [0, value_bound): marks 2·#(g↾n) for n < len(g) with n ∈ I_c̄."""
    sources = [residue_member(n, c) for n in range(len(g))]
    return set(_marks(g, sources, value_bound))


# ── Order ──────────────────────────────────────────────────────────────────────

def order_rel(spec: BoundSpec, g: FinSeq, n0: int, n1: int) -> bool:
    """n0 ⊲_g n1: length-correct decoded pairs at n0 < n1, nested componentwise."""
    if not (0 <= n0 < n1 < len(g)):
        return False
    if pair_level(spec, g[n0]) != n0 or pair_level(spec, g[n1]) != n1:
        return False
    p0 = decode_pair(spec, g[n0])
    p1 = decode_pair(spec, g[n1])
    return p1.h[:n0] == p0.h and p1.d[:n0] == p0.d


# ── e and ê ────────────────────────────────────────────────────────────────────

def e_prefix(ctx: ConstructionContext, upto: int) -> FinSeq:
    if upto > len(ctx):
        raise ValueError(f"upto {upto} exceeds context length {len(ctx)}")
    return tuple(e_value(ctx.spec, ctx.g, ctx.c, n) for n in range(upto))


def e_hat_prefix(ctx: ConstructionContext, upto: int) -> FinSeq:
    """ê(g, c)↾upto, read off the length-`upto` prefix of the context.

    ê(n) copies g(n) when n ∈ ν, no two points of ν ∩ n are ⊲_g-comparable and
    c↾n is good; otherwise it is e(n). Both switch-back conditions latch.
    """
    if upto > len(ctx):
        raise ValueError(f"upto {upto} exceeds context length {len(ctx)}")
    head = ctx.restrict(upto)
    g, c = head.g, head.c
    nu = marked_set(head, value_bound=upto)
    good = good_prefixes(c)
    seen: list[int] = []
    comparable = False
    out: list[int] = []
    for n in range(upto):
        if n in nu and not comparable and good[n]:
            out.append(g[n])
        else:
            out.append(e_value(ctx.spec, g, c, n))
        if n in nu:
            if not comparable:
                comparable = any(order_rel(ctx.spec, g, m, n) for m in seen)
            seen.append(n)
    return tuple(out)


# ── Recovery ───────────────────────────────────────────────────────────────────

def recover_context(spec: BoundSpec, f: FinSeq) -> ConstructionContext | None:
    """A context (g, c) of length len(f) with ê(g, c)↾len(f) = f, if one exists.

    The last odd coordinate m < len(f) is never marked, so f(m) = #_F(g↾m, c↾m)
    hands back g↾m and c↾m; at most one even coordinate follows it.
    """
    length = len(f)
    if any(not v < eval_bound(spec, n) for n, v in enumerate(f)):
        return None
    m = length - 1 if length % 2 == 0 else length - 2
    if m >= 1:
        base = decode_pair(spec, f[m])
        if base.level != m:
            return None
        g0, c0 = list(base.h), list(base.d)
    else:
        g0, c0 = [], []

    candidates: list[tuple[list[int], list[int]]] = []
    if length == 0:
        candidates.append(([], []))
    elif length - 1 == m:
        candidates.append((g0 + [0], c0 + [0]))
    else:
        p = length - 1
        fills: list[tuple[int, int] | None] = [None]
        if p >= 1:
            fills = []
            q = decode_pair(spec, f[p])
            if q.level == p and list(q.h[:m]) == g0 and list(q.d[:m]) == c0:
                fills.append((q.h[m], q.d[m]))
            # c(m) = 1 can mark the final coordinate (only when m = 1)
            fills.extend([(0, 0), (0, 1)])
        for fill, last_bit in itertools.product(fills, (0, 1)):
            g_head = g0 + ([fill[0]] if fill else [])
            c_head = c0 + ([fill[1]] if fill else [])
            candidates.append((g_head + [f[p]], c_head + [last_bit]))

    for g, c in candidates:
        ctx = ConstructionContext(spec, tuple(g), tuple(c))
        try:
            if e_hat_prefix(ctx, length) == tuple(f):
                return ctx
        except CodecError:
            continue
    return None
