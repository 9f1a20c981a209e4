"""oracle.py — brute-force verification suites.

Each suite enumerates every (g, c) context of a given length, or a seeded
random sample of them, recomputes what it checks by the most direct route
available and returns a VerifyReport. The operation under test is a keyword
argument so a perturbed version can be swapped in.

Coordinates with F(n) = ∞ are enumerated over range(value_budget).
"""
from __future__ import annotations

import itertools
import logging
import random
import time
from collections import defaultdict
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from functools import cached_property
from math import prod
from typing import Any

from .bounds import classify_regime, eval_bound, reindexed_spec
from .coding import (
    decode_pair,
    decode_seq,
    encode_pair,
    encode_seq,
    level_count,
    pair_level,
    verify_appropriate,
)
from .construction import e_hat_prefix, e_prefix, is_good, marked_set, residue_member
from .errors import BudgetExceeded
from .lift import build_lift_context, lift_member_prefix, lift_membership, restrict_to_E
from .model import (
    INF,
    BitSeq,
    BoundSpec,
    ConstructionContext,
    FinSeq,
    PairCode,
    TreeNode,
    VerifyReport,
)
from .tree import children, is_tree_node, level_set

logger = logging.getLogger(__name__)

DEFAULT_VALUE_BUDGET = 4
DEFAULT_ENUMERATION_BUDGET = 1_000_000
DEFAULT_CODE_LIMIT = 10_000
# sampled codes nest inside later codes; larger ones fall back to small values
MAX_SAMPLED_CODE_BITS = 256

SUITES = ("codec", "injectivity", "ad", "ed", "tree", "lift")

MarkedSetFn = Callable[[ConstructionContext], frozenset[int]]
EHatFn = Callable[[ConstructionContext, int], FinSeq]


# ── Context enumeration ────────────────────────────────────────────────────────

def _value_range(spec: BoundSpec, n: int, value_budget: int) -> range:
    bound = eval_bound(spec, n)
    return range(value_budget) if bound is INF else range(bound)  # type: ignore[arg-type]


def enumerate_contexts(
    spec: BoundSpec,
    length: int,
    value_budget: int = DEFAULT_VALUE_BUDGET,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
) -> list[ConstructionContext]:
    """Every context of the given length, g lexicographically first, then c."""
    ranges = [_value_range(spec, n, value_budget) for n in range(length)]
    total = prod(len(r) for r in ranges) << length
    if total > budget:
        raise BudgetExceeded(f"{total} contexts of length {length}, budget {budget}")
    return [
        ConstructionContext(spec, g, c)
        for g in itertools.product(*ranges)
        for c in itertools.product((0, 1), repeat=length)
    ]


def _random_good_bits(rng: random.Random, length: int) -> BitSeq:
    bits = [0] * length
    if length == 0:
        return ()
    p = rng.randrange(min(length, 3))
    bits[p] = 1
    while True:
        # the least position past p inside I_{c↾(p+1)} is the residue itself
        r = sum(b << i for i, b in enumerate(bits[: p + 1]))
        if r >= length or rng.random() < 0.3:
            return tuple(bits)
        bits[r] = 1
        p = r


def _random_value(rng: random.Random, spec: BoundSpec, g: list[int], c: BitSeq, value_budget: int) -> int:
    n = len(g)
    bound = eval_bound(spec, n)
    roll = rng.random()
    if roll < 0.3:
        code = encode_pair(spec, PairCode(tuple(g), c[:n]), strict=False)
        if code < bound and code.bit_length() <= MAX_SAMPLED_CODE_BITS:
            return code
    elif roll < 0.6 and n >= 1:
        # a code nesting over an earlier level-correct position makes ⊲_g pairs
        donors = [p for p in range(n) if pair_level(spec, g[p]) == p]
        if donors:
            base = decode_pair(spec, g[rng.choice(donors)])
            h = list(base.h) + [rng.choice(_value_range(spec, k, value_budget)) for k in range(base.level, n)]
            d = list(base.d) + [rng.randrange(2) for _ in range(base.level, n)]
            code = encode_pair(spec, PairCode(tuple(h), tuple(d)), strict=False)
            if code < bound and code.bit_length() <= MAX_SAMPLED_CODE_BITS:
                return code
    return rng.choice(_value_range(spec, n, value_budget))


def sample_contexts(
    spec: BoundSpec,
    length: int,
    count: int,
    seed: int,
    value_budget: int = DEFAULT_VALUE_BUDGET,
) -> list[ConstructionContext]:
    """`count` distinct contexts drawn with random.Random(seed); half have a good c."""
    rng = random.Random(seed)
    seen: set[tuple[FinSeq, BitSeq]] = set()
    out: list[ConstructionContext] = []
    attempts = 0
    while len(out) < count and attempts < 20 * count:
        attempts += 1
        if rng.random() < 0.5:
            c = _random_good_bits(rng, length)
        else:
            c = tuple(rng.randrange(2) for _ in range(length))
        g: list[int] = []
        for _ in range(length):
            g.append(_random_value(rng, spec, g, c, value_budget))
        key = (tuple(g), c)
        if key not in seen:
            seen.add(key)
            out.append(ConstructionContext(spec, *key))
    return out


@dataclass
class _Row:
    """One context with the values the suites read from it."""
    ctx: ConstructionContext
    marked_set_fn: MarkedSetFn = marked_set
    e_hat_fn: EHatFn = e_hat_prefix
    extra: dict[str, Any] = field(default_factory=dict)

    @cached_property
    def e(self) -> FinSeq:
        return e_prefix(self.ctx, len(self.ctx))

    @cached_property
    def e_hat(self) -> FinSeq:
        return self.e_hat_fn(self.ctx, len(self.ctx))

    @cached_property
    def nu(self) -> frozenset[int]:
        return self.marked_set_fn(self.ctx)

    @cached_property
    def good(self) -> bool:
        return is_good(self.ctx.c)

    def as_payload(self) -> dict[str, Any]:
        return {"g": list(self.ctx.g), "c": list(self.ctx.c)}


def _divergence(a: ConstructionContext, b: ConstructionContext) -> int:
    for n, (x, y) in enumerate(zip(zip(a.g, a.c), zip(b.g, b.c))):
        if x != y:
            return n
    return min(len(a), len(b))


def _first_one_from(c: BitSeq, start: int) -> int:
    return next((i for i in range(start, len(c)) if c[i] == 1), len(c))


def _contexts(
    spec: BoundSpec,
    horizon: int,
    value_budget: int,
    budget: int,
    sample_count: int | None,
    seed: int,
) -> list[ConstructionContext]:
    if sample_count is None:
        return enumerate_contexts(spec, horizon, value_budget, budget)
    return sample_contexts(spec, horizon, sample_count, seed, value_budget)


def _parameters(spec: BoundSpec, horizon: int, value_budget: int, sample_count: int | None,
                seed: int, **extra: Any) -> dict[str, Any]:
    params: dict[str, Any] = {"spec": spec.describe(), "horizon": horizon, "value_budget": value_budget}
    if sample_count is None:
        params["mode"] = "exhaustive"
    else:
        params.update(mode="random", samples=sample_count, seed=seed)
    params.update(extra)
    return params


def _finish(report: VerifyReport, started: float) -> VerifyReport:
    report.elapsed = time.perf_counter() - started
    logger.debug("suite %s: passed=%s counts=%s", report.suite, report.passed, report.counts)
    return report


# ── Almost disjointness ────────────────────────────────────────────────────────

def _brute_marks(ctx: ConstructionContext, e: FinSeq) -> frozenset[int]:
    out = set()
    for j, bit in enumerate(ctx.c):
        if bit != 1:
            continue
        m = 2 * encode_seq(ctx.g[:j])
        if m < len(ctx) and ctx.g[m] == e[m]:
            continue
        out.add(m)
    return frozenset(out)


def _mark_source(m: int) -> int:
    return len(decode_seq(m // 2))


def shared_ones_after_divergence(c0: BitSeq, c1: BitSeq) -> list[int]:
    """Positions j ≥ the first difference of c0 and c1 where both are 1.

    Two distinct good sequences of equal length share at most one.
    """
    d = next((i for i, (x, y) in enumerate(zip(c0, c1)) if x != y), min(len(c0), len(c1)))
    return [j for j in range(d, min(len(c0), len(c1))) if c0[j] == c1[j] == 1]


def verify_ad_suite(
    spec: BoundSpec,
    horizon: int,
    value_budget: int = DEFAULT_VALUE_BUDGET,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
    sample_count: int | None = None,
    seed: int = 0,
    marked_set_fn: MarkedSetFn = marked_set,
) -> VerifyReport:
    """ν sets and good-c one-position sets meet only below their divergence bound."""
    started = time.perf_counter()
    report = VerifyReport("ad", _parameters(spec, horizon, value_budget, sample_count, seed))
    rows = [_Row(ctx, marked_set_fn=marked_set_fn)
            for ctx in _contexts(spec, horizon, value_budget, budget, sample_count, seed)]
    report.bump("contexts", len(rows))

    for row in rows:
        nu = row.nu
        if any(m % 2 for m in nu) or nu != _brute_marks(row.ctx, row.e):
            report.fail(check="marked_set", context=row.as_payload(), got=sorted(nu),
                        expected=sorted(_brute_marks(row.ctx, row.e)))
            return _finish(report, started)
        if not row.good:
            continue
        report.bump("good")
        c = row.ctx.c
        ones = [j for j, bit in enumerate(c) if bit]
        for cut in range(1, len(c) + 1):
            bound = _first_one_from(c, cut - 1)
            late = [j for j in ones if j > bound and not residue_member(j, c[:cut])]
            if late:
                report.fail(check="residue_containment", context=row.as_payload(), cut=cut,
                            positions=late)
                return _finish(report, started)

    # a shared mark has one source j and one g↾j; only c decides the bound
    buckets: dict[int, dict[BitSeq, _Row]] = defaultdict(dict)
    for row in rows:
        if row.good:
            for m in row.nu:
                buckets[m].setdefault(row.ctx.c, row)
    for m in sorted(buckets):
        source = _mark_source(m)
        reps = list(buckets[m].values())
        for a, b in itertools.combinations(reps, 2):
            report.bump("pairs")
            d = _divergence(a.ctx, b.ctx)
            bound = max(_first_one_from(a.ctx.c, d), _first_one_from(b.ctx.c, d))
            if source > bound:
                report.fail(check="nu_intersection", mark=m, source=source, bound=bound,
                            contexts=[a.as_payload(), b.as_payload()])
                return _finish(report, started)

    good_cs = sorted({row.ctx.c for row in rows if row.good})
    for c0, c1 in itertools.combinations(good_cs, 2):
        shared = shared_ones_after_divergence(c0, c1)
        if len(shared) > 1:
            report.fail(check="good_ones", c=[list(c0), list(c1)], shared=shared)
            return _finish(report, started)
    report.bump("good_pairs", len(good_cs) * (len(good_cs) - 1) // 2)
    return _finish(report, started)


# ── Eventual difference ────────────────────────────────────────────────────────

def verify_ed_suite(
    spec: BoundSpec,
    horizon: int,
    value_budget: int = DEFAULT_VALUE_BUDGET,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
    sample_count: int | None = None,
    seed: int = 0,
    e_hat_fn: EHatFn = e_hat_prefix,
) -> VerifyReport:
    """Post-divergence agreements of ê sit on copied ν points, and two of them force reversion."""
    started = time.perf_counter()
    report = VerifyReport("ed", _parameters(spec, horizon, value_budget, sample_count, seed))
    rows = [_Row(ctx, e_hat_fn=e_hat_fn)
            for ctx in _contexts(spec, horizon, value_budget, budget, sample_count, seed)]
    report.bump("contexts", len(rows))

    for row in rows:
        nu = marked_set(row.ctx, value_bound=horizon)
        copies = [n for n in range(horizon) if row.e_hat[n] != row.e[n]]
        if any(n not in nu or row.e_hat[n] != row.ctx.g[n] for n in copies):
            report.fail(check="copy_outside_nu", context=row.as_payload(), copies=copies,
                        nu=sorted(nu))
            return _finish(report, started)
        row.extra["copies"] = copies

    # e-valued coordinates: equal values must come from equal prefixes
    for n in range(1, horizon):
        seen: dict[int, tuple[tuple[FinSeq, BitSeq], _Row]] = {}
        for row in rows:
            if row.e_hat[n] != row.e[n]:
                continue
            key = (row.ctx.g[:n], row.ctx.c[:n])
            prior = seen.setdefault(row.e_hat[n], (key, row))
            if prior[0] != key:
                report.fail(check="agreement_outside_nu", position=n, value=row.e_hat[n],
                            contexts=[prior[1].as_payload(), row.as_payload()])
                return _finish(report, started)
        report.bump("positions")

    for row in rows:
        g, c = row.ctx.g, row.ctx.c
        for n0, n1 in itertools.combinations(row.extra["copies"], 2):
            if pair_level(spec, g[n0]) != n0 or pair_level(spec, g[n1]) != n1:
                continue
            p0, p1 = decode_pair(spec, g[n0]), decode_pair(spec, g[n1])
            if p1.h[:n0] != p0.h or p1.d[:n0] != p0.d:
                continue
            # some context with prefix p1 diverges from this one before n0
            if (g[:n0], c[:n0]) == (p0.h, p0.d):
                continue
            report.bump("structural")
            late = [m for m in range(n1 + 1, horizon) if row.e_hat[m] != row.e[m]]
            if late:
                report.fail(check="no_reversion", context=row.as_payload(), points=[n0, n1],
                            copies_after=late)
                return _finish(report, started)
    return _finish(report, started)


# ── Tree soundness ─────────────────────────────────────────────────────────────

def verify_tree_suite(
    spec: BoundSpec,
    horizon: int,
    value_budget: int = DEFAULT_VALUE_BUDGET,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
    sample_count: int | None = None,
    seed: int = 0,
    is_tree_node_fn: Callable[[TreeNode], bool] = is_tree_node,
) -> VerifyReport:
    """P_N ⊆ T_N, with |P_N|, |T_N| and the extendable share of T_N ∖ P_N."""
    started = time.perf_counter()
    report = VerifyReport("tree", _parameters(spec, horizon, value_budget, sample_count, seed))
    prefixes = sorted({
        e_hat_prefix(ctx, horizon)
        for ctx in _contexts(spec, horizon, value_budget, budget, sample_count, seed)
    })
    report.bump("p_n", len(prefixes))
    for f in prefixes:
        if not is_tree_node_fn(TreeNode(f, spec)):
            report.fail(check="prefix_not_node", f=list(f))
            return _finish(report, started)
    if horizon >= 2 and len(prefixes) < 2:
        report.fail(check="branch_count", p_n=len(prefixes))
        return _finish(report, started)

    if sample_count is None:
        nodes = level_set(spec, horizon, value_budget, budget)
        report.bump("t_n", len(nodes))
        known = set(prefixes)
        extra = [f for f in nodes if f not in known]
        # the full range on a finite next coordinate, the value budget on an infinite one
        step = value_budget if eval_bound(spec, horizon) is INF else None
        extendable = sum(1 for f in extra if children(TreeNode(f, spec), step))
        report.bump("t_n_minus_p_n", len(extra))
        report.bump("extendable", extendable)
    return _finish(report, started)


# ── Lift ───────────────────────────────────────────────────────────────────────

LiftFn = Callable[..., FinSeq]


def verify_lift_suite(
    spec: BoundSpec,
    horizon: int,
    depth: int = 3,
    compact_mode: bool = False,
    value_budget: int = DEFAULT_VALUE_BUDGET,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
    lift_fn: LiftFn = lift_member_prefix,
) -> VerifyReport:
    """Lift every depth-`depth` member of the family on F∘e and check what the lift promises."""
    started = time.perf_counter()
    ctx = build_lift_context(spec, horizon, compact_mode)
    entries = ctx.entries
    depth = min(depth, len(entries))
    upto = entries[depth] if depth < len(entries) else horizon
    report = VerifyReport("lift", {
        "spec": spec.describe(), "horizon": horizon, "depth": depth, "upto": upto,
        "compact": compact_mode, "entries": list(entries), "value_budget": value_budget,
    })
    members = level_set(reindexed_spec(ctx.reindex), depth, value_budget, budget)
    report.bump("members", len(members))
    on_E = ctx.reindex.range_set

    lifted: list[FinSeq] = []
    for f in members:
        g = lift_fn(ctx, f, upto)
        lifted.append(g)
        if restrict_to_E(ctx, g) != f or not lift_membership(ctx, g):
            report.fail(check="round_trip", f=list(f), lifted=list(g))
            return _finish(report, started)
        for n, v in enumerate(g):
            if not v < eval_bound(spec, n):
                report.fail(check="range", f=list(f), position=n, value=v)
                return _finish(report, started)
            if n in on_E:
                continue
            below = sum(1 for e in entries if e < n)
            allowed = {encode_seq(f[:j]) for j in range(below + 1)}
            if compact_mode and (not entries or n < entries[0]):
                allowed = {0}
            if v not in allowed:
                report.fail(check="off_E_value", f=list(f), position=n, value=v,
                            allowed=sorted(allowed))
                return _finish(report, started)
    if compact_mode and any(eval_bound(spec, e) is INF for e in entries):
        report.fail(check="compact_entries", entries=list(entries))
        return _finish(report, started)

    for (f0, g0), (f1, g1) in itertools.combinations(zip(members, lifted), 2):
        report.bump("pairs")
        k = next(i for i, (a, b) in enumerate(zip(f0, f1)) if a != b)
        for n in range(entries[k] + 1, upto):
            if n not in on_E and g0[n] == g1[n] and len(decode_seq(g0[n])) > k:
                report.fail(check="lifted_agreement", members=[list(f0), list(f1)], position=n)
                return _finish(report, started)
    return _finish(report, started)


# ── Codec and injectivity ──────────────────────────────────────────────────────

def _appropriate_bound(spec: BoundSpec, budget: int) -> int:
    """Last level of the longest run of finitely counted levels that fits the budget."""
    total, l = 0, 0
    while True:
        count = level_count(spec, l)
        if count is INF or total + count > budget:  # type: ignore[operator]
            return max(l - 1, 0)
        total += count  # type: ignore[operator]
        l += 1


def verify_codec_suite(
    spec: BoundSpec,
    code_limit: int = DEFAULT_CODE_LIMIT,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
) -> VerifyReport:
    """Round trips through both codecs on 0..code_limit-1, then appropriateness."""
    started = time.perf_counter()
    level_bound = _appropriate_bound(spec, budget)
    report = VerifyReport("codec", {"spec": spec.describe(), "code_limit": code_limit,
                                    "level_bound": level_bound})
    for code in range(code_limit):
        if encode_seq(decode_seq(code)) != code:
            report.fail(check="seq_round_trip", code=code)
            return _finish(report, started)
        p = decode_pair(spec, code)
        if pair_level(spec, code) != p.level or encode_pair(spec, p, strict=False) != code:
            report.fail(check="pair_round_trip", code=code, h=list(p.h), d=list(p.d))
            return _finish(report, started)
    report.bump("codes", code_limit)
    appropriate = verify_appropriate(spec, level_bound, budget)
    report.bump("pairs", appropriate.checked)
    if not appropriate.passed:
        report.fail(check="appropriate", **(appropriate.witness or {}))
    return _finish(report, started)


def verify_injectivity_suite(
    spec: BoundSpec,
    horizon: int,
    value_budget: int = DEFAULT_VALUE_BUDGET,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
    sample_count: int | None = None,
    seed: int = 0,
) -> VerifyReport:
    """e(g0, c0)(n) = e(g1, c1)(n) only when the contexts agree below n."""
    started = time.perf_counter()
    report = VerifyReport("injectivity", _parameters(spec, horizon, value_budget, sample_count, seed))
    rows = [_Row(ctx) for ctx in _contexts(spec, horizon, value_budget, budget, sample_count, seed)]
    report.bump("contexts", len(rows))
    for n in range(horizon):
        seen: dict[int, tuple[FinSeq, BitSeq]] = {}
        for row in rows:
            key = (row.ctx.g[:n], row.ctx.c[:n])
            prior = seen.setdefault(row.e[n], key)
            if prior != key:
                report.fail(check="collision", position=n, value=row.e[n],
                            prefixes=[[list(prior[0]), list(prior[1])], [list(key[0]), list(key[1])]])
                return _finish(report, started)
        report.bump("values", len(seen))
    return _finish(report, started)


# ── All suites ─────────────────────────────────────────────────────────────────

def verify_all(
    spec: BoundSpec,
    horizon: int,
    value_budget: int = DEFAULT_VALUE_BUDGET,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
    sample_count: int | None = None,
    seed: int = 0,
    lift_horizon: int | None = None,
    suites: Iterable[str] = SUITES,
) -> list[VerifyReport]:
    """Run the named suites in a fixed order. lift runs only when lim F = ∞."""
    common = dict(value_budget=value_budget, budget=budget, sample_count=sample_count, seed=seed)
    reports: list[VerifyReport] = []
    wanted = set(suites)
    for name in SUITES:
        if name not in wanted:
            continue
        if name == "codec":
            reports.append(verify_codec_suite(spec, budget=budget))
        elif name == "injectivity":
            reports.append(verify_injectivity_suite(spec, horizon, **common))
        elif name == "ad":
            reports.append(verify_ad_suite(spec, horizon, **common))
        elif name == "ed":
            reports.append(verify_ed_suite(spec, horizon, **common))
        elif name == "tree":
            reports.append(verify_tree_suite(spec, horizon, **common))
        elif name == "lift":
            regime = classify_regime(spec)
            if not regime.lim_infinite:
                logger.info("lift suite skipped: liminf F = %s", regime.liminf)
                continue
            reports.append(verify_lift_suite(
                spec, lift_horizon or horizon,
                compact_mode=regime.kind == "mixed_compactable",
                value_budget=value_budget, budget=budget,
            ))
    return reports
