"""bounds.py — bound functions F, the growth condition, regimes and the reindex sequence.

F is given by a finite prefix plus a tail rule (see model.TailRule), which
keeps liminf F and lim F decidable. Every count here is an unbounded int or
INF; nothing is ever converted to a float.
"""
from __future__ import annotations

import logging
from collections.abc import Iterator
from dataclasses import dataclass

from .errors import BoundSpecError, RegimeError, ScanBoundExceeded
from .model import (
    INF,
    BoundSpec,
    ConstantFunction,
    ExtNat,
    GrowthReport,
    Regime,
    ReindexSeq,
    TailRule,
    ext_add,
    ext_mul,
)

logger = logging.getLogger(__name__)

DEFAULT_SCAN_BOUND = 1_000_000


# ── Evaluation ─────────────────────────────────────────────────────────────────

def _eval_tail(tail: TailRule, n: int) -> ExtNat:
    kind = tail.kind
    if kind == "constant":
        return tail.value  # type: ignore[return-value]
    if kind == "infinity":
        return INF
    if kind == "affine":
        return tail.a * n + tail.b
    if kind == "periodic":
        return tail.pattern[n % len(tail.pattern)]
    if kind == "interleave":
        return _eval_tail(tail.rules[n % len(tail.rules)], n)
    raise BoundSpecError(f"unsupported tail rule {kind!r}")


def eval_bound(spec: BoundSpec, n: int) -> ExtNat:
    """F(n): the prefix value when n is inside the prefix, the tail rule otherwise."""
    if n < len(spec.prefix):
        return spec.prefix[n]
    return _eval_tail(spec.tail, n)


def level_counts(spec: BoundSpec, up_to: int) -> list[ExtNat]:
    """[|∏_{k<l} F(k)| · 2^l for l = 0..up_to]."""
    counts: list[ExtNat] = []
    product: ExtNat = 1
    for l in range(up_to + 1):
        counts.append(ext_mul(product, 1 << l))
        product = ext_mul(product, eval_bound(spec, l))
    return counts


# ── Growth condition ───────────────────────────────────────────────────────────

def check_growth(spec: BoundSpec, up_to: int) -> GrowthReport:
    """Check Σ_{l≤n} |∏_{k<l} F(k)|·2^l ≤ F(n) for every n ≤ up_to."""
    total: ExtNat = 0
    sums: list[ExtNat] = []
    for n, count in enumerate(level_counts(spec, up_to)):
        total = ext_add(total, count)
        sums.append(total)
        if not total <= eval_bound(spec, n):
            logger.debug("growth fails at n=%d for %s", n, spec.describe())
            return GrowthReport(passed=False, up_to=up_to, first_failure=n, sums=tuple(sums))
    return GrowthReport(passed=True, up_to=up_to, sums=tuple(sums))


# ── Regimes ────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class _TailShape:
    liminf: ExtNat
    finite_often: bool
    infinite_often: bool


def _shape(tail: TailRule) -> _TailShape:
    kind = tail.kind
    if kind == "constant":
        k = tail.value
        return _TailShape(k, k is not INF, k is INF)  # type: ignore[arg-type]
    if kind == "infinity":
        return _TailShape(INF, False, True)
    if kind == "affine":
        if tail.a >= 1:
            return _TailShape(INF, True, False)
        return _TailShape(tail.b, True, False)
    if kind == "periodic":
        return _TailShape(
            min(tail.pattern),
            any(v is not INF for v in tail.pattern),
            any(v is INF for v in tail.pattern),
        )
    if kind == "interleave":
        # each component rule owns an infinite residue class
        parts = [_shape(r) for r in tail.rules]
        return _TailShape(
            min(p.liminf for p in parts),
            any(p.finite_often for p in parts),
            any(p.infinite_often for p in parts),
        )
    raise BoundSpecError(f"unsupported tail rule {kind!r}")


def classify_regime(spec: BoundSpec) -> Regime:
    """Decide which side of the trichotomy F falls on.

    liminf_finite(m)   some m < ∞ recurs as the liminf: finite medf of constants
    lim_infinite       lim F = ∞ and F is not both finite and infinite infinitely often
    mixed_compactable  lim F = ∞, F finite infinitely often and ∞ infinitely often
    """
    shape = _shape(spec.tail)
    if shape.liminf is not INF:
        return Regime("liminf_finite", shape.liminf, compactable=True,
                      infinite_often=shape.infinite_often)
    if shape.finite_often and shape.infinite_often:
        return Regime("mixed_compactable", INF, compactable=True, infinite_often=True)
    return Regime("lim_infinite", INF, compactable=shape.finite_often,
                  infinite_often=shape.infinite_often)


def finite_support_set(spec: BoundSpec, up_to: int) -> list[int]:
    """D ∩ [0, up_to] where D = {n : F(n) < ∞}."""
    return [n for n in range(up_to + 1) if eval_bound(spec, n) is not INF]


def constant_medf(spec: BoundSpec) -> list[ConstantFunction]:
    regime = classify_regime(spec)
    if regime.kind != "liminf_finite":
        raise RegimeError(f"constant medf needs liminf F < ∞, got {regime.kind}")
    return [ConstantFunction(k, spec) for k in range(regime.liminf)]  # type: ignore[arg-type]


# ── Reindexing ─────────────────────────────────────────────────────────────────

def _check_reindex_regime(spec: BoundSpec, restrict_to_finite: bool) -> Regime:
    regime = classify_regime(spec)
    if not regime.lim_infinite:
        raise RegimeError(f"reindexing needs lim F = ∞, got liminf {regime.liminf}")
    if restrict_to_finite and not regime.compactable:
        raise RegimeError("restrict_to_finite needs F(n) < ∞ for infinitely many n")
    return regime


def _iter_reindex(spec: BoundSpec, restrict_to_finite: bool, limit: int) -> Iterator[int]:
    """Yield e_0 < e_1 < … below `limit`, each the least admissible coordinate."""
    regime = _check_reindex_regime(spec, restrict_to_finite)
    needed: ExtNat = 1           # Σ_{l≤m} |∏_{k<l} F(e_k)|·2^l
    product: ExtNat = 1          # ∏_{k<m} F(e_k)
    m = 0
    n = 0
    while n < limit:
        value = eval_bound(spec, n)
        if restrict_to_finite and value is INF:
            n += 1
            continue
        if needed is INF and not regime.infinite_often and n >= len(spec.prefix):
            raise RegimeError(
                "an earlier entry has F = ∞ but F takes ∞ only finitely often; "
                "use restrict_to_finite"
            )
        if needed <= value:
            yield n
            product = ext_mul(product, value)
            m += 1
            needed = ext_add(needed, ext_mul(product, 1 << m))
        n += 1


def reindex_sequence(
    spec: BoundSpec,
    count: int,
    restrict_to_finite: bool = False,
    scan_bound: int = DEFAULT_SCAN_BOUND,
) -> ReindexSeq:
    """The first `count` entries of the minimal-choice sequence ⟨e_m⟩."""
    entries: list[int] = []
    if count > 0:
        for e in _iter_reindex(spec, restrict_to_finite, scan_bound + 1):
            entries.append(e)
            if len(entries) == count:
                break
        else:
            raise ScanBoundExceeded(
                f"only {len(entries)} of {count} entries found below {scan_bound}"
            )
    else:
        _check_reindex_regime(spec, restrict_to_finite)
    return ReindexSeq(tuple(entries), spec, restrict_to_finite)


def reindex_within(spec: BoundSpec, horizon: int, restrict_to_finite: bool = False) -> ReindexSeq:
    """Every entry of E below `horizon` (exact: no coordinate below it is skipped)."""
    entries = tuple(_iter_reindex(spec, restrict_to_finite, horizon))
    return ReindexSeq(entries, spec, restrict_to_finite)


def reindexed_spec(reindex: ReindexSeq) -> BoundSpec:
    """F∘e, exact on the first len(reindex) coordinates.

    Past the known entries the tail is ∞; every check made through this spec
    only reads levels up to len(reindex).
    """
    prefix = tuple(eval_bound(reindex.source, e) for e in reindex.entries)
    return BoundSpec(prefix, TailRule.infinity())
