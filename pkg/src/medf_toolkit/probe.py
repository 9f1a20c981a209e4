"""probe.py — looking for a family member that agrees often with a given g.

Every search is bounded by len(g): a marked value is only usable as a
position when it falls below len(g), and the "for all n1" quantifiers range
over what is visible there. Outcomes are therefore three-valued.
"""
from __future__ import annotations

import itertools
import logging
import math
import random
from collections.abc import Iterator
from typing import Any, Literal

from .bounds import classify_regime, eval_bound
from .coding import decode_pair, encode_pair
from .construction import (
    e_hat_prefix,
    is_good,
    marked_class,
    marked_set,
    order_rel,
    recover_context,
    residue_member,
)
from .model import (
    INF,
    AgreementSurvey,
    BitSeq,
    BoundSpec,
    Case1,
    Case2,
    ConstructionContext,
    FinSeq,
    Inconclusive,
    Match,
    PairCode,
    ProbeOutcome,
)

logger = logging.getLogger(__name__)

Strategy = Literal["literal", "direct"]


def _extend_stem(stem: BitSeq, n0: int) -> BitSeq:
    """stem⌢0^(n0 − len(stem))⌢1."""
    return stem + (0,) * (n0 - len(stem)) + (1,)


def _successors(spec: BoundSpec, g: FinSeq, n0: int, stem: BitSeq) -> Iterator[int]:
    """n1 ∈ I_g[stem], below len(g), with n0 ⊲_g n1, in increasing order."""
    for n1 in sorted(marked_class(spec, g, stem, len(g))):
        if order_rel(spec, g, n0, n1):
            yield n1


def _stems(max_stem: int) -> Iterator[BitSeq]:
    """C: the empty stem and every stem ending in 1, shortest first."""
    yield ()
    for length in range(1, max_stem + 1):
        for head in itertools.product((0, 1), repeat=length - 1):
            yield head + (1,)


# ── Case 1 ─────────────────────────────────────────────────────────────────────

def _stem_status(
    spec: BoundSpec, g: FinSeq, stem: BitSeq, diagnostics: dict[str, int]
) -> Literal["holds", "refuted", "open"]:
    """Three-valued reading of the Case 1 body for one stem.

    A point whose first conjunct fails refutes the stem. A point with no
    visible successor below len(g) is undetermined, not a refutation.
    """
    checked = 0
    for n0 in sorted(marked_class(spec, g, stem, len(g))):
        if n0 < len(stem):
            diagnostics["skipped"] += 1
            continue
        c1 = _extend_stem(stem, n0)
        if g[n0] == encode_pair(spec, PairCode(g[:n0], c1[:n0]), strict=False):
            return "refuted"
        checked += 1
        if next(_successors(spec, g, n0, c1), None) is None:
            diagnostics["undetermined"] += 1
    return "holds" if checked else "open"


def _chain(spec: BoundSpec, g: FinSeq, stem: BitSeq) -> tuple[int, ...]:
    points = [n for n in sorted(marked_class(spec, g, stem, len(g))) if n >= len(stem)]
    if not points:
        return ()
    chain = [points[0]]
    while True:
        nxt = next(_successors(spec, g, chain[-1], stem), None)
        if nxt is None:
            return tuple(chain)
        chain.append(nxt)


def case1_search(
    spec: BoundSpec, g: FinSeq, max_stem: int, diagnostics: dict[str, int] | None = None
) -> Case1 | None:
    """Find a stem witnessing the Case 1 condition below len(g) and build its ⊲_g chain.

    (h, d) are read off the last chain point and padded with 0 to len(g).
    Returns None when no stem holds; diagnostics receives the skipped and
    undetermined counts.
    """
    diag = diagnostics if diagnostics is not None else {}
    diag.update(skipped=0, undetermined=0, stems=0)
    if not g:
        return None
    for stem in _stems(max_stem):
        diag["stems"] += 1
        if _stem_status(spec, g, stem, diag) != "holds":
            continue
        chain = _chain(spec, g, stem)
        if len(chain) < 2:
            continue
        last = decode_pair(spec, g[chain[-1]])
        pad = len(g) - last.level
        h = last.h + (0,) * pad
        d = last.d + (0,) * pad
        logger.debug("case 1 stem %s: chain %s", stem, chain)
        return Case1(chain=chain, h=h, d=d, stem=stem)
    return None


# ── Case 2 ─────────────────────────────────────────────────────────────────────

def _candidates(spec: BoundSpec, g: FinSeq, stem: BitSeq, strategy: Strategy) -> Iterator[int]:
    if strategy == "literal":
        yield from sorted(marked_class(spec, g, stem, len(g)))
    else:
        yield from (n for n in range(len(stem), len(g)) if residue_member(n, stem))


def case2_greedy(
    spec: BoundSpec, g: FinSeq, strategy: Strategy = "literal"
) -> tuple[BitSeq, dict[str, Any]]:
    """Build c by always taking the least admissible point for the Case 2 disjunction.

    literal takes points from I_g[c̄] (marked values); direct takes them from I_c̄.
    """
    stem: BitSeq = ()
    steps: list[dict[str, Any]] = []
    skipped = 0
    while len(stem) < len(g):
        chosen = None
        for n0 in _candidates(spec, g, stem, strategy):
            if n0 < len(stem):
                skipped += 1
                continue
            c1 = _extend_stem(stem, n0)
            if g[n0] == encode_pair(spec, PairCode(g[:n0], c1[:n0]), strict=False):
                chosen = (n0, c1, "equal")
                break
            if next(_successors(spec, g, n0, c1), None) is None:
                chosen = (n0, c1, "no_successor")
                break
        if chosen is None:
            break
        n0, stem, disjunct = chosen
        steps.append({"n": n0, "disjunct": disjunct})

    c = stem + (0,) * (len(g) - len(stem))
    member = e_hat_prefix(ConstructionContext(spec, g, c), len(g))
    diagnostics = {
        "strategy": strategy,
        "steps": steps,
        "skipped": skipped,
        "good": is_good(c),
        "agreements": sum(1 for a, b in zip(member, g) if a == b),
        "first_disjunct": sum(1 for s in steps if s["disjunct"] == "equal"),
    }
    return c, diagnostics


# ── Matching ───────────────────────────────────────────────────────────────────

def _agreements(member: FinSeq, g: FinSeq) -> tuple[int, ...]:
    return tuple(n for n, (a, b) in enumerate(zip(member, g)) if a == b)


def match_finder(
    spec: BoundSpec,
    g: FinSeq,
    min_agreements: int,
    strategy: Strategy = "literal",
    max_stem: int = 4,
) -> Match | None:
    """A family prefix agreeing with g at ≥ min_agreements positions, or None.

    Tries g itself, then Case 1, then Case 2.
    """
    if not g:
        return None
    own = recover_context(spec, g)
    if own is not None and len(g) >= min_agreements:
        return Match(member=tuple(g), agreements=tuple(range(len(g))), source="self")

    found = case1_search(spec, g, max_stem)
    if found is not None:
        member = e_hat_prefix(ConstructionContext(spec, found.h, found.d), len(g))
        hits = _agreements(member, g)
        if len(hits) >= min_agreements:
            return Match(member=member, agreements=hits, source="case1")

    c, _ = case2_greedy(spec, g, strategy)
    member = e_hat_prefix(ConstructionContext(spec, g, c), len(g))
    hits = _agreements(member, g)
    if len(hits) >= min_agreements:
        return Match(member=member, agreements=hits, source="case2")
    logger.debug("no match with %d agreements for g of length %d", min_agreements, len(g))
    return None


def best_agreement(spec: BoundSpec, g: FinSeq, max_stem: int = 4) -> int:
    """Most positions where a member tried by match_finder agrees with g.

    Both Case 2 strategies are tried, so this bounds what match_finder can
    return whichever strategy it is given.
    """
    if recover_context(spec, g) is not None:
        return len(g)
    members: list[FinSeq] = []
    found = case1_search(spec, g, max_stem)
    if found is not None:
        members.append(e_hat_prefix(ConstructionContext(spec, found.h, found.d), len(g)))
    for strategy in ("literal", "direct"):
        c, _ = case2_greedy(spec, g, strategy)
        members.append(e_hat_prefix(ConstructionContext(spec, g, c), len(g)))
    return max(len(_agreements(member, g)) for member in members)


def agreement_survey(
    spec: BoundSpec,
    length: int = 20,
    count: int = 100,
    seed: int = 0,
    min_agreements: int = 5,
    value_budget: int = 4,
    max_stem: int = 4,
) -> AgreementSurvey:
    """How many of `count` seeded random g reach min_agreements with some member.

    g(n) is uniform below F(n), or below value_budget where F(n) = ∞.
    """
    rng = random.Random(seed)
    survey = AgreementSurvey(length=length, count=count, seed=seed, min_agreements=min_agreements)
    for _ in range(count):
        g = tuple(
            rng.randrange(value_budget if bound is INF else bound)  # type: ignore[arg-type]
            for bound in (eval_bound(spec, n) for n in range(length))
        )
        best = best_agreement(spec, g, max_stem)
        survey.best[best] = survey.best.get(best, 0) + 1
        if best >= min_agreements:
            survey.successes += 1
    logger.debug("survey: %d of %d g reach %d agreements", survey.successes, count, min_agreements)
    return survey


def run_probe(
    spec: BoundSpec, g: FinSeq, strategy: Strategy = "literal", max_stem: int = 4
) -> ProbeOutcome:
    """Which side of the Case 1 / Case 2 split g shows below len(g)."""
    diagnostics: dict[str, int] = {}
    found = case1_search(spec, g, max_stem, diagnostics)
    if found is not None:
        return found
    c, case2_diag = case2_greedy(spec, g, strategy)
    if not case2_diag["steps"]:
        return Inconclusive(horizon=len(g))
    case2_diag["case1"] = diagnostics
    return Case2(c=c, diagnostics=case2_diag)


def case2_copy_positions(spec: BoundSpec, g: FinSeq, c: BitSeq) -> list[int]:
    """ν(g, c) below len(g): the positions where ê(g, c) may copy g."""
    return sorted(marked_set(ConstructionContext(spec, g, c), value_bound=len(g)))


# ── Pigeonhole ─────────────────────────────────────────────────────────────────

def pigeonhole_bound(spec: BoundSpec) -> int | None:
    """m* = liminf F + 1: no eventually different family has m* members."""
    regime = classify_regime(spec)
    if regime.kind != "liminf_finite":
        return None
    return regime.liminf + 1  # type: ignore[operator]


def pigeonhole_agreement(m_star: int, k: int) -> int:
    """Among m* sequences over < m* symbols on k coordinates, some pair agrees this often."""
    if m_star < 2:
        raise ValueError(f"m* must be at least 2, got {m_star}")
    return math.ceil(k / math.comb(m_star, 2))

