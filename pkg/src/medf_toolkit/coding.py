"""coding.py — the sequence codec # and the F-appropriate pair codec #_F.

# is the iterated diagonal pairing: #∅ = 0, #(s⌢a) = π(#s, a) + 1.

#_F enumerates pairs (h̄, d̄) level by level. Levels with a finite count
|∏_{k<l} F(k)|·2^l are laid out consecutively, so a level-l code stays below
the cumulative count through l, which the growth condition bounds by F(l).
From the first level with an infinite count on, codes are assigned by a
bounding-box enumeration placed after every finite-level code.
"""
from __future__ import annotations

import itertools
import logging
from collections.abc import Iterator
from functools import lru_cache
from math import isqrt, prod

from .bounds import eval_bound
from .errors import BudgetExceeded, CodecError
from .model import (
    INF,
    AppropriatenessReport,
    BitSeq,
    BoundSpec,
    ExtNat,
    FinSeq,
    PairCode,
    ext_add,
    ext_mul,
)

logger = logging.getLogger(__name__)


# ── Sequence codec ─────────────────────────────────────────────────────────────

def _pair(x: int, y: int) -> int:
    s = x + y
    return s * (s + 1) // 2 + y


def _unpair(z: int) -> tuple[int, int]:
    w = (isqrt(8 * z + 1) - 1) // 2
    y = z - w * (w + 1) // 2
    return w - y, y


def encode_seq(s: FinSeq) -> int:
    """Bijection ℕ^{<ℕ} → ℕ; encode_seq(s) ≥ len(s)."""
    code = 0
    for a in s:
        code = _pair(code, a) + 1
    return code


def decode_seq(code: int) -> FinSeq:
    if code < 0:
        raise CodecError(f"codes are natural numbers, got {code}")
    items: list[int] = []
    while code > 0:
        code, a = _unpair(code - 1)
        items.append(a)
    return tuple(reversed(items))


def prefix_codes(s: FinSeq, bound: int | None = None) -> Iterator[tuple[int, int]]:
    """Yield (n, #(s↾n)) for n = 0..len(s), stopping once the code reaches `bound`.

    Codes of successive prefixes strictly increase, so nothing past the
    stopping point can fall below the bound again.
    """
    code = 0
    for n in range(len(s) + 1):
        if bound is not None and code >= bound:
            return
        yield n, code
        if n < len(s):
            code = _pair(code, s[n]) + 1


# ── Bounding-box enumeration of ℕ^j ────────────────────────────────────────────

def _iroot(n: int, k: int) -> int:
    """Largest b with b**k ≤ n."""
    if n < 2:
        return n
    lo, hi = 0, 1 << (n.bit_length() // k + 1)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid**k <= n:
            lo = mid
        else:
            hi = mid - 1
    return lo


def box_rank(x: tuple[int, ...]) -> int:
    """Rank of x among ℕ^j ordered by max entry, then lexicographically."""
    j = len(x)
    b = max(x)
    rank = b**j
    top = -1
    for i, xi in enumerate(x):
        r = j - i - 1
        per = (b + 1) ** r if top == b else (b + 1) ** r - b**r
        rank += xi * per
        top = max(top, xi)
    return rank


def box_unrank(code: int, j: int) -> tuple[int, ...]:
    b = _iroot(code, j)
    rem = code - b**j
    top = -1
    out: list[int] = []
    for i in range(j):
        r = j - i - 1
        if top == b:
            per = (b + 1) ** r
            v, rem = divmod(rem, per)
        else:
            per_lt = (b + 1) ** r - b**r
            if per_lt and rem < b * per_lt:
                v, rem = divmod(rem, per_lt)
            else:
                v = b
                rem -= b * per_lt
        out.append(v)
        top = max(top, v)
    return tuple(out)


# ── Level table ────────────────────────────────────────────────────────────────

class _LevelTable:
    """Lazily extended level counts and offsets for one spec."""

    def __init__(self, spec: BoundSpec):
        self.spec = spec
        self.counts: list[ExtNat] = []
        self.offsets: list[ExtNat] = [0]
        self._product: ExtNat = 1
        self.first_infinite: int | None = None

    def ensure(self, l: int) -> None:
        while len(self.counts) <= l:
            k = len(self.counts)
            count = ext_mul(self._product, 1 << k)
            if count is INF and self.first_infinite is None:
                self.first_infinite = k
            self.counts.append(count)
            self.offsets.append(ext_add(self.offsets[-1], count))
            self._product = ext_mul(self._product, eval_bound(self.spec, k))

    def count(self, l: int) -> ExtNat:
        self.ensure(l)
        return self.counts[l]

    def offset(self, l: int) -> ExtNat:
        self.ensure(l)
        return self.offsets[l]


@lru_cache(maxsize=256)
def _table(spec: BoundSpec) -> _LevelTable:
    return _LevelTable(spec)


def level_count(spec: BoundSpec, l: int) -> ExtNat:
    """|∏_{k<l} F(k)| · 2^l."""
    return _table(spec).count(l)


def level_offset(spec: BoundSpec, l: int) -> ExtNat:
    """Σ_{j<l} level_count(j): the first code of level l when that is finite."""
    return _table(spec).offset(l)


# ── Pair codec ─────────────────────────────────────────────────────────────────

def _validate_pair(spec: BoundSpec, p: PairCode) -> None:
    if len(p.h) != len(p.d):
        raise CodecError(f"h and d differ in length ({len(p.h)} vs {len(p.d)})")
    for k, v in enumerate(p.h):
        if not isinstance(v, int) or v < 0 or not v < eval_bound(spec, k):
            raise CodecError(f"h({k}) = {v!r} is outside F({k}) = {eval_bound(spec, k)}")
    for k, bit in enumerate(p.d):
        if bit not in (0, 1):
            raise CodecError(f"d({k}) = {bit!r} is not a bit")


def _bits_rank(d: BitSeq) -> int:
    rank = 0
    for bit in d:
        rank = rank * 2 + bit
    return rank


def _bits_unrank(rank: int, l: int) -> BitSeq:
    return tuple((rank >> (l - 1 - i)) & 1 for i in range(l))


def _mixed_rank(values: list[int], radices: list[int]) -> int:
    rank = 0
    for v, r in zip(values, radices, strict=True):
        rank = rank * r + v
    return rank


def _mixed_unrank(rank: int, radices: list[int]) -> list[int]:
    out = []
    for r in reversed(radices):
        rank, v = divmod(rank, r)
        out.append(v)
    return out[::-1]


def encode_pair(spec: BoundSpec, p: PairCode, strict: bool = True) -> int:
    """#_F(h̄, d̄).

    strict: reject a finite level whose code would reach F(l), i.e. where the
    growth condition fails and the codec cannot be appropriate.
    """
    _validate_pair(spec, p)
    table = _table(spec)
    l = p.level
    count = table.count(l)
    if count is not INF:
        radices = [eval_bound(spec, k) for k in range(l)]
        rank = _mixed_rank(list(p.h), radices) * (1 << l) + _bits_rank(p.d)  # type: ignore[arg-type]
        code = table.offset(l) + rank  # type: ignore[operator]
    else:
        code = _encode_infinite_level(spec, table, p)
    if strict and not code < eval_bound(spec, l):
        raise CodecError(
            f"growth violation: level-{l} code {code} is not below F({l}) = {eval_bound(spec, l)}"
        )
    return code


def _split_level(spec: BoundSpec, l: int) -> tuple[list[int], list[int], list[int]]:
    """Finite coordinates, their radices, and infinite coordinates below l."""
    finite_idx, radices, infinite_idx = [], [], []
    for k in range(l):
        v = eval_bound(spec, k)
        if v is INF:
            infinite_idx.append(k)
        else:
            finite_idx.append(k)
            radices.append(v)
    return finite_idx, radices, infinite_idx  # type: ignore[return-value]


def _encode_infinite_level(spec: BoundSpec, table: _LevelTable, p: PairCode) -> int:
    l = p.level
    start = table.first_infinite
    assert start is not None
    finite_idx, radices, infinite_idx = _split_level(spec, l)
    block = prod(radices) << l
    finite_rank = _mixed_rank([p.h[k] for k in finite_idx], radices) * (1 << l) + _bits_rank(p.d)
    within = box_rank(tuple(p.h[k] for k in infinite_idx)) * block + finite_rank
    return table.offset(start) + box_rank((l - start, within))  # type: ignore[operator]


def decode_pair(spec: BoundSpec, code: int) -> PairCode:
    """#_F^{-1}: defined on every natural number."""
    if code < 0:
        raise CodecError(f"codes are natural numbers, got {code}")
    table = _table(spec)
    l = 0
    while True:
        count = table.count(l)
        if count is INF:
            return _decode_infinite_level(spec, table, code)
        offset = table.offset(l)
        if code < offset + count:  # type: ignore[operator]
            radices = [eval_bound(spec, k) for k in range(l)]
            h_rank, d_rank = divmod(code - offset, 1 << l)  # type: ignore[operator]
            h = _mixed_unrank(h_rank, radices)  # type: ignore[arg-type]
            return PairCode(tuple(h), _bits_unrank(d_rank, l))
        l += 1


def _decode_infinite_level(spec: BoundSpec, table: _LevelTable, code: int) -> PairCode:
    start = table.first_infinite
    assert start is not None
    a, within = box_unrank(code - table.offset(start), 2)  # type: ignore[operator]
    l = start + a
    finite_idx, radices, infinite_idx = _split_level(spec, l)
    block = prod(radices) << l
    box, finite_rank = divmod(within, block)
    f_rank, d_rank = divmod(finite_rank, 1 << l)
    h = [0] * l
    for k, v in zip(finite_idx, _mixed_unrank(f_rank, radices), strict=True):
        h[k] = v
    for k, v in zip(infinite_idx, box_unrank(box, len(infinite_idx)), strict=True):
        h[k] = v
    return PairCode(tuple(h), _bits_unrank(d_rank, l))


def pair_level(spec: BoundSpec, code: int) -> int:
    """The level of a code, without unranking it."""
    table = _table(spec)
    l = 0
    while True:
        count = table.count(l)
        if count is INF:
            start = table.first_infinite
            assert start is not None
            a, _ = box_unrank(code - table.offset(start), 2)  # type: ignore[operator]
            return start + a
        if code < table.offset(l) + count:  # type: ignore[operator]
            return l
        l += 1


def level_pairs(spec: BoundSpec, l: int) -> Iterator[PairCode]:
    """Every level-l pair, in code order. Only for finitely counted levels."""
    radices = [eval_bound(spec, k) for k in range(l)]
    if any(r is INF for r in radices):
        raise CodecError(f"level {l} has infinitely many pairs")
    for h in itertools.product(*(range(r) for r in radices)):  # type: ignore[arg-type]
        for d in itertools.product((0, 1), repeat=l):
            yield PairCode(h, d)


def verify_appropriate(
    spec: BoundSpec, level_bound: int, budget: int = 1_000_000
) -> AppropriatenessReport:
    """Check #_F(p) < F(l) for every pair p of every finitely counted level l ≤ level_bound."""
    total = 0
    for l in range(level_bound + 1):
        count = level_count(spec, l)
        if count is INF:
            break
        total += count  # type: ignore[operator]
    if total > budget:
        raise BudgetExceeded(f"{total} pairs to check exceeds budget {budget}")

    checked = 0
    for l in range(level_bound + 1):
        if level_count(spec, l) is INF:
            break
        bound = eval_bound(spec, l)
        for p in level_pairs(spec, l):
            code = encode_pair(spec, p, strict=False)
            checked += 1
            if not code < bound:
                logger.debug("appropriateness fails at level %d: %s -> %d", l, p, code)
                return AppropriatenessReport(
                    passed=False,
                    level_bound=level_bound,
                    checked=checked,
                    witness={"level": l, "h": list(p.h), "d": list(p.d), "code": code,
                             "bound": str(bound)},
                )
    return AppropriatenessReport(passed=True, level_bound=level_bound, checked=checked)
