from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Literal, Union

from .errors import BoundSpecError


class _Infinity:
    """The value ∞ of ω+1: above every natural number, equal only to itself."""

    __slots__ = ()
    _instance: _Infinity | None = None

    def __new__(cls) -> _Infinity:
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "inf"

    def __eq__(self, other: object) -> bool:
        return other is self

    def __hash__(self) -> int:
        return hash("medf-infinity")

    def __lt__(self, other: object) -> bool:
        return False

    def __le__(self, other: object) -> bool:
        return other is self

    def __gt__(self, other: object) -> bool:
        return other is not self

    def __ge__(self, other: object) -> bool:
        return True

    def __reduce__(self) -> str:
        return "INF"


INF = _Infinity()

# natural number or ∞
ExtNat = Union[int, _Infinity]

# ḡ, h̄, f̄ and c̄, d̄ of the construction
FinSeq = tuple[int, ...]
BitSeq = tuple[int, ...]


def is_inf(value: object) -> bool:
    return value is INF


def ext_add(a: ExtNat, b: ExtNat) -> ExtNat:
    if a is INF or b is INF:
        return INF
    return a + b  # type: ignore[operator]


def ext_mul(a: ExtNat, b: ExtNat) -> ExtNat:
    # counts here are products of F values (all ≥ 1), so 0·∞ never arises
    if a is INF or b is INF:
        return INF
    return a * b  # type: ignore[operator]


# ── Bound functions ────────────────────────────────────────────────────────────

TailKind = Literal["constant", "infinity", "affine", "periodic", "interleave"]


@dataclass(frozen=True)
class TailRule:
    """How F continues past its explicit prefix.

    constant(k)        F(n) = k
    infinity           F(n) = ∞
    affine(a, b)       F(n) = a·n + b
    periodic(pattern)  F(n) = pattern[n mod len(pattern)]
    interleave(rules)  F(n) = rules[n mod len(rules)](n)   (components: constant/infinity/affine)
    """
    kind: TailKind
    value: ExtNat | None = None
    a: int = 0
    b: int = 0
    pattern: tuple[ExtNat, ...] = ()
    rules: tuple[TailRule, ...] = ()

    @classmethod
    def constant(cls, k: ExtNat) -> TailRule:
        return cls("constant", value=k)

    @classmethod
    def infinity(cls) -> TailRule:
        return cls("infinity")

    @classmethod
    def affine(cls, a: int, b: int) -> TailRule:
        return cls("affine", a=a, b=b)

    @classmethod
    def periodic(cls, pattern: list[ExtNat] | tuple[ExtNat, ...]) -> TailRule:
        return cls("periodic", pattern=tuple(pattern))

    @classmethod
    def interleave(cls, rules: list[TailRule] | tuple[TailRule, ...]) -> TailRule:
        return cls("interleave", rules=tuple(rules))

    def validate(self, nested: bool = False) -> None:
        if self.kind == "constant":
            if self.value is None or not _is_ext_nat(self.value) or self.value == 0:
                raise BoundSpecError(f"constant tail needs a value ≥ 1, got {self.value!r}")
        elif self.kind == "infinity":
            pass
        elif self.kind == "affine":
            if not (isinstance(self.a, int) and isinstance(self.b, int)):
                raise BoundSpecError("affine tail needs integer coefficients")
            if self.a < 0 or self.b < 0 or (self.a == 0 and self.b == 0):
                raise BoundSpecError(f"affine tail needs a ≥ 0, b ≥ 0 and a+b ≥ 1, got ({self.a}, {self.b})")
        elif self.kind == "periodic":
            if nested:
                raise BoundSpecError("periodic rules cannot be interleaved")
            if not self.pattern:
                raise BoundSpecError("periodic tail needs a nonempty pattern")
            for v in self.pattern:
                if not _is_ext_nat(v) or v == 0:
                    raise BoundSpecError(f"periodic pattern entries must be ≥ 1, got {v!r}")
        elif self.kind == "interleave":
            if nested:
                raise BoundSpecError("interleave rules cannot be nested")
            if not self.rules:
                raise BoundSpecError("interleave tail needs at least one rule")
            for r in self.rules:
                r.validate(nested=True)
        else:
            raise BoundSpecError(f"unsupported tail rule {self.kind!r}")


def _is_ext_nat(v: object) -> bool:
    return v is INF or (isinstance(v, int) and not isinstance(v, bool) and v >= 0)


@dataclass(frozen=True)
class BoundSpec:
    """F: ℕ → (ℕ∖{0}) ∪ {∞} as an explicit prefix followed by a tail rule."""
    prefix: tuple[ExtNat, ...]
    tail: TailRule

    def __post_init__(self) -> None:
        object.__setattr__(self, "prefix", tuple(self.prefix))
        for i, v in enumerate(self.prefix):
            if not _is_ext_nat(v) or v == 0:
                raise BoundSpecError(f"F({i}) must be ≥ 1 or inf, got {v!r}")
        self.tail.validate()
        # F(n) = a·n + b vanishes only at n = 0 with b = 0
        start = len(self.prefix)
        if self.tail.kind == "affine" and self.tail.b == 0 and start == 0:
            raise BoundSpecError("affine tail with b = 0 gives F(0) = 0")
        if self.tail.kind == "interleave" and start == 0:
            first = self.tail.rules[0]
            if first.kind == "affine" and first.b == 0:
                raise BoundSpecError("interleaved affine rule with b = 0 gives F(0) = 0")

    def describe(self) -> str:
        head = ",".join(str(v) for v in self.prefix)
        return f"[{head}]+{self.tail.kind}"


@dataclass(frozen=True)
class ReindexSeq:
    """⟨e_m⟩ together with the BoundSpec it was computed from; E is its range."""
    entries: tuple[int, ...]
    source: BoundSpec
    restrict_to_finite: bool = False

    @property
    def range_set(self) -> frozenset[int]:
        return frozenset(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


RegimeKind = Literal["liminf_finite", "lim_infinite", "mixed_compactable"]


@dataclass(frozen=True)
class Regime:
    """Outcome of classify_regime.

    compactable: F(n) < ∞ for infinitely many n (the finite-support set D is infinite).
    infinite_often: F(n) = ∞ for infinitely many n.
    """
    kind: RegimeKind
    liminf: ExtNat
    compactable: bool
    infinite_often: bool = False

    @property
    def lim_infinite(self) -> bool:
        return self.kind != "liminf_finite"


@dataclass(frozen=True)
class ConstantFunction:
    """c_k, clipped so it stays inside ∏F where F(n) ≤ k."""
    value: int
    spec: BoundSpec

    def prefix(self, length: int) -> FinSeq:
        from .bounds import eval_bound
        out = []
        for n in range(length):
            f = eval_bound(self.spec, n)
            out.append(self.value if f > self.value else f - 1)  # type: ignore[operator]
        return tuple(out)


@dataclass(frozen=True)
class GrowthReport:
    passed: bool
    up_to: int
    first_failure: int | None = None
    sums: tuple[ExtNat, ...] = ()


# ── Coding ─────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class PairCode:
    """(h̄, d̄): equal-length pair, the argument of #_F."""
    h: FinSeq
    d: BitSeq

    def __post_init__(self) -> None:
        object.__setattr__(self, "h", tuple(self.h))
        object.__setattr__(self, "d", tuple(self.d))

    @property
    def level(self) -> int:
        return len(self.h)


@dataclass(frozen=True)
class AppropriatenessReport:
    passed: bool
    level_bound: int
    checked: int
    witness: dict[str, Any] | None = None


# ── Construction ───────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class ConstructionContext:
    """A finite (g, c) prefix pair with g ∈ ∏_{k<N} F(k) and c ∈ 2^N."""
    spec: BoundSpec
    g: FinSeq
    c: BitSeq

    def __post_init__(self) -> None:
        object.__setattr__(self, "g", tuple(self.g))
        object.__setattr__(self, "c", tuple(self.c))
        if len(self.g) != len(self.c):
            raise ValueError(f"g and c differ in length ({len(self.g)} vs {len(self.c)})")

    def __len__(self) -> int:
        return len(self.g)

    def restrict(self, n: int) -> ConstructionContext:
        return ConstructionContext(self.spec, self.g[:n], self.c[:n])


MarkedSet = frozenset[int]


@dataclass(frozen=True)
class TreeNode:
    f: FinSeq
    spec: BoundSpec


# ── Lift ───────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class LiftContext:
    spec: BoundSpec
    reindex: ReindexSeq
    compact_mode: bool = False
    # exact on every coordinate below this bound
    horizon: int = 0

    @property
    def entries(self) -> tuple[int, ...]:
        return self.reindex.entries


# ── Probe ──────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Case1:
    chain: tuple[int, ...]
    h: FinSeq
    d: BitSeq
    stem: BitSeq = ()
    kind: Literal["case1"] = "case1"


@dataclass(frozen=True)
class Case2:
    c: BitSeq
    diagnostics: dict[str, Any] = field(default_factory=dict)
    kind: Literal["case2"] = "case2"


@dataclass(frozen=True)
class Inconclusive:
    horizon: int
    kind: Literal["inconclusive"] = "inconclusive"


ProbeOutcome = Union[Case1, Case2, Inconclusive]


@dataclass(frozen=True)
class Match:
    member: FinSeq
    agreements: tuple[int, ...]
    source: Literal["self", "case1", "case2"]


@dataclass
class AgreementSurvey:
    """Best agreement counts reached by match_finder over seeded random g."""
    length: int
    count: int
    seed: int
    min_agreements: int
    successes: int = 0
    best: dict[int, int] = field(default_factory=dict)

    @property
    def rate(self) -> float:
        return self.successes / self.count if self.count else 0.0

    def to_record(self) -> dict[str, Any]:
        return {
            "length": self.length, "count": self.count, "seed": self.seed,
            "min_agreements": self.min_agreements, "successes": self.successes,
            "best": {str(k): v for k, v in sorted(self.best.items())},
        }


# ── Verification ───────────────────────────────────────────────────────────────

@dataclass
class VerifyReport:
    suite: str
    parameters: dict[str, Any]
    passed: bool = True
    counterexample: dict[str, Any] | None = None
    counts: dict[str, int] = field(default_factory=dict)
    elapsed: float = 0.0

    def fail(self, **payload: Any) -> None:
        # first failure in enumeration order is kept: it is the minimal one
        if self.passed:
            self.passed = False
            self.counterexample = payload

    def bump(self, key: str, by: int = 1) -> None:
        self.counts[key] = self.counts.get(key, 0) + by

    def to_record(self) -> dict[str, Any]:
        return {
            "suite": self.suite,
            "parameters": self.parameters,
            "passed": self.passed,
            "counterexample": self.counterexample,
            "counts": dict(sorted(self.counts.items())),
        }
