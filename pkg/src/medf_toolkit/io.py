from __future__ import annotations

import json
import logging
import sys
from collections.abc import Iterable
from pathlib import Path
from typing import Any

from .errors import BoundSpecError
from .model import INF, BitSeq, BoundSpec, ExtNat, FinSeq, TailRule

logger = logging.getLogger(__name__)

# ── F-spec files ───────────────────────────────────────────────────────────────
#
# {"prefix": [2, 5, 45], "tail": {"kind": "infinity"}}
#
# ∞ is written "inf" wherever a value may be infinite. Tail shapes:
#
#   {"kind": "constant", "value": 2}
#   {"kind": "infinity"}
#   {"kind": "affine", "a": 1, "b": 1}
#   {"kind": "periodic", "pattern": [2, "inf"]}
#   {"kind": "interleave", "rules": [{"kind": "affine", "a": 1, "b": 1}, {"kind": "infinity"}]}


def _ext_nat(raw: Any, where: str) -> ExtNat:
    if raw == "inf":
        return INF
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise BoundSpecError(f"{where}: expected a natural number or \"inf\", got {raw!r}")
    return raw


def _int(raw: Any, where: str) -> int:
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise BoundSpecError(f"{where}: expected an integer, got {raw!r}")
    return raw


def _parse_tail(raw: Any, where: str = "tail") -> TailRule:
    if not isinstance(raw, dict) or "kind" not in raw:
        raise BoundSpecError(f"{where}: expected an object with a \"kind\"")
    kind = raw["kind"]
    if kind == "constant":
        return TailRule.constant(_ext_nat(raw.get("value"), f"{where}.value"))
    if kind == "infinity":
        return TailRule.infinity()
    if kind == "affine":
        return TailRule.affine(_int(raw.get("a"), f"{where}.a"), _int(raw.get("b"), f"{where}.b"))
    if kind == "periodic":
        pattern = raw.get("pattern")
        if not isinstance(pattern, list):
            raise BoundSpecError(f"{where}.pattern: expected a list")
        return TailRule.periodic([_ext_nat(v, f"{where}.pattern[{i}]") for i, v in enumerate(pattern)])
    if kind == "interleave":
        rules = raw.get("rules")
        if not isinstance(rules, list):
            raise BoundSpecError(f"{where}.rules: expected a list")
        return TailRule.interleave([_parse_tail(r, f"{where}.rules[{i}]") for i, r in enumerate(rules)])
    raise BoundSpecError(f"{where}: unsupported tail rule {kind!r}")


def parse_fspec(data: Any) -> BoundSpec:
    if not isinstance(data, dict):
        raise BoundSpecError("F-spec must be a JSON object")
    prefix = data.get("prefix", [])
    if not isinstance(prefix, list):
        raise BoundSpecError("prefix: expected a list")
    values = tuple(_ext_nat(v, f"prefix[{i}]") for i, v in enumerate(prefix))
    return BoundSpec(values, _parse_tail(data.get("tail")))


def load_fspec(path: Path) -> BoundSpec:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise BoundSpecError(f"{path}: {e}") from e
    spec = parse_fspec(data)
    logger.debug("loaded F-spec %s from %s", spec.describe(), path)
    return spec


def _dump_value(v: ExtNat) -> int | str:
    return "inf" if v is INF else v  # type: ignore[return-value]


def _dump_tail(tail: TailRule) -> dict[str, Any]:
    out: dict[str, Any] = {"kind": tail.kind}
    if tail.kind == "constant":
        out["value"] = _dump_value(tail.value)  # type: ignore[arg-type]
    elif tail.kind == "affine":
        out.update(a=tail.a, b=tail.b)
    elif tail.kind == "periodic":
        out["pattern"] = [_dump_value(v) for v in tail.pattern]
    elif tail.kind == "interleave":
        out["rules"] = [_dump_tail(r) for r in tail.rules]
    return out


def dump_fspec(spec: BoundSpec) -> dict[str, Any]:
    return {"prefix": [_dump_value(v) for v in spec.prefix], "tail": _dump_tail(spec.tail)}


# ── Command-line sequences ─────────────────────────────────────────────────────

def parse_seq(text: str) -> FinSeq:
    """"1,0,4" → (1, 0, 4); the empty string is the empty sequence."""
    text = text.strip()
    if not text:
        return ()
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part.isdigit():
            raise ValueError(f"not a natural number: {part!r}")
        out.append(int(part))
    return tuple(out)


def parse_bits(text: str) -> BitSeq:
    """"1011" → (1, 0, 1, 1)."""
    text = text.strip()
    if any(ch not in "01" for ch in text):
        raise ValueError(f"not a 0/1 string: {text!r}")
    return tuple(int(ch) for ch in text)


# ── JSONL output ───────────────────────────────────────────────────────────────

def to_jsonl(record: dict[str, Any]) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"), default=_json_default)


def _json_default(obj: Any) -> Any:
    if obj is INF:
        return "inf"
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def write_jsonl(records: Iterable[dict[str, Any]], path: Path | None = None) -> int:
    """One sorted-key JSON object per line to `path`, or stdout when None."""
    lines = [to_jsonl(r) + "\n" for r in records]
    if path is None:
        sys.stdout.write("".join(lines))
        sys.stdout.flush()
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with Path(path).open("a", encoding="utf-8") as f:
            f.writelines(lines)
    return len(lines)
