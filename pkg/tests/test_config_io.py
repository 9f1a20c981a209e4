"""Tests for settings loading, F-spec files, command-line sequences and JSONL output."""
from __future__ import annotations

import json
from pathlib import Path

import pytest

from medf_toolkit import activitylog
from medf_toolkit.config import DEFAULT_CONF, Settings, load_settings, write_default_config
from medf_toolkit.errors import BoundSpecError, ConfigError
from medf_toolkit.io import (
    dump_fspec,
    load_fspec,
    parse_bits,
    parse_fspec,
    parse_seq,
    to_jsonl,
    write_jsonl,
)
from medf_toolkit.model import INF, BoundSpec, TailRule

# ── Settings ───────────────────────────────────────────────────────────────────

def test_missing_default_config_gives_defaults(tmp_path: Path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert load_settings() == Settings()


def test_missing_explicit_config_is_error(tmp_path: Path):
    with pytest.raises(ConfigError):
        load_settings(tmp_path / "nope.toml")


def test_default_config_round_trips(tmp_path: Path):
    path = write_default_config(tmp_path / "local" / "medf.toml")
    assert path.read_text(encoding="utf-8") == DEFAULT_CONF
    assert load_settings(path) == Settings()


def test_write_default_config_keeps_existing(tmp_path: Path):
    path = tmp_path / "medf.toml"
    path.write_text("seed = 5\n", encoding="utf-8")
    write_default_config(path)
    assert load_settings(path).seed == 5


def test_config_overrides(tmp_path: Path):
    path = tmp_path / "medf.toml"
    path.write_text('horizon = 5\nmax_stem = 2\nlog_dir = "logs"\n', encoding="utf-8")
    settings = load_settings(path)
    assert settings.horizon == 5
    assert settings.max_stem == 2
    assert settings.log_dir == Path("logs")


@pytest.mark.parametrize("text", [
    "horizon = -1\n",
    "sample_count = 0\n",
    "colour = 3\n",
    'seed = "zero"\n',
    "horizon = true\n",
    "horizon = [\n",
])
def test_bad_config(tmp_path: Path, text: str):
    path = tmp_path / "medf.toml"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(ConfigError):
        load_settings(path)


# ── F-spec files ───────────────────────────────────────────────────────────────

def test_parse_fspec_infinity_markers():
    spec = parse_fspec({"prefix": [2, "inf"], "tail": {"kind": "periodic", "pattern": [3, "inf"]}})
    assert spec == BoundSpec((2, INF), TailRule.periodic([3, INF]))


def test_parse_fspec_interleave():
    spec = parse_fspec({"prefix": [], "tail": {"kind": "interleave", "rules": [
        {"kind": "affine", "a": 1, "b": 1}, {"kind": "infinity"}]}})
    assert spec.tail.rules == (TailRule.affine(1, 1), TailRule.infinity())


def test_dump_fspec_round_trip():
    spec = BoundSpec((1, INF, 4), TailRule.interleave([TailRule.constant(INF), TailRule.affine(2, 3)]))
    assert parse_fspec(json.loads(json.dumps(dump_fspec(spec)))) == spec


@pytest.mark.parametrize("data", [
    [],
    {"prefix": "2,5", "tail": {"kind": "infinity"}},
    {"prefix": [1.5], "tail": {"kind": "infinity"}},
    {"prefix": [1]},
    {"prefix": [1], "tail": {"kind": "affine", "a": "x", "b": 1}},
    {"prefix": [1], "tail": {"kind": "periodic", "pattern": 3}},
    {"prefix": [1], "tail": {"kind": "constant", "value": 0}},
])
def test_parse_fspec_rejects(data):
    with pytest.raises(BoundSpecError):
        parse_fspec(data)


def test_load_fspec_bad_json(tmp_path: Path):
    path = tmp_path / "f.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(BoundSpecError):
        load_fspec(path)


def test_load_fspec(tmp_path: Path):
    path = tmp_path / "f.json"
    path.write_text('{"prefix": [2, 5, 45], "tail": {"kind": "infinity"}}', encoding="utf-8")
    assert load_fspec(path) == BoundSpec((2, 5, 45), TailRule.infinity())


# ── Sequences and JSONL ────────────────────────────────────────────────────────

def test_parse_seq():
    assert parse_seq("1, 0,4") == (1, 0, 4)
    assert parse_seq("") == ()
    with pytest.raises(ValueError):
        parse_seq("1,-2")


def test_parse_bits():
    assert parse_bits("1011") == (1, 0, 1, 1)
    assert parse_bits("") == ()
    with pytest.raises(ValueError):
        parse_bits("102")


def test_to_jsonl_sorted_and_compact():
    assert to_jsonl({"b": INF, "a": frozenset({3, 1})}) == '{"a":[1,3],"b":"inf"}'


def test_write_jsonl_appends(tmp_path: Path):
    path = tmp_path / "out" / "r.jsonl"
    assert write_jsonl([{"x": 1}], path) == 1
    assert write_jsonl([{"x": 2}, {"x": 3}], path) == 2
    assert path.read_text(encoding="utf-8").splitlines() == ['{"x":1}', '{"x":2}', '{"x":3}']


# ── Activity log ───────────────────────────────────────────────────────────────

def test_activity_log(tmp_path: Path):
    activitylog.init_log(tmp_path / "log")
    try:
        activitylog.log_suite("ad", True, {"contexts": 4})
        activitylog.log_probe(20, "case2", 2)
        activitylog.log_error("verify", "budget exceeded")
    finally:
        activitylog.init_log(None)
    lines = (tmp_path / "log" / "activity.log").read_text(encoding="utf-8").splitlines()
    assert len(lines) == 3
    assert "SUITE" in lines[0] and "ad passed (contexts=4)" in lines[0]
    assert "g of length 20: case2, 2 agreement(s)" in lines[1]
    assert "[verify] budget exceeded" in lines[2]


def test_activity_log_off_by_default(tmp_path: Path):
    activitylog.init_log(None)
    activitylog.log_error("x", "y")
    assert not any(tmp_path.iterdir())
