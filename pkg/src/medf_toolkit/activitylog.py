"""activitylog.py — plain-text activity log for medf runs.

Writes to <log_dir>/activity.log when a log directory is configured.
Format: YYYY-MM-DD HH:MM:SS  EVENT  message

Only command names, parameters, counts and outcomes are written.
"""
from __future__ import annotations

import sys
from datetime import datetime
from pathlib import Path

_log_path: Path | None = None


def init_log(log_dir: Path | None) -> None:
    """Point the log at log_dir/activity.log; None turns logging off."""
    global _log_path
    if log_dir is None:
        _log_path = None
        return
    log_dir = Path(log_dir)
    log_dir.mkdir(parents=True, exist_ok=True)
    _log_path = log_dir / "activity.log"


def _write(event: str, message: str) -> None:
    if _log_path is None:
        return
    ts = datetime.now().strftime("%Y-%m-%d %H:%M:%S")
    line = f"{ts}  {event:<20}  {message}\n"
    try:
        with _log_path.open("a", encoding="utf-8") as f:
            f.write(line)
    except Exception as e:
        print(f"  [log] warning: could not write log: {e}", file=sys.stderr)


# ── Public log events ──────────────────────────────────────────────────────────

def log_run(command: str, spec: str, **params: object) -> None:
    extra = " ".join(f"{k}={v}" for k, v in sorted(params.items()))
    _write("RUN", f"{command} on {spec}" + (f" {extra}" if extra else ""))


def log_suite(suite: str, passed: bool, counts: dict[str, int]) -> None:
    summary = ", ".join(f"{k}={v}" for k, v in sorted(counts.items()))
    _write("SUITE", f"{suite} {'passed' if passed else 'FAILED'} ({summary})")


def log_codec(level_bound: int, checked: int, passed: bool) -> None:
    _write("CODEC", f"appropriateness through level {level_bound}: {checked} pair(s), "
                    f"{'ok' if passed else 'violated'}")


def log_probe(length: int, outcome: str, agreements: int | None) -> None:
    hits = "no match" if agreements is None else f"{agreements} agreement(s)"
    _write("PROBE", f"g of length {length}: {outcome}, {hits}")


def log_survey(count: int, successes: int, min_agreements: int) -> None:
    _write("PROBE", f"survey: {successes} of {count} g reach {min_agreements} agreement(s)")


def log_error(context: str, message: str) -> None:
    _write("ERROR", f"[{context}] {message}")
