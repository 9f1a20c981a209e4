from __future__ import annotations

from rich.columns import Columns
from rich.console import Console
from rich.panel import Panel
from rich.table import Table
from rich.text import Text

from .model import AgreementSurvey, BoundSpec, GrowthReport, Match, ProbeOutcome, Regime, VerifyReport

# stdout carries JSONL; everything human-readable goes to stderr
console = Console(stderr=True)

# ── Palette ────────────────────────────────────────────────────────────────────
_ACCENT  = "#4d9fff"
_GREEN   = "#3ecf8e"
_AMBER   = "#f0a500"
_RED     = "#f05c5c"
_TEXT    = "#c9d1e0"
_MID     = "#8896af"
_DIM     = "#546075"
_BORDER  = "#2a3347"


def _stat_panel(value: str, label: str, colour: str) -> Panel:
    body = Text()
    body.append(f"{value}\n", style=f"bold {colour}")
    body.append(label, style=f"dim {_DIM}")
    return Panel(body, border_style=_BORDER, padding=(0, 2), expand=True)


def _banner(ok: bool, headline: str, detail: str = "") -> Panel:
    colour = _GREEN if ok else _RED
    body = Text()
    body.append(f"{'✓' if ok else '✗'}  {headline}", style=f"bold {colour}")
    if detail:
        body.append(f"\n{detail}", style=f"dim {_MID}")
    return Panel(body, border_style=colour, padding=(0, 2))


def print_growth(spec: BoundSpec, report: GrowthReport) -> None:
    console.print()
    console.print(Text(f"  GROWTH  {spec.describe()}", style=f"dim {_DIM}"))
    console.print()
    table = Table(border_style=_BORDER, header_style=f"bold {_MID}")
    table.add_column("n", justify="right")
    table.add_column("Σ counts", justify="right")
    for n, total in enumerate(report.sums):
        style = _RED if n == report.first_failure else _TEXT
        table.add_row(str(n), str(total), style=style)
    console.print(table)
    if report.passed:
        console.print(_banner(True, f"growth condition holds through n = {report.up_to}"))
    else:
        console.print(_banner(False, f"growth condition fails at n = {report.first_failure}"))


def print_regime(spec: BoundSpec, regime: Regime) -> None:
    console.print(Columns([
        _stat_panel(regime.kind, "regime", _ACCENT),
        _stat_panel(str(regime.liminf), "liminf F", _TEXT),
        _stat_panel("yes" if regime.compactable else "no", "finite infinitely often", _TEXT),
    ], equal=True, expand=True))


def print_reports(reports: list[VerifyReport]) -> None:
    console.print()
    console.print(Text("  VERIFICATION", style=f"dim {_DIM}"))
    console.print()
    table = Table(border_style=_BORDER, header_style=f"bold {_MID}")
    table.add_column("suite")
    table.add_column("result")
    table.add_column("counts", style=_MID)
    table.add_column("time", justify="right", style=_DIM)
    for r in reports:
        result = Text("pass", style=f"bold {_GREEN}") if r.passed else Text("FAIL", style=f"bold {_RED}")
        counts = ", ".join(f"{k} {v}" for k, v in sorted(r.counts.items()))
        table.add_row(r.suite, result, counts, f"{r.elapsed:.2f}s")
    console.print(table)
    for r in reports:
        if not r.passed and r.counterexample:
            check = r.counterexample.get("check", "?")
            console.print(_banner(False, f"{r.suite}: {check}", str(r.counterexample)))


def print_probe(outcome: ProbeOutcome, match: Match | None, length: int) -> None:
    colour = {"case1": _ACCENT, "case2": _GREEN, "inconclusive": _AMBER}[outcome.kind]
    hits = str(len(match.agreements)) if match else "—"
    console.print(Columns([
        _stat_panel(outcome.kind, "probe outcome", colour),
        _stat_panel(hits, f"agreements of {length}", _TEXT),
        _stat_panel(match.source if match else "none", "match source", _MID),
    ], equal=True, expand=True))


def print_survey(survey: AgreementSurvey) -> None:
    colour = _GREEN if survey.successes else _AMBER
    best = max(survey.best, default=0)
    console.print(Columns([
        _stat_panel(f"{survey.successes}/{survey.count}", f"reach {survey.min_agreements}", colour),
        _stat_panel(str(best), "best agreements", _TEXT),
        _stat_panel(f"{survey.rate:.0%}", "rate", _MID),
    ], equal=True, expand=True))


def print_error(message: str) -> None:
    console.print(Text(f"  ✗ {message}", style=f"bold {_RED}"))
