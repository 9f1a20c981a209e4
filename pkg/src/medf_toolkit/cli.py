from __future__ import annotations

from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any

import typer

try:  # typer releases that bundle their own click
    from typer._click import exceptions as click_exceptions
except ImportError:
    from click import exceptions as click_exceptions

from . import activitylog
from .bounds import check_growth, classify_regime, eval_bound, reindex_sequence
from .config import Settings, load_settings
from .construction import e_hat_prefix, e_prefix, good_prefixes, marked_set
from .errors import (
    BoundSpecError,
    BudgetExceeded,
    CodecError,
    ConfigError,
    PreconditionError,
    RegimeError,
    ScanBoundExceeded,
)
from .io import dump_fspec, load_fspec, parse_bits, parse_seq, write_jsonl
from .lift import build_lift_context, lift_member_prefix, lift_membership
from .model import BoundSpec, ConstructionContext, TreeNode
from .oracle import SUITES, verify_all, verify_codec_suite
from .probe import agreement_survey, case2_copy_positions, match_finder, run_probe
from .report import (
    print_error,
    print_growth,
    print_probe,
    print_regime,
    print_reports,
    print_survey,
)
from .tree import branch_prefix_check, is_tree_node, level_set

app = typer.Typer(
    no_args_is_help=True,
    add_completion=False,
    help="medf: build, enumerate, probe and verify a closed maximal eventually different family.",
)
tree_app = typer.Typer(no_args_is_help=True, help="Nodes of the tree whose branches are the family.")
lift_app = typer.Typer(no_args_is_help=True, help="Lift members from F∘e to all coordinates.")
app.add_typer(tree_app, name="tree")
app.add_typer(lift_app, name="lift")

EXIT_OK = 0
EXIT_VIOLATED = 1
EXIT_USAGE = 2
EXIT_INCONCLUSIVE = 3


class SuiteName(str, Enum):
    codec = "codec"
    injectivity = "injectivity"
    ad = "ad"
    ed = "ed"
    tree = "tree"
    lift = "lift"
    all = "all"


class StrategyName(str, Enum):
    literal = "literal"
    direct = "direct"


@dataclass
class _State:
    settings: Settings = field(default_factory=Settings)
    fspec: Path | None = None
    output: Path | None = None


_state = _State()


# ── Shared plumbing ────────────────────────────────────────────────────────────

@contextmanager
def _exit_codes(command: str) -> Iterator[None]:
    """Map library errors onto the documented exit codes."""
    try:
        yield
    except (BoundSpecError, ConfigError, RegimeError, PreconditionError, ValueError) as e:
        activitylog.log_error(command, str(e))
        print_error(str(e))
        raise typer.Exit(code=EXIT_USAGE) from e
    except CodecError as e:
        activitylog.log_error(command, str(e))
        print_error(str(e))
        raise typer.Exit(code=EXIT_VIOLATED) from e
    except (BudgetExceeded, ScanBoundExceeded) as e:
        activitylog.log_error(command, str(e))
        print_error(str(e))
        raise typer.Exit(code=EXIT_INCONCLUSIVE) from e


def _spec() -> BoundSpec:
    if _state.fspec is None:
        raise BoundSpecError("no F-spec given: pass --fspec PATH before the command")
    return load_fspec(_state.fspec)


def _emit(*records: dict[str, Any]) -> None:
    write_jsonl(records, _state.output)


def _horizon(value: int | None) -> int:
    horizon = _state.settings.horizon if value is None else value
    if horizon < 0:
        raise ConfigError(f"horizon must be ≥ 0, got {horizon}")
    return horizon


@app.callback()
def main(
    config: Path | None = typer.Option(None, "--config", help="TOML settings file (default local/medf.toml)"),
    fspec: Path | None = typer.Option(None, "--fspec", "-f", help="F-spec JSON file"),
    output: Path | None = typer.Option(None, "--output", "-o", help="Append JSONL here instead of stdout"),
) -> None:
    with _exit_codes("config"):
        _state.settings = load_settings(config)
    _state.fspec = fspec
    _state.output = output
    activitylog.init_log(_state.settings.log_dir)


# ── bounds ─────────────────────────────────────────────────────────────────────

@app.command("growth-check")
def growth_check(
    up_to: int = typer.Option(8, "--up-to", help="Check the growth condition for n ≤ this"),
) -> None:
    """Check the growth condition Σ_{l≤n} |∏_{k<l} F(k)|·2^l ≤ F(n)."""
    with _exit_codes("growth-check"):
        spec = _spec()
        activitylog.log_run("growth-check", spec.describe(), up_to=up_to)
        report = check_growth(spec, up_to)
    _emit({
        "command": "growth-check",
        "fspec": dump_fspec(spec),
        "passed": report.passed,
        "up_to": report.up_to,
        "first_failure": report.first_failure,
        "sums": [str(s) for s in report.sums],
    })
    print_growth(spec, report)
    raise typer.Exit(code=EXIT_OK if report.passed else EXIT_VIOLATED)


@app.command()
def classify() -> None:
    """Which regime F is in: liminf finite, lim infinite, or mixed and compactable."""
    with _exit_codes("classify"):
        spec = _spec()
        regime = classify_regime(spec)
    _emit({
        "command": "classify",
        "fspec": dump_fspec(spec),
        "kind": regime.kind,
        "liminf": str(regime.liminf),
        "compactable": regime.compactable,
        "infinite_often": regime.infinite_often,
    })
    print_regime(spec, regime)


@app.command()
def reindex(
    count: int = typer.Option(4, "--count", help="Number of entries e_0 < e_1 < …"),
    restrict_to_finite: bool = typer.Option(False, "--restrict-to-finite", help="Draw entries from {n : F(n) < ∞}"),
) -> None:
    """The minimal reindex sequence along which F∘e satisfies the growth condition."""
    with _exit_codes("reindex"):
        spec = _spec()
        activitylog.log_run("reindex", spec.describe(), count=count, restrict=restrict_to_finite)
        seq = reindex_sequence(spec, count, restrict_to_finite, scan_bound=_state.settings.scan_bound)
    _emit({
        "command": "reindex",
        "fspec": dump_fspec(spec),
        "entries": list(seq.entries),
        "values": [str(eval_bound(spec, e)) for e in seq.entries],
        "restrict_to_finite": restrict_to_finite,
    })


@app.command("codec-selftest")
def codec_selftest(
    code_limit: int = typer.Option(10_000, "--code-limit", help="Round-trip every code below this"),
) -> None:
    """Round-trip both codecs and check the pair codec is appropriate."""
    with _exit_codes("codec-selftest"):
        spec = _spec()
        report = verify_codec_suite(spec, code_limit, _state.settings.enumeration_budget)
    activitylog.log_codec(report.parameters["level_bound"], report.counts.get("pairs", 0), report.passed)
    _emit(report.to_record())
    print_reports([report])
    raise typer.Exit(code=EXIT_OK if report.passed else EXIT_VIOLATED)


# ── construction ───────────────────────────────────────────────────────────────

@app.command()
def member(
    g: str = typer.Option(..., "--g", help="Comma-separated g, e.g. 1,0,4"),
    c: str = typer.Option(..., "--c", help="0/1 string of the same length"),
    horizon: int | None = typer.Option(None, "--horizon", help="Prefix length (default len(g))"),
) -> None:
    """e(g, c), ê(g, c) and ν(g, c) on a prefix."""
    with _exit_codes("member"):
        spec = _spec()
        ctx = ConstructionContext(spec, parse_seq(g), parse_bits(c))
        for n, v in enumerate(ctx.g):
            if not v < eval_bound(spec, n):
                raise ValueError(f"g({n}) = {v} is not below F({n}) = {eval_bound(spec, n)}")
        upto = len(ctx) if horizon is None else _horizon(horizon)
        head = ctx.restrict(upto)
        record = {
            "command": "member",
            "g": list(head.g),
            "c": list(head.c),
            "e": list(e_prefix(ctx, upto)),
            "e_hat": list(e_hat_prefix(ctx, upto)),
            "nu": sorted(marked_set(head, value_bound=upto)),
            "good": good_prefixes(head.c)[-1],
            "in_tree": branch_prefix_check(spec, head.g, head.c),
        }
    _emit(record)


# ── tree ───────────────────────────────────────────────────────────────────────

@tree_app.command("enum")
def tree_enum(
    level: int = typer.Option(..., "--level", help="Node length"),
    value_budget: int | None = typer.Option(None, "--value-budget", help="Cap values where F(n) = ∞"),
) -> None:
    """Every node of the given length, one JSON line each."""
    with _exit_codes("tree enum"):
        spec = _spec()
        activitylog.log_run("tree enum", spec.describe(), level=level)
        budget = _state.settings.value_budget if value_budget is None else value_budget
        nodes = level_set(spec, level, budget, _state.settings.enumeration_budget)
    _emit(*({"f": list(f), "valid": True} for f in nodes))


@tree_app.command("check")
def tree_check(
    node: str = typer.Option(..., "--node", help="Comma-separated node, e.g. 1,4"),
) -> None:
    """Whether a finite sequence is a node; exit 1 if not."""
    with _exit_codes("tree check"):
        spec = _spec()
        f = parse_seq(node)
        valid = is_tree_node(TreeNode(f, spec))
    _emit({"f": list(f), "valid": valid})
    raise typer.Exit(code=EXIT_OK if valid else EXIT_VIOLATED)


# ── lift ───────────────────────────────────────────────────────────────────────

@lift_app.command("extend")
def lift_extend(
    f: str = typer.Option(..., "--f", help="Member prefix on F∘e, comma-separated"),
    horizon: int = typer.Option(..., "--horizon", help="Length of the lifted prefix"),
    compact: bool = typer.Option(False, "--compact", help="Reindex inside {n : F(n) < ∞}"),
) -> None:
    """ĝ(f)↾horizon."""
    with _exit_codes("lift extend"):
        spec = _spec()
        ctx = build_lift_context(spec, _horizon(horizon), compact)
        f_on_E = parse_seq(f)
        lifted = lift_member_prefix(ctx, f_on_E, horizon)
    _emit({
        "command": "lift extend",
        "entries": list(ctx.entries),
        "f": list(f_on_E),
        "lifted": list(lifted),
        "compact": compact,
    })


@lift_app.command("check")
def lift_check(
    g: str = typer.Option(..., "--g", help="Comma-separated prefix to test"),
    compact: bool = typer.Option(False, "--compact", help="Reindex inside {n : F(n) < ∞}"),
) -> None:
    """Whether g is a prefix of a lifted member; exit 1 if not."""
    with _exit_codes("lift check"):
        spec = _spec()
        seq = parse_seq(g)
        ctx = build_lift_context(spec, len(seq), compact)
        valid = lift_membership(ctx, seq)
    _emit({"command": "lift check", "g": list(seq), "entries": list(ctx.entries), "valid": valid})
    raise typer.Exit(code=EXIT_OK if valid else EXIT_VIOLATED)


# ── probe ──────────────────────────────────────────────────────────────────────

@app.command()
def probe(
    g: str = typer.Option(..., "--g", help="Comma-separated g"),
    min_agreements: int = typer.Option(5, "--min-agreements"),
    strategy: StrategyName = typer.Option(StrategyName.literal, "--strategy"),
    max_stem: int | None = typer.Option(None, "--max-stem", help="Longest Case 1 stem searched"),
) -> None:
    """Search for a family member agreeing with g; exit 3 if none is found."""
    with _exit_codes("probe"):
        spec = _spec()
        seq = parse_seq(g)
        stem = _state.settings.max_stem if max_stem is None else max_stem
        outcome = run_probe(spec, seq, strategy.value, stem)
        found = match_finder(spec, seq, min_agreements, strategy.value, stem)
    record: dict[str, Any] = {
        "command": "probe",
        "g": list(seq),
        "strategy": strategy.value,
        "outcome": outcome.kind,
        "agreements": None if found is None else len(found.agreements),
    }
    if outcome.kind == "case1":
        record["witness"] = {"chain": list(outcome.chain), "stem": list(outcome.stem)}
    elif outcome.kind == "case2":
        record["witness"] = {
            "c": list(outcome.c),
            "nu": case2_copy_positions(spec, seq, outcome.c),
            "diagnostics": outcome.diagnostics,
        }
    if found is not None:
        record["match"] = {"member": list(found.member), "positions": list(found.agreements),
                           "source": found.source}
    activitylog.log_probe(len(seq), outcome.kind, None if found is None else len(found.agreements))
    _emit(record)
    print_probe(outcome, found, len(seq))
    raise typer.Exit(code=EXIT_OK if found is not None else EXIT_INCONCLUSIVE)


@app.command()
def survey(
    length: int = typer.Option(20, "--length", help="Length of each random g"),
    count: int = typer.Option(100, "--count", help="Number of random g"),
    min_agreements: int = typer.Option(5, "--min-agreements"),
    seed: int | None = typer.Option(None, "--seed"),
    max_stem: int | None = typer.Option(None, "--max-stem", help="Longest Case 1 stem searched"),
) -> None:
    """Measure how often seeded random g meet min_agreements with some member."""
    with _exit_codes("survey"):
        spec = _spec()
        activitylog.log_run("survey", spec.describe(), length=length, count=count)
        result = agreement_survey(
            spec, length, count,
            seed=_state.settings.seed if seed is None else seed,
            min_agreements=min_agreements,
            value_budget=_state.settings.value_budget,
            max_stem=_state.settings.max_stem if max_stem is None else max_stem,
        )
    activitylog.log_survey(result.count, result.successes, result.min_agreements)
    _emit({"command": "survey", "fspec": dump_fspec(spec), **result.to_record()})
    print_survey(result)


# ── verify ─────────────────────────────────────────────────────────────────────

@app.command()
def verify(
    suite: SuiteName = typer.Option(SuiteName.all, "--suite"),
    horizon: int | None = typer.Option(None, "--horizon", help="Context length"),
    samples: int | None = typer.Option(None, "--samples", help="Random contexts instead of all of them"),
    seed: int | None = typer.Option(None, "--seed"),
    lift_horizon: int | None = typer.Option(None, "--lift-horizon", help="Horizon for the lift suite"),
) -> None:
    """Run brute-force verification suites; exit 1 on any counterexample."""
    settings = _state.settings
    with _exit_codes("verify"):
        spec = _spec()
        n = _horizon(horizon)
        wanted = SUITES if suite is SuiteName.all else (suite.value,)
        activitylog.log_run("verify", spec.describe(), suite=suite.value, horizon=n)
        reports = verify_all(
            spec, n,
            value_budget=settings.value_budget,
            budget=settings.enumeration_budget,
            sample_count=samples,
            seed=settings.seed if seed is None else seed,
            lift_horizon=lift_horizon,
            suites=wanted,
        )
    for r in reports:
        activitylog.log_suite(r.suite, r.passed, r.counts)
    _emit(*(r.to_record() for r in reports))
    print_reports(reports)
    raise typer.Exit(code=EXIT_OK if all(r.passed for r in reports) else EXIT_VIOLATED)


def run(argv: list[str] | None = None) -> int:
    """Entry point returning the exit code instead of exiting."""
    try:
        result = app(args=argv, standalone_mode=False)
    except (click_exceptions.Exit, typer.Exit) as e:
        return e.exit_code
    except click_exceptions.ClickException as e:
        e.show()
        return EXIT_USAGE
    return result if isinstance(result, int) else EXIT_OK
