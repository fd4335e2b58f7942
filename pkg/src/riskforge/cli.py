"""Command-line entry point.

Exit status is 0 on success, 1 for validation or domain errors, and 2
for usage errors. Results go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .atdl import export_canonical, parse_file
from .corpus import CORPUS_NAMES, load_corpus
from .model import AssessmentBundle, AttackerProfile, DomainError
from .paths import enumerate_paths
from .report import (
    FORMATS,
    dominant_leaf_path,
    export_dot,
    markdown_table,
    csv_table,
    render_assessment_table,
    render_likelihood_framework,
    render_matrix,
    render_paths,
    render_shared_preconditions,
)
from .risk import assess_goal, assess_risk
from .scenario import RiskDiff, run_scenario
from .validation import validate_bundle

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2


def _load(source: str) -> AssessmentBundle:
    path = Path(source)
    if not path.exists() and source in CORPUS_NAMES:
        return load_corpus(source)
    try:
        return parse_file(path)
    except OSError as exc:
        raise DomainError(f"cannot read {source}: {exc.strerror or exc}") from None


def _load_valid(source: str) -> AssessmentBundle:
    bundle = _load(source)
    report = validate_bundle(bundle)
    for finding in report.warnings:
        print(finding, file=sys.stderr)
    report.raise_if_invalid()
    return bundle


def _budget(value: str) -> int:
    budget = int(value)
    if budget < 1:
        raise argparse.ArgumentTypeError("budget must be positive")
    return budget


def _id_list(value: str) -> list[str]:
    return [item for item in value.split(",") if item]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riskforge",
        description="Goal-driven risk assessment over ATDL attack-tree bundles.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("validate", help="check a bundle for consistency")
    p.add_argument("file")

    p = sub.add_parser("paths", help="enumerate minimal attack paths")
    p.add_argument("file")
    p.add_argument("--budget", type=_budget, help="maximum number of paths (default 100000)")

    p = sub.add_parser("score", help="assess the risks of a goal")
    p.add_argument("file")
    p.add_argument("--goal", help="goal id (default: the tree's goal)")
    p.add_argument("--profile", choices=("insider", "external"), default="insider")
    p.add_argument("--format", choices=FORMATS, default="markdown-table")

    p = sub.add_parser("whatif", help="recompute scores under a mitigation scenario")
    p.add_argument("file")
    p.add_argument("--scenario", required=True)
    p.add_argument("--format", choices=("markdown-table", "csv", "canonical-json"), default="markdown-table")

    p = sub.add_parser("report", help="render a report")
    p.add_argument("file")
    p.add_argument("--kind", required=True, choices=("assessment", "framework", "matrix", "shared-pre"))
    p.add_argument("--format", choices=FORMATS, default="markdown-table")
    p.add_argument("--profile", choices=("insider", "external"), default="insider")
    p.add_argument("--rows", type=_id_list, default=[], help="extra framework rows (comma-separated node ids)")
    p.add_argument("--budget", type=_budget)

    p = sub.add_parser("export", help="export the bundle as DOT or canonical JSON")
    p.add_argument("file")
    kind = p.add_mutually_exclusive_group(required=True)
    kind.add_argument("--dot", action="store_true")
    kind.add_argument("--json", action="store_true")
    p.add_argument("--highlight", metavar="RISK", help="highlight a risk's dominant path (DOT only)")
    return parser


def _diff_rows(diffs: Sequence[RiskDiff]) -> list[list[str]]:
    rows = []
    for d in diffs:
        after_likelihood = "-" if d.after.likelihood is None else str(d.after.likelihood)
        status = "eliminated" if d.newly_infeasible else ("dominant path changed" if d.dominant_path_changed else "")
        rows.append(
            [
                d.risk_id,
                f"{d.before.score} → {d.after.score}",
                f"{d.delta_score:+d}",
                f"{d.before.likelihood} → {after_likelihood}",
                ", ".join(d.after.dominant or ()) or "-",
                status,
            ]
        )
    return rows


def _cmd_validate(args) -> int:
    bundle = _load(args.file)
    report = validate_bundle(bundle)
    for finding in report.findings:
        print(finding, file=sys.stderr)
    print(f"{args.file}: {len(report.errors)} error(s), {len(report.warnings)} warning(s)")
    return EXIT_OK if report.valid else EXIT_DOMAIN


def _cmd_paths(args) -> int:
    bundle = _load_valid(args.file)
    print(render_paths(enumerate_paths(bundle.require_tree(), args.budget)), end="")
    return EXIT_OK


def _assessments(bundle: AssessmentBundle, goal: Optional[str], profile: str):
    goal = goal or bundle.require_tree().goal
    assessments = assess_goal(goal, bundle, AttackerProfile.from_name(profile))
    for a in assessments:
        for warning in a.warnings:
            print(f"warning: {warning}", file=sys.stderr)
    return assessments


def _cmd_score(args) -> int:
    bundle = _load_valid(args.file)
    assessments = _assessments(bundle, args.goal, args.profile)
    print(render_assessment_table(assessments, args.format, bundle.tree), end="")
    return EXIT_OK


def _cmd_whatif(args) -> int:
    bundle = _load_valid(args.file)
    outcome = run_scenario(bundle, args.scenario)
    for warning in outcome.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    header = ("Risk ID", "Score", "Delta", "Likelihood", "Dominant Path (after)", "Status")
    rows = _diff_rows(outcome.diffs)
    if args.format == "csv":
        print(csv_table(header, rows), end="")
    elif args.format == "canonical-json":
        from .atdl import dumps_canonical

        payload = {
            "scenario": outcome.scenario.id,
            "diffs": [
                {
                    "risk_id": d.risk_id,
                    "before": vars(d.before) | {"dominant": list(d.before.dominant or [])},
                    "after": vars(d.after) | {"dominant": list(d.after.dominant or [])},
                    "delta_score": d.delta_score,
                    "dominant_path_changed": d.dominant_path_changed,
                    "newly_infeasible": d.newly_infeasible,
                }
                for d in outcome.diffs
            ],
        }
        print(dumps_canonical(payload), end="")
    else:
        print(f"Scenario {outcome.scenario.id}\n")
        print(markdown_table(header, rows), end="")
    return EXIT_OK


def _cmd_report(args) -> int:
    bundle = _load_valid(args.file)
    if args.kind == "framework":
        fmt = args.format if args.format != "dot-graph" else "markdown-table"
        print(render_likelihood_framework(bundle, args.rows, fmt), end="")
    elif args.kind == "shared-pre":
        print(render_shared_preconditions(bundle, args.budget), end="")
    else:
        assessments = _assessments(bundle, None, args.profile)
        if args.kind == "matrix":
            print(render_matrix(assessments), end="")
        else:
            print(render_assessment_table(assessments, args.format, bundle.tree), end="")
    return EXIT_OK


def _cmd_export(args) -> int:
    bundle = _load_valid(args.file)
    if args.json:
        if args.highlight:
            raise DomainError("--highlight applies to --dot output only")
        print(export_canonical(bundle), end="")
        return EXIT_OK
    tree = bundle.require_tree()
    highlight = None
    if args.highlight:
        assessment = assess_risk(bundle.risk(args.highlight), bundle)
        highlight = dominant_leaf_path(tree, assessment)
    print(export_dot(tree, highlight), end="")
    return EXIT_OK


COMMANDS = {
    "validate": _cmd_validate,
    "paths": _cmd_paths,
    "score": _cmd_score,
    "whatif": _cmd_whatif,
    "report": _cmd_report,
    "export": _cmd_export,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
