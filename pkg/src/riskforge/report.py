"""Renderers for assessments, the likelihood framework, and attack trees."""

from __future__ import annotations

import csv
import io
from typing import Iterable, Optional, Sequence

from .atdl import dumps_canonical
from .likelihood import admissible_range, format_range, vector_profile
from .model import AssessmentBundle, AttackTree, Connector, DomainError, Role
from .paths import AttackPath, enumerate_paths, satisfies, shared_precondition_report
from .risk import RiskAssessment, risk_matrix

FORMATS = ("markdown-table", "csv", "canonical-json", "dot-graph")
NO_RISKS = "No risks to report."

ASSESSMENT_COLUMNS = ("Risk ID", "Description", "Likelihood", "Impact", "Risk Score", "Attack Vectors")


def _label(tree: Optional[AttackTree], node_id: str) -> str:
    if tree is not None and node_id in tree and tree.node(node_id).label:
        return tree.node(node_id).label
    return node_id


def vector_roles(assessment: RiskAssessment) -> list[tuple[str, Role]]:
    """Distinct (vector, role) pairs of a risk in order of first appearance."""
    seen: list[tuple[str, Role]] = []
    for detail in assessment.per_path_detail:
        for step in detail.path.steps:
            if (step.vector, step.role) not in seen:
                seen.append((step.vector, step.role))
    return seen


def _vectors_cell(assessment: RiskAssessment, tree: Optional[AttackTree]) -> str:
    return ", ".join(f"{_label(tree, v)} ({role.title})" for v, role in vector_roles(assessment))


def _assessment_rows(assessments: Sequence[RiskAssessment], tree: Optional[AttackTree]) -> list[list[str]]:
    return [
        [
            a.risk_id,
            a.description,
            str(a.likelihood),
            str(a.impact),
            str(a.score),
            _vectors_cell(a, tree),
        ]
        for a in assessments
    ]


def _md_cell(text: str) -> str:
    return text.replace("|", "\\|").replace("\n", " ")


def markdown_table(header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    for row in rows:
        lines.append("| " + " | ".join(_md_cell(c) for c in row) + " |")
    return "\n".join(lines) + "\n"


def csv_table(header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer)  # RFC 4180 quoting, CRLF records
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def assessment_to_dict(a: RiskAssessment) -> dict:
    def binding(b):
        return {
            "vector": b.vector,
            "role": b.role.value,
            "base": b.base,
            "admissible": list(b.admissible),
            "resolved": b.resolved,
            "role_modifier": b.role_modifier,
            "effective": b.effective,
            "pinned": b.pinned,
            "clamped_from": b.clamped_from,
        }

    return {
        "risk_id": a.risk_id,
        "description": a.description,
        "likelihood": {"value": a.likelihood.value, "label": a.likelihood.label},
        "impact": {"value": a.impact.value, "label": a.impact.label},
        "score": a.score,
        "dominant_path": a.dominant.path_id,
        "tie_break": a.tie_break,
        "paths": [
            {"id": d.path_id, "likelihood": d.likelihood, "steps": [binding(b) for b in d.bindings]}
            for d in a.per_path_detail
        ],
    }


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def _assessment_dot(assessments: Sequence[RiskAssessment], tree: Optional[AttackTree]) -> str:
    lines = ["digraph risks {", "  rankdir=LR;"]
    vectors: list[str] = []
    for a in assessments:
        label = f"{a.risk_id}\n{a.description}\nL={a.likelihood} I={a.impact} score={a.score}"
        lines.append(f"  {_dot_quote(a.risk_id)} [shape=box, label={_dot_quote(label)}];")
        for vector, _ in vector_roles(a):
            if vector not in vectors:
                vectors.append(vector)
    for v in vectors:
        lines.append(f"  {_dot_quote('vector:' + v)} [shape=ellipse, label={_dot_quote(_label(tree, v))}];")
    for a in assessments:
        dominant = set(a.dominant.path.vectors)
        for vector, role in vector_roles(a):
            style = ", color=red, penwidth=2" if vector in dominant else ""
            lines.append(
                f"  {_dot_quote('vector:' + vector)} -> {_dot_quote(a.risk_id)} "
                f"[label={_dot_quote(role.title)}{style}];"
            )
    lines.append("}")
    return "\n".join(lines) + "\n"


def render_assessment_table(
    assessments: Sequence[RiskAssessment],
    format: str = "markdown-table",
    tree: Optional[AttackTree] = None,
) -> str:
    """Render assessments in the shape of the comprehensive risk table."""
    if format not in FORMATS:
        raise DomainError(f"unknown report format {format!r}; choose from {', '.join(FORMATS)}")
    assessments = list(assessments)
    if not assessments:
        if format == "canonical-json":
            return dumps_canonical({"risks": [], "note": NO_RISKS})
        if format == "dot-graph":
            return f"digraph risks {{\n  label={_dot_quote(NO_RISKS)};\n}}\n"
        return NO_RISKS + "\n"
    if format == "markdown-table":
        return markdown_table(ASSESSMENT_COLUMNS, _assessment_rows(assessments, tree))
    if format == "csv":
        return csv_table(ASSESSMENT_COLUMNS, _assessment_rows(assessments, tree))
    if format == "canonical-json":
        return dumps_canonical({"risks": [assessment_to_dict(a) for a in assessments]})
    return _assessment_dot(assessments, tree)


FRAMEWORK_COLUMNS = ("Attack Path", "Business Knowledge Required", "Technical Complexity", "Likelihood", "Justification")


def _justification(low: int, high: int) -> str:
    if low == high:
        return f"Consistent ({low}) regardless of insider status."
    return f"Lower ({low}) for an external attacker; higher ({high}) with insider advantage."


def framework_rows(bundle: AssessmentBundle, extra_rows: Sequence[str] = ()) -> list[list[str]]:
    tree = bundle.require_tree()
    ids = [n.id for n in tree.top_level] + [r for r in extra_rows if r not in {n.id for n in tree.top_level}]
    rows = []
    for node_id in ids:
        profile = vector_profile(tree, node_id)
        low, high = admissible_range(profile)
        rows.append(
            [
                _label(tree, node_id),
                profile.business_knowledge.title,
                profile.technical_complexity.title,
                format_range((low, high)),
                _justification(low, high),
            ]
        )
    return rows


def render_likelihood_framework(
    bundle: AssessmentBundle, extra_rows: Sequence[str] = (), format: str = "markdown-table"
) -> str:
    """One row per top-level vector, then any ``extra_rows`` node ids."""
    rows = framework_rows(bundle, extra_rows)
    if format == "csv":
        return csv_table(FRAMEWORK_COLUMNS, rows)
    if format == "canonical-json":
        return dumps_canonical({"framework": [dict(zip(FRAMEWORK_COLUMNS, r)) for r in rows]})
    if format != "markdown-table":
        raise DomainError(f"framework report cannot be rendered as {format!r}")
    return markdown_table(FRAMEWORK_COLUMNS, rows)


def render_matrix(assessments: Sequence[RiskAssessment]) -> str:
    matrix = risk_matrix(assessments)
    header = ["Likelihood \\ Impact"] + [str(i) for i in range(1, 6)]
    rows = []
    for likelihood in range(5, 0, -1):
        cells = [", ".join(matrix.cell(likelihood, i)) for i in range(1, 6)]
        rows.append([f"{likelihood}"] + cells)
    return markdown_table(header, rows)


def render_shared_preconditions(bundle: AssessmentBundle, budget: Optional[int] = None) -> str:
    tree = bundle.require_tree()
    rows = []
    for row in shared_precondition_report(tree, bundle.risks, budget):
        try:
            description = bundle.precondition(row.precondition).description
        except DomainError:
            description = ""
        rows.append(
            [
                row.precondition,
                description,
                ", ".join(row.dependent_leaves),
                str(row.path_count),
                ", ".join(row.risks),
            ]
        )
    if not rows:
        return "No preconditions are referenced by attack steps.\n"
    return markdown_table(("Precondition", "Description", "Dependent Steps", "Paths", "Risks"), rows)


def render_paths(paths: Sequence[AttackPath]) -> str:
    lines = [f"{len(paths)} minimal attack path(s)"]
    for number, path in enumerate(paths, 1):
        lines.append(f"{number:>4}. {path}")
    return "\n".join(lines) + "\n"


# Attack-tree graphs


def _check_highlight(tree: AttackTree, leaves: frozenset[str]) -> None:
    unknown = sorted(s for s in leaves if s not in tree or not tree.node(s).is_leaf)
    if unknown:
        raise DomainError(f"highlighted path names unknown leaves: {', '.join(unknown)}")
    covered: set[str] = set()
    for path in enumerate_paths(tree):
        if path.steps <= leaves:
            covered |= path.steps
    if not leaves or covered != leaves:
        raise DomainError("highlighted steps do not form a union of minimal attack paths")


def best_leaf_path(tree: AttackTree, node_id: str) -> AttackPath:
    """Most feasible minimal path inside a vector's subtree."""

    def feasibility(path: AttackPath) -> tuple[int, int]:
        return min(admissible_range(tree.node(s).profile) for s in path.steps)

    best = None
    for path in enumerate_paths(tree, node_id=node_id):
        if best is None or feasibility(path) > feasibility(best):
            best = path
    return best


def dominant_leaf_path(tree: AttackTree, assessment: RiskAssessment) -> frozenset[str]:
    steps: set[str] = set()
    for vector in assessment.dominant.path.vectors:
        steps |= best_leaf_path(tree, vector).steps
    return frozenset(steps)


def export_dot(tree: AttackTree, highlighted_path: Optional[Iterable[str]] = None) -> str:
    """Graphviz rendering of the tree, root at the top."""
    highlight: frozenset[str] = frozenset()
    if highlighted_path is not None:
        steps = highlighted_path.steps if isinstance(highlighted_path, AttackPath) else highlighted_path
        highlight = frozenset(steps)
        _check_highlight(tree, highlight)
    lit = set(highlight)
    if highlight:
        # Light every internal node whose subtree the path satisfies.
        for node in tree.nodes:
            if not node.is_leaf and satisfies(tree, highlight, node.id):
                lit.add(node.id)

    lines = [
        f"digraph {_dot_quote(tree.goal)} {{",
        f"  label={_dot_quote(tree.goal + ': ' + tree.goal_label)};",
        "  labelloc=t;",
        "  rankdir=TB;",
        '  node [fontname="Helvetica"];',
    ]
    for node in tree.nodes:
        if node.is_leaf:
            p = node.profile
            text = f"{node.label or node.id}\nbk={p.business_knowledge.value} tc={p.technical_complexity.value}"
            attrs = ["shape=ellipse"]
        else:
            text = f"{node.label or node.id}\n[{node.connector.value}]"
            if node.connector is Connector.AND:
                attrs = ["shape=box", 'style="rounded,filled"', 'fillcolor="lightblue"']
            else:
                attrs = ["shape=box", 'style="filled"', 'fillcolor="lightyellow"']
        if node.id in lit:
            attrs += ['color="red"', "penwidth=2"]
        lines.append(f"  {_dot_quote(node.id)} [label={_dot_quote(text)}, {', '.join(attrs)}];")
    for node in tree.nodes:
        for child in node.children:
            style = ' [color="red", penwidth=2]' if node.id in lit and child in lit else ""
            lines.append(f"  {_dot_quote(node.id)} -> {_dot_quote(child)}{style};")
    lines.append("}")
    return "\n".join(lines) + "\n"
