"""Cross-entity validation of an assessment bundle.

Findings are data: :func:`validate_bundle` never raises on a malformed
bundle, it reports every problem it can find.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional

from .likelihood import admissible_range, format_range, vector_profile
from .model import AssessmentBundle, AttackTree, DomainError, SourceSpan

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class Finding:
    severity: str
    location: str
    message: str
    span: Optional[SourceSpan] = None

    def __str__(self) -> str:
        where = f"{self.span}: " if self.span else ""
        return f"{where}{self.severity}: {self.location}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...]

    @property
    def errors(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.severity == ERROR)

    @property
    def warnings(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.severity == WARNING)

    @property
    def valid(self) -> bool:
        return not self.errors

    def raise_if_invalid(self) -> None:
        if not self.valid:
            lines = "\n".join(str(f) for f in self.errors)
            raise DomainError(f"bundle has {len(self.errors)} validation error(s):\n{lines}")


class _Collector:
    def __init__(self) -> None:
        self.findings: list[Finding] = []

    def error(self, location: str, message: str, span: Optional[SourceSpan] = None) -> None:
        self.findings.append(Finding(ERROR, location, message, span))

    def warning(self, location: str, message: str, span: Optional[SourceSpan] = None) -> None:
        self.findings.append(Finding(WARNING, location, message, span))

    def duplicates(self, what: str, items: Iterable) -> None:
        items = list(items)
        counts = Counter(item.id for item in items)
        seen: set[str] = set()
        for item in items:
            if counts[item.id] > 1 and item.id not in seen:
                seen.add(item.id)
                self.error(f"{what} {item.id}", f"duplicate {what} id {item.id!r}", item.span)


def _check_tree(tree: AttackTree, out: _Collector) -> bool:
    """Structural checks; returns whether the tree is safe to traverse."""
    out.duplicates("node", tree.nodes)
    if tree.is_empty:
        out.error(f"goal {tree.goal}", f"root node {tree.root!r} is not defined", tree.span)
        return False

    ok = True
    parents: Counter[str] = Counter()
    for node in tree.nodes:
        where = f"node {node.id}"
        if node.is_leaf:
            if node.children:
                out.error(where, "leaf nodes cannot have children", node.span)
                ok = False
            if node.connector is not None:
                out.error(where, "leaf nodes cannot carry a connector", node.span)
        else:
            if node.connector is None:
                out.error(where, "internal node needs an AND or OR connector", node.span)
            if not node.children:
                out.error(where, "internal node needs at least one child", node.span)
        for child in node.children:
            parents[child] += 1
            if child not in tree:
                out.error(where, f"child {child!r} is not defined", node.span)
                ok = False
    if parents[tree.root]:
        out.error(f"node {tree.root}", "root node cannot be another node's child", tree.node(tree.root).span)
        ok = False
    for node_id, count in parents.items():
        if count > 1:
            span = tree.index[node_id].span if node_id in tree else None
            out.error(f"node {node_id}", f"node has {count} parents; attack trees need exactly one", span)
            ok = False
    if not ok:
        return False

    reached: set[str] = set()
    stack = [tree.root]
    while stack:
        nid = stack.pop()
        if nid in reached:
            out.error(f"node {nid}", "node is reachable more than once (cycle)", tree.node(nid).span)
            return False
        reached.add(nid)
        stack.extend(tree.node(nid).children)
    for node in tree.nodes:
        if node.id not in reached:
            out.error(f"node {node.id}", "node is not reachable from the root", node.span)
            ok = False
    return ok


def validate_bundle(bundle: AssessmentBundle) -> ValidationReport:
    out = _Collector()
    system = bundle.system

    out.duplicates("component", system.components)
    out.duplicates("boundary", system.boundaries)
    out.duplicates("precondition", bundle.preconditions)
    out.duplicates("risk", bundle.risks)
    out.duplicates("scenario", bundle.scenarios)

    components = {c.id for c in system.components}
    boundaries = {b.id for b in system.boundaries}
    preconditions = {p.id for p in bundle.preconditions}

    for flow in system.flows:
        where = f"flow {flow.source} -> {flow.target}"
        for end in (flow.source, flow.target):
            if end not in components:
                out.error(where, f"unknown component {end!r}", flow.span)
        if flow.crosses is not None and flow.crosses not in boundaries:
            out.error(where, f"unknown boundary {flow.crosses!r}", flow.span)

    for pre in bundle.preconditions:
        if pre.component not in components:
            out.error(f"precondition {pre.id}", f"unknown component {pre.component!r}", pre.span)

    tree = bundle.tree
    if tree is None:
        for risk in bundle.risks:
            out.error(f"risk {risk.id}", f"goal {risk.goal!r} is not declared", risk.span)
        for scenario in bundle.scenarios:
            if scenario.disabled_leaves:
                out.error(f"scenario {scenario.id}", "cannot disable steps without an attack tree", scenario.span)
        return ValidationReport(tuple(out.findings))
    if tree.is_empty and tree.root in bundle.retired:
        out.warning(f"goal {tree.goal}", "every attack step has been pruned by scenarios", tree.span)
        tree_ok = False
    else:
        tree_ok = _check_tree(tree, out)

    referenced_pre: set[str] = set()
    for leaf in tree.leaves:
        profile = leaf.profile
        referenced_pre |= profile.preconditions
        for pre in sorted(profile.preconditions):
            if pre not in preconditions:
                out.error(f"node {leaf.id}", f"unknown precondition {pre!r}", leaf.span)
        if profile.component is not None and profile.component not in components:
            out.error(f"node {leaf.id}", f"unknown component {profile.component!r}", leaf.span)
    for pre in bundle.preconditions:
        if pre.id not in referenced_pre:
            out.warning(f"precondition {pre.id}", "precondition is not required by any step", pre.span)

    for risk in bundle.risks:
        where = f"risk {risk.id}"
        if risk.goal != tree.goal:
            out.error(where, f"goal {risk.goal!r} does not match tree goal {tree.goal!r}", risk.span)
        if not 1 <= risk.impact <= 5:
            out.error(where, f"impact {risk.impact} is outside the 1-5 scale", risk.span)
        if not risk.candidate_paths:
            out.error(where, "risk needs at least one candidate path", risk.span)
        for number, path in enumerate(risk.candidate_paths, 1):
            if not path.steps:
                out.error(f"{where} path {number}", "path needs at least one step", path.span)
            for step in path.steps:
                step_where = f"{where} path {number} vector {step.vector}"
                if step.vector not in tree:
                    out.error(step_where, f"unknown attack vector {step.vector!r}", step.span)
                    continue
                pin = step.pinned_likelihood
                if pin is None:
                    continue
                if not 1 <= pin <= 5:
                    out.error(step_where, f"pinned likelihood {pin} is outside the 1-5 scale", step.span)
                    continue
                if not tree_ok:
                    continue
                bounds = admissible_range(vector_profile(tree, step.vector))
                if not bounds[0] <= pin <= bounds[1]:
                    out.error(
                        step_where,
                        f"pinned likelihood {pin} is outside the admissible range "
                        f"{format_range(bounds)}",
                        step.span,
                    )

    for scenario in bundle.scenarios:
        where = f"scenario {scenario.id}"
        for node_id in sorted(scenario.disabled_leaves):
            if node_id not in tree and node_id not in bundle.retired:
                out.error(where, f"cannot disable unknown step {node_id!r}", scenario.span)
        for pre in sorted(scenario.removed_preconditions):
            if pre not in preconditions:
                out.error(where, f"cannot remove unknown precondition {pre!r}", scenario.span)

    return ValidationReport(tuple(out.findings))
