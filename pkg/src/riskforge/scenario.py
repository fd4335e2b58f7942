"""What-if analysis: apply mitigations to a bundle and diff the scores."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .likelihood import admissible_range, vector_profile
from .model import (
    AssessmentBundle,
    AttackerProfile,
    AttackTree,
    CandidatePath,
    Connector,
    DomainError,
    RiskInstance,
    Scenario,
    TreeNode,
)
from .risk import RiskAssessment, assess_goal


def _check_targets(bundle: AssessmentBundle, scenario: Scenario) -> None:
    tree = bundle.tree
    known_nodes = set(bundle.retired) | (set(tree.index) if tree else set())
    unknown = sorted(scenario.disabled_leaves - known_nodes)
    if unknown:
        raise DomainError(f"scenario {scenario.id!r} disables unknown steps: {', '.join(unknown)}")
    known_pre = {p.id for p in bundle.preconditions}
    unknown = sorted(scenario.removed_preconditions - known_pre)
    if unknown:
        raise DomainError(
            f"scenario {scenario.id!r} removes unknown preconditions: {', '.join(unknown)}"
        )


def prune_tree(tree: AttackTree, removed_leaves: set[str]) -> AttackTree:
    """Drop leaves and every ancestor that can no longer be satisfied."""
    if tree.is_empty:
        return tree
    kept: dict[str, TreeNode] = {}

    def visit(nid: str) -> bool:
        node = tree.node(nid)
        if node.is_leaf:
            alive = nid not in removed_leaves
        else:
            survivors = [c for c in node.children if visit(c)]
            if node.connector is Connector.AND:
                alive = len(survivors) == len(node.children)
            else:
                alive = bool(survivors)
            node = replace(node, children=tuple(survivors))
        if alive:
            kept[nid] = node
        return alive

    # Survivors under a pruned AND are unreachable now; keep only what the root still reaches.
    reachable: set[str] = set()
    stack = [tree.root] if visit(tree.root) else []
    while stack:
        nid = stack.pop()
        reachable.add(nid)
        stack.extend(kept[nid].children)
    nodes = tuple(kept[n.id] for n in tree.nodes if n.id in reachable)
    return replace(tree, nodes=nodes)


def _prune_register(
    risks: Sequence[RiskInstance], tree: AttackTree
) -> tuple[tuple[RiskInstance, ...], list[str]]:
    notes: list[str] = []
    survivors = []
    for risk in risks:
        paths = []
        for path in risk.candidate_paths:
            if any(step.vector not in tree for step in path.steps):
                continue
            steps = []
            for step in path.steps:
                pin = step.pinned_likelihood
                if pin is not None:
                    low, high = admissible_range(vector_profile(tree, step.vector))
                    clamped = min(max(pin, low), high)
                    if clamped != pin:
                        notes.append(
                            f"{risk.id}: pin {pin} on {step.vector} is outside the mitigated "
                            f"range; clamped to {clamped}"
                        )
                        step = replace(step, pinned_likelihood=clamped)
                steps.append(step)
            paths.append(CandidatePath(tuple(steps), span=path.span))
        if paths:
            survivors.append(replace(risk, candidate_paths=tuple(paths)))
    return tuple(survivors), notes


def apply_scenario_with_notes(
    bundle: AssessmentBundle, scenario: Scenario
) -> tuple[AssessmentBundle, list[str]]:
    _check_targets(bundle, scenario)
    tree = bundle.tree
    if tree is None or (not scenario.disabled_leaves and not scenario.removed_preconditions):
        return bundle, []

    removed: set[str] = set()
    for node_id in scenario.disabled_leaves:
        if node_id in tree:
            removed.update(tree.leaves_under(node_id))
    for leaf in tree.leaves:
        if leaf.profile.preconditions & scenario.removed_preconditions:
            removed.add(leaf.id)
    if not removed:
        return bundle, []

    pruned = prune_tree(tree, removed)
    risks, notes = _prune_register(bundle.risks, pruned)
    retired = bundle.retired | (set(tree.index) - set(pruned.index))
    return replace(bundle, tree=pruned, risks=risks, retired=frozenset(retired)), notes


def apply_scenario(bundle: AssessmentBundle, scenario: Scenario) -> AssessmentBundle:
    """Return the bundle as it would look with the scenario's mitigations.

    Disabled steps (a leaf, or every leaf under an internal node) and
    steps needing a removed precondition are dropped; AND nodes missing
    a child and OR nodes left empty are dropped with them. Candidate
    paths through a dropped vector disappear, and so do risks left with
    no path. The input bundle is not modified.
    """
    return apply_scenario_with_notes(bundle, scenario)[0]


@dataclass(frozen=True)
class RiskSnapshot:
    likelihood: Optional[int]
    impact: int
    score: int
    dominant: Optional[tuple[str, ...]]  # "vector:role" per step

    @classmethod
    def of(cls, assessment: RiskAssessment) -> "RiskSnapshot":
        return cls(
            likelihood=assessment.likelihood.value,
            impact=assessment.impact.value,
            score=assessment.score,
            dominant=tuple(f"{s.vector}:{s.role.value}" for s in assessment.dominant_path.steps),
        )


@dataclass(frozen=True)
class RiskDiff:
    risk_id: str
    before: RiskSnapshot
    after: RiskSnapshot
    delta_score: int
    dominant_path_changed: bool
    newly_infeasible: bool


def diff_assessments(
    before: Sequence[RiskAssessment], after: Sequence[RiskAssessment]
) -> list[RiskDiff]:
    remaining = {a.risk_id: a for a in after}
    diffs = []
    for base in before:
        old = RiskSnapshot.of(base)
        if base.risk_id in remaining:
            new = RiskSnapshot.of(remaining[base.risk_id])
            infeasible = False
        else:
            # Eliminated risks score 0, below the 1-25 range, so they stand out.
            new = RiskSnapshot(None, old.impact, 0, None)
            infeasible = True
        diffs.append(
            RiskDiff(
                risk_id=base.risk_id,
                before=old,
                after=new,
                delta_score=new.score - old.score,
                dominant_path_changed=old.dominant != new.dominant,
                newly_infeasible=infeasible,
            )
        )
    diffs.sort(key=lambda d: (-abs(d.delta_score), d.risk_id))
    return diffs


@dataclass(frozen=True)
class ScenarioOutcome:
    scenario: Scenario
    bundle: AssessmentBundle
    before: tuple[RiskAssessment, ...]
    after: tuple[RiskAssessment, ...]
    diffs: tuple[RiskDiff, ...]
    warnings: tuple[str, ...]


def run_scenario(
    bundle: AssessmentBundle,
    scenario: Scenario | str,
    baseline: AttackerProfile = AttackerProfile(),
) -> ScenarioOutcome:
    """Assess the bundle's goal before and after a scenario."""
    if isinstance(scenario, str):
        scenario = bundle.scenario(scenario)
    tree = bundle.require_tree()
    derived, notes = apply_scenario_with_notes(bundle, scenario)
    before = assess_goal(tree.goal, bundle, baseline)
    after = assess_goal(tree.goal, derived, scenario.attacker_profile)
    for assessment in after:
        notes.extend(assessment.warnings)
    return ScenarioOutcome(
        scenario=scenario,
        bundle=derived,
        before=tuple(before),
        after=tuple(after),
        diffs=tuple(diff_assessments(before, after)),
        warnings=tuple(notes),
    )
