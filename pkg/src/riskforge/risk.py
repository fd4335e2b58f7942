"""Likelihood x Impact scoring of risk instances.

Each risk is scored on its dominant candidate path, the one with the
highest weakest-link likelihood, never on an average over paths.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .likelihood import ResolvedLikelihood, path_likelihood, resolve_binding, vector_profile
from .model import (
    AssessmentBundle,
    AttackerProfile,
    CandidatePath,
    DomainError,
    ImpactScore,
    LikelihoodScore,
    RiskInstance,
)


@dataclass(frozen=True)
class PathDetail:
    index: int  # 1-based declaration position
    path: CandidatePath
    bindings: tuple[ResolvedLikelihood, ...]
    likelihood: int

    @property
    def path_id(self) -> str:
        return f"P{self.index}"


@dataclass(frozen=True)
class RiskAssessment:
    risk_id: str
    description: str
    dominant: PathDetail
    likelihood: LikelihoodScore
    impact: ImpactScore
    score: int
    per_path_detail: tuple[PathDetail, ...]
    tie_break: Optional[str] = None

    @property
    def dominant_path(self) -> CandidatePath:
        return self.dominant.path

    @property
    def warnings(self) -> tuple[str, ...]:
        notes = []
        for detail in self.per_path_detail:
            for b in detail.bindings:
                if b.clamped_from is not None:
                    notes.append(
                        f"{self.risk_id} {detail.path_id}: pin {b.clamped_from} on {b.vector} "
                        f"exceeds the external-attacker range; clamped to {b.resolved}"
                    )
        return tuple(notes)


def _choose_dominant(details: Sequence[PathDetail]) -> tuple[PathDetail, Optional[str]]:
    best = max(d.likelihood for d in details)
    tied = [d for d in details if d.likelihood == best]
    if len(tied) == 1:
        return tied[0], None
    fewest = min(len(d.path.steps) for d in tied)
    shortest = [d for d in tied if len(d.path.steps) == fewest]
    winner = min(shortest, key=lambda d: d.index)
    others = ", ".join(d.path_id for d in tied if d is not winner)
    reason = "fewer steps" if len(shortest) == 1 else "declaration order"
    return winner, f"{winner.path_id} chosen over {others} at likelihood {best} by {reason}"


def assess_risk(
    risk: RiskInstance,
    bundle: AssessmentBundle,
    attacker: AttackerProfile = AttackerProfile(),
) -> RiskAssessment:
    tree = bundle.require_tree()
    details = []
    for index, path in enumerate(risk.candidate_paths, 1):
        if not path.steps or any(step.vector not in tree for step in path.steps):
            continue
        resolved = tuple(
            resolve_binding(step, vector_profile(tree, step.vector), attacker) for step in path.steps
        )
        details.append(PathDetail(index, path, resolved, path_likelihood(resolved)))
    if not details:
        raise DomainError(f"risk {risk.id!r} has no candidate path that resolves against the tree")
    dominant, tie_break = _choose_dominant(details)
    likelihood = LikelihoodScore(dominant.likelihood)
    impact = ImpactScore(risk.impact)
    return RiskAssessment(
        risk_id=risk.id,
        description=risk.description,
        dominant=dominant,
        likelihood=likelihood,
        impact=impact,
        score=likelihood.value * impact.value,
        per_path_detail=tuple(details),
        tie_break=tie_break,
    )


def rank(assessments: Iterable[RiskAssessment]) -> list[RiskAssessment]:
    return sorted(assessments, key=lambda a: (-a.score, -a.likelihood.value, a.risk_id))


def assess_goal(
    goal: str,
    bundle: AssessmentBundle,
    attacker: AttackerProfile = AttackerProfile(),
) -> list[RiskAssessment]:
    """Assess every risk under ``goal``, highest score first."""
    tree = bundle.tree
    if tree is None or tree.goal != goal:
        raise DomainError(f"unknown goal {goal!r}")
    return rank(assess_risk(r, bundle, attacker) for r in bundle.risks if r.goal == goal)


@dataclass(frozen=True)
class RiskMatrix:
    """5x5 grid of risk ids keyed by (likelihood, impact)."""

    cells: dict[tuple[int, int], tuple[str, ...]]

    def cell(self, likelihood: int, impact: int) -> tuple[str, ...]:
        if (likelihood, impact) not in self.cells:
            raise DomainError(f"no matrix cell ({likelihood}, {impact})")
        return self.cells[likelihood, impact]

    def __iter__(self):
        return iter(sorted(self.cells.items()))


def risk_matrix(assessments: Iterable[RiskAssessment]) -> RiskMatrix:
    cells: dict[tuple[int, int], list[str]] = {(l, i): [] for l in range(1, 6) for i in range(1, 6)}
    for a in assessments:
        cells[a.likelihood.value, a.impact.value].append(a.risk_id)
    return RiskMatrix({key: tuple(sorted(ids)) for key, ids in cells.items()})
