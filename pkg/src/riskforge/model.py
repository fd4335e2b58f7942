"""Domain types for goal-driven attack-tree risk assessment.

Everything here is an immutable value. Collections are tuples or
frozensets so bundles can be shared freely between threads and used as
dictionary keys in tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterator, Optional


class DomainError(ValueError):
    """Raised when an operation is given input outside its contract."""


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


def _span() -> Optional[SourceSpan]:
    # Spans are provenance only, never part of structural equality.
    return field(default=None, compare=False, repr=False)


class Level(Enum):
    LOW = "low"
    MEDIUM = "med"
    HIGH = "high"

    @property
    def rank(self) -> int:
        return {"low": 1, "med": 2, "high": 3}[self.value]

    @property
    def title(self) -> str:
        return {"low": "Low", "med": "Medium", "high": "High"}[self.value]


class Category(Enum):
    CONVENTIONAL = "conventional"
    ADVERSARIAL_ML = "adversarial-ml"
    CONVERSATIONAL = "conversational"


class Role(Enum):
    DIRECT = "direct"
    INDIRECT = "indirect"
    SITUATIONAL = "situational"

    @property
    def title(self) -> str:
        return self.value.capitalize()


class Phase(Enum):
    PRECONDITION = "precondition"
    EXECUTION = "execution"
    IMPACT = "impact"


class ComponentKind(Enum):
    WEB_APP = "web-app"
    PLATFORM = "platform"
    ORCHESTRATOR = "orchestrator"
    EXTERNAL_RESOURCE = "external-resource"
    MODEL = "model"


class Connector(Enum):
    AND = "AND"
    OR = "OR"


# Tables I and II of the assessment method.
LIKELIHOOD_LABELS = {
    1: "Rare",
    2: "Unlikely",
    3: "Possible",
    4: "Likely",
    5: "Almost Certain",
}
IMPACT_LABELS = {
    1: "Negligible",
    2: "Minor",
    3: "Moderate",
    4: "Major",
    5: "Catastrophic",
}

HEALTHCARE_BOUNDARY_COUNT = 8


def scale_label(value: int, kind: str) -> str:
    """Return the label of a 1-5 score on the likelihood or impact scale."""
    if kind == "likelihood":
        table = LIKELIHOOD_LABELS
    elif kind == "impact":
        table = IMPACT_LABELS
    else:
        raise DomainError(f"unknown scale kind {kind!r}")
    if isinstance(value, bool) or not isinstance(value, int) or value not in table:
        raise DomainError(f"{kind} score must be an integer in [1, 5], got {value!r}")
    return table[value]


def scale_value(label: str, kind: str) -> int:
    """Inverse of :func:`scale_label`."""
    table = LIKELIHOOD_LABELS if kind == "likelihood" else IMPACT_LABELS
    for value, candidate in table.items():
        if candidate == label:
            return value
    raise DomainError(f"no {kind} score is labelled {label!r}")


@dataclass(frozen=True)
class LikelihoodScore:
    value: int

    def __post_init__(self) -> None:
        scale_label(self.value, "likelihood")

    @property
    def label(self) -> str:
        return LIKELIHOOD_LABELS[self.value]

    def __str__(self) -> str:
        return f"{self.value} ({self.label})"


@dataclass(frozen=True)
class ImpactScore:
    value: int

    def __post_init__(self) -> None:
        scale_label(self.value, "impact")

    @property
    def label(self) -> str:
        return IMPACT_LABELS[self.value]

    def __str__(self) -> str:
        return f"{self.value} ({self.label})"


# System model


@dataclass(frozen=True)
class Component:
    id: str
    name: str
    kind: ComponentKind
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class TrustBoundary:
    id: str
    name: str
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class DataFlow:
    source: str
    target: str
    crosses: Optional[str] = None  # boundary id
    span: Optional[SourceSpan] = _span()

    @property
    def crosses_boundary(self) -> bool:
        return self.crosses is not None


@dataclass(frozen=True)
class SystemModel:
    components: tuple[Component, ...] = ()
    boundaries: tuple[TrustBoundary, ...] = ()
    flows: tuple[DataFlow, ...] = ()
    span: Optional[SourceSpan] = _span()

    @property
    def is_empty(self) -> bool:
        return not (self.components or self.boundaries or self.flows)


@dataclass(frozen=True)
class Precondition:
    id: str
    description: str
    component: str
    span: Optional[SourceSpan] = _span()


# Attack tree


@dataclass(frozen=True)
class StepProfile:
    business_knowledge: Level
    technical_complexity: Level
    insider_advantage: bool
    category: Category
    preconditions: frozenset[str] = frozenset()
    component: Optional[str] = None
    phase: Optional[Phase] = None


@dataclass(frozen=True)
class TreeNode:
    id: str
    label: str
    connector: Optional[Connector] = None
    children: tuple[str, ...] = ()
    profile: Optional[StepProfile] = None
    span: Optional[SourceSpan] = _span()

    @property
    def is_leaf(self) -> bool:
        return self.profile is not None

    @property
    def kind(self) -> str:
        return "leaf" if self.is_leaf else "internal"


@dataclass(frozen=True)
class AttackTree:
    """An AND/OR tree under a named goal.

    ``nodes`` holds every node in depth-first declaration order, so
    ``nodes[0]`` is the root for any tree the parser produced. A tree
    whose every step was pruned away by a scenario has no nodes at all.
    """

    goal: str
    goal_label: str
    root: str
    nodes: tuple[TreeNode, ...]
    span: Optional[SourceSpan] = _span()

    @cached_property
    def index(self) -> dict[str, TreeNode]:
        return {node.id: node for node in self.nodes}

    def node(self, node_id: str) -> TreeNode:
        try:
            return self.index[node_id]
        except KeyError:
            raise DomainError(f"tree {self.goal!r} has no node {node_id!r}") from None

    def __contains__(self, node_id: object) -> bool:
        return node_id in self.index

    @property
    def is_empty(self) -> bool:
        return self.root not in self.index

    @property
    def leaves(self) -> tuple[TreeNode, ...]:
        return tuple(n for n in self.nodes if n.is_leaf)

    @property
    def top_level(self) -> tuple[TreeNode, ...]:
        if self.is_empty:
            return ()
        return tuple(self.node(c) for c in self.node(self.root).children)

    def walk(self, node_id: Optional[str] = None) -> Iterator[TreeNode]:
        """Yield the subtree under ``node_id`` (default root) depth first."""
        if self.is_empty:
            return
        stack = [node_id or self.root]
        while stack:
            node = self.node(stack.pop())
            yield node
            stack.extend(reversed(node.children))

    def leaves_under(self, node_id: str) -> tuple[str, ...]:
        return tuple(n.id for n in self.walk(node_id) if n.is_leaf)


# Risk register


@dataclass(frozen=True)
class VectorBinding:
    vector: str
    role: Role
    pinned_likelihood: Optional[int] = None
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class CandidatePath:
    steps: tuple[VectorBinding, ...]
    span: Optional[SourceSpan] = _span()

    @property
    def vectors(self) -> tuple[str, ...]:
        return tuple(step.vector for step in self.steps)


@dataclass(frozen=True)
class RiskInstance:
    id: str
    goal: str
    description: str
    impact: int
    candidate_paths: tuple[CandidatePath, ...]
    span: Optional[SourceSpan] = _span()

    @property
    def impact_score(self) -> ImpactScore:
        return ImpactScore(self.impact)


@dataclass(frozen=True)
class AttackerProfile:
    insider: bool = True

    @property
    def name(self) -> str:
        return "insider" if self.insider else "external"

    @classmethod
    def from_name(cls, name: str) -> "AttackerProfile":
        if name not in ("insider", "external"):
            raise DomainError(f"attacker profile must be insider or external, got {name!r}")
        return cls(insider=name == "insider")


INSIDER = AttackerProfile(True)
EXTERNAL = AttackerProfile(False)


@dataclass(frozen=True)
class Scenario:
    id: str
    disabled_leaves: frozenset[str] = frozenset()
    removed_preconditions: frozenset[str] = frozenset()
    attacker_profile: AttackerProfile = INSIDER
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class AssessmentBundle:
    system: SystemModel = SystemModel()
    preconditions: tuple[Precondition, ...] = ()
    tree: Optional[AttackTree] = None
    risks: tuple[RiskInstance, ...] = ()
    scenarios: tuple[Scenario, ...] = ()
    # Node ids pruned away by applied scenarios; still valid scenario targets.
    retired: frozenset[str] = frozenset()
    source: Optional[str] = field(default=None, compare=False, repr=False)

    def require_tree(self) -> AttackTree:
        if self.tree is None:
            raise DomainError("bundle declares no attack tree")
        return self.tree

    def precondition(self, pre_id: str) -> Precondition:
        for pre in self.preconditions:
            if pre.id == pre_id:
                return pre
        raise DomainError(f"unknown precondition {pre_id!r}")

    def risk(self, risk_id: str) -> RiskInstance:
        for risk in self.risks:
            if risk.id == risk_id:
                return risk
        raise DomainError(f"unknown risk {risk_id!r}")

    def scenario(self, scenario_id: str) -> Scenario:
        for scenario in self.scenarios:
            if scenario.id == scenario_id:
                return scenario
        raise DomainError(f"unknown scenario {scenario_id!r}")
