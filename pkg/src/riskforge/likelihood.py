"""Two-factor likelihood framework.

A step's base likelihood falls as the business-rule knowledge or the
technical complexity it demands rises; insider advantage widens the
admissible range by one. Vector-level scores come from the subtree's
hardest step on its most feasible branch.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

from .model import (
    AttackerProfile,
    AttackTree,
    Connector,
    DomainError,
    Role,
    StepProfile,
    VectorBinding,
)

ROLE_MODIFIERS = {Role.DIRECT: 0, Role.INDIRECT: -1, Role.SITUATIONAL: -2}


def _clamp(value: int, low: int = 1, high: int = 5) -> int:
    return max(low, min(high, value))


def base_likelihood(profile: StepProfile) -> int:
    hardest = max(profile.business_knowledge.rank, profile.technical_complexity.rank)
    return _clamp(5 - hardest)


def admissible_range(profile: StepProfile) -> tuple[int, int]:
    low = base_likelihood(profile)
    return low, _clamp(low + (1 if profile.insider_advantage else 0))


def format_range(bounds: tuple[int, int]) -> str:
    low, high = bounds
    return str(low) if low == high else f"{low}–{high}"


def vector_profile(tree: AttackTree, node_id: str) -> StepProfile:
    """Collapse the subtree under ``node_id`` into one step profile.

    OR nodes keep the most feasible child. AND nodes are limited by their
    hardest child: knowledge and complexity take the maximum level over
    the children, and insider advantage survives only if every child at
    the resulting base score has it. The admissible range of the result
    therefore equals the element-wise minimum of the children's ranges.
    Ties go to the earliest declared child.
    """
    node = tree.node(node_id)
    if node.is_leaf:
        return node.profile
    profiles = [vector_profile(tree, child) for child in node.children]
    if node.connector is Connector.OR:
        best = profiles[0]
        for candidate in profiles[1:]:
            if admissible_range(candidate) > admissible_range(best):
                best = candidate
        return best
    bk = max((p.business_knowledge for p in profiles), key=lambda lv: lv.rank)
    tc = max((p.technical_complexity for p in profiles), key=lambda lv: lv.rank)
    floor = min(base_likelihood(p) for p in profiles)
    limiting = [p for p in profiles if base_likelihood(p) == floor]
    return replace(
        limiting[0],
        business_knowledge=bk,
        technical_complexity=tc,
        insider_advantage=all(p.insider_advantage for p in limiting),
        preconditions=frozenset(),
        component=None,
        phase=None,
    )


@dataclass(frozen=True)
class ResolvedLikelihood:
    base: int
    admissible: tuple[int, int]
    resolved: int
    role_modifier: int
    effective: int
    vector: Optional[str] = None
    role: Optional[Role] = None
    pinned: bool = False
    clamped_from: Optional[int] = None  # pin lowered for an external attacker


def resolve_binding(
    binding: VectorBinding,
    profile: StepProfile,
    attacker: AttackerProfile = AttackerProfile(),
) -> ResolvedLikelihood:
    low, high = admissible_range(profile)
    pin = binding.pinned_likelihood
    clamped_from = None
    if pin is not None:
        if not low <= pin <= high:
            raise DomainError(
                f"pinned likelihood {pin} for {binding.vector!r} lies outside "
                f"its admissible range {format_range((low, high))}"
            )
        resolved = pin
        if not attacker.insider and pin > low:
            # Pins above the floor encode insider knowledge an external
            # attacker does not have.
            clamped_from, resolved = pin, low
    elif attacker.insider and profile.insider_advantage:
        resolved = high
    else:
        resolved = low
    modifier = ROLE_MODIFIERS[binding.role]
    return ResolvedLikelihood(
        base=low,
        admissible=(low, high),
        resolved=resolved,
        role_modifier=modifier,
        effective=max(1, resolved + modifier),
        vector=binding.vector,
        role=binding.role,
        pinned=pin is not None,
        clamped_from=clamped_from,
    )


def path_likelihood(bindings: Sequence[ResolvedLikelihood] | Iterable[ResolvedLikelihood]) -> int:
    """Weakest-link likelihood of a conjunctive path."""
    values = [b.effective for b in bindings]
    if not values:
        raise DomainError("a path needs at least one resolved binding")
    return min(values)
