"""Minimal attack-path enumeration over AND/OR trees.

An attack path is a minimal set of leaves whose joint success satisfies
the root; in fault-tree language, a minimal cut set.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .model import AttackTree, Connector, DomainError, RiskInstance

DEFAULT_PATH_BUDGET = 100_000
BRUTE_FORCE_LEAF_LIMIT = 20
BUDGET_ENV_VAR = "RISKFORGE_PATH_BUDGET"


class PathBudgetExceeded(DomainError):
    def __init__(self, budget: int):
        super().__init__(f"attack-path enumeration exceeded the budget of {budget} paths")
        self.budget = budget


def default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV_VAR)
    if raw is None:
        return DEFAULT_PATH_BUDGET
    try:
        budget = int(raw)
    except ValueError:
        raise DomainError(f"{BUDGET_ENV_VAR} must be an integer, got {raw!r}") from None
    if budget < 1:
        raise DomainError(f"{BUDGET_ENV_VAR} must be positive, got {budget}")
    return budget


@dataclass(frozen=True)
class AttackPath:
    steps: frozenset[str]
    preconditions: frozenset[str] = frozenset()
    components_touched: frozenset[str] = frozenset()

    @property
    def sort_key(self) -> tuple[str, ...]:
        return tuple(sorted(self.steps))

    def __str__(self) -> str:
        return "{" + ", ".join(self.sort_key) + "}"


def satisfies(tree: AttackTree, steps: Iterable[str], node_id: Optional[str] = None) -> bool:
    """Evaluate the tree with exactly ``steps`` succeeding."""
    if tree.is_empty:
        return False
    chosen = set(steps)

    def evaluate(nid: str) -> bool:
        node = tree.node(nid)
        if node.is_leaf:
            return nid in chosen
        results = (evaluate(c) for c in node.children)
        return all(results) if node.connector is Connector.AND else any(results)

    return evaluate(node_id or tree.root)


def _minimize(family: set[frozenset[str]]) -> set[frozenset[str]]:
    kept: list[frozenset[str]] = []
    for candidate in sorted(family, key=len):
        if not any(k <= candidate for k in kept):
            kept.append(candidate)
    return set(kept)


def _decorate(tree: AttackTree, family: Iterable[frozenset[str]]) -> list[AttackPath]:
    paths = []
    for steps in family:
        profiles = [tree.node(s).profile for s in steps]
        paths.append(
            AttackPath(
                steps=steps,
                preconditions=frozenset().union(*(p.preconditions for p in profiles)),
                components_touched=frozenset(p.component for p in profiles if p.component),
            )
        )
    return sorted(paths, key=lambda p: p.sort_key)


def leaf_families(
    tree: AttackTree, node_id: Optional[str] = None, budget: Optional[int] = None
) -> set[frozenset[str]]:
    """Minimal leaf-set family of a subtree, without decoration."""
    if tree.is_empty:
        return set()
    budget = default_budget() if budget is None else budget

    def check(family: set[frozenset[str]]) -> set[frozenset[str]]:
        if len(family) > budget:
            raise PathBudgetExceeded(budget)
        return family

    def build(nid: str) -> set[frozenset[str]]:
        node = tree.node(nid)
        if node.is_leaf:
            return {frozenset([nid])}
        families = [build(c) for c in node.children]
        if node.connector is Connector.OR:
            return check(_minimize(set().union(*families)))
        combined: set[frozenset[str]] = {frozenset()}
        for family in families:
            if len(combined) * len(family) > budget:
                raise PathBudgetExceeded(budget)
            combined = {a | b for a in combined for b in family}
        return check(_minimize(combined))

    return build(node_id or tree.root)


def enumerate_paths(
    tree: AttackTree, budget: Optional[int] = None, node_id: Optional[str] = None
) -> list[AttackPath]:
    return _decorate(tree, leaf_families(tree, node_id, budget))


def brute_force_paths(tree: AttackTree, node_id: Optional[str] = None) -> list[AttackPath]:
    """Reference enumeration over every leaf subset. Only for small trees."""
    if tree.is_empty:
        return []
    leaves = tree.leaves_under(node_id or tree.root)
    if len(leaves) > BRUTE_FORCE_LEAF_LIMIT:
        raise DomainError(
            f"brute force refuses trees with more than {BRUTE_FORCE_LEAF_LIMIT} leaves "
            f"(got {len(leaves)})"
        )
    satisfying = [
        frozenset(subset)
        for size in range(1, len(leaves) + 1)
        for subset in itertools.combinations(leaves, size)
        if satisfies(tree, subset, node_id)
    ]
    minimal = [s for s in satisfying if not any(other < s for other in satisfying)]
    return _decorate(tree, minimal)


@dataclass(frozen=True)
class SharedPrecondition:
    precondition: str
    dependent_leaves: tuple[str, ...]
    path_count: int
    risks: tuple[str, ...]


def _vectors_covering(risk: RiskInstance) -> set[str]:
    return {step.vector for path in risk.candidate_paths for step in path.steps}


def shared_precondition_report(
    tree: AttackTree,
    register: Sequence[RiskInstance],
    budget: Optional[int] = None,
) -> list[SharedPrecondition]:
    """Rank preconditions by how many risks and paths depend on them."""
    dependents: dict[str, list[str]] = {}
    for leaf in tree.leaves:
        for pre in leaf.profile.preconditions:
            dependents.setdefault(pre, []).append(leaf.id)
    if not dependents:
        return []

    paths = enumerate_paths(tree, budget)
    leaves_by_risk = {
        risk.id: {
            leaf for vector in _vectors_covering(risk) if vector in tree
            for leaf in tree.leaves_under(vector)
        }
        for risk in register
    }
    rows = []
    for pre, leaves in dependents.items():
        leaf_set = set(leaves)
        rows.append(
            SharedPrecondition(
                precondition=pre,
                dependent_leaves=tuple(sorted(leaves)),
                path_count=sum(1 for p in paths if p.steps & leaf_set),
                risks=tuple(sorted(r for r, covered in leaves_by_risk.items() if covered & leaf_set)),
            )
        )
    rows.sort(key=lambda r: (-len(r.risks), -r.path_count, r.precondition))
    return rows

