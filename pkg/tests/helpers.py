"""Small hand-built trees."""

from riskforge.model import AttackTree, Category, Connector, Level, StepProfile, TreeNode

LOW, MED, HIGH = Level.LOW, Level.MEDIUM, Level.HIGH


def profile(bk=LOW, tc=LOW, insider=False, pre=(), component=None):
    return StepProfile(bk, tc, insider, Category.CONVENTIONAL, frozenset(pre), component)


def leaf(nid, **kwargs):
    return TreeNode(nid, nid, profile=profile(**kwargs))


def node(nid, connector, *children):
    return TreeNode(nid, nid, Connector(connector), tuple(children))


def tree_of(root, *nodes, goal="G"):
    """Nodes must be listed in depth-first pre-order, root first."""
    return AttackTree(goal, "goal", root, tuple(nodes))


def or_ab():
    return tree_of("r", node("r", "OR", "a", "b"), leaf("a"), leaf("b"))


def and_a_or_bc():
    return tree_of(
        "r",
        node("r", "AND", "a", "x"),
        leaf("a"),
        node("x", "OR", "b", "c"),
        leaf("b"),
        leaf("c"),
    )
