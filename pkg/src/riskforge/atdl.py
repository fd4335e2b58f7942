r"""Attack-Tree Description Language (ATDL).

One document describes one assessment bundle::

  document     := system? precondition* tree? risk* scenario* ;
  system       := "system" "{" component* boundary* flow* "}" ;
  component    := "component" ID KIND STRING ;
  boundary     := "boundary" ID STRING ;
  flow         := "flow" ID "->" ID ("crosses" ID)? ;
  precondition := "pre" ID STRING "component" "=" ID ;
  tree         := "goal" ID STRING node ;
  node         := "node" ID ("AND"|"OR") STRING? "{" (node | leaf)+ "}" ;
  leaf         := "leaf" ID STRING "bk" "=" LEVEL "tc" "=" LEVEL
                  "insider" "=" BOOL "category" "=" CAT
                  ("pre" "=" IDLIST)? ("component" "=" ID)? ("phase" "=" PHASE)? ;
  risk         := "risk" ID "goal" "=" ID STRING "impact" "=" INT "{" path+ "}" ;
  path         := "path" "{" step+ "}" ;
  step         := "step" "vector" "=" ID "role" "=" ROLE ("pin" "=" INT)? ;
  scenario     := "scenario" ID "{" ("disable" "=" IDLIST)?
                  ("remove-pre" "=" IDLIST)? ("profile" "=" PROFILE)? "}" ;

  IDLIST  := ID ("," ID)* ;
  LEVEL   := "low" | "med" | "high" ;
  BOOL    := "yes" | "no" ;
  CAT     := "conventional" | "adversarial-ml" | "conversational" ;
  ROLE    := "direct" | "indirect" | "situational" ;
  PHASE   := "precondition" | "execution" | "impact" ;
  PROFILE := "insider" | "external" ;
  KIND    := "web-app" | "platform" | "orchestrator" | "external-resource" | "model" ;

Identifiers match ``[A-Za-z][A-Za-z0-9_.-]*``; since ``-`` is an
identifier character, ``->`` must be separated from the source id by
whitespace. Strings are double quoted with ``\"``, ``\\`` and ``\n``
escapes. ``#`` starts a comment that runs to the end of the line.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional, TypeVar

from .model import (
    AssessmentBundle,
    AttackerProfile,
    AttackTree,
    CandidatePath,
    Category,
    Component,
    ComponentKind,
    Connector,
    DataFlow,
    DomainError,
    Level,
    Phase,
    Precondition,
    RiskInstance,
    Role,
    Scenario,
    SourceSpan,
    StepProfile,
    SystemModel,
    TreeNode,
    TrustBoundary,
    VectorBinding,
)
from .validation import validate_bundle

E = TypeVar("E", bound=Enum)

IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_.-]*")


class ParseError(DomainError):
    def __init__(self, message: str, span: SourceSpan, expected: Optional[str] = None):
        self.message = message
        self.span = span
        self.expected = expected
        hint = f" (expected {expected})" if expected else ""
        super().__init__(f"{span}: {message}{hint}")


class LexError(ParseError):
    pass


class DuplicateIdError(ParseError):
    pass


@dataclass(frozen=True)
class Token:
    kind: str  # ID, STRING, INT, PUNCT, EOF
    value: str
    span: SourceSpan
    end_column: int

    def describe(self) -> str:
        if self.kind == "EOF":
            return "end of input"
        if self.kind == "STRING":
            return f"string {json.dumps(self.value)}"
        return repr(self.value)


_ESCAPES = {'"': '"', "\\": "\\", "n": "\n"}


def tokenize(text: str, filename: str = "<string>") -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    size = len(text)

    def span_at(offset: int) -> SourceSpan:
        return SourceSpan(filename, line, offset - line_start + 1)

    while pos < size:
        ch = text[pos]
        if ch == "\n":
            pos += 1
            line, line_start = line + 1, pos
        elif ch in " \t\r":
            pos += 1
        elif ch == "#":
            while pos < size and text[pos] != "\n":
                pos += 1
        elif ch == '"':
            start = pos
            pos += 1
            chars = []
            while True:
                if pos >= size or text[pos] == "\n":
                    raise LexError("unterminated string", span_at(start), 'closing "')
                c = text[pos]
                if c == '"':
                    pos += 1
                    break
                if c == "\\":
                    nxt = text[pos + 1] if pos + 1 < size else ""
                    if nxt not in _ESCAPES:
                        raise LexError(f"bad escape sequence \\{nxt}", span_at(pos), r'\", \\ or \n')
                    chars.append(_ESCAPES[nxt])
                    pos += 2
                    continue
                chars.append(c)
                pos += 1
            tokens.append(Token("STRING", "".join(chars), span_at(start), pos - line_start + 1))
        elif ch.isascii() and ch.isalpha():
            match = IDENT_RE.match(text, pos)
            tokens.append(Token("ID", match.group(), span_at(pos), match.end() - line_start + 1))
            pos = match.end()
        elif ch.isdigit():
            start = pos
            while pos < size and text[pos].isdigit():
                pos += 1
            if pos < size and (text[pos].isalpha() or text[pos] == "_"):
                raise LexError("malformed number", span_at(start), "an integer")
            tokens.append(Token("INT", text[start:pos], span_at(start), pos - line_start + 1))
        elif text.startswith("->", pos):
            tokens.append(Token("PUNCT", "->", span_at(pos), pos - line_start + 3))
            pos += 2
        elif ch in "{}=,":
            tokens.append(Token("PUNCT", ch, span_at(pos), pos - line_start + 2))
            pos += 1
        else:
            raise LexError(f"unexpected character {ch!r}", span_at(pos))
    tokens.append(Token("EOF", "", span_at(pos), pos - line_start + 1))
    return tokens


_LEVELS = {"low": Level.LOW, "med": Level.MEDIUM, "high": Level.HIGH}
_BOOLS = {"yes": True, "no": False}
_PROFILES = {"insider": AttackerProfile(True), "external": AttackerProfile(False)}


class _Parser:
    def __init__(self, text: str, filename: str):
        self.filename = filename
        self.tokens = tokenize(text, filename)
        self.pos = 0
        self.seen: dict[str, dict[str, SourceSpan]] = {}

    # token helpers

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def at(self, value: str) -> bool:
        return self.tok.kind in ("ID", "PUNCT") and self.tok.value == value

    def fail(self, expected: str, tok: Optional[Token] = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(f"unexpected {tok.describe()}", tok.span, expected)

    def expect(self, value: str) -> Token:
        if not self.at(value):
            raise self.fail(repr(value))
        return self.advance()

    def ident(self, what: str = "identifier") -> Token:
        if self.tok.kind != "ID":
            raise self.fail(what)
        return self.advance()

    def string(self, what: str = "string") -> Token:
        if self.tok.kind != "STRING":
            raise self.fail(what)
        return self.advance()

    def integer(self, what: str = "integer") -> tuple[int, Token]:
        if self.tok.kind != "INT":
            raise self.fail(what)
        tok = self.advance()
        return int(tok.value), tok

    def choice(self, table: dict[str, Any], what: str) -> Any:
        tok = self.tok
        if tok.kind != "ID" or tok.value not in table:
            options = " | ".join(table)
            if tok.kind == "ID":
                raise LexError(f"invalid {what} {tok.value!r}", tok.span, options)
            raise self.fail(options)
        self.advance()
        return table[tok.value]

    def enum(self, cls: type[E], what: str) -> E:
        return self.choice({member.value: member for member in cls}, what)

    def attribute(self, key: str) -> None:
        self.expect(key)
        self.expect("=")

    def id_list(self) -> list[str]:
        ids = [self.ident().value]
        while self.at(","):
            self.advance()
            ids.append(self.ident().value)
        return ids

    # grammar

    def document(self) -> AssessmentBundle:
        system = SystemModel()
        if self.at("system"):
            system = self.system()
        preconditions = []
        while self.at("pre"):
            preconditions.append(self.precondition())
        tree = None
        if self.at("goal"):
            tree = self.tree()
        elif self.at("node") or self.at("leaf"):
            # Parse the headless tree anyway so errors inside it surface first.
            header = self.tok
            self.node([]) if self.at("node") else self.leaf([])
            raise ParseError("attack tree is missing its goal header", header.span, "'goal' ID STRING")
        risks = []
        while self.at("risk"):
            risks.append(self.risk())
        scenarios = []
        while self.at("scenario"):
            scenarios.append(self.scenario())
        if self.tok.kind != "EOF":
            expected = "'risk', 'scenario' or end of input" if tree else "'pre', 'goal', 'risk', 'scenario' or end of input"
            raise self.fail(expected)
        return AssessmentBundle(
            system=system,
            preconditions=tuple(preconditions),
            tree=tree,
            risks=tuple(risks),
            scenarios=tuple(scenarios),
            source=self.filename,
        )

    def declare(self, namespace: str, tok: Token) -> str:
        table = self.seen.setdefault(namespace, {})
        if tok.value in table:
            raise DuplicateIdError(
                f"duplicate {namespace} id {tok.value!r} (first declared at {table[tok.value]})",
                tok.span,
            )
        table[tok.value] = tok.span
        return tok.value

    def system(self) -> SystemModel:
        start = self.expect("system")
        self.expect("{")
        components, boundaries, flows = [], [], []
        while self.at("component"):
            kw = self.advance()
            cid = self.declare("component", self.ident("component id"))
            kind = self.enum(ComponentKind, "component kind")
            name = self.string("component name").value
            components.append(Component(cid, name, kind, span=kw.span))
        while self.at("boundary"):
            kw = self.advance()
            bid = self.declare("boundary", self.ident("boundary id"))
            boundaries.append(TrustBoundary(bid, self.string("boundary name").value, span=kw.span))
        while self.at("flow"):
            kw = self.advance()
            source = self.ident("component id").value
            self.expect("->")
            target = self.ident("component id").value
            crosses = None
            if self.at("crosses"):
                self.advance()
                crosses = self.ident("boundary id").value
            flows.append(DataFlow(source, target, crosses, span=kw.span))
        if not self.at("}"):
            raise self.fail("'component', 'boundary', 'flow' or '}'")
        self.advance()
        return SystemModel(tuple(components), tuple(boundaries), tuple(flows), span=start.span)

    def precondition(self) -> Precondition:
        kw = self.expect("pre")
        pid = self.declare("precondition", self.ident("precondition id"))
        description = self.string("precondition description").value
        self.attribute("component")
        component = self.ident("component id").value
        return Precondition(pid, description, component, span=kw.span)

    def tree(self) -> AttackTree:
        kw = self.expect("goal")
        goal = self.ident("goal id").value
        label = self.string("goal label").value
        nodes: list[TreeNode] = []
        root = self.node(nodes)
        return AttackTree(goal, label, root, tuple(nodes), span=kw.span)

    def node(self, out: list[TreeNode]) -> str:
        kw = self.expect("node")
        nid = self.declare("node", self.ident("node id"))
        connector = self.choice({"AND": Connector.AND, "OR": Connector.OR}, "connector")
        label = self.advance().value if self.tok.kind == "STRING" else ""
        self.expect("{")
        slot = len(out)
        out.append(None)  # reserve the pre-order position
        children = []
        while True:
            if self.at("node"):
                children.append(self.node(out))
            elif self.at("leaf"):
                children.append(self.leaf(out))
            elif self.at("}") and children:
                self.advance()
                break
            else:
                raise self.fail("'node' or 'leaf'" + (" or '}'" if children else ""))
        out[slot] = TreeNode(nid, label, connector, tuple(children), span=kw.span)
        return nid

    def leaf(self, out: list[TreeNode]) -> str:
        kw = self.expect("leaf")
        nid = self.declare("node", self.ident("leaf id"))
        label = self.string("leaf label").value
        self.attribute("bk")
        bk = self.choice(_LEVELS, "knowledge level")
        self.attribute("tc")
        tc = self.choice(_LEVELS, "complexity level")
        self.attribute("insider")
        insider = self.choice(_BOOLS, "insider flag")
        self.attribute("category")
        category = self.enum(Category, "category")
        pre: list[str] = []
        if self.at("pre"):
            self.attribute("pre")
            pre = self.id_list()
        component = None
        if self.at("component"):
            self.attribute("component")
            component = self.ident("component id").value
        phase = None
        if self.at("phase"):
            self.attribute("phase")
            phase = self.enum(Phase, "phase")
        profile = StepProfile(bk, tc, insider, category, frozenset(pre), component, phase)
        out.append(TreeNode(nid, label, profile=profile, span=kw.span))
        return nid

    def risk(self) -> RiskInstance:
        kw = self.expect("risk")
        rid = self.declare("risk", self.ident("risk id"))
        self.attribute("goal")
        goal = self.ident("goal id").value
        description = self.string("risk description").value
        self.attribute("impact")
        impact, tok = self.integer("impact score")
        if not 1 <= impact <= 5:
            raise ParseError(f"impact {impact} is outside the 1-5 scale", tok.span, "1..5")
        self.expect("{")
        paths = []
        while self.at("path"):
            paths.append(self.path())
        if not paths:
            raise self.fail("'path'")
        self.expect("}")
        return RiskInstance(rid, goal, description, impact, tuple(paths), span=kw.span)

    def path(self) -> CandidatePath:
        kw = self.expect("path")
        self.expect("{")
        steps = []
        while self.at("step"):
            steps.append(self.step())
        if not steps:
            raise self.fail("'step'")
        self.expect("}")
        return CandidatePath(tuple(steps), span=kw.span)

    def step(self) -> VectorBinding:
        kw = self.expect("step")
        self.attribute("vector")
        vector = self.ident("vector id").value
        self.attribute("role")
        role = self.enum(Role, "role")
        pin = None
        if self.at("pin"):
            self.attribute("pin")
            pin, tok = self.integer("pinned likelihood")
            if not 1 <= pin <= 5:
                raise ParseError(f"pinned likelihood {pin} is outside the 1-5 scale", tok.span, "1..5")
        return VectorBinding(vector, role, pin, span=kw.span)

    def scenario(self) -> Scenario:
        kw = self.expect("scenario")
        sid = self.declare("scenario", self.ident("scenario id"))
        self.expect("{")
        disabled: list[str] = []
        removed: list[str] = []
        profile = AttackerProfile()
        if self.at("disable"):
            self.attribute("disable")
            disabled = self.id_list()
        if self.at("remove-pre"):
            self.attribute("remove-pre")
            removed = self.id_list()
        if self.at("profile"):
            self.attribute("profile")
            profile = self.choice(_PROFILES, "attacker profile")
        if not self.at("}"):
            raise self.fail("'disable', 'remove-pre', 'profile' or '}'")
        self.advance()
        return Scenario(sid, frozenset(disabled), frozenset(removed), profile, span=kw.span)


def parse_document(text: str, filename: str = "<string>") -> AssessmentBundle:
    """Parse ATDL text into a bundle. Cross-references are not checked here."""
    return _Parser(text, filename).document()


def parse_file(path) -> AssessmentBundle:
    with open(path, encoding="utf-8") as handle:
        return parse_document(handle.read(), str(path))


# Serialization


def quote(text: str) -> str:
    escaped = text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    return f'"{escaped}"'


def _require_valid(bundle: AssessmentBundle) -> None:
    validate_bundle(bundle).raise_if_invalid()


def _serialize_node(tree: AttackTree, node_id: str, depth: int, lines: list[str]) -> None:
    node = tree.node(node_id)
    pad = "  " * depth
    if node.is_leaf:
        p = node.profile
        parts = [
            f"{pad}leaf {node.id} {quote(node.label)}",
            f"bk={p.business_knowledge.value}",
            f"tc={p.technical_complexity.value}",
            f"insider={'yes' if p.insider_advantage else 'no'}",
            f"category={p.category.value}",
        ]
        if p.preconditions:
            parts.append("pre=" + ",".join(sorted(p.preconditions)))
        if p.component is not None:
            parts.append(f"component={p.component}")
        if p.phase is not None:
            parts.append(f"phase={p.phase.value}")
        lines.append(" ".join(parts))
        return
    label = f" {quote(node.label)}" if node.label else ""
    lines.append(f"{pad}node {node.id} {node.connector.value}{label} {{")
    for child in node.children:
        _serialize_node(tree, child, depth + 1, lines)
    lines.append(f"{pad}}}")


def serialize_document(bundle: AssessmentBundle) -> str:
    """Render a valid bundle in canonical ATDL form."""
    _require_valid(bundle)
    stanzas: list[list[str]] = []

    system = ["system {"]
    for c in bundle.system.components:
        system.append(f"  component {c.id} {c.kind.value} {quote(c.name)}")
    for b in bundle.system.boundaries:
        system.append(f"  boundary {b.id} {quote(b.name)}")
    for f in bundle.system.flows:
        crosses = f" crosses {f.crosses}" if f.crosses else ""
        system.append(f"  flow {f.source} -> {f.target}{crosses}")
    system.append("}")
    stanzas.append(system)

    for pre in bundle.preconditions:
        stanzas.append([f"pre {pre.id} {quote(pre.description)} component={pre.component}"])

    tree = bundle.tree
    if tree is not None:
        lines = [f"goal {tree.goal} {quote(tree.goal_label)}"]
        _serialize_node(tree, tree.root, 0, lines)
        stanzas.append(lines)

    for risk in bundle.risks:
        lines = [f"risk {risk.id} goal={risk.goal} {quote(risk.description)} impact={risk.impact} {{"]
        for path in risk.candidate_paths:
            lines.append("  path {")
            for step in path.steps:
                pin = f" pin={step.pinned_likelihood}" if step.pinned_likelihood is not None else ""
                lines.append(f"    step vector={step.vector} role={step.role.value}{pin}")
            lines.append("  }")
        lines.append("}")
        stanzas.append(lines)

    for scenario in bundle.scenarios:
        lines = [f"scenario {scenario.id} {{"]
        if scenario.disabled_leaves:
            lines.append("  disable=" + ",".join(sorted(scenario.disabled_leaves)))
        if scenario.removed_preconditions:
            lines.append("  remove-pre=" + ",".join(sorted(scenario.removed_preconditions)))
        if not scenario.attacker_profile.insider:
            lines.append("  profile=external")
        lines.append("}")
        stanzas.append(lines)

    return "\n\n".join("\n".join(lines) for lines in stanzas) + "\n"


# Canonical JSON export


def _profile_json(profile: StepProfile) -> dict[str, Any]:
    return {
        "business_knowledge": profile.business_knowledge.value,
        "technical_complexity": profile.technical_complexity.value,
        "insider_advantage": profile.insider_advantage,
        "category": profile.category.value,
        "preconditions": sorted(profile.preconditions),
        "component": profile.component,
        "phase": profile.phase.value if profile.phase else None,
    }


def _node_json(node: TreeNode) -> dict[str, Any]:
    return {
        "id": node.id,
        "label": node.label,
        "kind": node.kind,
        "connector": node.connector.value if node.connector else None,
        "children": list(node.children),
        "profile": _profile_json(node.profile) if node.profile else None,
    }


def bundle_to_dict(bundle: AssessmentBundle) -> dict[str, Any]:
    system = bundle.system
    tree = bundle.tree
    return {
        "system": {
            "components": [{"id": c.id, "name": c.name, "kind": c.kind.value} for c in system.components],
            "boundaries": [{"id": b.id, "name": b.name} for b in system.boundaries],
            "flows": [
                {"from": f.source, "to": f.target, "crosses": f.crosses, "crosses_boundary": f.crosses_boundary}
                for f in system.flows
            ],
        },
        "preconditions": [
            {"id": p.id, "description": p.description, "component": p.component} for p in bundle.preconditions
        ],
        "tree": None if tree is None else {
            "goal": tree.goal,
            "label": tree.goal_label,
            "root": tree.root,
            "nodes": [_node_json(n) for n in tree.nodes],
        },
        "risks": [
            {
                "id": r.id,
                "goal": r.goal,
                "description": r.description,
                "impact": r.impact,
                "candidate_paths": [
                    {
                        "steps": [
                            {"vector": s.vector, "role": s.role.value, "pinned_likelihood": s.pinned_likelihood}
                            for s in path.steps
                        ]
                    }
                    for path in r.candidate_paths
                ],
            }
            for r in bundle.risks
        ],
        "scenarios": [
            {
                "id": s.id,
                "disabled_leaves": sorted(s.disabled_leaves),
                "removed_preconditions": sorted(s.removed_preconditions),
                "attacker_profile": s.attacker_profile.name,
            }
            for s in bundle.scenarios
        ],
    }


def dumps_canonical(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def export_canonical(bundle: AssessmentBundle) -> str:
    """Deterministic JSON mirror of a valid bundle."""
    _require_valid(bundle)
    return dumps_canonical(bundle_to_dict(bundle))

