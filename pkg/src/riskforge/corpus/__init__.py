"""Bundled case-study corpus and its golden outputs."""

from __future__ import annotations

import hashlib
import json
from importlib import resources
from pathlib import Path
from typing import Optional

from ..atdl import dumps_canonical, export_canonical, parse_document
from ..model import AssessmentBundle, DomainError

CORPUS_NAMES = ("g1-healthcare",)

# Sub-vector rows the likelihood framework lists after the top-level vectors.
FRAMEWORK_EXTRA_ROWS = {"g1-healthcare": ("ls-hijack-fixation",)}


def corpus_dir() -> Path:
    return Path(str(resources.files(__package__)))


def corpus_path(name: str) -> Path:
    if name not in CORPUS_NAMES:
        raise DomainError(f"unknown corpus {name!r}; bundled: {', '.join(CORPUS_NAMES)}")
    return corpus_dir() / f"{name}.atdl"


def load_corpus(name: str) -> AssessmentBundle:
    path = corpus_path(name)
    return parse_document(path.read_text(encoding="utf-8"), f"corpus/{path.name}")


def golden_dir() -> Path:
    return corpus_dir() / "golden"


def render_goldens(name: str) -> dict[str, str]:
    """Every golden artifact for ``name``, keyed by file name."""
    # Imported here: report imports risk/paths, which do not need the corpus.
    from ..report import render_assessment_table, render_likelihood_framework, render_matrix
    from ..risk import assess_goal

    bundle = load_corpus(name)
    tree = bundle.require_tree()
    assessments = assess_goal(tree.goal, bundle)
    extra = FRAMEWORK_EXTRA_ROWS.get(name, ())
    return {
        f"{name}.json": export_canonical(bundle),
        f"{name}.assessment.md": render_assessment_table(assessments, "markdown-table", tree),
        f"{name}.assessment.csv": render_assessment_table(assessments, "csv", tree),
        f"{name}.framework.md": render_likelihood_framework(bundle, extra),
        f"{name}.matrix.md": render_matrix(assessments),
    }


def golden_expectation(name: str) -> dict:
    from ..likelihood import admissible_range, format_range, vector_profile
    from ..risk import assess_goal

    bundle = load_corpus(name)
    tree = bundle.require_tree()
    artifacts = render_goldens(name)
    rows = [n.id for n in tree.top_level] + list(FRAMEWORK_EXTRA_ROWS.get(name, ()))
    return {
        "corpus": f"{name}.atdl",
        "digests": {
            file: hashlib.sha256(text.encode("utf-8")).hexdigest() for file, text in sorted(artifacts.items())
        },
        "assessment": [
            {"risk": a.risk_id, "likelihood": a.likelihood.value, "impact": a.impact.value, "score": a.score}
            for a in assess_goal(tree.goal, bundle)
        ],
        "framework_ranges": {
            node_id: format_range(admissible_range(vector_profile(tree, node_id))) for node_id in rows
        },
    }


def write_goldens(name: str, directory: Optional[Path] = None) -> list[Path]:
    directory = directory or golden_dir()
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for file, text in render_goldens(name).items():
        path = directory / file
        path.write_bytes(text.encode("utf-8"))
        written.append(path)
    expectation = directory / f"{name}.expected.json"
    expectation.write_text(dumps_canonical(golden_expectation(name)), encoding="utf-8")
    written.append(expectation)
    return written


def read_expectation(name: str) -> dict:
    return json.loads((golden_dir() / f"{name}.expected.json").read_text(encoding="utf-8"))
