import hashlib

import pytest

from riskforge.corpus import (
    FRAMEWORK_EXTRA_ROWS,
    golden_dir,
    load_corpus,
    read_expectation,
    render_goldens,
)
from riskforge.model import HEALTHCARE_BOUNDARY_COUNT, DomainError


def test_unknown_corpus():
    with pytest.raises(DomainError):
        load_corpus("g9-nowhere")


def test_system_model_shape(corpus):
    assert len(corpus.system.components) == 5
    assert len(corpus.system.boundaries) == HEALTHCARE_BOUNDARY_COUNT == 8


def test_tree_shape(tree):
    assert [n.id for n in tree.top_level] == [
        "prompt-injection",
        "llm-session",
        "orchestration-errors",
        "model-tampering",
        "mitm-web-session",
    ]
    assert len(tree.leaves) >= 30


def test_model_poisoning_needs_every_step(tree):
    poisoning = tree.node("mt-poisoning")
    assert poisoning.connector.value == "AND"
    assert len(poisoning.children) == 3


def test_framework_extra_row_is_in_tree(tree):
    for node_id in FRAMEWORK_EXTRA_ROWS["g1-healthcare"]:
        assert node_id in tree


@pytest.mark.parametrize("name", sorted(render_goldens("g1-healthcare")))
def test_golden_files_match(name):
    expected = (golden_dir() / name).read_bytes()
    assert render_goldens("g1-healthcare")[name].encode("utf-8") == expected


def test_golden_digests(corpus):
    expectation = read_expectation("g1-healthcare")
    for name, digest in expectation["digests"].items():
        assert hashlib.sha256((golden_dir() / name).read_bytes()).hexdigest() == digest
    assert [(r["risk"], r["score"]) for r in expectation["assessment"]] == [
        ("G1-R1", 20), ("G1-R3", 16), ("G1-R2", 12), ("G1-R4", 9),
    ]
