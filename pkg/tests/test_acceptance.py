"""Acceptance criteria, one test each.

Every test records a PASS/FAIL line; pytest prints them in the terminal
summary, and running this file as a script prints them directly.
"""

from __future__ import annotations

import contextlib
import random
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from generators import random_bundle, random_disable_scenario, random_tree  # noqa: E402
from riskforge.atdl import export_canonical, parse_document, serialize_document  # noqa: E402
from riskforge.cli import main as cli_main  # noqa: E402
from riskforge.corpus import FRAMEWORK_EXTRA_ROWS, corpus_path, load_corpus  # noqa: E402
from riskforge.likelihood import admissible_range, base_likelihood, vector_profile  # noqa: E402
from riskforge.model import IMPACT_LABELS, LIKELIHOOD_LABELS, Level, StepProfile, Category  # noqa: E402
from riskforge.model import scale_label, scale_value  # noqa: E402
from riskforge.paths import brute_force_paths, enumerate_paths, satisfies  # noqa: E402
from riskforge.report import render_assessment_table, render_likelihood_framework  # noqa: E402
from riskforge.risk import assess_goal  # noqa: E402
from riskforge.scenario import apply_scenario, run_scenario  # noqa: E402

RESULTS: list[str] = []

# Expected values. Scores, ranges and labels are the case study's reference
# figures; the base lookup and the what-if shifts were worked out by hand
# from the formula and the corpus pins, independently of the engine.
EXPECTED_SCORES = {"G1-R1": (4, 5, 20), "G1-R2": (3, 4, 12), "G1-R3": (4, 4, 16), "G1-R4": (3, 3, 9)}
EXPECTED_RANGES = ["4", "3–4", "2–3", "2–3", "3", "3–4"]
BASE_LOOKUP = {"LL": 4, "LM": 3, "ML": 3, "MM": 3, "LH": 2, "HL": 2, "MH": 2, "HM": 2, "HH": 2}
LIKELIHOOD_TABLE = {1: "Rare", 2: "Unlikely", 3: "Possible", 4: "Likely", 5: "Almost Certain"}
IMPACT_TABLE = {1: "Negligible", 2: "Minor", 3: "Moderate", 4: "Major", 5: "Catastrophic"}
HARDEN_PROMPT = {"G1-R1": (20, 15), "G1-R3": (16, 12)}


@contextlib.contextmanager
def criterion(number: int, title: str):
    try:
        yield
    except BaseException as exc:
        RESULTS.append(f"FAIL  criterion {number}: {title} ({type(exc).__name__}: {exc})")
        raise
    RESULTS.append(f"PASS  criterion {number}: {title}")


def _ranged_rows(bundle):
    tree = bundle.require_tree()
    return [n.id for n in tree.top_level] + list(FRAMEWORK_EXTRA_ROWS["g1-healthcare"])


def test_criterion_1_risk_table(capsys):
    with criterion(1, "goal G1 risk scores, likelihood/impact pairs and labels; runtime < 1 s"):
        start = time.perf_counter()
        code = cli_main(["score", str(corpus_path("g1-healthcare")), "--goal", "G1"])
        elapsed = time.perf_counter() - start
        out = capsys.readouterr().out
        assert code == 0
        bundle = load_corpus("g1-healthcare")
        got = {a.risk_id: (a.likelihood.value, a.impact.value, a.score) for a in assess_goal("G1", bundle)}
        assert got == EXPECTED_SCORES
        for rid, (lik, imp, score) in EXPECTED_SCORES.items():
            row = next(line for line in out.splitlines() if line.startswith(f"| {rid} |"))
            assert f"| {lik} ({LIKELIHOOD_TABLE[lik]}) | {imp} ({IMPACT_TABLE[imp]}) | {score} |" in row
        assert elapsed < 1.0, f"took {elapsed:.3f} s"


def test_criterion_2_framework_ranges():
    with criterion(2, "framework ranges 4 / 3–4 / 2–3 / 2–3 / 3 / 3–4"):
        bundle = load_corpus("g1-healthcare")
        text = render_likelihood_framework(bundle, FRAMEWORK_EXTRA_ROWS["g1-healthcare"])
        ranges = [line.split(" | ")[3] for line in text.splitlines()[2:]]
        assert ranges == EXPECTED_RANGES


def test_criterion_3_base_formula():
    with criterion(3, "9-cell base lookup and every range floor"):
        letters = {"L": Level.LOW, "M": Level.MEDIUM, "H": Level.HIGH}
        for cell, expected in BASE_LOOKUP.items():
            p = StepProfile(letters[cell[0]], letters[cell[1]], False, Category.CONVENTIONAL)
            assert base_likelihood(p) == expected, cell
        bundle = load_corpus("g1-healthcare")
        tree = bundle.require_tree()
        for node_id, shown in zip(_ranged_rows(bundle), EXPECTED_RANGES):
            p = vector_profile(tree, node_id)
            cell = p.business_knowledge.name[0] + p.technical_complexity.name[0]
            assert admissible_range(p)[0] == BASE_LOOKUP[cell] == int(shown[0]), node_id


def test_criterion_4_oracle_equivalence():
    with criterion(4, "enumerate_paths equals brute force on 200 random trees; runtime < 30 s"):
        rng = random.Random(20241014)
        start = time.perf_counter()
        for _ in range(200):
            tree = random_tree(rng, max_leaves=12, max_depth=5)
            assert len(tree.leaves) <= 12
            assert {p.steps for p in enumerate_paths(tree)} == {p.steps for p in brute_force_paths(tree)}
        elapsed = time.perf_counter() - start
        assert elapsed < 30.0, f"took {elapsed:.1f} s"


def test_criterion_5_minimality_soundness():
    with criterion(5, "every enumerated path is sound and minimal"):
        rng = random.Random(5)
        checked = 0
        for _ in range(200):
            tree = random_tree(rng)
            for path in enumerate_paths(tree):
                assert satisfies(tree, path.steps)
                for step in path.steps:
                    assert not satisfies(tree, path.steps - {step})
                checked += 1
        assert checked > 200


def test_criterion_6_scenario_monotonicity():
    with criterion(6, "disable-only scenarios never raise scores; harden-prompt shifts R1 and R3"):
        rng = random.Random(6)
        for _ in range(100):
            bundle = random_bundle(rng)
            tree = bundle.require_tree()
            before = {a.risk_id: a.score for a in assess_goal(tree.goal, bundle)}
            after_bundle = apply_scenario(bundle, random_disable_scenario(rng, bundle))
            after_tree = after_bundle.require_tree()
            after = {} if after_tree.is_empty else {a.risk_id: a.score for a in assess_goal(tree.goal, after_bundle)}
            for rid, score in before.items():
                assert after.get(rid, 0) <= score
        outcome = run_scenario(load_corpus("g1-healthcare"), "harden-prompt")
        diffs = {d.risk_id: (d.before.score, d.after.score) for d in outcome.diffs}
        for rid, shift in HARDEN_PROMPT.items():
            assert diffs[rid] == shift


def test_criterion_7_round_trip():
    with criterion(7, "parse/serialize fixpoint on corpus and 100 random bundles; deterministic export"):
        text = corpus_path("g1-healthcare").read_text(encoding="utf-8")
        corpus = parse_document(text)
        assert parse_document(serialize_document(corpus)) == corpus
        rng = random.Random(7)
        for _ in range(100):
            bundle = random_bundle(rng)
            assert parse_document(serialize_document(bundle)) == bundle
        assert export_canonical(parse_document(text)) == export_canonical(parse_document(text))


def test_criterion_8_scale_labels():
    with criterion(8, "ten scale labels round-trip and render verbatim"):
        for table, kind in ((LIKELIHOOD_TABLE, "likelihood"), (IMPACT_TABLE, "impact")):
            for value, label in table.items():
                assert scale_label(value, kind) == label
                assert scale_value(label, kind) == value
        assert LIKELIHOOD_LABELS == LIKELIHOOD_TABLE and IMPACT_LABELS == IMPACT_TABLE
        rendered = render_assessment_table(assess_goal("G", _all_scales_bundle()), "markdown-table")
        for table in (LIKELIHOOD_TABLE, IMPACT_TABLE):
            for value, label in table.items():
                assert f"{value} ({label})" in rendered


def _all_scales_bundle():
    """Five risks whose likelihoods and impacts each cover 1..5."""
    leaves = "\n".join(
        f'  leaf v{i} "v{i}" bk={bk} tc={tc} insider=yes category=conventional'
        for i, (bk, tc) in enumerate([("high", "high"), ("med", "med"), ("low", "low")])
    )
    # (vector, role, pin) giving effective likelihood 1..5
    steps = [("v0", "situational", 2), ("v0", "direct", 2), ("v1", "direct", 3), ("v1", "direct", 4), ("v2", "direct", 5)]
    risks = "\n".join(
        f'risk R{n} goal=G "risk {n}" impact={n} {{ path {{ step vector={v} role={role} pin={pin} }} }}'
        for n, (v, role, pin) in enumerate(steps, 1)
    )
    return parse_document(f'goal G "g" node r OR {{\n{leaves}\n}}\n{risks}\n')


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
