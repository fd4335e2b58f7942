from dataclasses import replace

import pytest

from riskforge.atdl import parse_document
from riskforge.model import AttackerProfile, DomainError
from riskforge.risk import assess_goal, assess_risk, risk_matrix

SYNTHETIC = """
goal G "g"
node r OR {
  leaf easy "easy" bk=low tc=low insider=no category=conventional
  leaf mid "mid" bk=low tc=med insider=no category=conventional
  leaf hard "hard" bk=high tc=high insider=no category=conventional
}
risk RB goal=G "b" impact=4 { path { step vector=mid role=direct } }
risk RA goal=G "a" impact=4 { path { step vector=mid role=direct } }
risk RC goal=G "c" impact=3 { path { step vector=easy role=direct } }
risk RT goal=G "tie" impact=2 {
  path { step vector=mid role=direct step vector=easy role=direct }
  path { step vector=mid role=direct }
  path { step vector=easy role=indirect step vector=mid role=direct }
}
risk RF goal=G "floor" impact=1 { path { step vector=hard role=situational } }
"""

TABLE = {"G1-R1": (4, 5, 20), "G1-R2": (3, 4, 12), "G1-R3": (4, 4, 16), "G1-R4": (3, 3, 9)}


@pytest.fixture(scope="module")
def synthetic():
    return parse_document(SYNTHETIC)


def test_corpus_scores(corpus):
    results = assess_goal("G1", corpus)
    assert [a.risk_id for a in results] == ["G1-R1", "G1-R3", "G1-R2", "G1-R4"]
    for a in results:
        assert (a.likelihood.value, a.impact.value, a.score) == TABLE[a.risk_id]


def test_g1_r1_dominated_by_direct_prompt_injection(corpus):
    a = assess_risk(corpus.risk("G1-R1"), corpus)
    assert a.dominant_path.vectors == ("prompt-injection",)


def test_g1_r2_best_path_pairs_injection_with_orchestration(corpus):
    a = assess_risk(corpus.risk("G1-R2"), corpus)
    assert set(a.dominant_path.vectors) == {"prompt-injection", "orchestration-errors"}
    assert a.score == 12


def test_dominant_path_is_optimal(corpus):
    for a in assess_goal("G1", corpus):
        assert a.dominant.likelihood == max(d.likelihood for d in a.per_path_detail)
        assert a.score == a.likelihood.value * a.impact.value
        assert 1 <= a.score <= 25


def test_equal_scores_order_by_likelihood_then_id(synthetic):
    ids = [a.risk_id for a in assess_goal("G", synthetic)]
    # RC scores 12 at likelihood 4; RA and RB score 12 at likelihood 3.
    assert ids[:3] == ["RC", "RA", "RB"]


def test_tie_break_prefers_fewer_steps_and_is_recorded(synthetic):
    a = assess_risk(synthetic.risk("RT"), synthetic)
    assert a.dominant.path_id == "P2"
    assert a.tie_break == "P2 chosen over P1, P3 at likelihood 3 by fewer steps"


def test_tie_break_falls_back_to_declaration_order(corpus):
    a = assess_risk(corpus.risk("G1-R4"), corpus)
    assert a.dominant.path_id == "P1"
    assert "declaration order" in a.tie_break


def test_floor_case(synthetic):
    a = assess_risk(synthetic.risk("RF"), synthetic)
    assert (a.likelihood.value, a.score) == (1, 1)


def test_assessment_is_deterministic(corpus):
    assert assess_goal("G1", corpus) == assess_goal("G1", corpus)


def test_unknown_goal_and_empty_goal(synthetic):
    with pytest.raises(DomainError):
        assess_goal("G9", synthetic)
    assert assess_goal("G", replace(synthetic, risks=())) == []


def test_unresolvable_risk_raises(synthetic):
    risk = synthetic.risk("RA")
    broken = replace(risk, candidate_paths=(replace(risk.candidate_paths[0], steps=()),))
    with pytest.raises(DomainError):
        assess_risk(broken, synthetic)


def test_external_profile_lowers_insider_pins(corpus):
    a = assess_risk(corpus.risk("G1-R2"), corpus, AttackerProfile(False))
    assert a.score == 8
    assert a.warnings


def test_matrix(corpus):
    results = assess_goal("G1", corpus)
    m = risk_matrix(results)
    assert m.cell(4, 5) == ("G1-R1",)
    assert m.cell(3, 3) == ("G1-R4",)
    placed = [rid for _, ids in m for rid in ids]
    assert sorted(placed) == sorted(a.risk_id for a in results)
    assert len(list(m)) == 25


def test_empty_matrix():
    m = risk_matrix([])
    assert all(ids == () for _, ids in m)
    with pytest.raises(DomainError):
        m.cell(6, 1)
