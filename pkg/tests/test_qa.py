"""Entity linking, fact-path answers, and the exact refusal."""

from __future__ import annotations

import json
import random

import pytest
from conftest import build_claims_graph, build_random_graph

from gamekg.feedback import Action, FeedbackEvent, ProposedTriple, VoteLedger, apply_consensus, record_feedback
from gamekg.graph import EdgeStatus, EntityType, KnowledgeGraph, PlayerSource
from gamekg.qa import (
    REFUSAL_TEXT,
    AnswerStatus,
    SynonymTable,
    answer,
    answer_to_dict,
    link_entities,
)


def test_refusal_text_is_pinned() -> None:
    assert REFUSAL_TEXT == "The knowledge to generate an answer is not found."


def test_link_single_entity() -> None:
    g = build_claims_graph()
    assert link_entities("What act did Villaman break?", g) == ["villaman"]


def test_link_multi_token_alias_longest_match() -> None:
    g = build_claims_graph()
    g.upsert_entity("Act", EntityType.OTHER)  # a decoy single-token entity
    assert link_entities("Who broke the Mann Act?", g) == ["mann-act"]


def test_link_orders_by_match_position() -> None:
    g = build_claims_graph()
    assert link_entities("Did Kizer transport the victims?", g) == ["kizer", "victims"]
    assert link_entities("Were victims transported by Kizer?", g) == ["victims", "kizer"]


def test_link_ignores_unknown_tokens() -> None:
    g = build_claims_graph()
    assert link_entities("Entirely unrelated question?", g) == []


def test_link_handles_alias_with_stopwords() -> None:
    g = KnowledgeGraph()
    g.upsert_entity("The Orchard Society", EntityType.ORGANIZATION)
    assert link_entities("Who runs the Orchard Society?", g) == ["the-orchard-society"]


def test_unanswerable_question_gets_exact_refusal() -> None:
    g = build_claims_graph()
    result = answer("What act did Villaman break?", g)
    assert result.status is AnswerStatus.NOT_FOUND
    assert result.answer_text == REFUSAL_TEXT
    assert result.fact_path == ()


def test_direct_edge_answers_with_one_edge_path() -> None:
    g = build_claims_graph()
    result = answer("What act did Kizer break?", g)
    assert result.status is AnswerStatus.ANSWERED
    assert result.answer_text == "Mann Act"
    violated = g.find_edge("kizer", "violated", "mann-act")
    assert violated is not None
    assert result.fact_path == (violated.id,)
    assert result.score >= 2


def test_player_proposed_edge_changes_the_answer() -> None:
    g = build_claims_graph()
    g.upsert_edge("villaman", "violated", "mann-act", PlayerSource("p1"))
    result = answer("What act did Villaman break?", g)
    assert result.status is AnswerStatus.ANSWERED
    assert result.answer_text == "Mann Act"
    proposed = g.find_edge("villaman", "violated", "mann-act")
    assert proposed is not None
    assert result.fact_path == (proposed.id,)


def test_filtered_edges_never_support_answers() -> None:
    g = build_claims_graph()
    edge = g.upsert_edge("villaman", "violated", "mann-act", PlayerSource("p1"))
    edge.status = EdgeStatus.FILTERED
    result = answer("What act did Villaman break?", g)
    assert result.status is AnswerStatus.NOT_FOUND
    assert result.answer_text == REFUSAL_TEXT


def test_two_hop_path_needs_every_edge_licensed() -> None:
    # "accomplice" licenses the first hop, "break" the second; the fact path
    # walks villaman -> kizer -> mann-act
    g = build_claims_graph()
    result = answer("What act did Villaman's accomplice break?", g)
    assert result.status is AnswerStatus.ANSWERED
    assert result.answer_text == "Mann Act"
    accomplice = g.find_edge("villaman", "accomplice_to", "kizer")
    violated = g.find_edge("kizer", "violated", "mann-act")
    assert accomplice is not None and violated is not None
    assert result.fact_path == (accomplice.id, violated.id)


def test_max_hops_limits_reach() -> None:
    g = build_claims_graph()
    result = answer("What act did Villaman break?", g, max_hops=1)
    assert result.status is AnswerStatus.NOT_FOUND


def test_consensus_view_drives_qa() -> None:
    g = build_claims_graph()
    ledger = VoteLedger()
    triple = ProposedTriple("villaman", "violated", "mann-act")
    record_feedback(
        g,
        ledger,
        FeedbackEvent("e1", "p1", "c1", Action.PROPOSE, triple),
    )
    apply_consensus(g, ledger)  # 1.0 < accept threshold 2.0
    assert answer("What act did Villaman break?", g).status is AnswerStatus.NOT_FOUND
    record_feedback(
        g,
        ledger,
        FeedbackEvent("e2", "p2", "c1", Action.PROPOSE, triple),
    )
    apply_consensus(g, ledger)
    assert answer("What act did Villaman break?", g).answer_text == "Mann Act"


def test_shorter_path_wins_a_score_tie() -> None:
    g = KnowledgeGraph()
    for name in ("Root", "Near", "Far", "Mid"):
        g.upsert_entity(name, EntityType.PERSON)
    g.upsert_edge("root", "recruited", "near", PlayerSource("p"))
    g.upsert_edge("root", "recruited", "mid", PlayerSource("p"))
    g.upsert_edge("mid", "recruited", "far", PlayerSource("p"))
    result = answer("Who did Root recruit?", g)
    assert result.status is AnswerStatus.ANSWERED
    assert result.answer_text == "Mid"  # same score and length as Near: id order
    assert len(result.fact_path) == 1


def test_no_linked_entity_means_refusal() -> None:
    g = build_claims_graph()
    assert answer("", g).answer_text == REFUSAL_TEXT
    assert answer("Nothing matches here.", g).answer_text == REFUSAL_TEXT


def test_internal_errors_collapse_to_refusal() -> None:
    g = build_claims_graph()
    result = answer("What act did Kizer break?", g, max_hops="two")  # type: ignore[arg-type]
    assert result.status is AnswerStatus.NOT_FOUND
    assert result.answer_text == REFUSAL_TEXT


def test_answer_to_dict_shapes() -> None:
    g = build_claims_graph()
    answered = answer_to_dict(answer("What act did Kizer break?", g), g)
    assert answered["status"] == "answered"
    assert answered["answer"] == "Mann Act"
    assert answered["fact_path"] == [
        {
            "subject": "kizer",
            "predicate": "violated",
            "object": "mann-act",
            "provenance": {
                "kind": "explicit",
                "doc_id": "press-release",
                "sentence_index": 2,
            },
        }
    ]
    refused = answer_to_dict(answer("What act did Villaman break?", g), g)
    assert refused == {
        "status": "not_found",
        "answer": REFUSAL_TEXT,
        "fact_path": [],
        "score": refused["score"],
    }
    json.dumps(answered)  # serializable


class _UpperCaser:
    calls = 0

    def generate(self, prompt: str) -> str:
        type(self).calls += 1
        return "The answer is the Mann Act."


def test_phrasing_provider_rewords_but_keeps_path() -> None:
    g = build_claims_graph()
    provider = _UpperCaser()
    result = answer("What act did Kizer break?", g, phrasing=provider)
    assert result.answer_text == "The answer is the Mann Act."
    violated = g.find_edge("kizer", "violated", "mann-act")
    assert violated is not None
    assert result.fact_path == (violated.id,)


def test_phrasing_provider_never_runs_on_refusal() -> None:
    g = build_claims_graph()
    before = _UpperCaser.calls
    result = answer("What act did Villaman break?", g, phrasing=_UpperCaser())
    assert result.answer_text == REFUSAL_TEXT
    assert _UpperCaser.calls == before


def test_crashing_phrasing_provider_keeps_canonical_text() -> None:
    class Boom:
        def generate(self, prompt: str) -> str:
            raise TimeoutError("slow")

    g = build_claims_graph()
    result = answer("What act did Kizer break?", g, phrasing=Boom())
    assert result.answer_text == "Mann Act"


def test_synonym_table_file_merges_over_defaults(tmp_path) -> None:
    path = tmp_path / "synonyms.json"
    path.write_text(json.dumps({"verb_synonyms": {"smashed": ["violated"]}}))
    table = SynonymTable.load(path)
    assert table.verb_synonyms["smashed"] == frozenset({"violated"})
    assert "violated" in table.verb_synonyms["broke"]
    g = build_claims_graph()
    assert answer("What act did Kizer smash?", g, synonyms=table).answer_text == REFUSAL_TEXT
    assert (
        answer("Which act was smashed by Kizer?", g, synonyms=table).answer_text
        == "Mann Act"
    )


def test_fact_paths_only_use_active_edges_on_random_graphs() -> None:
    rng = random.Random(515)
    questions = 0
    for _ in range(20):
        g = build_random_graph(rng, max_entities=20)
        ids = sorted(g.entities)
        for _ in range(5):
            name = g.entities[rng.choice(ids)].canonical_name
            verb = rng.choice(["violate", "recruit", "transport"])
            result = answer(f"Who did {name} {verb}?", g)
            questions += 1
            if result.status is AnswerStatus.ANSWERED:
                assert result.fact_path
                for edge_id in result.fact_path:
                    assert g.edges[edge_id].status is EdgeStatus.ACTIVE
            else:
                assert result.answer_text == REFUSAL_TEXT
    assert questions == 100
