"""Embeddings, cosine, and candidate findings, checked against brute-force oracles."""

from __future__ import annotations

import math
import random

import numpy as np
import pytest
from conftest import build_claims_graph, build_random_graph

from gamekg.errors import NotFoundError, ValidationError
from gamekg.graph import DocumentSource, KnowledgeGraph, PlayerSource
from gamekg.ingest import split_sentences
from gamekg.scoring import (
    CandidateFinding,
    FindingKind,
    HashedTokenEmbedding,
    cosine,
    embed_entity,
    entity_context,
    identify_candidates,
)

# --- independent hashing oracle ---------------------------------------------
# Re-implemented from the FNV-1a definition, not from the library code.

_ORACLE_OFFSET = 14695981039346656037
_ORACLE_PRIME = 1099511628211


def _oracle_fnv1a(data: bytes) -> int:
    h = _ORACLE_OFFSET
    for b in data:
        h ^= b
        h = (h * _ORACLE_PRIME) % (1 << 64)
    return h


def _oracle_embed(text: str, dimension: int = 256) -> list[float]:
    import re

    counts = [0.0] * dimension
    for token in re.findall(r"[a-z0-9]+", text.lower()):
        counts[_oracle_fnv1a(token.encode("utf-8")) % dimension] += 1.0
    norm = math.sqrt(sum(c * c for c in counts))
    if norm == 0.0:
        return counts
    return [c / norm for c in counts]


def test_frozen_hash_buckets() -> None:
    # values computed once with the standalone oracle script
    assert _oracle_fnv1a(b"kizer") % 256 == 178
    assert _oracle_fnv1a(b"john") % 256 == 92
    assert _oracle_fnv1a(b"doe") % 256 == 131
    provider = HashedTokenEmbedding()
    vec = provider.embed("kizer")
    assert vec[178] == 1.0
    assert np.count_nonzero(vec) == 1
    vec = provider.embed("John Doe")
    assert vec[92] == pytest.approx(1 / math.sqrt(2))
    assert vec[131] == pytest.approx(1 / math.sqrt(2))


def test_embedding_matches_oracle() -> None:
    provider = HashedTokenEmbedding()
    for text in [
        "Kizer transported victims across state borders.",
        "Mann Act mann act ACT",
        "a b c a b a",
    ]:
        assert provider.embed(text).tolist() == _oracle_embed(text)


def test_embedding_of_empty_text_is_zero_vector() -> None:
    provider = HashedTokenEmbedding()
    assert not provider.embed("").any()
    assert not provider.embed("  ... !!").any()


def test_embedding_is_unit_norm_when_nonempty() -> None:
    provider = HashedTokenEmbedding()
    assert np.linalg.norm(provider.embed("one two three")) == pytest.approx(1.0)


def test_entity_context_collects_name_sentences_predicates() -> None:
    g = build_claims_graph()
    context = entity_context(g, "kizer")
    assert context.startswith("Kizer ")
    sentences = split_sentences(g.documents["press-release"].body)
    for sentence in sentences:  # kizer touches edges from all three sentences
        assert sentence in context
    assert context.endswith("accomplice_to transported violated")


def test_entity_context_ignores_filtered_edges() -> None:
    from gamekg.graph import EdgeStatus

    g = build_claims_graph()
    edge = g.find_edge("kizer", "violated", "mann-act")
    assert edge is not None
    edge.status = EdgeStatus.FILTERED
    assert "violated" not in entity_context(g, "kizer")


def test_embed_entity_matches_oracle_on_claims_graph() -> None:
    g = build_claims_graph()
    expected = _oracle_embed(entity_context(g, "kizer"))
    assert embed_entity(g, "kizer").tolist() == expected


def test_embed_entity_unknown() -> None:
    with pytest.raises(NotFoundError):
        embed_entity(build_claims_graph(), "nobody")


def test_cosine_against_math_oracle() -> None:
    rng = random.Random(97)
    for _ in range(200):
        n = rng.randint(1, 8)
        u = np.array([rng.uniform(-3, 3) for _ in range(n)])
        v = np.array([rng.uniform(-3, 3) for _ in range(n)])
        expected = sum(a * b for a, b in zip(u, v)) / (
            math.sqrt(sum(a * a for a in u)) * math.sqrt(sum(b * b for b in v))
        )
        assert cosine(u, v) == pytest.approx(expected, abs=1e-12)


def test_cosine_properties() -> None:
    rng = np.random.default_rng(404)
    for _ in range(200):
        u = rng.normal(size=16)
        v = rng.normal(size=16)
        assert cosine(u, v) == cosine(v, u)  # exact symmetry
        assert -1.0 <= cosine(u, v) <= 1.0
        assert 1.0 - 1e-9 <= cosine(u, u) <= 1.0


def test_cosine_zero_vector_is_zero() -> None:
    z = np.zeros(4)
    v = np.ones(4)
    assert cosine(z, v) == 0.0
    assert cosine(v, z) == 0.0
    assert cosine(z, z) == 0.0


def test_cosine_rejects_shape_mismatch() -> None:
    with pytest.raises(ValidationError):
        cosine(np.ones(3), np.ones(4))


# --- candidate findings ------------------------------------------------------


def _oracle_candidates(
    graph: KnowledgeGraph,
    provider: HashedTokenEmbedding,
    tau_low: float,
    tau_high: float,
    max_results: int,
) -> list[CandidateFinding]:
    """Brute-force all-pairs scan, sharing only the provider and cosine."""
    from itertools import combinations

    vectors = {eid: provider.embed(entity_context(graph, eid)) for eid in graph.entities}
    suspects = []
    missing = []
    for a, b in combinations(sorted(graph.entities), 2):
        sim = cosine(vectors[a], vectors[b])
        between = [
            e
            for e in graph.active_edges()
            if sorted((e.subject_id, e.object_id)) == sorted((a, b))
        ]
        if between:
            if sim < tau_low:
                for e in sorted(between, key=lambda e: (e.subject_id, e.predicate, e.object_id)):
                    suspects.append(
                        (
                            (sim, (a, b), (e.subject_id, e.predicate, e.object_id)),
                            CandidateFinding(FindingKind.SUSPECT_EDGE, a, b, sim, e.id),
                        )
                    )
        elif sim > tau_high:
            missing.append(
                ((-sim, (a, b)), CandidateFinding(FindingKind.MISSING_EDGE, a, b, sim))
            )
    suspects.sort(key=lambda x: x[0])
    missing.sort(key=lambda x: x[0])
    return ([f for _, f in suspects] + [f for _, f in missing])[:max_results]


def test_identify_candidates_matches_oracle_on_random_graphs() -> None:
    rng = random.Random(2024)
    provider = HashedTokenEmbedding()
    for _ in range(30):
        g = build_random_graph(rng, max_entities=25)
        tau_low = rng.choice([0.1, 0.2, 0.4])
        tau_high = rng.choice([0.5, 0.6, 0.8])
        got = identify_candidates(g, provider, tau_low, tau_high, max_results=100)
        want = _oracle_candidates(g, provider, tau_low, tau_high, max_results=100)
        assert got == want


def test_identify_candidates_rule_invariants() -> None:
    rng = random.Random(31337)
    provider = HashedTokenEmbedding()
    for _ in range(10):
        g = build_random_graph(rng, max_entities=20)
        for finding in identify_candidates(g, provider, 0.3, 0.5, max_results=500):
            connected = any(
                sorted((e.subject_id, e.object_id)) == [finding.entity_a, finding.entity_b]
                for e in g.active_edges()
            )
            if finding.kind is FindingKind.MISSING_EDGE:
                assert not connected
                assert finding.similarity > 0.5
                assert finding.edge_id is None
            else:
                assert connected
                assert finding.similarity < 0.3
                assert finding.edge_id in g.edges


def test_adding_missing_edge_clears_the_finding() -> None:
    rng = random.Random(88)
    provider = HashedTokenEmbedding()
    for _ in range(5):
        g = build_random_graph(rng, max_entities=15, allow_filtered=False)
        findings = identify_candidates(g, provider, 0.0, 0.4, max_results=500)
        missing = [f for f in findings if f.kind is FindingKind.MISSING_EDGE]
        if not missing:
            continue
        target = missing[0]
        g.upsert_edge(target.entity_a, "linked_by_review", target.entity_b, PlayerSource("p"))
        after = identify_candidates(g, provider, 0.0, 0.4, max_results=500)
        assert not any(
            f.kind is FindingKind.MISSING_EDGE and f.pair == target.pair for f in after
        )


def test_identify_candidates_orders_suspects_before_missing() -> None:
    g = build_claims_graph()
    findings = identify_candidates(g, tau_low=1.0, tau_high=1.0, max_results=500)
    kinds = [f.kind for f in findings]
    # with tau_low = 1 every connected pair is suspect; suspects must lead
    assert kinds == sorted(kinds, key=lambda k: 0 if k is FindingKind.SUSPECT_EDGE else 1)
    suspect_sims = [f.similarity for f in findings if f.kind is FindingKind.SUSPECT_EDGE]
    assert suspect_sims == sorted(suspect_sims)
    missing_sims = [f.similarity for f in findings if f.kind is FindingKind.MISSING_EDGE]
    assert missing_sims == sorted(missing_sims, reverse=True)


def test_identify_candidates_truncates() -> None:
    g = build_claims_graph()
    full = identify_candidates(g, tau_low=1.0, tau_high=1.0, max_results=500)
    assert identify_candidates(g, tau_low=1.0, tau_high=1.0, max_results=2) == full[:2]


def test_identify_candidates_rejects_bad_thresholds() -> None:
    g = build_claims_graph()
    for low, high in [(-0.1, 0.5), (0.7, 0.3), (0.2, 1.4)]:
        with pytest.raises(ValidationError):
            identify_candidates(g, tau_low=low, tau_high=high)


def test_claims_graph_flags_unconnected_similar_pair() -> None:
    # villaman and mann-act share the background sentence context through
    # kizer's edges, yet have no direct edge; a permissive tau_high should
    # surface at least one missing-edge hint somewhere in the graph
    g = build_claims_graph()
    findings = identify_candidates(g, tau_low=0.0, tau_high=0.1, max_results=500)
    pairs = {f.pair for f in findings if f.kind is FindingKind.MISSING_EDGE}
    connected = {
        tuple(sorted((e.subject_id, e.object_id))) for e in g.active_edges()
    }
    assert pairs, "expected at least one unconnected pair above threshold"
    assert all(p not in connected for p in pairs)
