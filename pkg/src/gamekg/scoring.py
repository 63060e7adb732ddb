"""Embeddings, cosine similarity, and candidate-link findings.

Two kinds of findings come out of a pass over the graph: connected entity
pairs whose contexts barely resemble each other (the edge looks suspect) and
unconnected pairs whose contexts strongly resemble each other (an edge may be
missing).  Both are review hints for humans, not automatic edits.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Protocol

import numpy as np

from .errors import NotFoundError, ValidationError
from .graph import DocumentSource, Edge, KnowledgeGraph
from .ingest import split_sentences

_WORD_RE = re.compile(r"[a-z0-9]+")

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_U64 = (1 << 64) - 1


def _fnv1a_64(data: bytes) -> int:
    value = _FNV_OFFSET
    for byte in data:
        value ^= byte
        value = (value * _FNV_PRIME) & _U64
    return value


class EmbeddingProvider(Protocol):
    """Anything that turns text into a fixed-size vector."""

    dimension: int

    def embed(self, text: str) -> np.ndarray: ...


@dataclass(frozen=True, slots=True)
class HashedTokenEmbedding:
    """Dependency-free bag-of-tokens embedding.

    Tokens are lowercased, hashed with 64-bit FNV-1a into ``dimension``
    buckets, counted, and L2-normalized.  Text with no tokens embeds to the
    zero vector, which is preserved as-is.
    """

    dimension: int = 256

    def embed(self, text: str) -> np.ndarray:
        vector = np.zeros(self.dimension, dtype=np.float64)
        for token in _WORD_RE.findall(text.lower()):
            vector[_fnv1a_64(token.encode("utf-8")) % self.dimension] += 1.0
        norm = float(np.linalg.norm(vector))
        if norm > 0.0:
            vector /= norm
        return vector


def entity_context(graph: KnowledgeGraph, entity_id: str) -> str:
    """Text summarizing an entity: its name, source sentences, and predicates.

    Source sentences come from the document provenance of active incident
    edges; predicates are those of the same edges.  Both lists are
    deduplicated and sorted so the context is stable.
    """
    entity = graph.get_entity(entity_id)
    sentence_keys: set[tuple[str, int]] = set()
    predicates: set[str] = set()
    for edge in graph.active_edges():
        if entity_id not in (edge.subject_id, edge.object_id):
            continue
        predicates.add(edge.predicate)
        if isinstance(edge.provenance, DocumentSource):
            sentence_keys.add((edge.provenance.doc_id, edge.provenance.sentence_index))
    split_cache: dict[str, list[str]] = {}
    sentences = []
    for doc_id, index in sorted(sentence_keys):
        document = graph.documents.get(doc_id)
        if document is None:
            continue
        if doc_id not in split_cache:
            split_cache[doc_id] = split_sentences(document.body)
        if 0 <= index < len(split_cache[doc_id]):
            sentences.append(split_cache[doc_id][index])
    return " ".join([entity.canonical_name] + sentences + sorted(predicates))


def embed_entity(
    graph: KnowledgeGraph, entity_id: str, provider: EmbeddingProvider | None = None
) -> np.ndarray:
    if entity_id not in graph.entities:
        raise NotFoundError(f"unknown entity {entity_id!r}")
    provider = provider or HashedTokenEmbedding()
    return provider.embed(entity_context(graph, entity_id))


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity, defined as 0.0 when either vector is zero."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape or u.ndim != 1:
        raise ValidationError(f"vector shapes differ: {u.shape} vs {v.shape}")
    norm_u = float(np.linalg.norm(u))
    norm_v = float(np.linalg.norm(v))
    if norm_u == 0.0 or norm_v == 0.0:
        return 0.0
    value = float(np.dot(u, v)) / (norm_u * norm_v)
    return max(-1.0, min(1.0, value))


class FindingKind(str, Enum):
    SUSPECT_EDGE = "suspect_edge"
    MISSING_EDGE = "missing_edge"


@dataclass(frozen=True, slots=True)
class CandidateFinding:
    """One review hint: an edge to doubt, or a pair that may deserve one."""

    kind: FindingKind
    entity_a: str  # always the lexicographically smaller id
    entity_b: str
    similarity: float
    edge_id: str | None = None

    @property
    def pair(self) -> tuple[str, str]:
        return (self.entity_a, self.entity_b)


def identify_candidates(
    graph: KnowledgeGraph,
    provider: EmbeddingProvider | None = None,
    tau_low: float = 0.2,
    tau_high: float = 0.6,
    max_results: int = 50,
) -> list[CandidateFinding]:
    """Score all entity pairs and return review findings.

    Connected pairs below ``tau_low`` yield one SUSPECT_EDGE finding per
    active edge between them; unconnected pairs above ``tau_high`` yield a
    MISSING_EDGE finding.  Suspect findings come first (ascending
    similarity), then missing ones (descending), ties broken by pair order,
    truncated to ``max_results``.
    """
    if not 0.0 <= tau_low <= tau_high <= 1.0:
        raise ValidationError(
            f"thresholds must satisfy 0 <= tau_low <= tau_high <= 1, "
            f"got {tau_low} and {tau_high}"
        )
    provider = provider or HashedTokenEmbedding()
    ids = sorted(graph.entities)
    vectors = {eid: provider.embed(entity_context(graph, eid)) for eid in ids}

    edges_by_pair: dict[tuple[str, str], list[Edge]] = {}
    for edge in graph.active_edges():
        pair = tuple(sorted((edge.subject_id, edge.object_id)))
        edges_by_pair.setdefault(pair, []).append(edge)  # type: ignore[arg-type]

    suspects: list[tuple[tuple, CandidateFinding]] = []
    missing: list[tuple[tuple, CandidateFinding]] = []
    for i, a in enumerate(ids):
        for b in ids[i + 1 :]:
            similarity = cosine(vectors[a], vectors[b])
            connecting = edges_by_pair.get((a, b))
            if connecting:
                if similarity < tau_low:
                    for edge in sorted(connecting, key=Edge.sort_key):
                        finding = CandidateFinding(
                            FindingKind.SUSPECT_EDGE, a, b, similarity, edge.id
                        )
                        suspects.append(((similarity, (a, b), edge.sort_key()), finding))
            elif similarity > tau_high:
                finding = CandidateFinding(FindingKind.MISSING_EDGE, a, b, similarity)
                missing.append(((-similarity, (a, b)), finding))

    suspects.sort(key=lambda item: item[0])
    missing.sort(key=lambda item: item[0])
    ordered = [finding for _, finding in suspects] + [finding for _, finding in missing]
    return ordered[:max_results]


def finding_to_dict(finding: CandidateFinding) -> dict:
    record = {
        "kind": finding.kind.value,
        "entity_a": finding.entity_a,
        "entity_b": finding.entity_b,
        "similarity": finding.similarity,
    }
    if finding.edge_id is not None:
        record["edge_id"] = finding.edge_id
    return record
