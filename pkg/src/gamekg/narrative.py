"""Fictionalized case narratives.

Entities are renamed through per-type pseudonym pools before any text leaves
the server, and every narrative is checked against two requirements: each
relation's endpoints must co-occur in some sentence, and no real name may
survive into the text.  A deterministic template generator is always
available; an external text generator can be plugged in and is distrusted by
default (validated, retried once, then replaced by the template).
"""

from __future__ import annotations

import json
import logging
import random
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Protocol

from .errors import PoolExhaustedError, ValidationError
from .graph import KnowledgeGraph, Subgraph
from .ingest import split_sentences

logger = logging.getLogger(__name__)

FRAMING_SENTENCE = "Investigators assembled the following case notes for review."


@lru_cache(maxsize=1)
def default_name_pools() -> dict[str, tuple[str, ...]]:
    raw = json.loads(
        resources.files("gamekg.data").joinpath("name_pools.json").read_text("utf-8")
    )
    return {key: tuple(values) for key, values in raw.items()}


@lru_cache(maxsize=1)
def default_predicate_phrases() -> dict[str, str]:
    return json.loads(
        resources.files("gamekg.data").joinpath("predicate_phrases.json").read_text("utf-8")
    )


@dataclass(frozen=True, slots=True)
class PseudonymMap:
    """Injective entity-id -> fictional-name mapping for one case."""

    mapping: dict[str, str]
    seed: int

    def __getitem__(self, entity_id: str) -> str:
        return self.mapping[entity_id]


def make_pseudonyms(
    graph: KnowledgeGraph,
    subgraph: Subgraph,
    seed: int,
    pools: dict[str, tuple[str, ...]] | None = None,
) -> PseudonymMap:
    """Draw a fictional name per entity, seeded and without replacement.

    Entities are processed in id order, and each draw removes the name from
    its type pool, so the same seed always yields the same injective map.
    Running out of names raises PoolExhaustedError naming the type.
    """
    pools = pools or default_name_pools()
    remaining = {key: list(values) for key, values in pools.items()}
    rng = random.Random(seed)
    mapping: dict[str, str] = {}
    for entity_id in sorted(subgraph.entity_ids):
        entity = graph.get_entity(entity_id)
        type_key = entity.entity_type.value
        pool = remaining.get(type_key)
        if pool is None:
            pool = remaining.setdefault(type_key, list(pools.get("other", ())))
        if not pool:
            raise PoolExhaustedError(type_key, len(pools.get(type_key, ())))
        mapping[entity_id] = pool.pop(rng.randrange(len(pool)))
    return PseudonymMap(mapping, seed)


class TextGenerator(Protocol):
    """External narrative generator; ``generate`` blocks and may time out."""

    def generate(self, prompt: str) -> str: ...


@dataclass(slots=True)
class Narrative:
    case_text: str
    sentence_spans: dict[str, int]  # edge id -> sentence index in case_text
    provider_used: str  # "template", "external", or "template_fallback"


@dataclass(slots=True)
class NarrativeReport:
    """Outcome of validating a narrative against its subgraph."""

    sentence_for_edge: dict[str, int] = field(default_factory=dict)
    missing_edges: list[str] = field(default_factory=list)
    alias_leaks: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.missing_edges and not self.alias_leaks


def _word_pattern(phrase: str) -> re.Pattern[str]:
    return re.compile(rf"(?<!\w){re.escape(phrase)}(?!\w)", re.IGNORECASE)


def validate_narrative(
    text: str,
    graph: KnowledgeGraph,
    subgraph: Subgraph,
    pseudonyms: PseudonymMap,
) -> NarrativeReport:
    """Check fact retention and anonymization of a narrative.

    Every subgraph edge must have some sentence mentioning both endpoint
    pseudonyms, and no alias of any graph entity may appear anywhere in the
    text (matched case-insensitively on word boundaries).
    """
    report = NarrativeReport()
    sentences = split_sentences(text)
    for edge_id in subgraph.edge_ids:
        edge = graph.get_edge(edge_id)
        subject_pattern = _word_pattern(pseudonyms[edge.subject_id])
        object_pattern = _word_pattern(pseudonyms[edge.object_id])
        for index, sentence in enumerate(sentences):
            if subject_pattern.search(sentence) and object_pattern.search(sentence):
                report.sentence_for_edge[edge_id] = index
                break
        else:
            report.missing_edges.append(edge_id)
    leaked = set()
    for entity in graph.entities.values():
        for alias in entity.aliases:
            if alias and _word_pattern(alias).search(text):
                leaked.add(alias)
    report.alias_leaks = sorted(leaked)
    return report


def build_prompt(
    graph: KnowledgeGraph,
    subgraph: Subgraph,
    pseudonyms: PseudonymMap,
    phrases: dict[str, str] | None = None,
) -> str:
    """Prompt for an external generator, already pseudonymized."""
    phrases = phrases or default_predicate_phrases()
    lines = [
        "Write a short investigative case narrative.",
        "Mention every fact below; keep each fact's two names in one sentence.",
        "Use only the names given. Facts:",
    ]
    for edge_id in subgraph.edge_ids:
        edge = graph.get_edge(edge_id)
        phrase = phrases.get(edge.predicate, edge.predicate)
        lines.append(
            f"- {pseudonyms[edge.subject_id]} {phrase} {pseudonyms[edge.object_id]}"
        )
    return "\n".join(lines)


def _template_text(
    graph: KnowledgeGraph,
    subgraph: Subgraph,
    pseudonyms: PseudonymMap,
    phrases: dict[str, str],
) -> str:
    sentences = [FRAMING_SENTENCE]
    for edge_id in subgraph.edge_ids:
        edge = graph.get_edge(edge_id)
        phrase = phrases.get(edge.predicate, edge.predicate)
        sentences.append(
            f"{pseudonyms[edge.subject_id]} {phrase} {pseudonyms[edge.object_id]}."
        )
    return " ".join(sentences)


def generate_narrative(
    graph: KnowledgeGraph,
    subgraph: Subgraph,
    pseudonyms: PseudonymMap,
    provider: TextGenerator | None = None,
    phrases: dict[str, str] | None = None,
) -> Narrative:
    """Produce a validated narrative for a subgraph.

    With no provider the deterministic template is used.  An external
    provider gets one retry after a failed validation; if the retry also
    fails (or the provider raises), the template takes over and
    ``provider_used`` records the fallback.
    """
    phrases = phrases or default_predicate_phrases()
    missing = [eid for eid in subgraph.entity_ids if eid not in pseudonyms.mapping]
    if missing:
        raise ValidationError(f"no pseudonym for entities: {', '.join(sorted(missing))}")

    if provider is not None:
        prompt = build_prompt(graph, subgraph, pseudonyms, phrases)
        logger.info("narrative prompt:\n%s", prompt)
        for attempt in (1, 2):
            try:
                text = provider.generate(prompt)
            except Exception:
                logger.exception("narrative provider failed on attempt %d", attempt)
                break
            report = validate_narrative(text, graph, subgraph, pseudonyms)
            if report.ok:
                return Narrative(text, dict(report.sentence_for_edge), "external")
            logger.warning(
                "narrative attempt %d rejected (missing=%s leaks=%s)",
                attempt,
                report.missing_edges,
                report.alias_leaks,
            )
        text = _template_text(graph, subgraph, pseudonyms, phrases)
        report = validate_narrative(text, graph, subgraph, pseudonyms)
        return Narrative(text, dict(report.sentence_for_edge), "template_fallback")

    text = _template_text(graph, subgraph, pseudonyms, phrases)
    report = validate_narrative(text, graph, subgraph, pseudonyms)
    return Narrative(text, dict(report.sentence_for_edge), "template")
