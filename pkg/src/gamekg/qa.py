"""Question answering over the active graph, with visible fact paths.

An answer is only ever produced from edges the asker could inspect: the
returned fact path lists the edges that justify it, and every edge on that
path must carry a predicate licensed by the question's own verbs.  When no
candidate clears the bar the module replies with one fixed refusal sentence
rather than guessing.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .errors import LoadError
from .graph import KnowledgeGraph, provenance_to_dict
from .narrative import TextGenerator

logger = logging.getLogger(__name__)

#: Byte-exact refusal emitted whenever no supported answer exists.
REFUSAL_TEXT = "The knowledge to generate an answer is not found."

DEFAULT_MAX_HOPS = 2
_ANSWER_THRESHOLD = 2

_WORD_RE = re.compile(r"[a-z0-9]+")

STOP_WORDS = frozenset(
    """
    what who whom whose which when where why how did does do is was are
    were be been being the a an of to in on at by for with and or not
    it he she they them him her his its their
    """.split()
)


def tokenize(text: str) -> list[str]:
    return _WORD_RE.findall(text.lower())


@dataclass(frozen=True, slots=True)
class SynonymTable:
    """Question vocabulary: verb -> predicates, hint noun -> name tokens."""

    verb_synonyms: dict[str, frozenset[str]]
    type_hints: dict[str, frozenset[str]]

    @staticmethod
    def from_dict(raw: dict) -> "SynonymTable":
        return SynonymTable(
            verb_synonyms={
                k.lower(): frozenset(v) for k, v in raw.get("verb_synonyms", {}).items()
            },
            type_hints={
                k.lower(): frozenset(v) for k, v in raw.get("type_hints", {}).items()
            },
        )

    @staticmethod
    def load(path: str | Path) -> "SynonymTable":
        """Read a synonym file and merge it over the packaged defaults."""
        try:
            with open(path, "r", encoding="utf-8") as fp:
                raw = json.load(fp)
        except json.JSONDecodeError as exc:
            raise LoadError(f"synonym file {path}: invalid JSON ({exc.msg})") from None
        base = default_synonyms()
        extra = SynonymTable.from_dict(raw)
        return SynonymTable(
            verb_synonyms={**base.verb_synonyms, **extra.verb_synonyms},
            type_hints={**base.type_hints, **extra.type_hints},
        )


@lru_cache(maxsize=1)
def default_synonyms() -> SynonymTable:
    raw = json.loads(
        resources.files("gamekg.data").joinpath("qa_synonyms.json").read_text("utf-8")
    )
    return SynonymTable.from_dict(raw)


def link_entities(question_text: str, graph: KnowledgeGraph) -> list[str]:
    """Map question tokens to entity ids by longest alias match.

    Stop-words are dropped first; remaining tokens are scanned left to right
    and the longest contiguous run matching any alias wins, so "Mann Act"
    beats a hypothetical entity named just "Act".  Result order follows match
    position; duplicates are collapsed.
    """
    index: dict[tuple[str, ...], str] = {}
    longest = 1
    for entity_id in sorted(graph.entities):
        for alias in graph.entities[entity_id].aliases:
            # aliases get the same stop-word filtering as the question
            key = tuple(t for t in tokenize(alias) if t not in STOP_WORDS)
            if key:
                index.setdefault(key, entity_id)
                longest = max(longest, len(key))
    tokens = [t for t in tokenize(question_text) if t not in STOP_WORDS]
    linked: list[str] = []
    position = 0
    while position < len(tokens):
        for width in range(min(longest, len(tokens) - position), 0, -1):
            entity_id = index.get(tuple(tokens[position : position + width]))
            if entity_id is not None:
                if entity_id not in linked:
                    linked.append(entity_id)
                position += width
                break
        else:
            position += 1
    return linked


class AnswerStatus(str, Enum):
    ANSWERED = "answered"
    NOT_FOUND = "not_found"


@dataclass(frozen=True, slots=True)
class Answer:
    status: AnswerStatus
    answer_text: str
    fact_path: tuple[str, ...]  # edge ids, in path order
    score: float

    @property
    def answered(self) -> bool:
        return self.status is AnswerStatus.ANSWERED


def _refusal(score: float = 0.0) -> Answer:
    return Answer(AnswerStatus.NOT_FOUND, REFUSAL_TEXT, (), score)


def _best_paths(
    graph: KnowledgeGraph,
    starts: list[str],
    max_hops: int,
    allowed: frozenset[str] | None,
) -> dict[str, tuple[str, ...]]:
    """Shortest edge-id path to every entity reachable from ``starts``.

    Breadth-first over active edges in both directions, expanding neighbors
    in their deterministic order; earlier start entities win length ties.
    ``allowed`` restricts traversal to those predicates.
    """
    combined: dict[str, tuple[str, ...]] = {}
    for start in starts:
        best: dict[str, tuple[str, ...]] = {start: ()}
        frontier = [start]
        for _ in range(max_hops):
            next_frontier = []
            for entity_id in frontier:
                for edge, direction in graph.neighbors(entity_id):
                    if allowed is not None and edge.predicate not in allowed:
                        continue
                    other = edge.object_id if direction == "out" else edge.subject_id
                    if other not in best:
                        best[other] = best[entity_id] + (edge.id,)
                        next_frontier.append(other)
            frontier = next_frontier
        for entity_id, path in best.items():
            if path and (entity_id not in combined or len(path) < len(combined[entity_id])):
                combined[entity_id] = path
    return combined


def answer(
    question_text: str,
    graph: KnowledgeGraph,
    synonyms: SynonymTable | None = None,
    max_hops: int = DEFAULT_MAX_HOPS,
    phrasing: TextGenerator | None = None,
) -> Answer:
    """Answer a question from the active graph or refuse.

    Candidates are entities reachable from the linked question entities
    within ``max_hops``.  A candidate scores +2 when it can be reached using
    only predicates licensed by the question's verbs, plus +1 per name token
    matching an answer-type hint ("act" pointing at "Mann Act").  The best
    candidate wins at score >= 2; anything else, including internal errors,
    yields the fixed refusal.
    """
    try:
        synonyms = synonyms or default_synonyms()
        tokens = tokenize(question_text)
        linked = link_entities(question_text, graph)
        if not linked:
            return _refusal()

        allowed: frozenset[str] = frozenset().union(
            *(synonyms.verb_synonyms.get(t, frozenset()) for t in tokens)
        )
        hint_tokens: frozenset[str] = frozenset().union(
            *(synonyms.type_hints.get(t, frozenset()) for t in tokens)
        )
        licensed = (
            _best_paths(graph, linked, max_hops, allowed) if allowed else {}
        )
        reachable = _best_paths(graph, linked, max_hops, None)

        ranked: list[tuple[int, int, str, tuple[str, ...]]] = []
        for entity_id, fallback_path in reachable.items():
            path = licensed.get(entity_id, fallback_path)
            score = 2 if entity_id in licensed else 0
            name_tokens = set(tokenize(graph.entities[entity_id].canonical_name))
            score += len(name_tokens & hint_tokens)
            ranked.append((score, len(path), entity_id, path))
        if not ranked:
            return _refusal()
        ranked.sort(key=lambda item: (-item[0], item[1], item[2]))
        score, _, entity_id, path = ranked[0]
        if score < _ANSWER_THRESHOLD:
            return _refusal(float(score))

        text = graph.entities[entity_id].canonical_name
        if phrasing is not None:
            text = _rephrase(text, path, graph, phrasing)
        return Answer(AnswerStatus.ANSWERED, text, path, float(score))
    except Exception:
        logger.exception("question answering failed; refusing")
        return _refusal()


def _rephrase(
    canonical: str, path: tuple[str, ...], graph: KnowledgeGraph, phrasing: TextGenerator
) -> str:
    facts = "; ".join(
        f"{graph.edges[eid].subject_id} {graph.edges[eid].predicate} {graph.edges[eid].object_id}"
        for eid in path
    )
    prompt = (
        f"Reword this answer in one short sentence without changing its meaning.\n"
        f"Answer: {canonical}\nSupporting facts: {facts}"
    )
    try:
        reworded = phrasing.generate(prompt).strip()
    except Exception:
        logger.exception("phrasing provider failed; keeping canonical answer")
        return canonical
    return reworded or canonical


def answer_to_dict(result: Answer, graph: KnowledgeGraph) -> dict:
    """JSON shape served to clients; fact path spelled out edge by edge."""
    fact_path = []
    for edge_id in result.fact_path:
        edge = graph.edges[edge_id]
        fact_path.append(
            {
                "subject": edge.subject_id,
                "predicate": edge.predicate,
                "object": edge.object_id,
                "provenance": provenance_to_dict(edge.provenance),
            }
        )
    return {
        "status": result.status.value,
        "answer": result.answer_text,
        "fact_path": fact_path,
        "score": result.score,
    }
