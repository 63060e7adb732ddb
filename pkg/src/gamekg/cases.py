"""Assembling review cases: disguised subgraphs handed to players.

A case bundles a connected piece of the graph, a pseudonymised narrative,
the similarity findings that fall inside it, and one opaque token per
entity.  Clients only ever see tokens and pseudonyms; the mapping back to
real entity ids stays on the server.
"""

from __future__ import annotations

import logging
import random
import time
from dataclasses import dataclass, field

from .config import ServerConfig
from .errors import NotFoundError, ValidationError
from .graph import KnowledgeGraph, Subgraph, provenance_to_dict
from .ingest import PredicateLexicon, default_lexicon
from .narrative import Narrative, PseudonymMap, TextGenerator, generate_narrative, make_pseudonyms
from .scoring import CandidateFinding, EmbeddingProvider, HashedTokenEmbedding, identify_candidates

logger = logging.getLogger(__name__)

CASE_STRATEGIES = ("priority", "random")

#: (kind, entity_a, entity_b) — stable identity of a finding across recomputes.
FindingKey = tuple[str, str, str]


def finding_key(finding: CandidateFinding) -> FindingKey:
    return (finding.kind.value, finding.entity_a, finding.entity_b)


@dataclass(slots=True)
class Case:
    case_id: str
    subgraph: Subgraph
    narrative: Narrative
    pseudonyms: PseudonymMap
    findings: tuple[CandidateFinding, ...]
    entity_tokens: dict[str, str]
    predicates: tuple[str, ...]
    #: (subject_id, predicate, object_id, provenance kind) per subgraph edge.
    facts: tuple[tuple[str, str, str, str], ...]
    created_at: float
    seed: int

    def token_for(self, entity_id: str) -> str:
        try:
            return self.entity_tokens[entity_id]
        except KeyError:
            raise NotFoundError(f"entity {entity_id!r} is not part of case {self.case_id}") from None

    def entity_for(self, token: str) -> str:
        for entity_id, candidate in self.entity_tokens.items():
            if candidate == token:
                return entity_id
        raise NotFoundError(f"unknown entity token for case {self.case_id}")

    def client_view(self) -> dict:
        """The JSON-safe payload sent to players.

        Entities are keyed by opaque token and labelled only with their
        pseudonym; findings become token-pair hints.  Real names, aliases
        and entity ids must never appear here.
        """
        entities = sorted(
            ({"token": self.entity_tokens[eid], "pseudonym": self.pseudonyms[eid]}
             for eid in self.subgraph.entity_ids),
            key=lambda item: item["pseudonym"],
        )
        hints = [
            {
                "kind": f.kind.value,
                "a_token": self.entity_tokens[f.entity_a],
                "b_token": self.entity_tokens[f.entity_b],
            }
            for f in self.findings
        ]
        facts = [
            {
                "subject_token": self.entity_tokens[subject],
                "predicate": predicate,
                "object_token": self.entity_tokens[obj],
                "kind": kind,
            }
            for subject, predicate, obj, kind in self.facts
        ]
        return {
            "case_id": self.case_id,
            "narrative": self.narrative.case_text,
            "entities": entities,
            "facts": facts,
            "hints": hints,
            "predicates": list(self.predicates),
        }


@dataclass
class CaseRegistry:
    """Live cases plus the findings already handed out, with expiry."""

    ttl_seconds: float = 86400.0
    _cases: dict[str, Case] = field(default_factory=dict)
    _served: set[FindingKey] = field(default_factory=set)

    def register(self, case: Case) -> None:
        if case.case_id in self._cases:
            raise ValidationError(f"case id {case.case_id!r} already registered")
        self._cases[case.case_id] = case
        for f in case.findings:
            self._served.add(finding_key(f))

    def get(self, case_id: str, now: float | None = None) -> Case:
        now = time.time() if now is None else now
        case = self._cases.get(case_id)
        if case is None:
            raise NotFoundError(f"unknown case {case_id!r}")
        if now - case.created_at > self.ttl_seconds:
            del self._cases[case.case_id]
            raise NotFoundError(f"case {case_id!r} has expired")
        return case

    def is_served(self, finding: CandidateFinding) -> bool:
        return finding_key(finding) in self._served

    def evict_expired(self, now: float | None = None) -> int:
        now = time.time() if now is None else now
        stale = [cid for cid, c in self._cases.items() if now - c.created_at > self.ttl_seconds]
        for cid in stale:
            del self._cases[cid]
        return len(stale)

    def __len__(self) -> int:
        return len(self._cases)


def _grow_neighbourhood(
    graph: KnowledgeGraph, focus: list[str], cap: int, rng: random.Random
) -> list[str]:
    """Focus entities plus active-edge neighbours, breadth first, capped."""
    chosen: list[str] = []
    seen: set[str] = set()
    frontier = list(focus)
    while frontier and len(chosen) < cap:
        next_frontier: list[str] = []
        for entity_id in frontier:
            if entity_id in seen:
                continue
            seen.add(entity_id)
            chosen.append(entity_id)
            if len(chosen) >= cap:
                break
            adjacent = {
                edge.object_id if direction == "out" else edge.subject_id
                for edge, direction in graph.neighbors(entity_id)
            }
            neighbours = sorted(adjacent - seen)
            rng.shuffle(neighbours)
            next_frontier.extend(neighbours)
        frontier = next_frontier
    return chosen


def next_case(
    graph: KnowledgeGraph,
    config: ServerConfig,
    registry: CaseRegistry,
    *,
    strategy: str | None = None,
    seed: int | None = None,
    now: float | None = None,
    embedding: EmbeddingProvider | None = None,
    narrative_provider: TextGenerator | None = None,
    lexicon: PredicateLexicon | None = None,
) -> Case:
    """Assemble, pseudonymise and register the next case to review.

    ``priority`` picks the neighbourhood around the highest-ranked finding
    not yet handed to a player, and falls back to ``random`` once every
    finding has been served.  ``random`` grows a connected subgraph from a
    randomly chosen entity.  Both are deterministic for a given graph,
    config and seed.
    """
    strategy = config.case_strategy if strategy is None else strategy
    if strategy not in CASE_STRATEGIES:
        raise ValidationError(
            f"unknown case strategy {strategy!r}; expected one of {', '.join(CASE_STRATEGIES)}"
        )
    if not graph.entities:
        raise NotFoundError("the graph has no entities to build a case from")
    if seed is None:
        seed = random.randrange(2**63)
    rng = random.Random(seed)
    embedding = HashedTokenEmbedding() if embedding is None else embedding
    lexicon = default_lexicon() if lexicon is None else lexicon

    findings = identify_candidates(
        graph,
        provider=embedding,
        tau_low=config.tau_low,
        tau_high=config.tau_high,
        max_results=config.max_findings,
    )

    focus: list[str] | None = None
    if strategy == "priority":
        unserved = [f for f in findings if not registry.is_served(f)]
        if unserved:
            focus = [unserved[0].entity_a, unserved[0].entity_b]
        else:
            logger.info("no unserved findings; falling back to a random case")
    if focus is None:
        focus = [rng.choice(sorted(graph.entities))]

    entity_ids = _grow_neighbourhood(graph, focus, config.case_entity_cap, rng)
    subgraph = graph.induced_subgraph(entity_ids)
    pseudonyms = make_pseudonyms(graph, subgraph, seed=rng.randrange(2**63))
    narrative = generate_narrative(graph, subgraph, pseudonyms, provider=narrative_provider)
    in_case = frozenset(subgraph.entity_ids)
    case_findings = tuple(
        f for f in findings if f.entity_a in in_case and f.entity_b in in_case
    )
    tokens = {eid: f"{rng.getrandbits(128):032x}" for eid in subgraph.entity_ids}
    predicates = sorted(
        set(lexicon.verbs.values())
        | set(lexicon.patterns.values())
        | {edge.predicate for edge in graph.edges.values()}
    )
    facts = []
    for edge_id in subgraph.edge_ids:
        edge = graph.get_edge(edge_id)
        kind = provenance_to_dict(edge.provenance)["kind"]
        facts.append((edge.subject_id, edge.predicate, edge.object_id, kind))
    case = Case(
        case_id=f"case-{rng.getrandbits(64):016x}",
        subgraph=subgraph,
        narrative=narrative,
        pseudonyms=pseudonyms,
        findings=case_findings,
        entity_tokens=tokens,
        predicates=tuple(predicates),
        facts=tuple(facts),
        created_at=time.time() if now is None else now,
        seed=seed,
    )
    registry.register(case)
    logger.info(
        "assembled case %s (%s, %d entities, %d findings)",
        case.case_id, strategy, len(entity_ids), len(case_findings),
    )
    return case
