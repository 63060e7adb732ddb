"""Shared fixture builders."""

from __future__ import annotations

import random

from gamekg.graph import (
    Document,
    DocumentSource,
    EntityType,
    KnowledgeGraph,
    PlayerSource,
)

CLAIMS_BODY = (
    "Kizer transported victims across state borders. "
    "Villaman was an accomplice to Kizer. "
    "The press release states Kizer broke the Mann Act when he "
    "transported a victim across state borders."
)


def build_claims_graph() -> KnowledgeGraph:
    """The press-release case: three document-extracted edges.

    Kizer transported victims, Kizer violated the Mann Act, and Villaman was
    an accomplice to Kizer.  There is deliberately no edge between Villaman
    and the Mann Act.
    """
    g = KnowledgeGraph()
    g.add_document(Document("press-release", "Press Release", CLAIMS_BODY))
    for name, etype in [
        ("Kizer", EntityType.PERSON),
        ("Villaman", EntityType.PERSON),
        ("victims", EntityType.OTHER),
        ("Mann Act", EntityType.STATUTE),
    ]:
        g.upsert_entity(name, etype, doc_id="press-release")
    g.upsert_edge("kizer", "transported", "victims", DocumentSource("press-release", 0))
    g.upsert_edge("villaman", "accomplice_to", "kizer", DocumentSource("press-release", 1))
    g.upsert_edge("kizer", "violated", "mann-act", DocumentSource("press-release", 2))
    return g


def build_random_graph(
    rng: random.Random,
    max_entities: int = 50,
    allow_filtered: bool = True,
) -> KnowledgeGraph:
    """A random graph with mixed provenance, for property-style loops."""
    g = KnowledgeGraph()
    g.add_document(
        Document(
            "doc-0",
            "Doc 0",
            "Ardel recruited couriers in the harbor district. "
            "Belmont transported cargo for Ardel. "
            "Corvin violated the Harbor Act.",
        )
    )
    count = rng.randint(2, max_entities)
    names = [f"Figure {chr(65 + i % 26)}{i}" for i in range(count)]
    for name in names:
        g.upsert_entity(name, rng.choice(list(EntityType)), doc_id="doc-0")
    ids = sorted(g.entities)
    predicates = ["knows", "recruited", "transported", "violated", "works_with"]
    for _ in range(rng.randint(0, 2 * len(ids))):
        s, o = rng.choice(ids), rng.choice(ids)
        if s == o:
            continue
        if rng.random() < 0.6:
            provenance = DocumentSource("doc-0", rng.randrange(3))
        else:
            provenance = PlayerSource(f"player-{rng.randrange(5)}")
        edge = g.upsert_edge(s, rng.choice(predicates), o, provenance)
        if allow_filtered and rng.random() < 0.2:
            from gamekg.graph import EdgeStatus

            edge.status = EdgeStatus.FILTERED
    return g
