"""Spotting facts worth a second look.

Each entity gets a hashed bag-of-tokens embedding built from its name, the
sentences its facts came from, and the predicates around it.  Low cosine
similarity across an existing edge makes that edge suspect; high similarity
between unconnected entities suggests a fact the documents never stated.
"""

import itertools

from gamekg import cosine, embed_entity, identify_candidates, ingest_documents
from gamekg.graph import Document

PRESS_RELEASE = Document(
    id="press-release",
    title="Trafficking case press release",
    body=(
        "Kizer transported victims across state borders. "
        "Villaman was an accomplice to Kizer. "
        "The press release states Kizer broke the Mann Act when he "
        "transported a victim across state borders."
    ),
)


def main() -> None:
    graph = ingest_documents([PRESS_RELEASE])

    print("pairwise similarities:")
    for a, b in itertools.combinations(sorted(graph.entities), 2):
        sim = cosine(embed_entity(graph, a), embed_entity(graph, b))
        print(f"  {a:12s} ~ {b:12s} = {sim:.4f}")

    # The naive extractor misread the third sentence and never linked Kizer
    # to the individual victim — but their contexts overlap so heavily that
    # the pair scores 0.81 while unconnected, which is exactly the kind of
    # gap these findings exist to surface for human review.
    findings = identify_candidates(graph, tau_low=0.2, tau_high=0.45)
    print(f"\nfindings (tau_low=0.2, tau_high=0.45): {len(findings)}")
    for f in findings:
        marker = "suspect" if f.edge_id else "missing"
        print(f"  {marker}  {f.entity_a} / {f.entity_b}  sim={f.similarity:.4f}")


if __name__ == "__main__":
    main()
