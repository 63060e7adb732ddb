"""From raw prose to a provenance-tagged knowledge graph.

Every edge extracted from text remembers which document and sentence it
came from, so later curation can always point back at its evidence.
"""

from gamekg import export_dot, ingest_documents, load_documents
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

    print(f"documents: {len(graph.documents)}")
    print(f"entities:  {len(graph.entities)}")
    for entity in sorted(graph.entities.values(), key=lambda e: e.id):
        print(f"  {entity.id:12s} {entity.entity_type.value:8s} {entity.canonical_name!r}")

    print(f"edges:     {len(graph.edges)}")
    for edge in sorted(graph.edges.values(), key=lambda e: e.sort_key()):
        where = edge.provenance
        print(
            f"  {edge.subject_id} --{edge.predicate}--> {edge.object_id}"
            f"   (doc={where.doc_id}, sentence={where.sentence_index})"
        )

    print("\nGraphviz rendering (solid = document-extracted):\n")
    print(export_dot(graph))


if __name__ == "__main__":
    main()
