"""Serving a case without revealing who it is about.

Players review facts through fictional names only.  The pseudonym map is
seeded (same seed, same disguise), injective, and type-aware: people get
person names, statutes get statute titles.  The generated narrative is
validated before it ships — every fact must survive, no real name may leak.
"""

from gamekg import generate_narrative, ingest_documents, make_pseudonyms, validate_narrative
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
    subgraph = graph.induced_subgraph(sorted(graph.entities))

    pseudonyms = make_pseudonyms(graph, subgraph, seed=2024)
    print("disguise:")
    for entity_id in subgraph.entity_ids:
        real = graph.get_entity(entity_id).canonical_name
        print(f"  {real!r} -> {pseudonyms[entity_id]!r}")

    narrative = generate_narrative(graph, subgraph, pseudonyms)
    print(f"\ncase notes ({narrative.provider_used}):")
    print(f"  {narrative.case_text}")

    report = validate_narrative(narrative.case_text, graph, subgraph, pseudonyms)
    print(
        f"\nvalidation: ok={report.ok} "
        f"missing_facts={len(report.missing_edges)} leaks={report.alias_leaks}"
    )

    # The same seed reproduces the same disguise; a different one reshuffles.
    again = make_pseudonyms(graph, subgraph, seed=2024)
    other = make_pseudonyms(graph, subgraph, seed=7)
    print(f"\nseed 2024 stable: {again.mapping == pseudonyms.mapping}")
    print(f"seed 7 differs:   {other.mapping != pseudonyms.mapping}")


if __name__ == "__main__":
    main()
