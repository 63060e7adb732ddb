"""Turning individual votes into a curated graph.

Only each player's latest vote on a fact counts.  Summed vote weights
decide an edge's fate: crowd proposals need enough support to activate,
document facts need enough pushback to be filtered — and filtered means
hidden, never deleted.  The whole history replays deterministically.
"""

from gamekg import (
    Action,
    FeedbackEvent,
    ProposedTriple,
    VoteLedger,
    apply_consensus,
    effective_weight,
    ingest_documents,
    record_feedback,
    replay_ledger,
)
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


def show(graph, label):
    print(f"{label}:")
    for edge in sorted(graph.edges.values(), key=lambda e: e.sort_key()):
        print(
            f"  [{edge.status.value:8s} w={edge.weight:+.1f}] "
            f"{edge.subject_id} --{edge.predicate}--> {edge.object_id}"
        )


def main() -> None:
    graph = ingest_documents([PRESS_RELEASE])
    ledger = VoteLedger()

    # One player proposes the fact the press release never states outright.
    record_feedback(
        graph,
        ledger,
        FeedbackEvent(
            "e1", "alice", "case-1", Action.PROPOSE,
            ProposedTriple("villaman", "violated", "mann-act"),
        ),
    )
    proposed = graph.find_edge("villaman", "violated", "mann-act")
    apply_consensus(graph, ledger)
    show(graph, "after one proposal (needs +2.0 to activate)")

    # A second player agrees; a third doubts the accomplice edge, twice —
    # only their latest vote counts.
    accomplice = graph.find_edge("villaman", "accomplice_to", "kizer")
    for event in [
        FeedbackEvent("e2", "bob", "case-1", Action.CONFIRM, proposed.id),
        FeedbackEvent("e3", "carol", "case-2", Action.REJECT, accomplice.id, 3.0),
        FeedbackEvent("e4", "carol", "case-2", Action.REJECT, accomplice.id, 1.0),
    ]:
        record_feedback(graph, ledger, event)
    apply_consensus(graph, ledger)
    show(graph, "\nafter more votes (carol's re-vote superseded her first)")
    print(f"  accomplice weight: {effective_weight(graph, ledger, accomplice.id):+.1f}")

    # Replaying the raw event log from scratch lands on the identical state.
    fresh = ingest_documents([PRESS_RELEASE])
    fresh_ledger = replay_ledger(fresh, ledger.events)
    apply_consensus(fresh, fresh_ledger)
    print(f"\nreplay reproduces the graph exactly: {fresh == graph}")


if __name__ == "__main__":
    main()
