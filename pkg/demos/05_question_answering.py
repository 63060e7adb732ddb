"""Answers with receipts, refusals without hallucination.

A question is answered only when the graph can ground it: the QA layer
links question phrases to entities, walks active edges whose predicates the
question licenses, and returns the fact path that justifies the answer.
When the knowledge simply is not there, it says exactly that.
"""

from gamekg import (
    Action,
    FeedbackEvent,
    ProposedTriple,
    VoteLedger,
    answer,
    apply_consensus,
    ingest_documents,
    record_feedback,
)
from gamekg.graph import Document
from gamekg.qa import answer_to_dict

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

QUESTION = "What act did Villaman break?"


def ask(graph, question):
    result = answer(question, graph)
    print(f"Q: {question}")
    print(f"A: {result.answer_text}")
    for step in answer_to_dict(result, graph)["fact_path"]:
        print(f"   via {step['subject']} --{step['predicate']}--> {step['object']}"
              f" ({step['provenance']['kind']})")
    print()


def main() -> None:
    graph = ingest_documents([PRESS_RELEASE])

    # The documents never connect Villaman to the statute, so the honest
    # response is the fixed refusal — not a guess.
    ask(graph, QUESTION)
    ask(graph, "What act did Kizer break?")

    # Crowd curation supplies the missing fact, consensus accepts it...
    ledger = VoteLedger()
    record_feedback(
        graph, ledger,
        FeedbackEvent(
            "e1", "alice", "case-1", Action.PROPOSE,
            ProposedTriple("villaman", "violated", "mann-act"),
        ),
    )
    edge = graph.find_edge("villaman", "violated", "mann-act")
    record_feedback(
        graph, ledger,
        FeedbackEvent("e2", "bob", "case-1", Action.CONFIRM, edge.id),
    )
    apply_consensus(graph, ledger)

    # ...and the same question now has a grounded, explainable answer.
    ask(graph, QUESTION)


if __name__ == "__main__":
    main()
