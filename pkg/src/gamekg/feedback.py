"""Crowd feedback: weighted votes, an append-only ledger, and consensus.

Every reviewer action lands in the ledger and nothing is ever rewritten or
deleted; an edge's effective weight is the sum of each player's most recent
vote on it, so recorded order only matters per player.  Consensus never
removes an edge either — it flips statuses: player-proposed edges must earn
enough weight to become active, document-extracted edges stay active unless
voted far enough down.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import IO, Iterable

from .errors import LoadError, NotFoundError, ValidationError
from .graph import EdgeStatus, KnowledgeGraph, PlayerSource

DEFAULT_ACCEPT_THRESHOLD = 2.0
DEFAULT_REJECT_THRESHOLD = -2.0


class Action(str, Enum):
    CONFIRM = "confirm"
    REJECT = "reject"
    PROPOSE = "propose"


@dataclass(frozen=True, slots=True)
class ProposedTriple:
    subject_id: str
    predicate: str
    object_id: str


@dataclass(frozen=True, slots=True)
class FeedbackEvent:
    """One reviewer action.  ``seq`` is assigned when the ledger accepts it."""

    event_id: str
    player_id: str
    case_id: str
    action: Action
    target: str | ProposedTriple
    vote_weight: float = 1.0
    seq: int | None = None


@dataclass(slots=True)
class VoteLedger:
    """Append-only event list plus a latest-vote index per (edge, player)."""

    events: list[FeedbackEvent] = field(default_factory=list)
    _latest: dict[str, dict[str, tuple[int, Action, float]]] = field(default_factory=dict)
    _edge_for_event: dict[str, str] = field(default_factory=dict)
    _next_seq: int = 0

    def __contains__(self, event_id: str) -> bool:
        return event_id in self._edge_for_event

    def edge_for_event(self, event_id: str) -> str:
        return self._edge_for_event[event_id]

    def votes_on(self, edge_id: str) -> dict[str, tuple[int, Action, float]]:
        return dict(self._latest.get(edge_id, {}))

    def _append(self, event: FeedbackEvent, edge_id: str) -> None:
        self.events.append(event)
        self._edge_for_event[event.event_id] = edge_id
        assert event.seq is not None
        self._latest.setdefault(edge_id, {})[event.player_id] = (
            event.seq,
            event.action,
            event.vote_weight,
        )
        self._next_seq = max(self._next_seq, event.seq + 1)


_SIGN = {Action.CONFIRM: 1.0, Action.REJECT: -1.0, Action.PROPOSE: 1.0}


def effective_weight(graph: KnowledgeGraph, ledger: VoteLedger, edge_id: str) -> float:
    """Sum of each player's latest vote on an edge (confirm/propose add,
    reject subtracts).  Players are summed in sorted order so the result does
    not depend on event arrival order."""
    graph.get_edge(edge_id)  # NotFoundError for unknown edges
    votes = ledger.votes_on(edge_id)
    return sum(_SIGN[action] * weight for _, (_, action, weight) in sorted(votes.items()))


def record_feedback(
    graph: KnowledgeGraph, ledger: VoteLedger, event: FeedbackEvent
) -> float:
    """Validate and ingest one feedback event; returns the target edge's
    updated effective weight.

    A Propose aimed at a triple that already has an edge is stored as a
    Confirm on that edge.  A Propose on a missing triple creates the edge
    with player provenance before the vote is counted.  Re-sending an
    already-recorded event_id changes nothing and returns the current weight.
    """
    if event.event_id in ledger:
        return effective_weight(graph, ledger, ledger.edge_for_event(event.event_id))
    if not event.event_id:
        raise ValidationError("feedback event_id must be non-empty")
    if not event.player_id:
        raise ValidationError("feedback player_id must be non-empty")
    if not event.vote_weight > 0:
        raise ValidationError(f"vote_weight must be positive, got {event.vote_weight}")

    action = event.action
    target = event.target
    if action is Action.PROPOSE:
        if not isinstance(target, ProposedTriple):
            raise ValidationError("propose requires a (subject, predicate, object) target")
        for endpoint in (target.subject_id, target.object_id):
            if endpoint not in graph.entities:
                raise NotFoundError(f"proposed edge endpoint {endpoint!r} is unknown")
        existing = graph.find_edge(target.subject_id, target.predicate, target.object_id)
        if existing is not None:
            action = Action.CONFIRM
            edge = existing
        else:
            edge = graph.upsert_edge(
                target.subject_id,
                target.predicate,
                target.object_id,
                PlayerSource(first_proposer=event.player_id),
            )
    else:
        if not isinstance(target, str):
            raise ValidationError(f"{action.value} requires an edge id target")
        edge = graph.get_edge(target)

    seq = event.seq if event.seq is not None else ledger._next_seq
    stored_target = edge.id if action is not event.action else event.target
    stored = replace(event, action=action, target=stored_target, seq=seq)
    ledger._append(stored, edge.id)
    edge.weight = effective_weight(graph, ledger, edge.id)
    return edge.weight


def apply_consensus(
    graph: KnowledgeGraph,
    ledger: VoteLedger,
    accept_threshold: float = DEFAULT_ACCEPT_THRESHOLD,
    reject_threshold: float = DEFAULT_REJECT_THRESHOLD,
) -> KnowledgeGraph:
    """Recompute every edge's weight from the ledger and set its status.

    Player-proposed edges are active only at or above ``accept_threshold``;
    document-extracted edges are filtered only at or below
    ``reject_threshold``.  Filtered edges stay in the graph.
    """
    if accept_threshold < 0:
        raise ValidationError(f"accept_threshold must be >= 0, got {accept_threshold}")
    if reject_threshold > 0:
        raise ValidationError(f"reject_threshold must be <= 0, got {reject_threshold}")
    for edge in graph.edges.values():
        weight = effective_weight(graph, ledger, edge.id)
        edge.weight = weight
        if isinstance(edge.provenance, PlayerSource):
            edge.status = (
                EdgeStatus.ACTIVE if weight >= accept_threshold else EdgeStatus.FILTERED
            )
        else:
            edge.status = (
                EdgeStatus.FILTERED if weight <= reject_threshold else EdgeStatus.ACTIVE
            )
    return graph


def replay_ledger(graph: KnowledgeGraph, events: Iterable[FeedbackEvent]) -> VoteLedger:
    """Rebuild ledger state (and any player-proposed edges) from raw events."""
    ledger = VoteLedger()
    for event in sorted(events, key=lambda e: (e.seq if e.seq is not None else 1 << 62)):
        record_feedback(graph, ledger, event)
    return ledger


# --- JSONL persistence -------------------------------------------------------


def event_to_dict(event: FeedbackEvent) -> dict:
    if isinstance(event.target, ProposedTriple):
        target: dict = {
            "subject": event.target.subject_id,
            "predicate": event.target.predicate,
            "object": event.target.object_id,
        }
    else:
        target = {"edge_id": event.target}
    return {
        "event_id": event.event_id,
        "player_id": event.player_id,
        "case_id": event.case_id,
        "action": event.action.value,
        "target": target,
        "vote_weight": event.vote_weight,
        "seq": event.seq,
    }


def event_from_dict(raw: dict) -> FeedbackEvent:
    target_raw = raw["target"]
    if "edge_id" in target_raw:
        target: str | ProposedTriple = target_raw["edge_id"]
    else:
        target = ProposedTriple(
            target_raw["subject"], target_raw["predicate"], target_raw["object"]
        )
    return FeedbackEvent(
        event_id=raw["event_id"],
        player_id=raw["player_id"],
        case_id=raw.get("case_id", ""),
        action=Action(raw["action"]),
        target=target,
        vote_weight=float(raw.get("vote_weight", 1.0)),
        seq=raw.get("seq"),
    )


def load_events(source: str | Path | IO[str]) -> list[FeedbackEvent]:
    """Read ledger events from JSONL; LoadError names the bad line."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fp:
            return load_events(fp)
    events = []
    for lineno, line in enumerate(source, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise LoadError(f"line {lineno}: invalid JSON ({exc.msg})", lineno) from None
        try:
            events.append(event_from_dict(raw))
        except (KeyError, TypeError, ValueError) as exc:
            raise LoadError(f"line {lineno}: malformed event ({exc})", lineno) from None
    return events


def append_event(path: str | Path, event: FeedbackEvent, fsync: bool = False) -> None:
    """Append one event to the ledger file, optionally fsyncing."""
    with open(path, "a", encoding="utf-8") as fp:
        fp.write(json.dumps(event_to_dict(event), ensure_ascii=False) + "\n")
        if fsync:
            fp.flush()
            os.fsync(fp.fileno())


def write_events(path: str | Path, events: Iterable[FeedbackEvent]) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        for event in events:
            fp.write(json.dumps(event_to_dict(event), ensure_ascii=False) + "\n")
