"""HTTP API over the graph: cases out, votes in, answers on demand.

The server owns one graph, one vote ledger and one case registry.  All
mutation goes through a single lock, the consensus thresholds are
re-applied after every accepted vote, and each new ledger event is
appended to the on-disk ledger so a restart replays to the same state.
"""

from __future__ import annotations

import json
import logging
import random
import threading
from dataclasses import dataclass, field
from typing import Literal

from fastapi import FastAPI, Header, HTTPException, Query
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel, Field

from .cases import CaseRegistry, next_case
from .config import ServerConfig
from .errors import GraphError, IntegrityError, NotFoundError, ValidationError
from .feedback import (
    Action,
    FeedbackEvent,
    ProposedTriple,
    VoteLedger,
    append_event,
    apply_consensus,
    load_events,
    record_feedback,
    replay_ledger,
)
from .graph import KnowledgeGraph, import_jsonl, iter_records
from .narrative import TextGenerator
from .qa import answer, answer_to_dict
from .scoring import HashedTokenEmbedding, finding_to_dict, identify_candidates

logger = logging.getLogger(__name__)

NDJSON = "application/x-ndjson"


@dataclass
class AppState:
    config: ServerConfig
    graph: KnowledgeGraph
    ledger: VoteLedger
    registry: CaseRegistry
    rng: random.Random
    embedding: HashedTokenEmbedding = field(default_factory=HashedTokenEmbedding)
    narrative_provider: TextGenerator | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)


def load_state(
    config: ServerConfig, narrative_provider: TextGenerator | None = None
) -> AppState:
    """Load the graph, replay any stored votes and apply consensus."""
    graph = import_jsonl(config.kg_path)
    if config.ledger_path.exists():
        ledger = replay_ledger(graph, load_events(config.ledger_path))
        logger.info("replayed %d ledger events", len(ledger.events))
    else:
        ledger = VoteLedger()
    apply_consensus(graph, ledger, config.accept_threshold, config.reject_threshold)
    return AppState(
        config=config,
        graph=graph,
        ledger=ledger,
        registry=CaseRegistry(ttl_seconds=config.case_ttl_seconds),
        rng=random.Random(config.seed),
        narrative_provider=narrative_provider,
    )


class FeedbackBody(BaseModel):
    event_id: str = Field(min_length=1)
    case_id: str = Field(min_length=1)
    player_id: str = Field(min_length=1)
    action: Literal["confirm", "reject", "propose"]
    subject_token: str = Field(min_length=1)
    predicate: str = Field(min_length=1)
    object_token: str = Field(min_length=1)
    vote_weight: float = 1.0


class QABody(BaseModel):
    question: str = Field(min_length=1)


def create_app(state: AppState) -> FastAPI:
    app = FastAPI(title="gamekg", docs_url=None, redoc_url=None)

    @app.exception_handler(ValidationError)
    async def _bad_request(request, exc: ValidationError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(RequestValidationError)
    async def _malformed(request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": "malformed request body"})

    @app.exception_handler(NotFoundError)
    async def _not_found(request, exc: NotFoundError):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(IntegrityError)
    async def _conflict(request, exc: IntegrityError):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(GraphError)
    async def _server_error(request, exc: GraphError):
        logger.exception("unhandled graph error")
        return JSONResponse(status_code=500, content={"detail": "internal error"})

    def require_operator(authorization: str | None) -> None:
        token = state.config.operator_token
        if not token:
            raise HTTPException(status_code=403, detail="operator access is not configured")
        if not authorization or not authorization.startswith("Bearer "):
            raise HTTPException(status_code=401, detail="missing bearer token")
        if authorization.removeprefix("Bearer ").strip() != token:
            raise HTTPException(status_code=403, detail="invalid operator token")

    @app.get("/api/v1/health")
    def health() -> dict:
        return {"status": "ok", "entities": len(state.graph.entities)}

    @app.get("/api/v1/case/next")
    def case_next(
        strategy: str | None = Query(default=None),
        seed: int | None = Query(default=None),
    ) -> dict:
        with state.lock:
            state.registry.evict_expired()
            case = next_case(
                state.graph,
                state.config,
                state.registry,
                strategy=strategy,
                seed=state.rng.randrange(2**63) if seed is None else seed,
                embedding=state.embedding,
                narrative_provider=state.narrative_provider,
            )
            return case.client_view()

    @app.post("/api/v1/feedback")
    def feedback(body: FeedbackBody) -> dict:
        with state.lock:
            state.registry.evict_expired()
            case = state.registry.get(body.case_id)
            subject_id = case.entity_for(body.subject_token)
            object_id = case.entity_for(body.object_token)
            predicate = body.predicate.strip().lower()
            if not predicate:
                raise ValidationError("predicate must not be blank")
            action = Action(body.action)
            target: str | ProposedTriple
            if action is Action.PROPOSE:
                target = ProposedTriple(subject_id, predicate, object_id)
            else:
                edge = state.graph.find_edge(subject_id, predicate, object_id)
                if edge is None:
                    raise NotFoundError(
                        f"no fact {predicate!r} between those entities to {action.value}"
                    )
                target = edge.id
            event = FeedbackEvent(
                event_id=body.event_id,
                player_id=body.player_id,
                case_id=body.case_id,
                action=action,
                target=target,
                vote_weight=body.vote_weight,
            )
            duplicate = body.event_id in state.ledger
            weight = record_feedback(state.graph, state.ledger, event)
            apply_consensus(
                state.graph,
                state.ledger,
                state.config.accept_threshold,
                state.config.reject_threshold,
            )
            if not duplicate:
                stored = state.ledger.events[-1]
                append_event(state.config.ledger_path, stored, fsync=state.config.fsync_ledger)
            edge = state.graph.get_edge(state.ledger.edge_for_event(body.event_id))
            return {
                "event_id": body.event_id,
                "duplicate": duplicate,
                "edge_weight": weight,
                "status": edge.status.value,
            }

    @app.get("/api/v1/kg")
    def kg_view(
        view: str = Query(default="filtered"),
        authorization: str | None = Header(default=None),
    ) -> PlainTextResponse:
        require_operator(authorization)
        if view not in ("filtered", "full"):
            raise ValidationError(f"view must be 'filtered' or 'full', got {view!r}")
        with state.lock:
            lines = []
            for record in iter_records(state.graph):
                if view == "filtered" and record["kind"] == "edge" and record["status"] != "active":
                    continue
                lines.append(json.dumps(record, ensure_ascii=False) + "\n")
        return PlainTextResponse("".join(lines), media_type=NDJSON)

    @app.post("/api/v1/qa")
    def qa(body: QABody) -> dict:
        with state.lock:
            result = answer(body.question, state.graph)
            return answer_to_dict(result, state.graph)

    @app.get("/api/v1/candidates")
    def candidates(authorization: str | None = Header(default=None)) -> list[dict]:
        require_operator(authorization)
        with state.lock:
            findings = identify_candidates(
                state.graph,
                provider=state.embedding,
                tau_low=state.config.tau_low,
                tau_high=state.config.tau_high,
                max_results=state.config.max_findings,
            )
        return [finding_to_dict(f) for f in findings]

    return app


def run_server(config: ServerConfig) -> None:
    """Blocking entry point used by the command line ``serve`` command."""
    import uvicorn

    state = load_state(config)
    app = create_app(state)
    host, port = config.host_port()
    logger.info("serving %d entities on %s:%d", len(state.graph.entities), host, port)
    uvicorn.run(app, host=host, port=port, log_level="info")
