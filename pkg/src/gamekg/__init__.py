"""Crowd-curated knowledge graphs with provenance tracking and explainable QA."""

from .errors import (
    GraphError,
    IntegrityError,
    LoadError,
    NotFoundError,
    PoolExhaustedError,
    ValidationError,
)
from .feedback import (
    Action,
    FeedbackEvent,
    ProposedTriple,
    VoteLedger,
    apply_consensus,
    effective_weight,
    record_feedback,
    replay_ledger,
)
from .graph import (
    Document,
    DocumentSource,
    Edge,
    EdgeStatus,
    Entity,
    EntityType,
    KnowledgeGraph,
    PlayerSource,
    Subgraph,
    edge_id_for,
    export_dot,
    export_jsonl,
    import_jsonl,
    normalize_name,
)
from .ingest import PredicateLexicon, extract_document, ingest_documents, load_documents
from .narrative import PseudonymMap, generate_narrative, make_pseudonyms, validate_narrative
from .qa import REFUSAL_TEXT, Answer, AnswerStatus, answer, link_entities
from .scoring import (
    CandidateFinding,
    FindingKind,
    HashedTokenEmbedding,
    cosine,
    embed_entity,
    identify_candidates,
)

__all__ = [
    "Action",
    "Answer",
    "AnswerStatus",
    "CandidateFinding",
    "Document",
    "DocumentSource",
    "Edge",
    "EdgeStatus",
    "Entity",
    "EntityType",
    "FeedbackEvent",
    "FindingKind",
    "GraphError",
    "HashedTokenEmbedding",
    "IntegrityError",
    "KnowledgeGraph",
    "LoadError",
    "NotFoundError",
    "PlayerSource",
    "PoolExhaustedError",
    "PredicateLexicon",
    "ProposedTriple",
    "PseudonymMap",
    "REFUSAL_TEXT",
    "Subgraph",
    "ValidationError",
    "VoteLedger",
    "answer",
    "apply_consensus",
    "cosine",
    "edge_id_for",
    "effective_weight",
    "embed_entity",
    "export_dot",
    "export_jsonl",
    "extract_document",
    "generate_narrative",
    "identify_candidates",
    "import_jsonl",
    "ingest_documents",
    "link_entities",
    "load_documents",
    "make_pseudonyms",
    "normalize_name",
    "record_feedback",
    "replay_ledger",
    "validate_narrative",
]

__version__ = "0.1.0"
