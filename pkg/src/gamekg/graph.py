"""Core knowledge-graph model.

Entities and edges are keyed by deterministic ids so that repeated ingestion
of the same material converges on the same graph.  Every edge carries a
provenance record telling whether it was extracted from a document or
proposed by a player, plus a crowd weight and an active/filtered status.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import IO, Any, Iterable, Iterator

from .errors import IntegrityError, LoadError, NotFoundError, ValidationError

_SLUG_RE = re.compile(r"[^a-z0-9]+")


def normalize_name(name: str) -> str:
    """Reduce a surface form to its identity slug.

    Trims, lowercases, and replaces every run of non-alphanumeric characters
    (including internal whitespace) with a single hyphen.
    """
    return _SLUG_RE.sub("-", name.strip().lower()).strip("-")


def edge_id_for(subject_id: str, predicate: str, object_id: str) -> str:
    """Deterministic edge id; a pure function of the triple."""
    digest = hashlib.sha256(f"{subject_id}|{predicate}|{object_id}".encode("utf-8"))
    return digest.hexdigest()[:16]


class EntityType(str, Enum):
    PERSON = "person"
    ORGANIZATION = "organization"
    LOCATION = "location"
    STATUTE = "statute"
    OTHER = "other"


class EdgeStatus(str, Enum):
    ACTIVE = "active"
    FILTERED = "filtered"


@dataclass(frozen=True, slots=True)
class DocumentSource:
    """Edge extracted from a document sentence."""

    doc_id: str
    sentence_index: int


@dataclass(frozen=True, slots=True)
class PlayerSource:
    """Edge first proposed by a player during review."""

    first_proposer: str


Provenance = DocumentSource | PlayerSource


@dataclass(slots=True)
class Document:
    id: str
    title: str
    body: str
    source_uri: str = ""


@dataclass(slots=True)
class Entity:
    id: str
    canonical_name: str
    entity_type: EntityType
    aliases: set[str] = field(default_factory=set)
    source_doc_ids: set[str] = field(default_factory=set)


@dataclass(slots=True)
class Edge:
    id: str
    subject_id: str
    predicate: str
    object_id: str
    provenance: Provenance
    weight: float = 0.0
    status: EdgeStatus = EdgeStatus.ACTIVE

    def sort_key(self) -> tuple[str, str, str]:
        return (self.subject_id, self.predicate, self.object_id)


@dataclass(frozen=True, slots=True)
class Subgraph:
    """A selection of entity and edge ids within some graph."""

    entity_ids: tuple[str, ...]
    edge_ids: tuple[str, ...]


@dataclass(slots=True)
class KnowledgeGraph:
    documents: dict[str, Document] = field(default_factory=dict)
    entities: dict[str, Entity] = field(default_factory=dict)
    edges: dict[str, Edge] = field(default_factory=dict)

    def add_document(self, document: Document) -> Document:
        if not document.id:
            raise ValidationError("document id must be non-empty")
        self.documents[document.id] = document
        return document

    def upsert_entity(
        self,
        name: str,
        entity_type: EntityType = EntityType.OTHER,
        doc_id: str | None = None,
    ) -> Entity:
        """Insert an entity or merge into the one the name already resolves to.

        Identity is the normalized form of the name, so ``"Kizer"`` and
        ``"kizer"`` land on a single entity.  The canonical display name is
        the lexicographically smallest surface seen so far, which keeps the
        result independent of ingestion order.
        """
        surface = name.strip()
        slug = normalize_name(surface)
        if not slug:
            raise ValidationError(f"entity name {name!r} has no identifying characters")
        entity = self.entities.get(slug)
        if entity is None:
            entity = Entity(id=slug, canonical_name=surface, entity_type=entity_type)
            self.entities[slug] = entity
        elif surface < entity.canonical_name:
            entity.canonical_name = surface
        entity.aliases.add(surface)
        if doc_id is not None:
            entity.source_doc_ids.add(doc_id)
        return entity

    def resolve_alias(self, name: str) -> Entity | None:
        """Look an entity up by any surface form, or None."""
        return self.entities.get(normalize_name(name))

    def upsert_edge(
        self,
        subject_id: str,
        predicate: str,
        object_id: str,
        provenance: Provenance,
    ) -> Edge:
        """Insert an edge, or return the existing one for the same triple.

        When the same triple arrives with both provenance kinds, the document
        wins: a player proposal never downgrades an extracted edge, and an
        extraction upgrades a previously proposed edge in place.
        """
        predicate = predicate.strip().lower()
        if not predicate:
            raise ValidationError("edge predicate must be non-empty")
        for endpoint in (subject_id, object_id):
            if endpoint not in self.entities:
                raise IntegrityError(f"edge endpoint {endpoint!r} is not a known entity")
        eid = edge_id_for(subject_id, predicate, object_id)
        edge = self.edges.get(eid)
        if edge is None:
            edge = Edge(eid, subject_id, predicate, object_id, provenance)
            self.edges[eid] = edge
        elif isinstance(provenance, DocumentSource) and isinstance(
            edge.provenance, PlayerSource
        ):
            edge.provenance = provenance
        return edge

    def get_edge(self, edge_id: str) -> Edge:
        try:
            return self.edges[edge_id]
        except KeyError:
            raise NotFoundError(f"unknown edge {edge_id!r}") from None

    def get_entity(self, entity_id: str) -> Entity:
        try:
            return self.entities[entity_id]
        except KeyError:
            raise NotFoundError(f"unknown entity {entity_id!r}") from None

    def find_edge(self, subject_id: str, predicate: str, object_id: str) -> Edge | None:
        return self.edges.get(edge_id_for(subject_id, predicate.strip().lower(), object_id))

    def active_edges(self) -> list[Edge]:
        return [e for e in self.edges.values() if e.status is EdgeStatus.ACTIVE]

    def neighbors(self, entity_id: str) -> list[tuple[Edge, str]]:
        """Active edges incident to an entity, tagged "out" or "in".

        Outgoing edges come first; both groups are ordered by
        (subject, predicate, object) so the result is deterministic.
        A self-loop appears once in each group.
        """
        if entity_id not in self.entities:
            raise NotFoundError(f"unknown entity {entity_id!r}")
        outgoing = sorted(
            (e for e in self.active_edges() if e.subject_id == entity_id),
            key=Edge.sort_key,
        )
        incoming = sorted(
            (e for e in self.active_edges() if e.object_id == entity_id),
            key=Edge.sort_key,
        )
        return [(e, "out") for e in outgoing] + [(e, "in") for e in incoming]

    def induced_subgraph(self, entity_ids: Iterable[str]) -> Subgraph:
        """Subgraph of the given entities and every active edge among them."""
        keep = set(entity_ids)
        for eid in keep:
            if eid not in self.entities:
                raise NotFoundError(f"unknown entity {eid!r}")
        edges = sorted(
            (
                e
                for e in self.active_edges()
                if e.subject_id in keep and e.object_id in keep
            ),
            key=Edge.sort_key,
        )
        return Subgraph(tuple(sorted(keep)), tuple(e.id for e in edges))


# --- JSONL persistence -------------------------------------------------------
#
# One JSON object per line, tagged with a "kind" field.  Key order inside each
# record and the order of records in the stream are both fixed, so exporting
# the same graph twice produces byte-identical output.


def provenance_to_dict(provenance: Provenance) -> dict[str, Any]:
    if isinstance(provenance, DocumentSource):
        return {
            "kind": "explicit",
            "doc_id": provenance.doc_id,
            "sentence_index": provenance.sentence_index,
        }
    return {"kind": "human_proposed", "first_proposer": provenance.first_proposer}


def provenance_from_dict(raw: dict[str, Any]) -> Provenance:
    kind = raw.get("kind")
    if kind == "explicit":
        return DocumentSource(raw["doc_id"], int(raw["sentence_index"]))
    if kind == "human_proposed":
        return PlayerSource(raw["first_proposer"])
    raise KeyError(f"unknown provenance kind {kind!r}")


def iter_records(graph: KnowledgeGraph) -> Iterator[dict[str, Any]]:
    """Records in deterministic export order: documents, entities, edges."""
    for doc in sorted(graph.documents.values(), key=lambda d: d.id):
        yield {
            "kind": "document",
            "id": doc.id,
            "title": doc.title,
            "body": doc.body,
            "source_uri": doc.source_uri,
        }
    for entity in sorted(graph.entities.values(), key=lambda e: e.id):
        yield {
            "kind": "entity",
            "id": entity.id,
            "name": entity.canonical_name,
            "aliases": sorted(entity.aliases),
            "type": entity.entity_type.value,
            "source_doc_ids": sorted(entity.source_doc_ids),
        }
    for edge in sorted(graph.edges.values(), key=Edge.sort_key):
        yield {
            "kind": "edge",
            "id": edge.id,
            "subject": edge.subject_id,
            "predicate": edge.predicate,
            "object": edge.object_id,
            "provenance": provenance_to_dict(edge.provenance),
            "weight": edge.weight,
            "status": edge.status.value,
        }


def export_jsonl(graph: KnowledgeGraph, destination: str | Path | IO[str]) -> None:
    """Write the graph to ``destination`` as UTF-8 JSON lines."""
    if isinstance(destination, (str, Path)):
        with open(destination, "w", encoding="utf-8") as fp:
            export_jsonl(graph, fp)
        return
    for record in iter_records(graph):
        destination.write(json.dumps(record, ensure_ascii=False) + "\n")


def dumps_jsonl(graph: KnowledgeGraph) -> str:
    return "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in iter_records(graph))


def import_jsonl(source: str | Path | IO[str] | Iterable[str]) -> KnowledgeGraph:
    """Rebuild a graph from JSON lines.

    Malformed input raises LoadError naming the 1-based line number.  Records
    must arrive in export order (documents, then entities, then edges) so an
    edge can be checked against already-seen entities.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fp:
            return import_jsonl(fp)
    graph = KnowledgeGraph()
    for lineno, line in enumerate(source, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise LoadError(f"line {lineno}: invalid JSON ({exc.msg})", lineno) from None
        if not isinstance(raw, dict):
            raise LoadError(f"line {lineno}: expected a JSON object", lineno)
        kind = raw.get("kind")
        try:
            if kind == "document":
                graph.documents[raw["id"]] = Document(
                    id=raw["id"],
                    title=raw["title"],
                    body=raw["body"],
                    source_uri=raw.get("source_uri", ""),
                )
            elif kind == "entity":
                graph.entities[raw["id"]] = Entity(
                    id=raw["id"],
                    canonical_name=raw["name"],
                    entity_type=EntityType(raw["type"]),
                    aliases=set(raw["aliases"]),
                    source_doc_ids=set(raw["source_doc_ids"]),
                )
            elif kind == "edge":
                for endpoint in (raw["subject"], raw["object"]):
                    if endpoint not in graph.entities:
                        raise LoadError(
                            f"line {lineno}: edge references unknown entity {endpoint!r}",
                            lineno,
                        )
                graph.edges[raw["id"]] = Edge(
                    id=raw["id"],
                    subject_id=raw["subject"],
                    predicate=raw["predicate"],
                    object_id=raw["object"],
                    provenance=provenance_from_dict(raw["provenance"]),
                    weight=float(raw["weight"]),
                    status=EdgeStatus(raw["status"]),
                )
            else:
                raise LoadError(f"line {lineno}: unknown record kind {kind!r}", lineno)
        except LoadError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise LoadError(f"line {lineno}: malformed {kind} record ({exc})", lineno) from None
    return graph


# --- DOT rendering -----------------------------------------------------------


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(graph: KnowledgeGraph) -> str:
    """Render the active graph as Graphviz DOT text.

    Document-extracted edges are drawn solid and player-proposed edges dashed,
    so the two provenance classes stay visually distinct.  Filtered edges are
    left out entirely.
    """
    lines = ["digraph knowledge_graph {"]
    for entity in sorted(graph.entities.values(), key=lambda e: e.id):
        lines.append(
            f"  {_dot_quote(entity.id)} [label={_dot_quote(entity.canonical_name)}];"
        )
    for edge in sorted(graph.active_edges(), key=Edge.sort_key):
        style = "dashed" if isinstance(edge.provenance, PlayerSource) else "solid"
        lines.append(
            f"  {_dot_quote(edge.subject_id)} -> {_dot_quote(edge.object_id)} "
            f"[label={_dot_quote(edge.predicate)}, style={style}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
