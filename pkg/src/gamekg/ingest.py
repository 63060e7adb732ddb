"""Document loading, sentence splitting, and rule-based triple extraction.

The extractor is deliberately shallow: capitalized token runs are treated as
names, a small verb lexicon supplies canonical predicates, and one
prepositional pattern ("accomplice to") covers the relation that plain
subject-verb-object matching misses.  It trades recall for determinism, which
is what downstream review and replay need.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .errors import LoadError, ValidationError
from .graph import Document, DocumentSource, EntityType, KnowledgeGraph, normalize_name

#: Words that end in a terminator without ending a sentence.
SENTENCE_ABBREVIATIONS = frozenset({"U.S.", "Mr.", "Dr.", "No."})

_TERMINATORS = ".!?"

#: Capitalized tokens that never start or extend a name (sentence-initial
#: articles, pronouns, wh-words).
_FUNCTION_WORDS = frozenset(
    """
    the a an it he she they we i you this that these those there
    when while who whom whose which what where why how and or but if
    his her its their our my your
    """.split()
)

#: Lowercase tokens skipped when looking for a common-noun object.
_OBJECT_STOPWORDS = frozenset(
    """
    the a an and or but of to in on at by for with from into onto over
    under across through against is was are were be been being he she it
    they them him her his its their that this these those who whom which
    when while as
    """.split()
)

_TOKEN_RE = re.compile(r"[A-Za-z0-9][A-Za-z0-9.'’-]*")


def split_sentences(text: str) -> list[str]:
    """Split text into trimmed sentences, index given by list position.

    A sentence ends at ``.``, ``!`` or ``?`` followed by whitespace and an
    uppercase letter, unless the word containing the terminator is a known
    abbreviation such as "U.S." or "Mr.".
    """
    sentences: list[str] = []
    start = 0
    i = 0
    n = len(text)
    while i < n:
        if text[i] in _TERMINATORS and i + 1 < n and text[i + 1].isspace():
            k = i + 1
            while k < n and text[k].isspace():
                k += 1
            if k < n and text[k].isupper():
                word_start = i
                while word_start > start and not text[word_start - 1].isspace():
                    word_start -= 1
                if text[word_start : i + 1] not in SENTENCE_ABBREVIATIONS:
                    chunk = text[start : i + 1].strip()
                    if chunk:
                        sentences.append(chunk)
                    start = k
                    i = k
                    continue
        i += 1
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


@dataclass(frozen=True, slots=True)
class PredicateLexicon:
    """Maps verb surfaces and prepositional patterns to canonical predicates."""

    verbs: dict[str, str]
    patterns: dict[tuple[str, ...], str]
    statute_keywords: frozenset[str]

    @staticmethod
    def from_dict(raw: dict) -> "PredicateLexicon":
        return PredicateLexicon(
            verbs={k.lower(): v for k, v in raw.get("verbs", {}).items()},
            patterns={
                tuple(k.lower().split()): v for k, v in raw.get("patterns", {}).items()
            },
            statute_keywords=frozenset(
                w.lower() for w in raw.get("statute_keywords", [])
            ),
        )

    @staticmethod
    def load(path: str | Path) -> "PredicateLexicon":
        """Read a lexicon file and merge it over the packaged defaults."""
        try:
            with open(path, "r", encoding="utf-8") as fp:
                raw = json.load(fp)
        except json.JSONDecodeError as exc:
            raise LoadError(f"lexicon file {path}: invalid JSON ({exc.msg})") from None
        base = default_lexicon()
        extra = PredicateLexicon.from_dict(raw)
        return PredicateLexicon(
            verbs={**base.verbs, **extra.verbs},
            patterns={**base.patterns, **extra.patterns},
            statute_keywords=base.statute_keywords | extra.statute_keywords,
        )


@lru_cache(maxsize=1)
def default_lexicon() -> PredicateLexicon:
    raw = json.loads(
        resources.files("gamekg.data").joinpath("predicate_lexicon.json").read_text("utf-8")
    )
    return PredicateLexicon.from_dict(raw)


@dataclass(frozen=True, slots=True)
class Triple:
    """One extracted relation, with enough detail to trace it back."""

    subject_surface: str
    predicate: str
    object_surface: str
    doc_id: str = ""
    sentence_index: int = 0
    subject_span: tuple[int, int] = (0, 0)
    object_span: tuple[int, int] = (0, 0)


@dataclass(frozen=True, slots=True)
class _Token:
    text: str
    start: int
    end: int

    @property
    def lower(self) -> str:
        return self.text.lower()


def _tokenize(sentence: str) -> list[_Token]:
    tokens = []
    for match in _TOKEN_RE.finditer(sentence):
        text = match.group()
        end = match.end()
        # trim trailing punctuation, but keep the final period of an
        # abbreviation like "U.S."
        while text and text[-1] in ".'’-":
            if text[-1] == "." and "." in text[:-1]:
                break
            text = text[:-1]
            end -= 1
        if text:
            tokens.append(_Token(text, match.start(), end))
    return tokens


@dataclass(frozen=True, slots=True)
class _Candidate:
    first: int  # token index of the run start
    last: int  # token index of the run end (inclusive)
    surface: str
    span: tuple[int, int]


def _name_candidates(sentence: str, tokens: list[_Token]) -> list[_Candidate]:
    """Maximal runs of capitalized tokens, minus bare function words."""
    candidates = []
    run: list[int] = []
    for idx, token in enumerate(tokens + [_Token("", 0, 0)]):
        capitalized = bool(token.text) and token.text[0].isupper()
        if capitalized and token.lower not in _FUNCTION_WORDS:
            run.append(idx)
            continue
        if run:
            first, last = run[0], run[-1]
            span = (tokens[first].start, tokens[last].end)
            candidates.append(_Candidate(first, last, sentence[span[0] : span[1]], span))
            run = []
    return candidates


_REDUCIBLE = frozenset({"was", "is", "were", "are", "be", "been", "being", "a", "an", "the"})


def extract_triples(
    sentence: str,
    lexicon: PredicateLexicon | None = None,
    *,
    doc_id: str = "",
    sentence_index: int = 0,
) -> list[Triple]:
    """Pull (subject, predicate, object) triples out of one sentence.

    For each lexicon verb, the subject is the nearest preceding name run and
    the object is the nearest following name run or, failing that, the first
    plain lowercase noun ("humans", "victims").  Prepositional patterns such
    as "X was an accomplice to Y" are matched between consecutive name runs
    after dropping copulas and articles.  Sentences with no lexicon match
    yield nothing.
    """
    lexicon = lexicon or default_lexicon()
    tokens = _tokenize(sentence)
    candidates = _name_candidates(sentence, tokens)
    triples: list[Triple] = []
    seen: set[tuple[str, str, str]] = set()

    def emit(subject: _Candidate, predicate: str, obj_surface: str, obj_span: tuple[int, int]) -> None:
        key = (subject.surface, predicate, obj_surface)
        if key not in seen:
            seen.add(key)
            triples.append(
                Triple(
                    subject_surface=subject.surface,
                    predicate=predicate,
                    object_surface=obj_surface,
                    doc_id=doc_id,
                    sentence_index=sentence_index,
                    subject_span=subject.span,
                    object_span=obj_span,
                )
            )

    run_starts = {c.first: c for c in candidates}
    for idx, token in enumerate(tokens):
        predicate = lexicon.verbs.get(token.lower)
        if predicate is None:
            continue
        subject = None
        for candidate in candidates:
            if candidate.last < idx:
                subject = candidate
            else:
                break
        if subject is None:
            continue
        for j in range(idx + 1, len(tokens)):
            following = run_starts.get(j)
            if following is not None:
                emit(subject, predicate, following.surface, following.span)
                break
            low = tokens[j].lower
            if (
                tokens[j].text.isalpha()
                and tokens[j].text.islower()
                and low not in _OBJECT_STOPWORDS
                and low not in lexicon.verbs
            ):
                emit(subject, predicate, tokens[j].text, (tokens[j].start, tokens[j].end))
                break

    for left, right in zip(candidates, candidates[1:]):
        between = tuple(
            tokens[k].lower
            for k in range(left.last + 1, right.first)
            if tokens[k].lower not in _REDUCIBLE
        )
        predicate = lexicon.patterns.get(between)
        if predicate is not None:
            emit(left, predicate, right.surface, right.span)

    return triples


def extract_document(document: Document, lexicon: PredicateLexicon | None = None) -> list[Triple]:
    """Split a document body and extract triples from every sentence."""
    results: list[Triple] = []
    for index, sentence in enumerate(split_sentences(document.body)):
        results.extend(
            extract_triples(sentence, lexicon, doc_id=document.id, sentence_index=index)
        )
    return results


def infer_entity_type(surface: str, statute_keywords: frozenset[str]) -> EntityType:
    """Guess an entity type from the surface form alone."""
    words = surface.split()
    if (
        len(words) >= 2
        and all(w[0].isupper() for w in words)
        and any(w.lower().strip(".,;:") in statute_keywords for w in words)
    ):
        return EntityType.STATUTE
    if surface[:1].isupper():
        return EntityType.PERSON
    return EntityType.OTHER


def build_kg(
    triples: Iterable[Triple],
    documents: Sequence[Document] = (),
    lexicon: PredicateLexicon | None = None,
) -> KnowledgeGraph:
    """Assemble a graph from extracted triples.

    Triples are applied in a sorted order so the result is a pure function of
    the triple set: shuffling the input changes nothing.
    """
    lexicon = lexicon or default_lexicon()
    graph = KnowledgeGraph()
    for document in documents:
        graph.add_document(document)
    ordered = sorted(
        triples,
        key=lambda t: (
            normalize_name(t.subject_surface),
            t.predicate,
            normalize_name(t.object_surface),
            t.doc_id,
            t.sentence_index,
            t.subject_surface,
            t.object_surface,
        ),
    )
    for triple in ordered:
        doc_id = triple.doc_id or None
        subject = graph.upsert_entity(
            triple.subject_surface,
            infer_entity_type(triple.subject_surface, lexicon.statute_keywords),
            doc_id=doc_id,
        )
        obj = graph.upsert_entity(
            triple.object_surface,
            infer_entity_type(triple.object_surface, lexicon.statute_keywords),
            doc_id=doc_id,
        )
        graph.upsert_edge(
            subject.id,
            triple.predicate,
            obj.id,
            DocumentSource(triple.doc_id, triple.sentence_index),
        )
    return graph


def load_documents(paths: Sequence[str | Path]) -> list[Document]:
    """Load plain-text or JSON document files.

    A ``.json`` file must hold an object with ``id``, ``title`` and ``body``
    (``source_uri`` optional).  Any other file is read verbatim; its id is
    the slugified file stem.
    """
    if not paths:
        raise ValidationError("no document files given")
    documents = []
    for path in paths:
        path = Path(path)
        text = path.read_text(encoding="utf-8")
        if path.suffix == ".json":
            try:
                raw = json.loads(text)
            except json.JSONDecodeError as exc:
                raise LoadError(f"document file {path}: invalid JSON ({exc.msg})") from None
            try:
                document = Document(
                    id=str(raw["id"]),
                    title=str(raw["title"]),
                    body=str(raw["body"]),
                    source_uri=str(raw.get("source_uri", "")),
                )
            except (KeyError, TypeError) as exc:
                raise LoadError(f"document file {path}: missing field {exc}") from None
        else:
            document = Document(
                id=normalize_name(path.stem), title=path.stem, body=text
            )
        documents.append(document)
    return documents


def ingest_documents(
    documents: Sequence[Document], lexicon: PredicateLexicon | None = None
) -> KnowledgeGraph:
    """End-to-end: extract triples from each document and build the graph."""
    triples: list[Triple] = []
    for document in documents:
        triples.extend(extract_document(document, lexicon))
    return build_kg(triples, documents, lexicon)
