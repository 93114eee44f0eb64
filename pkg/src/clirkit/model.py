"""Core domain types shared by every stage.

Owns the language/translator tags, documents, topics, the Run/Qrels data
model, and the parameter bundles consumed by retrieval, fusion, and
evaluation. Everything here is immutable after construction and safe to
share between workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .errors import DataError, MissingVariantError

LANG_TAGS = ("fa", "ru", "zh", "en")

# `ht` is human translation; `original` is the untranslated English topic text.
TRANSLATOR_TAGS = ("bing", "facebook", "huawei", "caiyun", "youdao", "ht", "original")

QUERY_FIELDS = ("title", "description", "title_and_description")


def check_lang(code: str) -> str:
    if code not in LANG_TAGS:
        raise DataError(f"unknown language tag {code!r}; expected one of {', '.join(LANG_TAGS)}")
    return code


def check_translator(tag: str) -> str:
    if tag not in TRANSLATOR_TAGS:
        raise DataError(f"unknown translator tag {tag!r}; expected one of {', '.join(TRANSLATOR_TAGS)}")
    return tag


def check_fields(mode: str) -> str:
    if mode not in QUERY_FIELDS:
        raise DataError(f"unknown query-fields mode {mode!r}; expected one of {', '.join(QUERY_FIELDS)}")
    return mode


@dataclass(frozen=True)
class Document:
    """One corpus item. `title` or `body` may be empty, but not both."""

    doc_id: str
    title: str
    body: str
    lang: str

    def __post_init__(self):
        if not self.doc_id:
            raise DataError("document has empty doc_id")
        if not self.title and not self.body:
            raise DataError(f"document {self.doc_id!r} has empty title and body")
        check_lang(self.lang)

    @property
    def text(self) -> str:
        """Indexed / scored form: title and body joined by a single space."""
        return f"{self.title} {self.body}"


@dataclass(frozen=True)
class TopicFields:
    """Title and description of one (language, translator) rendition of a topic."""

    title: str
    description: str = ""


@dataclass(frozen=True)
class Topic:
    """A query in multiple (language, translator) variants.

    The (en, original) variant is mandatory; every variant must carry a
    non-empty title.
    """

    topic_id: str
    variants: Mapping[tuple[str, str], TopicFields]

    def __post_init__(self):
        if not self.topic_id:
            raise DataError("topic has empty topic_id")
        if ("en", "original") not in self.variants:
            raise DataError(f"topic {self.topic_id!r} lacks the (en, original) variant")
        for (lang, translator), fields in self.variants.items():
            check_lang(lang)
            check_translator(translator)
            if not fields.title:
                raise DataError(
                    f"topic {self.topic_id!r} variant ({lang}, {translator}) has an empty title"
                )

    def variant(self, lang: str, translator: str) -> TopicFields:
        try:
            return self.variants[(lang, translator)]
        except KeyError:
            raise MissingVariantError(
                f"topic {self.topic_id!r} has no ({lang}, {translator}) variant"
            ) from None


@dataclass(frozen=True)
class RunEntry:
    """One ranked document for one topic."""

    topic_id: str
    doc_id: str
    rank: int
    score: float
    tag: str

    def __post_init__(self):
        if not self.topic_id or not self.doc_id:
            raise DataError("run entry has empty topic_id or doc_id")
        if not isinstance(self.rank, int) or self.rank < 1:
            raise DataError(f"run entry ({self.topic_id}, {self.doc_id}) has non-positive rank {self.rank!r}")
        if not math.isfinite(self.score):
            raise DataError(f"run entry ({self.topic_id}, {self.doc_id}) has non-finite score")


@dataclass(frozen=True)
class Run:
    """Per-topic ranked document lists; the universal inter-stage currency.

    `topics` maps topic_id to its entries in rank order (1..n). Topics with
    no entries are simply absent.
    """

    run_tag: str
    topics: Mapping[str, tuple[RunEntry, ...]]

    @classmethod
    def from_scored(cls, run_tag: str, scored: Mapping[str, Iterable[tuple[str, float]]]) -> "Run":
        """Build a Run from per-topic (doc_id, score) pairs.

        Applies the repo tie rule: descending score, ties broken by ascending
        doc_id, ranks assigned 1..n. Topics with no pairs are dropped.
        """
        topics: dict[str, tuple[RunEntry, ...]] = {}
        for topic_id, pairs in scored.items():
            ordered = sorted(pairs, key=lambda p: (-p[1], p[0]))
            if not ordered:
                continue
            topics[topic_id] = tuple(
                RunEntry(topic_id, doc_id, rank, float(score), run_tag)
                for rank, (doc_id, score) in enumerate(ordered, start=1)
            )
        return cls(run_tag=run_tag, topics=topics)

    @property
    def topic_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.topics))

    def entries(self, topic_id: str) -> tuple[RunEntry, ...]:
        return self.topics.get(topic_id, ())

    def doc_ids(self, topic_id: str) -> list[str]:
        return [e.doc_id for e in self.entries(topic_id)]

    def __iter__(self) -> Iterator[RunEntry]:
        for topic_id in self.topic_ids:
            yield from self.topics[topic_id]

    def total_entries(self) -> int:
        return sum(len(group) for group in self.topics.values())


@dataclass(frozen=True)
class Qrels:
    """Graded relevance judgments keyed by (topic_id, doc_id).

    Pairs absent from the map are unjudged and count as grade 0 everywhere.
    """

    judgments: Mapping[tuple[str, str], int]

    def __post_init__(self):
        for (topic_id, doc_id), grade in self.judgments.items():
            if grade < 0:
                raise DataError(f"qrels grade for ({topic_id}, {doc_id}) is negative: {grade}")

    @property
    def topic_ids(self) -> tuple[str, ...]:
        return tuple(sorted({topic_id for topic_id, _ in self.judgments}))

    def grade(self, topic_id: str, doc_id: str) -> int:
        return self.judgments.get((topic_id, doc_id), 0)

    def grades_for(self, topic_id: str) -> dict[str, int]:
        return {
            doc_id: grade
            for (tid, doc_id), grade in self.judgments.items()
            if tid == topic_id
        }

    def relevant_count(self, topic_id: str) -> int:
        return sum(
            1 for (tid, _), grade in self.judgments.items() if tid == topic_id and grade > 0
        )


@dataclass(frozen=True)
class Bm25Params:
    k1: float = 0.9
    b: float = 0.4

    def __post_init__(self):
        if not self.k1 > 0:
            raise ValueError(f"k1 must be > 0, got {self.k1}")
        if not 0.0 <= self.b <= 1.0:
            raise ValueError(f"b must be in [0, 1], got {self.b}")


@dataclass(frozen=True)
class RbpParams:
    p: float = 0.8  # persistence

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"persistence p must be in (0, 1), got {self.p}")


@dataclass(frozen=True)
class RrfParams:
    k: float = 60.0  # rank offset
    depth: int = 1000  # per-run rank cutoff consumed by fusion

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError(f"rank offset k must be > 0, got {self.k}")
        if self.depth < 1:
            raise ValueError(f"depth must be >= 1, got {self.depth}")


def validate_run(run: Run) -> list[str]:
    """Check every Run invariant; return one message per violation.

    An empty list means the run is well-formed. Each message names the
    topic, the rank position involved, and the rule broken.
    """
    violations: list[str] = []
    for topic_id, entries in sorted(run.topics.items()):
        if not entries:
            violations.append(f"topic {topic_id}: empty entry group (absent topics must be omitted)")
            continue
        seen_docs: set[str] = set()
        for position, entry in enumerate(entries, start=1):
            if entry.topic_id != topic_id:
                violations.append(
                    f"topic {topic_id}: rank {position} entry carries topic_id {entry.topic_id!r}"
                )
            if entry.rank != position:
                violations.append(
                    f"topic {topic_id}: rank {entry.rank} at position {position} (ranks must be 1..n with no gaps or duplicates)"
                )
            if entry.doc_id in seen_docs:
                violations.append(
                    f"topic {topic_id}: rank {entry.rank} duplicates doc {entry.doc_id}"
                )
            seen_docs.add(entry.doc_id)
            if position > 1 and entry.score > entries[position - 2].score:
                violations.append(
                    f"topic {topic_id}: rank {entry.rank} score {entry.score!r} exceeds rank {position - 1} score (scores must be non-increasing)"
                )
    return violations


def compose_query(topic: Topic, fields: str, lang: str, translator: str) -> str:
    """Project a topic variant onto a query string.

    `title_and_description` concatenates title, a single space, and
    description; no other normalization is applied.
    """
    check_fields(fields)
    variant = topic.variant(check_lang(lang), check_translator(translator))
    if fields == "title":
        return variant.title
    if fields == "description":
        return variant.description
    return f"{variant.title} {variant.description}"
