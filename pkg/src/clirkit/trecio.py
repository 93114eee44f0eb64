"""Parsing and serialization of the four external file formats.

Corpora and topics travel as newline-delimited JSON; runs and qrels as the
classic whitespace-separated column formats. All files are UTF-8 with LF
newlines. Parsers never skip a malformed line silently: every failure is a
ParseError carrying file and line number. Writers emit canonical bytes so
write(read(write(x))) is byte-identical to write(x).
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Iterable, Iterator

from .errors import DataError, ParseError, StorageError
from .model import Document, Qrels, Run, RunEntry, Topic, TopicFields, validate_run

_RUN_SCORE_FORMAT = "{:.6f}"


def _no_whitespace(value: str, what: str, where: str) -> str:
    if value != "".join(value.split()) or not value:
        raise DataError(f"{where}: {what} {value!r} is empty or contains whitespace")
    return value


def _open_read(path: str | Path):
    try:
        return open(path, encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None


def _open_write(path: str | Path):
    try:
        return open(path, "w", encoding="utf-8", newline="\n")
    except OSError as exc:
        raise StorageError(f"cannot write {path}: {exc}") from None


def _json_lines(path: str | Path) -> Iterator[tuple[int, dict]]:
    with _open_read(path) as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(str(path), lineno, f"invalid JSON: {exc.msg}") from None
            if not isinstance(obj, dict):
                raise ParseError(str(path), lineno, "expected a JSON object")
            yield lineno, obj


def _required(obj: dict, key: str, path: str | Path, lineno: int) -> object:
    if key not in obj:
        raise ParseError(str(path), lineno, f"missing key {key!r}")
    return obj[key]


def read_corpus(path: str | Path) -> Iterator[Document]:
    """Stream Documents from newline-delimited JSON with keys id, title, text, lang."""
    for lineno, obj in _json_lines(path):
        doc_id = _required(obj, "id", path, lineno)
        title = _required(obj, "title", path, lineno)
        text = _required(obj, "text", path, lineno)
        lang = _required(obj, "lang", path, lineno)
        if not all(isinstance(v, str) for v in (doc_id, title, text, lang)):
            raise ParseError(str(path), lineno, "id, title, text, and lang must be strings")
        try:
            yield Document(doc_id=doc_id, title=title, body=text, lang=lang)
        except DataError as exc:
            raise ParseError(str(path), lineno, str(exc)) from None


def write_corpus(docs: Iterable[Document], path: str | Path) -> None:
    with _open_write(path) as handle:
        for doc in docs:
            obj = {"id": doc.doc_id, "title": doc.title, "text": doc.body, "lang": doc.lang}
            handle.write(json.dumps(obj, ensure_ascii=False, separators=(",", ":")))
            handle.write("\n")


def read_topics(path: str | Path) -> list[Topic]:
    """Read topics with their per-(lang, translator) variants.

    One JSON object per line: {"topic_id": ..., "variants": [{"lang": ...,
    "translator": ..., "title": ..., "description": ...}]}. Description is
    optional per variant. Duplicate (lang, translator) pairs within one
    topic and duplicate topic_ids across lines are errors.
    """
    topics: list[Topic] = []
    seen_ids: set[str] = set()
    for lineno, obj in _json_lines(path):
        topic_id = _required(obj, "topic_id", path, lineno)
        raw_variants = _required(obj, "variants", path, lineno)
        if not isinstance(topic_id, str):
            raise ParseError(str(path), lineno, "topic_id must be a string")
        if not isinstance(raw_variants, list):
            raise ParseError(str(path), lineno, "variants must be a list")
        if topic_id in seen_ids:
            raise ParseError(str(path), lineno, f"duplicate topic_id {topic_id!r}")
        seen_ids.add(topic_id)
        variants: dict[tuple[str, str], TopicFields] = {}
        for variant in raw_variants:
            if not isinstance(variant, dict):
                raise ParseError(str(path), lineno, "each variant must be a JSON object")
            lang = _required(variant, "lang", path, lineno)
            translator = _required(variant, "translator", path, lineno)
            title = _required(variant, "title", path, lineno)
            description = variant.get("description", "")
            if not all(isinstance(v, str) for v in (lang, translator, title, description)):
                raise ParseError(
                    str(path), lineno, "lang, translator, title, and description must be strings"
                )
            if (lang, translator) in variants:
                raise ParseError(
                    str(path),
                    lineno,
                    f"topic {topic_id!r} has duplicate variant ({lang}, {translator})",
                )
            variants[(lang, translator)] = TopicFields(title=title, description=description)
        try:
            topics.append(Topic(topic_id=topic_id, variants=variants))
        except DataError as exc:
            raise ParseError(str(path), lineno, str(exc)) from None
    return topics


def write_topics(topics: Iterable[Topic], path: str | Path) -> None:
    """Write topics as NDJSON, variants sorted by (lang, translator)."""
    with _open_write(path) as handle:
        for topic in topics:
            variants = [
                {
                    "lang": lang,
                    "translator": translator,
                    "title": fields.title,
                    "description": fields.description,
                }
                for (lang, translator), fields in sorted(topic.variants.items())
            ]
            obj = {"topic_id": topic.topic_id, "variants": variants}
            handle.write(json.dumps(obj, ensure_ascii=False, separators=(",", ":")))
            handle.write("\n")


def read_run(path: str | Path) -> Run:
    """Read a six-column run file: topic_id Q0 doc_id rank score tag.

    Lines may arrive in any order; entries are regrouped by topic and sorted
    by rank, then the result must pass every Run invariant (ranks 1..n,
    unique docs, non-increasing scores). A file mixing several tags is
    rejected: a Run carries exactly one.
    """
    raw: dict[str, list[RunEntry]] = {}
    tags: set[str] = set()
    with _open_read(path) as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 6:
                raise ParseError(str(path), lineno, f"expected 6 columns, got {len(parts)}")
            topic_id, _, doc_id, rank_s, score_s, tag = parts
            try:
                rank = int(rank_s)
            except ValueError:
                raise ParseError(str(path), lineno, f"non-integer rank {rank_s!r}") from None
            try:
                score = float(score_s)
            except ValueError:
                raise ParseError(str(path), lineno, f"non-numeric score {score_s!r}") from None
            if not math.isfinite(score):
                raise ParseError(str(path), lineno, f"non-finite score {score_s!r}")
            if rank < 1:
                raise ParseError(str(path), lineno, f"rank must be >= 1, got {rank}")
            tags.add(tag)
            raw.setdefault(topic_id, []).append(
                RunEntry(topic_id=topic_id, doc_id=doc_id, rank=rank, score=score, tag=tag)
            )
    if not raw:
        raise DataError(f"{path}: run file contains no entries")
    if len(tags) > 1:
        raise DataError(f"{path}: run file mixes tags {sorted(tags)}; expected exactly one")
    run = Run(
        run_tag=next(iter(tags)),
        topics={
            topic_id: tuple(sorted(entries, key=lambda e: e.rank))
            for topic_id, entries in raw.items()
        },
    )
    violations = validate_run(run)
    if violations:
        raise DataError(f"{path}: invalid run:\n" + "\n".join(violations))
    return run


def write_run(run: Run, path: str | Path) -> None:
    """Write a run in canonical form: ascending topic_id, ranks ascending, 6-decimal scores."""
    violations = validate_run(run)
    if violations:
        raise DataError("refusing to write invalid run:\n" + "\n".join(violations))
    with _open_write(path) as handle:
        for entry in run:
            _no_whitespace(entry.topic_id, "topic_id", "write_run")
            _no_whitespace(entry.doc_id, "doc_id", "write_run")
            _no_whitespace(entry.tag, "tag", "write_run")
            score = _RUN_SCORE_FORMAT.format(entry.score)
            handle.write(
                f"{entry.topic_id} Q0 {entry.doc_id} {entry.rank} {score} {entry.tag}\n"
            )


def read_qrels(path: str | Path) -> Qrels:
    """Read four-column qrels: topic_id iteration doc_id grade (integer >= 0)."""
    judgments: dict[tuple[str, str], int] = {}
    with _open_read(path) as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 4:
                raise ParseError(str(path), lineno, f"expected 4 columns, got {len(parts)}")
            topic_id, _, doc_id, grade_s = parts
            try:
                grade = int(grade_s)
            except ValueError:
                raise ParseError(str(path), lineno, f"non-integer grade {grade_s!r}") from None
            if grade < 0:
                raise ParseError(str(path), lineno, f"negative grade {grade}")
            if (topic_id, doc_id) in judgments:
                raise ParseError(
                    str(path), lineno, f"duplicate judgment for ({topic_id}, {doc_id})"
                )
            judgments[(topic_id, doc_id)] = grade
    return Qrels(judgments=judgments)


def write_qrels(qrels: Qrels, path: str | Path) -> None:
    """Write qrels sorted by (topic_id, doc_id) with iteration fixed at 0."""
    with _open_write(path) as handle:
        for (topic_id, doc_id), grade in sorted(qrels.judgments.items()):
            _no_whitespace(topic_id, "topic_id", "write_qrels")
            _no_whitespace(doc_id, "doc_id", "write_qrels")
            handle.write(f"{topic_id} 0 {doc_id} {grade}\n")
