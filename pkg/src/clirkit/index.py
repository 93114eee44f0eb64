"""Immutable single-segment inverted index with the statistics BM25 needs.

Persistence is a plain-text header (magic, version, language, document
count, average document length) followed by little-endian length-prefixed
binary sections for the document table and the postings. The layout is
bit-exact across platforms; loading a file written by a different format
version fails fast.
"""

from __future__ import annotations

import struct
from collections import Counter
from dataclasses import dataclass
from typing import BinaryIO, Iterable, Mapping

from .analysis import Analyzer, tokenize
from .errors import DataError, IndexFormatError, IndexVersionError, StorageError
from .model import Document, check_lang

MAGIC = "CLIRIDX"
VERSION = 1


@dataclass(frozen=True)
class Index:
    """Read-only inverted index; safe for concurrent searches."""

    lang: str
    doc_ids: tuple[str, ...]  # ordinal -> doc_id, ascending doc_id
    doc_lengths: tuple[int, ...]  # ordinal -> length in tokens
    postings: Mapping[str, tuple[tuple[int, int], ...]]  # term -> ((ordinal, tf), ...)
    avgdl: float

    @property
    def n_docs(self) -> int:
        return len(self.doc_ids)

    @property
    def vocabulary_size(self) -> int:
        return len(self.postings)

    def df(self, term: str) -> int:
        return len(self.postings.get(term, ()))


@dataclass(frozen=True)
class IndexStats:
    n_docs: int
    avgdl: float
    vocabulary_size: int


def build_index(corpus: Iterable[Document], analyzer: Analyzer) -> Index:
    """Index a corpus; deterministic regardless of input stream order.

    Indexed text is title + single space + body; doc_ordinals are assigned
    by ascending doc_id. Duplicate doc_ids are a build error.
    """
    token_counts: dict[str, Counter] = {}
    token_totals: dict[str, int] = {}
    for doc in corpus:
        if doc.lang != analyzer.lang:
            raise DataError(
                f"document {doc.doc_id!r} is {doc.lang!r} but the analyzer is {analyzer.lang!r}"
            )
        if doc.doc_id in token_counts:
            raise DataError(f"duplicate doc_id {doc.doc_id!r} in corpus")
        tokens = tokenize(analyzer, doc.text)
        token_counts[doc.doc_id] = Counter(tokens)
        token_totals[doc.doc_id] = len(tokens)

    doc_ids = tuple(sorted(token_counts))
    doc_lengths = tuple(token_totals[doc_id] for doc_id in doc_ids)
    postings: dict[str, list[tuple[int, int]]] = {}
    for ordinal, doc_id in enumerate(doc_ids):
        for term, tf in token_counts[doc_id].items():
            postings.setdefault(term, []).append((ordinal, tf))

    n = len(doc_ids)
    # Lengths are exact integers, so the mean incurs a single rounding.
    avgdl = sum(doc_lengths) / n if n else 0.0
    return Index(
        lang=analyzer.lang,
        doc_ids=doc_ids,
        doc_lengths=doc_lengths,
        postings={term: tuple(entries) for term, entries in sorted(postings.items())},
        avgdl=avgdl,
    )


def stats(index: Index) -> IndexStats:
    return IndexStats(
        n_docs=index.n_docs,
        avgdl=index.avgdl if index.n_docs else 0.0,
        vocabulary_size=index.vocabulary_size,
    )


def _write_str(fh: BinaryIO, value: str) -> None:
    raw = value.encode("utf-8")
    if len(raw) > 0xFFFF:
        raise DataError(f"string too long for index format: {value[:40]!r}...")
    fh.write(struct.pack("<H", len(raw)))
    fh.write(raw)


def save_index(index: Index, path) -> None:
    try:
        fh = open(path, "wb")
    except OSError as exc:
        raise StorageError(f"cannot write index {path}: {exc}") from None
    with fh:
        header = (
            f"{MAGIC} {VERSION}\n"
            f"lang {index.lang}\n"
            f"docs {index.n_docs}\n"
            f"avgdl {index.avgdl!r}\n"
        )
        fh.write(header.encode("ascii"))
        fh.write(struct.pack("<I", index.n_docs))
        for doc_id, doc_length in zip(index.doc_ids, index.doc_lengths):
            _write_str(fh, doc_id)
            fh.write(struct.pack("<I", doc_length))
        fh.write(struct.pack("<I", len(index.postings)))
        for term in sorted(index.postings):
            entries = index.postings[term]
            _write_str(fh, term)
            fh.write(struct.pack("<I", len(entries)))
            for ordinal, tf in entries:
                fh.write(struct.pack("<II", ordinal, tf))


def _read_exact(fh: BinaryIO, size: int, what: str) -> bytes:
    raw = fh.read(size)
    if len(raw) != size:
        raise IndexFormatError(f"truncated index file while reading {what}")
    return raw


def _read_str(fh: BinaryIO, what: str) -> str:
    (length,) = struct.unpack("<H", _read_exact(fh, 2, what))
    return _read_exact(fh, length, what).decode("utf-8")


def _read_header_line(fh: BinaryIO, key: str) -> str:
    line = fh.readline(4096).decode("ascii", errors="replace")
    if not line.endswith("\n"):
        raise IndexFormatError(f"truncated index header at {key!r} line")
    name, _, value = line.rstrip("\n").partition(" ")
    if name != key:
        raise IndexFormatError(f"bad index header: expected {key!r} line, found {name!r}")
    return value


def load_index(path) -> Index:
    try:
        fh = open(path, "rb")
    except OSError as exc:
        raise StorageError(f"cannot read index {path}: {exc}") from None
    with fh:
        first = fh.readline(4096).decode("ascii", errors="replace").rstrip("\n")
        magic, _, version = first.partition(" ")
        if magic != MAGIC:
            raise IndexVersionError(f"not an index file (bad magic {magic!r})")
        if version != str(VERSION):
            raise IndexVersionError(
                f"unsupported index format version {version!r}; this build reads version {VERSION}"
            )
        lang = check_lang(_read_header_line(fh, "lang"))
        try:
            n_header = int(_read_header_line(fh, "docs"))
            avgdl = float(_read_header_line(fh, "avgdl"))
        except ValueError as exc:
            raise IndexFormatError(f"bad index header: {exc}") from None

        (n_docs,) = struct.unpack("<I", _read_exact(fh, 4, "doc table size"))
        if n_docs != n_header:
            raise IndexFormatError(
                f"doc table size {n_docs} does not match header count {n_header}"
            )
        doc_ids = []
        doc_lengths = []
        for _ in range(n_docs):
            doc_ids.append(_read_str(fh, "doc table"))
            (doc_length,) = struct.unpack("<I", _read_exact(fh, 4, "doc table"))
            doc_lengths.append(doc_length)

        (n_terms,) = struct.unpack("<I", _read_exact(fh, 4, "lexicon size"))
        postings: dict[str, tuple[tuple[int, int], ...]] = {}
        for _ in range(n_terms):
            term = _read_str(fh, "lexicon")
            (n_entries,) = struct.unpack("<I", _read_exact(fh, 4, "postings"))
            raw = _read_exact(fh, 8 * n_entries, f"postings for {term!r}")
            entries = tuple(
                (ordinal, tf) for ordinal, tf in struct.iter_unpack("<II", raw)
            )
            for ordinal, tf in entries:
                if ordinal >= n_docs or tf < 1:
                    raise IndexFormatError(f"corrupt posting ({ordinal}, {tf}) for term {term!r}")
            postings[term] = entries
        if fh.read(1):
            raise IndexFormatError("trailing bytes after postings section")

    return Index(
        lang=lang,
        doc_ids=tuple(doc_ids),
        doc_lengths=tuple(doc_lengths),
        postings=postings,
        avgdl=avgdl,
    )
