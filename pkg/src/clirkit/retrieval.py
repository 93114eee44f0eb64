"""BM25 ranked retrieval producing first-stage runs.

Scoring follows the Lucene-style formulation: idf = ln(1 + (N - df + 0.5) /
(df + 0.5)), with term saturation tf * (k1 + 1) / (tf + k1 * (1 - b +
b * doclen / avgdl)). Defaults k1 = 0.9, b = 0.4.
"""

from __future__ import annotations

import math
from typing import Iterable

from .analysis import Analyzer, tokenize
from .index import Index
from .model import Bm25Params, Run, Topic, compose_query

DEFAULT_DEPTH = 1000


def bm25_term_score(
    tf: int,
    df: int,
    doclen: int,
    avgdl: float,
    n: int,
    params: Bm25Params = Bm25Params(),
) -> float:
    """Contribution of one term occurrence set in one document.

    Always positive under the preconditions; saturates toward idf * (k1 + 1)
    as tf grows.
    """
    if n < 1:
        raise ValueError(f"document count must be >= 1, got {n}")
    if not 1 <= df <= n:
        raise ValueError(f"df must be in [1, {n}], got {df}")
    if tf < 1:
        raise ValueError(f"tf must be >= 1, got {tf}")
    if doclen < 1:
        raise ValueError(f"doclen must be >= 1, got {doclen}")
    if not avgdl > 0:
        raise ValueError(f"avgdl must be > 0, got {avgdl}")
    idf = math.log(1.0 + (n - df + 0.5) / (df + 0.5))
    saturation = tf * (params.k1 + 1.0) / (tf + params.k1 * (1.0 - params.b + params.b * doclen / avgdl))
    return idf * saturation


def search(
    index: Index,
    query_tokens: Iterable[str],
    k: int = DEFAULT_DEPTH,
    params: Bm25Params = Bm25Params(),
) -> list[tuple[str, float]]:
    """Top-k documents for a token list, as (doc_id, score) in rank order.

    A document's score sums bm25_term_score over the query tokens it
    contains; duplicate query tokens contribute multiply. Ties are broken
    by ascending doc_id. A query with no indexed terms yields [].
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    scores: dict[int, float] = {}
    for token in query_tokens:
        entries = index.postings.get(token)
        if not entries:
            continue
        df = len(entries)
        for ordinal, tf in entries:
            contribution = bm25_term_score(
                tf, df, index.doc_lengths[ordinal], index.avgdl, index.n_docs, params
            )
            scores[ordinal] = scores.get(ordinal, 0.0) + contribution
    ranked = sorted(
        ((index.doc_ids[ordinal], score) for ordinal, score in scores.items()),
        key=lambda pair: (-pair[1], pair[0]),
    )
    return ranked[:k]


def search_topics(
    index: Index,
    analyzer: Analyzer,
    topics: Iterable[Topic],
    fields: str,
    query_lang: str,
    translator: str,
    k: int = DEFAULT_DEPTH,
    params: Bm25Params = Bm25Params(),
    run_tag: str | None = None,
) -> Run:
    """First-stage BM25 run over a topic set.

    Queries are composed from the (query_lang, translator) variant and
    analyzed with the same analyzer used at index time. Topics matching no
    indexed term are absent from the run.
    """
    if run_tag is None:
        run_tag = f"bm25:{translator}:{fields}"
    scored = {}
    for topic in topics:
        query = compose_query(topic, fields, query_lang, translator)
        hits = search(index, tokenize(analyzer, query), k, params)
        if hits:
            scored[topic.topic_id] = hits
    return Run.from_scored(run_tag, scored)
