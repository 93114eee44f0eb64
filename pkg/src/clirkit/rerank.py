"""Second-stage reranking of fixed candidate sets with pluggable scorers.

A reranker never adds or drops candidates: it permutes the top `depth`
entries of each topic by scorer score and leaves the tail in its original
order below them. Three scorers ship here: a deterministic lexical-overlap
scorer (no external dependencies), a qrels oracle for upper-bound analysis,
and an HTTP client for an external scoring service speaking the /score
protocol.
"""

from __future__ import annotations

import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Protocol, Sequence

import requests

from .analysis import Analyzer, tokenize
from .errors import DataError, ScorerError
from .model import (
    Document,
    Qrels,
    Run,
    RunEntry,
    Topic,
    check_fields,
    check_lang,
    check_translator,
    compose_query,
)

log = logging.getLogger(__name__)

DEFAULT_DEPTH = 1000
DEFAULT_BATCH_SIZE = 128

# Tail entries get synthetic scores this far apart, strictly below the
# reranked block, so the output still satisfies the Run score invariant.
_TAIL_STEP = 1.0


@dataclass(frozen=True)
class ScorePair:
    """One (query, document) scoring request, wire-protocol shaped."""

    topic_id: str
    doc_id: str
    query: str
    text: str


class Scorer(Protocol):
    def score_pairs(self, pairs: Sequence[ScorePair]) -> list[float]:
        """Return one finite score per pair, in request order."""
        ...


@dataclass(frozen=True)
class RerankConfig:
    """How to build queries and how deep to rerank.

    The query is composed from the chosen (lang, translator) variant and
    field projection; it may be in a different language than the documents.
    `depth` bounds how many candidates per topic are rescored; `batch_size`
    bounds how many pairs go to the scorer per call.
    """

    fields: str
    query_lang: str
    query_translator: str
    depth: int = DEFAULT_DEPTH
    batch_size: int = DEFAULT_BATCH_SIZE

    def __post_init__(self):
        check_fields(self.fields)
        check_lang(self.query_lang)
        check_translator(self.query_translator)
        if self.depth < 1:
            raise ValueError(f"depth must be >= 1, got {self.depth}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")


def lexical_overlap_score(query_text: str, doc_text: str, analyzer: Analyzer) -> float:
    """Share of unique query tokens that also occur in the document, in [0, 1]."""
    query_tokens = set(tokenize(analyzer, query_text))
    if not query_tokens:
        return 0.0
    doc_tokens = set(tokenize(analyzer, doc_text))
    return len(query_tokens & doc_tokens) / len(query_tokens)


@dataclass(frozen=True)
class LexicalScorer:
    """Deterministic token-overlap scorer; the no-service default."""

    analyzer: Analyzer

    def score_pairs(self, pairs: Sequence[ScorePair]) -> list[float]:
        return [lexical_overlap_score(p.query, p.text, self.analyzer) for p in pairs]


@dataclass(frozen=True)
class QrelsOracleScorer:
    """Scores each pair by its judged grade; unjudged pairs score 0.

    Only meaningful for upper-bound experiments: it reveals how much a
    perfect second stage could gain over the first stage on judged data.
    """

    qrels: Qrels

    def score_pairs(self, pairs: Sequence[ScorePair]) -> list[float]:
        return [float(self.qrels.grade(p.topic_id, p.doc_id)) for p in pairs]


class RemoteScorer:
    """HTTP client for a /score service.

    Splits each call into wire batches of at most `batch_size` pairs, posts
    up to `concurrency` batches at a time, and reassembles responses in
    request order. Timeouts, connection failures, and 5xx responses are
    retried with exponential backoff; 4xx responses, length mismatches, and
    non-finite scores fail immediately.
    """

    def __init__(
        self,
        endpoint: str,
        batch_size: int = 32,
        timeout: float = 30.0,
        retries: int = 3,
        concurrency: int = 4,
        backoff: float = 0.25,
    ):
        if batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {batch_size}")
        if retries < 0:
            raise ValueError(f"retries must be >= 0, got {retries}")
        if concurrency < 1:
            raise ValueError(f"concurrency must be >= 1, got {concurrency}")
        self.endpoint = endpoint.rstrip("/")
        self.batch_size = batch_size
        self.timeout = timeout
        self.retries = retries
        self.concurrency = concurrency
        self.backoff = backoff

    def check_health(self) -> dict:
        url = f"{self.endpoint}/health"
        try:
            resp = requests.get(url, timeout=self.timeout)
        except requests.RequestException as exc:
            raise ScorerError(f"health check against {url} failed: {exc}") from None
        if resp.status_code != 200:
            raise ScorerError(f"health check against {url} returned {resp.status_code}")
        try:
            body = resp.json()
        except json.JSONDecodeError:
            raise ScorerError(f"health check against {url} returned non-JSON body") from None
        if not isinstance(body, dict) or body.get("status") != "ok":
            raise ScorerError(f"scoring service at {self.endpoint} is not healthy: {body!r}")
        return body

    def score_pairs(self, pairs: Sequence[ScorePair]) -> list[float]:
        if not pairs:
            return []
        batches = [
            pairs[start : start + self.batch_size]
            for start in range(0, len(pairs), self.batch_size)
        ]
        if len(batches) == 1:
            return self._score_batch(batches[0])
        # Futures are collected in submission order, so the result is
        # deterministic no matter which batch finishes first.
        with ThreadPoolExecutor(max_workers=min(self.concurrency, len(batches))) as pool:
            futures = [pool.submit(self._score_batch, batch) for batch in batches]
            scores: list[float] = []
            for future in futures:
                scores.extend(future.result())
        return scores

    def _score_batch(self, batch: Sequence[ScorePair]) -> list[float]:
        payload = {
            "pairs": [
                {"topic_id": p.topic_id, "doc_id": p.doc_id, "query": p.query, "text": p.text}
                for p in batch
            ]
        }
        url = f"{self.endpoint}/score"
        failure = "no attempt made"
        for attempt in range(self.retries + 1):
            if attempt:
                time.sleep(self.backoff * 2 ** (attempt - 1))
            try:
                resp = requests.post(url, json=payload, timeout=self.timeout)
            except requests.RequestException as exc:
                failure = f"request failed: {exc}"
                log.warning("scoring batch attempt %d/%d: %s", attempt + 1, self.retries + 1, failure)
                continue
            if resp.status_code == 200:
                return self._parse_scores(resp, len(batch))
            if 500 <= resp.status_code < 600:
                failure = f"service returned {resp.status_code}"
                log.warning("scoring batch attempt %d/%d: %s", attempt + 1, self.retries + 1, failure)
                continue
            raise ScorerError(
                f"scoring service rejected batch with {resp.status_code}: {resp.text[:200]}"
            )
        raise ScorerError(f"scoring batch of {len(batch)} failed after {self.retries + 1} attempts: {failure}")

    def _parse_scores(self, resp: requests.Response, expected: int) -> list[float]:
        try:
            body = resp.json()
        except json.JSONDecodeError:
            raise ScorerError("scoring service returned non-JSON body") from None
        scores = body.get("scores") if isinstance(body, dict) else None
        if not isinstance(scores, list):
            raise ScorerError(f"scoring response lacks a scores list: {body!r}")
        if len(scores) != expected:
            raise ScorerError(f"scoring response has {len(scores)} scores for {expected} pairs")
        out: list[float] = []
        for value in scores:
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ScorerError(f"scoring response contains a non-finite score: {value!r}")
            out.append(float(value))
        return out


def _checked_scores(scorer: Scorer, pairs: Sequence[ScorePair], batch_size: int) -> list[float]:
    scores: list[float] = []
    for start in range(0, len(pairs), batch_size):
        batch = pairs[start : start + batch_size]
        got = scorer.score_pairs(batch)
        if len(got) != len(batch):
            raise ScorerError(f"scorer returned {len(got)} scores for {len(batch)} pairs")
        for value in got:
            if not math.isfinite(value):
                raise ScorerError(f"scorer returned a non-finite score: {value!r}")
        scores.extend(got)
    return scores


def rerank(
    run: Run,
    topics: Mapping[str, Topic],
    corpus: Mapping[str, Document],
    scorer: Scorer,
    config: RerankConfig,
    run_tag: str | None = None,
) -> Run:
    """Re-order each topic's top `config.depth` candidates by scorer score.

    The candidate set is fixed: the output contains exactly the input's
    documents per topic. Within the rescored block, ties break by ascending
    doc_id. Entries beyond the depth keep their original relative order and
    receive synthetic scores strictly below the block minimum so the output
    is a valid Run.
    """
    tag = run_tag or f"rerank:{config.query_translator}:{config.fields}"
    out: dict[str, tuple[RunEntry, ...]] = {}
    for topic_id in run.topic_ids:
        topic = topics.get(topic_id)
        if topic is None:
            raise DataError(f"run topic {topic_id!r} not found in topics file")
        query = compose_query(topic, config.fields, config.query_lang, config.query_translator)
        entries = run.entries(topic_id)
        head, tail = entries[: config.depth], entries[config.depth :]
        pairs = []
        for entry in head:
            doc = corpus.get(entry.doc_id)
            if doc is None:
                raise DataError(
                    f"candidate doc {entry.doc_id!r} for topic {topic_id!r} not found in corpus"
                )
            pairs.append(
                ScorePair(topic_id=topic_id, doc_id=entry.doc_id, query=query, text=doc.text)
            )
        scores = _checked_scores(scorer, pairs, config.batch_size)
        reordered = sorted(zip(head, scores), key=lambda es: (-es[1], es[0].doc_id))
        rebuilt = [
            RunEntry(topic_id, entry.doc_id, rank, score, tag)
            for rank, (entry, score) in enumerate(reordered, start=1)
        ]
        floor = rebuilt[-1].score if rebuilt else 0.0
        for offset, entry in enumerate(tail, start=1):
            rebuilt.append(
                RunEntry(topic_id, entry.doc_id, len(head) + offset, floor - _TAIL_STEP * offset, tag)
            )
        out[topic_id] = tuple(rebuilt)
    log.info(
        "reranked %d topics at depth %d (query: %s/%s/%s)",
        len(out), config.depth, config.query_lang, config.query_translator, config.fields,
    )
    return Run(run_tag=tag, topics=out)
