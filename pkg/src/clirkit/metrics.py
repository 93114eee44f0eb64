"""TREC-style metric computation and the query-translator selection procedure.

Conventions (the usual trec_eval ones): nDCG uses linear graded gain with a
log2(rank + 1) discount; MAP and RBP binarize relevance at grade > 0;
unjudged documents count as grade 0. Topics without a single judged-relevant
document are excluded from every metric, per topic and in the means, so a
fixture cannot inflate or deflate aggregates silently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import DataError
from .model import Qrels, RbpParams, Run

DEFAULT_METRICS = ("ndcg@20", "map", "rbp", "recall@100", "recall@1000")

# Metrics the paper's translator-selection procedure ranks by, in order.
SELECTION_METRICS = ("ndcg@20", "recall@1000")


def ndcg_at_k(ranked_doc_ids: Sequence[str], grades: Mapping[str, int], k: int) -> float:
    """Normalized discounted cumulative gain at cutoff k.

    The ideal ordering ranks all judged documents by grade descending,
    truncated at k. Returns 0.0 when the topic has no relevant judgments
    (aggregation excludes such topics).
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    dcg = 0.0
    for i, doc_id in enumerate(ranked_doc_ids[:k]):
        dcg += grades.get(doc_id, 0) / math.log2(i + 2)
    idcg = 0.0
    for i, grade in enumerate(sorted(grades.values(), reverse=True)[:k]):
        idcg += grade / math.log2(i + 2)
    return dcg / idcg if idcg > 0 else 0.0


def average_precision(ranked_doc_ids: Sequence[str], grades: Mapping[str, int]) -> float:
    """AP over the full ranked list: mean of P@i at the rank of each relevant hit."""
    n_relevant = sum(1 for grade in grades.values() if grade > 0)
    if n_relevant == 0:
        return 0.0
    hits = 0
    total = 0.0
    for i, doc_id in enumerate(ranked_doc_ids, start=1):
        if grades.get(doc_id, 0) > 0:
            hits += 1
            total += hits / i
    return total / n_relevant


def rbp(ranked_doc_ids: Sequence[str], grades: Mapping[str, int], params: RbpParams = RbpParams()) -> float:
    """Rank-biased precision with binary relevance (grade > 0)."""
    total = 0.0
    weight = 1.0
    for doc_id in ranked_doc_ids:
        if grades.get(doc_id, 0) > 0:
            total += weight
        weight *= params.p
    return (1.0 - params.p) * total


def recall_at_k(ranked_doc_ids: Sequence[str], grades: Mapping[str, int], k: int) -> float:
    """Fraction of judged-relevant documents retrieved in the top k."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    relevant = {doc_id for doc_id, grade in grades.items() if grade > 0}
    if not relevant:
        return 0.0
    found = sum(1 for doc_id in ranked_doc_ids[:k] if doc_id in relevant)
    return found / len(relevant)


@dataclass(frozen=True)
class MetricReport:
    """Per-topic metric values and their unweighted means."""

    per_topic: Mapping[str, Mapping[str, float]]
    means: Mapping[str, float]

    @property
    def n_topics(self) -> int:
        return len(self.per_topic)


def parse_metric(spec: str) -> tuple[str, int | None]:
    """Split a metric spec like "ndcg@20" into (name, cutoff)."""
    name, _, cutoff = spec.partition("@")
    if name in ("map", "rbp") and not cutoff:
        return name, None
    if name in ("ndcg", "recall") and cutoff.isdigit() and int(cutoff) >= 1:
        return name, int(cutoff)
    raise ValueError(
        f"unknown metric spec {spec!r}; expected ndcg@K, map, rbp, or recall@K"
    )


def evaluate(
    run: Run,
    qrels: Qrels,
    metrics: Sequence[str] = DEFAULT_METRICS,
    rbp_params: RbpParams = RbpParams(),
) -> MetricReport:
    """Score a run against qrels for the requested metric specs.

    Topics are drawn from the qrels: every topic with at least one relevant
    judgment is scored (a topic the run misses scores 0 across the board),
    and topics with no relevant judgment are excluded entirely. Errors out
    when the run and qrels share no topics at all.
    """
    specs = [(spec, *parse_metric(spec)) for spec in metrics]
    run_topics = set(run.topics)
    if not run_topics & {topic_id for topic_id, _ in qrels.judgments}:
        raise DataError("run and qrels share no topics")

    per_topic: dict[str, dict[str, float]] = {}
    for topic_id in qrels.topic_ids:
        grades = qrels.grades_for(topic_id)
        if not any(grade > 0 for grade in grades.values()):
            continue
        ranked = run.doc_ids(topic_id)
        values: dict[str, float] = {}
        for spec, name, cutoff in specs:
            if name == "ndcg":
                values[spec] = ndcg_at_k(ranked, grades, cutoff)
            elif name == "map":
                values[spec] = average_precision(ranked, grades)
            elif name == "rbp":
                values[spec] = rbp(ranked, grades, rbp_params)
            else:
                values[spec] = recall_at_k(ranked, grades, cutoff)
        per_topic[topic_id] = values

    if not per_topic:
        raise DataError("qrels contain no topic with a relevant judgment")
    means = {
        spec: sum(values[spec] for values in per_topic.values()) / len(per_topic)
        for spec, _, _ in specs
    }
    return MetricReport(per_topic=per_topic, means=means)


def translator_comparison(
    runs_by_translator: Mapping[str, Run],
    qrels: Qrels,
    metrics: Sequence[str] = DEFAULT_METRICS,
    rbp_params: RbpParams = RbpParams(),
) -> dict[str, dict[str, float]]:
    """Mean metrics for every candidate run, keyed by translator tag."""
    return {
        translator: dict(evaluate(run, qrels, metrics, rbp_params).means)
        for translator, run in sorted(runs_by_translator.items())
    }


def select_translator(runs_by_translator: Mapping[str, Run], qrels: Qrels) -> str:
    """Pick the machine translator whose run wins on mean nDCG@20.

    Ties fall back to mean R@1000, then to the lexicographically smallest
    translator tag. Human translation (`ht`) may be passed for side-by-side
    evaluation but never wins the selection.
    """
    if not runs_by_translator:
        raise DataError("no candidate runs to select from")
    machine = {tag: run for tag, run in runs_by_translator.items() if tag != "ht"}
    if not machine:
        raise DataError("only human-translation candidates given; nothing to select")
    table = {
        tag: evaluate(run, qrels, SELECTION_METRICS).means for tag, run in machine.items()
    }
    return min(
        table,
        key=lambda tag: (-table[tag]["ndcg@20"], -table[tag]["recall@1000"], tag),
    )
