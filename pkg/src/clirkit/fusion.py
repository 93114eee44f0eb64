"""Reciprocal-rank fusion of multiple runs into one.

Raw scores of the input runs are ignored; only ranks matter. A document at
rank r <= depth in an input run contributes 1 / (k + r) to its fused score.
Per-document contributions are summed in ascending rank order so the result
is bit-identical under any permutation of the input runs.
"""

from __future__ import annotations

from typing import Sequence

from .errors import DataError
from .model import Run, RrfParams, validate_run


def rrf_fuse(runs: Sequence[Run], params: RrfParams = RrfParams(), run_tag: str | None = None) -> Run:
    """Fuse >= 2 runs over the union of their topic-id spaces.

    Output per topic is re-ranked by fused score (ties by ascending doc_id)
    and truncated to params.depth.
    """
    if len(runs) < 2:
        raise ValueError(f"rrf_fuse needs at least 2 runs, got {len(runs)}")
    for run in runs:
        violations = validate_run(run)
        if violations:
            raise DataError(
                f"malformed input run {run.run_tag!r}: " + "; ".join(violations[:3])
            )
    if run_tag is None:
        run_tag = f"rrf:{len(runs)}runs:k{params.k:g}"

    ranks_by_doc: dict[str, dict[str, list[int]]] = {}
    for run in runs:
        for topic_id, entries in run.topics.items():
            by_doc = ranks_by_doc.setdefault(topic_id, {})
            for entry in entries:
                if entry.rank <= params.depth:
                    by_doc.setdefault(entry.doc_id, []).append(entry.rank)

    scored: dict[str, list[tuple[str, float]]] = {}
    for topic_id, by_doc in ranks_by_doc.items():
        pairs = []
        for doc_id, ranks in by_doc.items():
            score = 0.0
            for rank in sorted(ranks):
                score += 1.0 / (params.k + rank)
            pairs.append((doc_id, score))
        pairs.sort(key=lambda p: (-p[1], p[0]))
        scored[topic_id] = pairs[: params.depth]
    return Run.from_scored(run_tag, scored)
