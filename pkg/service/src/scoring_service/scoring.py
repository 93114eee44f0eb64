"""Scorer implementations behind the /score endpoint.

Both scorers take (query, text) pairs and return one finite float per
pair, in input order. The echo scorer is fully deterministic and needs
no model artifacts; the cross-encoder scorer loads a pretrained
relevance model and reports its logit for each pair.
"""

from __future__ import annotations

import logging
import re
from typing import Protocol, Sequence

log = logging.getLogger(__name__)

# A query of the form "#<digits>" asks the echo scorer for -<digits>
# instead of the positional default. Scores for such probe pairs do not
# depend on how a client splits its batches, which makes split
# transparency observable from the outside.
_TAG_RE = re.compile(r"#(\d+)\Z")

# Internal chunk size for cross-encoder inference. Requests larger than
# this are scored in several forward passes, so max_batch only bounds
# request size, not model memory.
_PREDICT_BATCH_SIZE = 32


class Scorer(Protocol):
    """Anything that maps (query, text) pairs to finite scores."""

    model_name: str

    def score(self, pairs: Sequence[tuple[str, str]]) -> list[float]: ...


class EchoScorer:
    """Deterministic scorer for protocol tests.

    Pair i scores -i, except that a query matching "#<digits>" scores
    -<digits> regardless of position.
    """

    model_name = "echo"

    def score(self, pairs: Sequence[tuple[str, str]]) -> list[float]:
        scores: list[float] = []
        for i, (query, _text) in enumerate(pairs):
            match = _TAG_RE.match(query)
            scores.append(-float(match.group(1)) if match else float(-i))
        return scores


class CrossEncoderScorer:
    """Relevance scorer backed by a pretrained cross-encoder."""

    def __init__(self, model: str, device: str = "cpu") -> None:
        try:
            from sentence_transformers import CrossEncoder
        except ImportError as exc:
            raise RuntimeError(f"sentence-transformers is not installed: {exc}") from exc
        log.info("loading cross-encoder %s on %s", model, device)
        try:
            self._encoder = CrossEncoder(model, device=device)
        except Exception as exc:
            raise RuntimeError(f"cannot load cross-encoder {model!r}: {exc}") from exc
        self.model_name = model

    def score(self, pairs: Sequence[tuple[str, str]]) -> list[float]:
        predictions = self._encoder.predict(
            [list(pair) for pair in pairs],
            batch_size=_PREDICT_BATCH_SIZE,
            show_progress_bar=False,
        )
        return [float(value) for value in predictions]


def build_scorer(mode: str, model: str, device: str) -> Scorer:
    """Construct the scorer for a config; loads the model in model mode."""
    if mode == "echo":
        return EchoScorer()
    if mode == "model":
        return CrossEncoderScorer(model, device=device)
    raise ValueError(f"unknown mode {mode!r}")
