"""HTTP scoring service for query-document relevance.

The service speaks a small JSON protocol: POST /score takes a batch of
(query, text) pairs and returns one finite score per pair in request
order; GET /health reports readiness and the active model identifier.
Two scorers are available: a pretrained cross-encoder for real relevance
scores and a deterministic echo scorer for protocol tests that must not
download model weights.
"""

from .config import DEFAULT_MAX_BATCH, DEFAULT_MODEL, ServiceConfig
from .scoring import CrossEncoderScorer, EchoScorer, build_scorer
from .app import create_app

__all__ = [
    "DEFAULT_MAX_BATCH",
    "DEFAULT_MODEL",
    "ServiceConfig",
    "CrossEncoderScorer",
    "EchoScorer",
    "build_scorer",
    "create_app",
]

__version__ = "0.1.0"
