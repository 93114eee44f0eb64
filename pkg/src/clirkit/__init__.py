"""Cross-language retrieval toolkit: BM25 first stage over original-language
corpora, reciprocal rank fusion, pluggable second-stage reranking, and
TREC-style evaluation with a translator-selection procedure.
"""

from .analysis import Analyzer, tokenize
from .errors import (
    ClirError,
    ConfigError,
    DataError,
    IndexFormatError,
    IndexVersionError,
    MissingVariantError,
    ParseError,
    ScorerError,
    StorageError,
)
from .config import PipelineConfig, load_config
from .fusion import rrf_fuse
from .index import Index, IndexStats, build_index, load_index, save_index, stats
from .metrics import (
    MetricReport,
    average_precision,
    evaluate,
    ndcg_at_k,
    parse_metric,
    rbp,
    recall_at_k,
    select_translator,
    translator_comparison,
)
from .model import (
    Bm25Params,
    Document,
    Qrels,
    RbpParams,
    RrfParams,
    Run,
    RunEntry,
    Topic,
    TopicFields,
    compose_query,
    validate_run,
)
from .rerank import (
    LexicalScorer,
    QrelsOracleScorer,
    RemoteScorer,
    RerankConfig,
    ScorePair,
    Scorer,
    lexical_overlap_score,
    rerank,
)
from .retrieval import bm25_term_score, search, search_topics
from .trecio import (
    read_corpus,
    read_qrels,
    read_run,
    read_topics,
    write_corpus,
    write_qrels,
    write_run,
    write_topics,
)

__version__ = "0.1.0"

__all__ = [
    "Analyzer",
    "Bm25Params",
    "ClirError",
    "ConfigError",
    "DataError",
    "Document",
    "Index",
    "IndexFormatError",
    "IndexStats",
    "IndexVersionError",
    "LexicalScorer",
    "MetricReport",
    "MissingVariantError",
    "ParseError",
    "Qrels",
    "QrelsOracleScorer",
    "RbpParams",
    "RemoteScorer",
    "RerankConfig",
    "RrfParams",
    "Run",
    "RunEntry",
    "ScorePair",
    "Scorer",
    "ScorerError",
    "StorageError",
    "Topic",
    "TopicFields",
    "average_precision",
    "bm25_term_score",
    "build_index",
    "compose_query",
    "evaluate",
    "load_config",
    "PipelineConfig",
    "parse_metric",
    "lexical_overlap_score",
    "load_index",
    "ndcg_at_k",
    "rbp",
    "read_corpus",
    "read_qrels",
    "read_run",
    "read_topics",
    "recall_at_k",
    "rerank",
    "rrf_fuse",
    "save_index",
    "search",
    "search_topics",
    "select_translator",
    "stats",
    "tokenize",
    "translator_comparison",
    "validate_run",
    "write_corpus",
    "write_qrels",
    "write_run",
    "write_topics",
]
