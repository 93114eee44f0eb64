"""Exception hierarchy shared by all stages, with process exit codes for the CLI."""

from __future__ import annotations


class ClirError(Exception):
    """Base class for toolkit errors."""

    exit_code = 1


class ConfigError(ClirError):
    """Invalid pipeline configuration or CLI arguments."""

    exit_code = 2


class DataError(ClirError):
    """Malformed or contract-violating data: corpora, topics, runs, qrels."""

    exit_code = 3


class ParseError(DataError):
    """Malformed input line; carries file path and 1-based line number."""

    def __init__(self, path, lineno: int, message: str):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path = str(path)
        self.lineno = lineno


class MissingVariantError(DataError):
    """A topic lacks the requested (language, translator) variant."""


class ScorerError(ClirError):
    """Reranker scorer failure: unreachable service, protocol violation, bad scores."""

    exit_code = 4


class StorageError(ClirError):
    """Index persistence failure."""

    exit_code = 5


class IndexFormatError(StorageError):
    """Index file is truncated or structurally corrupt."""


class IndexVersionError(StorageError):
    """Index file magic or format version does not match this build."""
