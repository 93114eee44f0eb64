"""Pipeline configuration: JSON schema validation and typed loading.

A config names the corpus, topics, optional qrels, exactly one first stage
(bm25, an external run file, or an rrf combination of those), and optional
rerank and eval sections. Validation reports the JSON path of the offending
field; all relative paths are resolved against the config file's directory
and must exist at load time.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Union

from jsonschema import Draft202012Validator
from jsonschema.exceptions import best_match

from .errors import ConfigError
from .metrics import DEFAULT_METRICS, parse_metric
from .model import LANG_TAGS, QUERY_FIELDS, TRANSLATOR_TAGS, Bm25Params, RbpParams, RrfParams
from .rerank import RerankConfig

_FIRST_STAGE_REF = {"$ref": "#/$defs/first_stage"}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["corpus", "topics", "first_stage"],
    "additionalProperties": False,
    "properties": {
        "corpus": {
            "type": "object",
            "required": ["path", "lang"],
            "additionalProperties": False,
            "properties": {
                "path": {"type": "string"},
                "lang": {"enum": list(LANG_TAGS)},
            },
        },
        "topics": {"type": "string"},
        "qrels": {"type": "string"},
        "first_stage": _FIRST_STAGE_REF,
        "rerank": {
            "type": "object",
            "required": ["fields", "query_lang", "translator", "scorer"],
            "additionalProperties": False,
            "properties": {
                "fields": {"enum": list(QUERY_FIELDS)},
                "query_lang": {"enum": list(LANG_TAGS)},
                "translator": {"enum": list(TRANSLATOR_TAGS)},
                "depth": {"type": "integer", "minimum": 1},
                "batch_size": {"type": "integer", "minimum": 1},
                "fallback": {"enum": ["abort", "lexical"]},
                "scorer": {
                    "oneOf": [
                        {"$ref": "#/$defs/lexical_scorer"},
                        {"$ref": "#/$defs/remote_scorer"},
                    ]
                },
            },
        },
        "eval": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "metrics": {"type": "array", "minItems": 1, "items": {"type": "string"}},
                "rbp_p": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
            },
        },
        "output_dir": {"type": "string"},
    },
    "$defs": {
        "first_stage": {
            "oneOf": [
                {"$ref": "#/$defs/bm25_stage"},
                {"$ref": "#/$defs/external_run_stage"},
                {"$ref": "#/$defs/rrf_stage"},
            ]
        },
        "bm25_stage": {
            "type": "object",
            "required": ["type", "fields", "query_lang", "translator"],
            "additionalProperties": False,
            "properties": {
                "type": {"const": "bm25"},
                "fields": {"enum": list(QUERY_FIELDS)},
                "query_lang": {"enum": list(LANG_TAGS)},
                "translator": {"enum": list(TRANSLATOR_TAGS)},
                "depth": {"type": "integer", "minimum": 1},
                "k1": {"type": "number", "exclusiveMinimum": 0},
                "b": {"type": "number", "minimum": 0, "maximum": 1},
            },
        },
        "external_run_stage": {
            "type": "object",
            "required": ["type", "path"],
            "additionalProperties": False,
            "properties": {
                "type": {"const": "external_run"},
                "path": {"type": "string"},
            },
        },
        "rrf_stage": {
            "type": "object",
            "required": ["type", "inputs"],
            "additionalProperties": False,
            "properties": {
                "type": {"const": "rrf"},
                "inputs": {
                    "type": "array",
                    "minItems": 2,
                    "items": {
                        "oneOf": [_FIRST_STAGE_REF, {"type": "string"}],
                    },
                },
                "k": {"type": "number", "exclusiveMinimum": 0},
                "depth": {"type": "integer", "minimum": 1},
            },
        },
        "lexical_scorer": {
            "type": "object",
            "required": ["type"],
            "additionalProperties": False,
            "properties": {"type": {"const": "lexical"}},
        },
        "remote_scorer": {
            "type": "object",
            "required": ["type"],
            "additionalProperties": False,
            "properties": {
                "type": {"const": "remote"},
                "endpoint": {"type": "string"},
                "timeout": {"type": "number", "exclusiveMinimum": 0},
                "retries": {"type": "integer", "minimum": 0},
                "concurrency": {"type": "integer", "minimum": 1},
                "batch_size": {"type": "integer", "minimum": 1},
            },
        },
    },
}

ENDPOINT_ENV_VAR = "CLIR_SCORER_ENDPOINT"


@dataclass(frozen=True)
class Bm25Stage:
    fields: str
    query_lang: str
    translator: str
    depth: int
    params: Bm25Params


@dataclass(frozen=True)
class ExternalRunStage:
    path: Path


@dataclass(frozen=True)
class RrfStage:
    inputs: tuple["FirstStage", ...]
    params: RrfParams


FirstStage = Union[Bm25Stage, ExternalRunStage, RrfStage]


@dataclass(frozen=True)
class LexicalScorerSpec:
    pass


@dataclass(frozen=True)
class RemoteScorerSpec:
    endpoint: str
    timeout: float = 30.0
    retries: int = 3
    concurrency: int = 4
    batch_size: int = 32


@dataclass(frozen=True)
class RerankSpec:
    config: RerankConfig
    scorer: LexicalScorerSpec | RemoteScorerSpec
    fallback: str = "abort"  # or "lexical": swap in the lexical scorer on scorer failure


@dataclass(frozen=True)
class EvalSpec:
    metrics: tuple[str, ...]
    rbp_params: RbpParams


@dataclass(frozen=True)
class PipelineConfig:
    corpus_path: Path
    corpus_lang: str
    topics_path: Path
    qrels_path: Path | None
    first_stage: FirstStage
    rerank: RerankSpec | None
    eval: EvalSpec | None
    output_dir: Path | None


def stage_depth(stage: FirstStage) -> int | None:
    """Declared output depth of a first stage; None when unknowable (external run)."""
    if isinstance(stage, Bm25Stage):
        return stage.depth
    if isinstance(stage, RrfStage):
        return stage.params.depth
    return None


def _existing_file(path: Path, where: str) -> Path:
    if not path.is_file():
        raise ConfigError(f"{where}: file not found: {path}")
    return path.resolve()


def _build_stage(obj: dict | str, base: Path, where: str) -> FirstStage:
    if isinstance(obj, str):
        return ExternalRunStage(path=_existing_file(base / obj, where))
    kind = obj["type"]
    if kind == "bm25":
        try:
            params = Bm25Params(k1=obj.get("k1", 0.9), b=obj.get("b", 0.4))
        except ValueError as exc:
            raise ConfigError(f"{where}: {exc}") from None
        return Bm25Stage(
            fields=obj["fields"],
            query_lang=obj["query_lang"],
            translator=obj["translator"],
            depth=obj.get("depth", 1000),
            params=params,
        )
    if kind == "external_run":
        return ExternalRunStage(path=_existing_file(base / obj["path"], f"{where}.path"))
    inputs = tuple(
        _build_stage(item, base, f"{where}.inputs[{i}]") for i, item in enumerate(obj["inputs"])
    )
    try:
        params = RrfParams(k=obj.get("k", 60.0), depth=obj.get("depth", 1000))
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None
    return RrfStage(inputs=inputs, params=params)


def _build_rerank(obj: dict, env: Mapping[str, str]) -> RerankSpec:
    try:
        config = RerankConfig(
            fields=obj["fields"],
            query_lang=obj["query_lang"],
            query_translator=obj["translator"],
            depth=obj.get("depth", 1000),
            batch_size=obj.get("batch_size", 128),
        )
    except ValueError as exc:
        raise ConfigError(f"rerank: {exc}") from None
    raw_scorer = obj["scorer"]
    scorer: LexicalScorerSpec | RemoteScorerSpec
    if raw_scorer["type"] == "lexical":
        scorer = LexicalScorerSpec()
    else:
        endpoint = env.get(ENDPOINT_ENV_VAR) or raw_scorer.get("endpoint")
        if not endpoint:
            raise ConfigError(
                f"rerank.scorer: remote scorer needs an endpoint "
                f"(set it in the config or via {ENDPOINT_ENV_VAR})"
            )
        scorer = RemoteScorerSpec(
            endpoint=endpoint,
            timeout=raw_scorer.get("timeout", 30.0),
            retries=raw_scorer.get("retries", 3),
            concurrency=raw_scorer.get("concurrency", 4),
            batch_size=raw_scorer.get("batch_size", 32),
        )
    return RerankSpec(config=config, scorer=scorer, fallback=obj.get("fallback", "abort"))


def load_config(path: str | Path, env: Mapping[str, str] | None = None) -> PipelineConfig:
    """Load, schema-validate, and resolve a pipeline config file.

    `env` defaults to os.environ; CLIR_SCORER_ENDPOINT there overrides the
    remote scorer endpoint in the file.
    """
    env = os.environ if env is None else env
    cfg_path = Path(path)
    try:
        raw = json.loads(cfg_path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None

    error = best_match(Draft202012Validator(CONFIG_SCHEMA).iter_errors(raw))
    if error is not None:
        raise ConfigError(f"{path}: {error.json_path}: {error.message}")

    base = cfg_path.parent
    first_stage = _build_stage(raw["first_stage"], base, "first_stage")
    qrels_path = None
    if "qrels" in raw:
        qrels_path = _existing_file(base / raw["qrels"], "qrels")

    rerank = _build_rerank(raw["rerank"], env) if "rerank" in raw else None
    if rerank is not None:
        first_depth = stage_depth(first_stage)
        if first_depth is not None and rerank.config.depth > first_depth:
            raise ConfigError(
                f"rerank.depth: {rerank.config.depth} exceeds the first-stage depth {first_depth}"
            )

    eval_spec = None
    if "eval" in raw:
        metrics = tuple(raw["eval"].get("metrics", DEFAULT_METRICS))
        for metric in metrics:
            try:
                parse_metric(metric)
            except ValueError as exc:
                raise ConfigError(f"eval.metrics: {exc}") from None
        try:
            rbp_params = RbpParams(p=raw["eval"].get("rbp_p", 0.8))
        except ValueError as exc:
            raise ConfigError(f"eval.rbp_p: {exc}") from None
        if qrels_path is None:
            raise ConfigError("eval: requires a qrels path")
        eval_spec = EvalSpec(metrics=metrics, rbp_params=rbp_params)

    return PipelineConfig(
        corpus_path=_existing_file(base / raw["corpus"]["path"], "corpus.path"),
        corpus_lang=raw["corpus"]["lang"],
        topics_path=_existing_file(base / raw["topics"], "topics"),
        qrels_path=qrels_path,
        first_stage=first_stage,
        rerank=rerank,
        eval=eval_spec,
        output_dir=(base / raw["output_dir"]).resolve() if "output_dir" in raw else None,
    )
