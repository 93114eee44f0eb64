"""Command-line entry points: per-stage subcommands and the full pipeline.

Subcommands map 1:1 to library operations (index, search, fuse, rerank,
eval, select-translator); `pipeline` chains them from a JSON config and
writes every stage's run file, the evaluation tables, and figures into one
output directory. Exit codes: 2 config, 3 data, 4 scorer, 5 storage,
1 anything else raised by the toolkit.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Mapping, Sequence

from .analysis import Analyzer
from .config import (
    Bm25Stage,
    ENDPOINT_ENV_VAR,
    ExternalRunStage,
    FirstStage,
    LexicalScorerSpec,
    PipelineConfig,
    RemoteScorerSpec,
    RrfStage,
    load_config,
)
from .errors import ClirError, ConfigError, DataError, ScorerError
from .fusion import rrf_fuse
from .index import Index, build_index, load_index, save_index, stats
from .metrics import (
    DEFAULT_METRICS,
    MetricReport,
    SELECTION_METRICS,
    evaluate,
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
    Topic,
    check_translator,
)
from .rerank import LexicalScorer, RemoteScorer, RerankConfig, Scorer, rerank
from .retrieval import search_topics
from . import report, trecio

log = logging.getLogger(__name__)


def _metric_filename(metric: str) -> str:
    return metric.replace("@", "_at_")


def _load_corpus_map(path) -> dict[str, Document]:
    corpus: dict[str, Document] = {}
    for doc in trecio.read_corpus(path):
        if doc.doc_id in corpus:
            raise DataError(f"{path}: duplicate doc_id {doc.doc_id!r}")
        corpus[doc.doc_id] = doc
    if not corpus:
        raise DataError(f"{path}: corpus is empty")
    return corpus


def _topics_map(topics: Sequence[Topic]) -> dict[str, Topic]:
    return {topic.topic_id: topic for topic in topics}


def _print_means(name: str, rep: MetricReport) -> None:
    cells = "  ".join(f"{metric}={rep.means[metric]:.4f}" for metric in sorted(rep.means))
    print(f"{name}: topics={rep.n_topics}  {cells}")


def cmd_index(args) -> int:
    analyzer = Analyzer(lang=args.lang)
    index = build_index(trecio.read_corpus(args.corpus), analyzer)
    save_index(index, args.output)
    s = stats(index)
    print(f"indexed {s.n_docs} docs, vocabulary {s.vocabulary_size}, avgdl {s.avgdl:.2f}")
    return 0


def cmd_search(args) -> int:
    index = load_index(args.index)
    analyzer = Analyzer(lang=index.lang)
    topics = trecio.read_topics(args.topics)
    run = search_topics(
        index,
        analyzer,
        topics,
        fields=args.fields,
        query_lang=args.query_lang,
        translator=args.translator,
        k=args.k,
        params=Bm25Params(k1=args.k1, b=args.b),
        run_tag=args.tag,
    )
    trecio.write_run(run, args.output)
    print(f"wrote {run.total_entries()} entries for {len(run.topics)} topics to {args.output}")
    return 0


def cmd_fuse(args) -> int:
    runs = [trecio.read_run(path) for path in args.run]
    if len(runs) < 2:
        raise ConfigError("fuse needs at least two --run files")
    fused = rrf_fuse(runs, RrfParams(k=args.k, depth=args.depth), run_tag=args.tag)
    trecio.write_run(fused, args.output)
    print(f"fused {len(runs)} runs into {fused.total_entries()} entries for {len(fused.topics)} topics")
    return 0


def _build_remote_scorer(spec: RemoteScorerSpec, workers: int | None) -> RemoteScorer:
    return RemoteScorer(
        endpoint=spec.endpoint,
        batch_size=spec.batch_size,
        timeout=spec.timeout,
        retries=spec.retries,
        concurrency=workers or spec.concurrency,
    )


def cmd_rerank(args) -> int:
    run = trecio.read_run(args.run)
    corpus = _load_corpus_map(args.corpus)
    topics = _topics_map(trecio.read_topics(args.topics))
    config = RerankConfig(
        fields=args.fields,
        query_lang=args.query_lang,
        query_translator=args.translator,
        depth=args.depth,
        batch_size=args.batch_size,
    )
    scorer: Scorer
    if args.scorer == "lexical":
        doc_lang = next(iter(corpus.values())).lang
        scorer = LexicalScorer(Analyzer(lang=doc_lang))
    else:
        import os

        endpoint = os.environ.get(ENDPOINT_ENV_VAR) or args.endpoint
        if not endpoint:
            raise ConfigError(
                f"remote scorer needs --endpoint or the {ENDPOINT_ENV_VAR} environment variable"
            )
        remote = RemoteScorer(
            endpoint=endpoint,
            batch_size=args.wire_batch_size,
            timeout=args.timeout,
            retries=args.retries,
            concurrency=args.concurrency,
        )
        health = remote.check_health()
        log.info("scoring service healthy, model %s", health.get("model"))
        scorer = remote
    reranked = rerank(run, topics, corpus, scorer, config, run_tag=args.tag)
    trecio.write_run(reranked, args.output)
    print(f"reranked {len(reranked.topics)} topics at depth {config.depth} to {args.output}")
    return 0


def _write_eval_outputs(
    out_dir: Path,
    stages: Mapping[str, MetricReport],
    final_stage: str,
    metrics: Sequence[str],
) -> None:
    """TSV + JSON + figures for one or more evaluated stages."""
    out_dir.mkdir(parents=True, exist_ok=True)
    figures = out_dir / "figures"
    figures.mkdir(exist_ok=True)
    report.write_report_tsv(stages[final_stage], out_dir / "report.tsv")
    report.write_summary_json(stages, out_dir / "summary.json")
    if len(stages) > 1:
        report.write_comparison_tsv(stages, out_dir / "comparison.tsv")
        report.plot_stage_means(stages, figures / "stage_means.png")
    for metric in metrics:
        report.plot_metric_by_topic(
            stages[final_stage], metric, figures / f"by_topic_{_metric_filename(metric)}.png"
        )


def cmd_eval(args) -> int:
    run = trecio.read_run(args.run)
    qrels = trecio.read_qrels(args.qrels)
    metrics = tuple(m.strip() for m in args.metrics.split(",") if m.strip())
    rep = evaluate(run, qrels, metrics, RbpParams(p=args.rbp_p))
    _write_eval_outputs(Path(args.output), {run.run_tag: rep}, run.run_tag, metrics)
    _print_means(run.run_tag, rep)
    print(f"wrote report to {args.output}")
    return 0


def cmd_select_translator(args) -> int:
    runs: dict[str, Run] = {}
    for item in args.run:
        tag, sep, path = item.partition("=")
        if not sep or not tag or not path:
            raise ConfigError(f"--run expects TRANSLATOR=PATH, got {item!r}")
        check_translator(tag)
        if tag in runs:
            raise ConfigError(f"--run given twice for translator {tag!r}")
        runs[tag] = trecio.read_run(path)
    qrels = trecio.read_qrels(args.qrels)
    table = translator_comparison(runs, qrels, SELECTION_METRICS)
    winner = select_translator(runs, qrels)
    header = "translator\t" + "\t".join(SELECTION_METRICS)
    print(header)
    for tag in sorted(table):
        row = "\t".join(f"{table[tag][m]:.6f}" for m in SELECTION_METRICS)
        print(f"{tag}\t{row}")
    print(f"selected {winner}")
    if args.output:
        out_dir = Path(args.output)
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "translator_comparison.tsv", "w", encoding="utf-8", newline="\n") as fh:
            fh.write(header + "\n")
            for tag in sorted(table):
                row = "\t".join(f"{table[tag][m]:.6f}" for m in SELECTION_METRICS)
                fh.write(f"{tag}\t{row}\n")
            fh.write(f"selected\t{winner}\n")
        report.plot_candidate_comparison(
            table, SELECTION_METRICS, out_dir / "translator_comparison.png"
        )
    return 0


class _PipelineRunner:
    """Executes one config end to end, caching the index across bm25 stages."""

    def __init__(self, config: PipelineConfig, out_dir: Path, workers: int | None):
        self.config = config
        self.out_dir = out_dir
        self.workers = workers
        self.analyzer = Analyzer(lang=config.corpus_lang)
        self.corpus = _load_corpus_map(config.corpus_path)
        self.topics = trecio.read_topics(config.topics_path)
        self._index: Index | None = None

    def index(self) -> Index:
        if self._index is None:
            log.info("building index over %d docs (%s)", len(self.corpus), self.config.corpus_lang)
            self._index = build_index(self.corpus.values(), self.analyzer)
        return self._index

    def run_stage(self, stage: FirstStage, name: str) -> Run:
        if isinstance(stage, Bm25Stage):
            run = search_topics(
                self.index(),
                self.analyzer,
                self.topics,
                fields=stage.fields,
                query_lang=stage.query_lang,
                translator=stage.translator,
                k=stage.depth,
                params=stage.params,
            )
        elif isinstance(stage, ExternalRunStage):
            run = trecio.read_run(stage.path)
        else:
            inputs = [
                self.run_stage(sub, f"{name}.input{i}") for i, sub in enumerate(stage.inputs)
            ]
            run = rrf_fuse(inputs, stage.params)
        log.info("stage %s: %d topics, %d entries", name, len(run.topics), run.total_entries())
        trecio.write_run(run, self.out_dir / f"{name}.run")
        return run

    def build_scorer(self) -> Scorer:
        spec = self.config.rerank.scorer
        if isinstance(spec, LexicalScorerSpec):
            return LexicalScorer(self.analyzer)
        remote = _build_remote_scorer(spec, self.workers)
        health = remote.check_health()
        log.info("scoring service healthy, model %s", health.get("model"))
        return remote

    def rerank_stage(self, first: Run) -> Run:
        spec = self.config.rerank
        try:
            scorer = self.build_scorer()
            run = rerank(first, _topics_map(self.topics), self.corpus, scorer, spec.config)
        except ScorerError as exc:
            if spec.fallback != "lexical":
                raise
            log.warning("scorer failed (%s); falling back to the lexical scorer", exc)
            run = rerank(
                first, _topics_map(self.topics), self.corpus, LexicalScorer(self.analyzer), spec.config
            )
        log.info("stage reranked: %d topics, %d entries", len(run.topics), run.total_entries())
        trecio.write_run(run, self.out_dir / "reranked.run")
        return run

    def execute(self) -> None:
        first = self.run_stage(self.config.first_stage, "first_stage")
        stage_runs: dict[str, Run] = {"first_stage": first}
        final_stage = "first_stage"
        if self.config.rerank is not None:
            stage_runs["reranked"] = self.rerank_stage(first)
            final_stage = "reranked"
        if self.config.eval is not None:
            qrels = trecio.read_qrels(self.config.qrels_path)
            reports = {
                name: evaluate(run, qrels, self.config.eval.metrics, self.config.eval.rbp_params)
                for name, run in stage_runs.items()
            }
            _write_eval_outputs(self.out_dir, reports, final_stage, self.config.eval.metrics)
            for name in sorted(reports):
                _print_means(name, reports[name])
        print(f"pipeline outputs in {self.out_dir}")


def cmd_pipeline(args) -> int:
    config = load_config(args.config)
    out_dir = Path(args.output) if args.output else config.output_dir
    if out_dir is None:
        raise ConfigError("no output directory: pass --output or set output_dir in the config")
    if args.seed is not None:
        log.debug("--seed %d accepted but unused; the pipeline is deterministic", args.seed)
    out_dir.mkdir(parents=True, exist_ok=True)
    _PipelineRunner(config, out_dir, args.workers).execute()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clirkit",
        description="Cross-language retrieval: BM25 first stage, rank fusion, reranking, evaluation.",
    )
    parser.add_argument("--log-level", default="warning",
                        choices=["debug", "info", "warning", "error"])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", help="build and save an inverted index from a corpus file")
    p.add_argument("--corpus", required=True)
    p.add_argument("--lang", required=True, choices=["fa", "ru", "zh", "en"])
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("search", help="run BM25 over a topic file against a saved index")
    p.add_argument("--index", required=True)
    p.add_argument("--topics", required=True)
    p.add_argument("--fields", required=True,
                   choices=["title", "description", "title_and_description"])
    p.add_argument("--query-lang", required=True, choices=["fa", "ru", "zh", "en"])
    p.add_argument("--translator", required=True)
    p.add_argument("--k", type=int, default=1000)
    p.add_argument("--k1", type=float, default=0.9)
    p.add_argument("--b", type=float, default=0.4)
    p.add_argument("--tag", default=None)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("fuse", help="reciprocal-rank-fuse two or more run files")
    p.add_argument("--run", action="append", required=True, metavar="PATH")
    p.add_argument("--k", type=float, default=60.0)
    p.add_argument("--depth", type=int, default=1000)
    p.add_argument("--tag", default=None)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("rerank", help="rescore the top candidates of a run with a scorer")
    p.add_argument("--run", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--topics", required=True)
    p.add_argument("--fields", required=True,
                   choices=["title", "description", "title_and_description"])
    p.add_argument("--query-lang", required=True, choices=["fa", "ru", "zh", "en"])
    p.add_argument("--translator", required=True)
    p.add_argument("--depth", type=int, default=1000)
    p.add_argument("--batch-size", type=int, default=128)
    p.add_argument("--scorer", required=True, choices=["lexical", "remote"])
    p.add_argument("--endpoint", default=None, help="remote scorer base URL")
    p.add_argument("--timeout", type=float, default=30.0)
    p.add_argument("--retries", type=int, default=3)
    p.add_argument("--concurrency", type=int, default=4)
    p.add_argument("--wire-batch-size", type=int, default=32,
                   help="pairs per HTTP request for the remote scorer")
    p.add_argument("--tag", default=None)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_rerank)

    p = sub.add_parser("eval", help="score a run against qrels; write tables and figures")
    p.add_argument("--run", required=True)
    p.add_argument("--qrels", required=True)
    p.add_argument("--metrics", default=",".join(DEFAULT_METRICS))
    p.add_argument("--rbp-p", type=float, default=0.8)
    p.add_argument("--output", required=True, help="directory for report.tsv, summary.json, figures/")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("select-translator",
                       help="pick the best machine translator from per-translator runs")
    p.add_argument("--run", action="append", required=True, metavar="TRANSLATOR=PATH")
    p.add_argument("--qrels", required=True)
    p.add_argument("--output", default=None, help="optional directory for the comparison table and figure")
    p.set_defaults(func=cmd_select_translator)

    p = sub.add_parser("pipeline", help="run first stage, optional rerank, and eval from a config")
    p.add_argument("--config", required=True)
    p.add_argument("--output", default=None, help="output directory (overrides config output_dir)")
    p.add_argument("--workers", type=int, default=None,
                   help="concurrent scoring batches for the remote scorer")
    p.add_argument("--seed", type=int, default=None,
                   help="reserved; the pipeline is deterministic without it")
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level.upper()),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except ClirError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
