"""Rendering of evaluation output: TSV tables, a JSON summary, and figures.

Everything written here is byte-deterministic for identical inputs: rows and
keys are emitted in sorted order, floats use fixed 6-decimal formatting, and
PNGs are saved through the Agg backend with the metadata field that embeds
the renderer version blanked out.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from .metrics import MetricReport  # noqa: E402

_PNG_META = {"Software": None}  # keep renderer version out of the bytes
_FIGSIZE = (8.0, 4.5)
_DPI = 100


def _fmt(value: float) -> str:
    return f"{value:.6f}"


def write_report_tsv(report: MetricReport, path: str | Path) -> None:
    """Per-topic metric table with a trailing mean row."""
    metrics = sorted(report.means)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("topic\t" + "\t".join(metrics) + "\n")
        for topic_id in sorted(report.per_topic):
            values = report.per_topic[topic_id]
            handle.write(topic_id + "\t" + "\t".join(_fmt(values[m]) for m in metrics) + "\n")
        handle.write("mean\t" + "\t".join(_fmt(report.means[m]) for m in metrics) + "\n")


def write_comparison_tsv(stages: Mapping[str, MetricReport], path: str | Path) -> None:
    """One row of mean metrics per stage (or per candidate run)."""
    metrics = sorted({m for report in stages.values() for m in report.means})
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("run\t" + "\t".join(metrics) + "\n")
        for name in sorted(stages):
            means = stages[name].means
            row = "\t".join(_fmt(means[m]) if m in means else "" for m in metrics)
            handle.write(f"{name}\t{row}\n")


def write_summary_json(stages: Mapping[str, MetricReport], path: str | Path) -> None:
    """Machine-readable summary: per stage, topic count and mean metrics."""
    payload = {
        name: {"n_topics": report.n_topics, "means": dict(report.means)}
        for name, report in stages.items()
    }
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        json.dump(payload, handle, ensure_ascii=False, indent=2, sort_keys=True)
        handle.write("\n")


def _save(fig, path: str | Path) -> None:
    fig.savefig(path, dpi=_DPI, metadata=_PNG_META)
    plt.close(fig)


def plot_metric_by_topic(report: MetricReport, metric: str, path: str | Path) -> None:
    """Bar chart of one metric across topics, mean drawn as a horizontal line."""
    topics = sorted(report.per_topic)
    values = [report.per_topic[t][metric] for t in topics]
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.bar(range(len(topics)), values, color="#4878cf")
    ax.axhline(report.means[metric], color="#d65f5f", linewidth=1.2, label="mean")
    ax.set_xticks(range(len(topics)))
    ax.set_xticklabels(topics, rotation=90, fontsize=7)
    ax.set_ylabel(metric)
    ax.set_xlabel("topic")
    ax.set_ylim(0.0, 1.05)
    ax.legend(loc="upper right")
    fig.tight_layout()
    _save(fig, path)


def plot_stage_means(stages: Mapping[str, MetricReport], path: str | Path) -> None:
    """Grouped bars comparing mean metrics across pipeline stages."""
    names = sorted(stages)
    metrics = sorted({m for report in stages.values() for m in report.means})
    width = 0.8 / max(1, len(names))
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for i, name in enumerate(names):
        means = stages[name].means
        xs = [j + i * width for j in range(len(metrics))]
        ys = [means.get(m, 0.0) for m in metrics]
        ax.bar(xs, ys, width=width, label=name)
    ax.set_xticks([j + width * (len(names) - 1) / 2 for j in range(len(metrics))])
    ax.set_xticklabels(metrics, fontsize=8)
    ax.set_ylabel("mean value")
    ax.set_ylim(0.0, 1.05)
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def plot_candidate_comparison(
    table: Mapping[str, Mapping[str, float]],
    metrics: Sequence[str],
    path: str | Path,
) -> None:
    """Grouped bars comparing candidate runs (e.g. translators) on chosen metrics."""
    names = sorted(table)
    width = 0.8 / max(1, len(metrics))
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for i, metric in enumerate(metrics):
        xs = [j + i * width for j in range(len(names))]
        ys = [table[name].get(metric, 0.0) for name in names]
        ax.bar(xs, ys, width=width, label=metric)
    ax.set_xticks([j + width * (len(metrics) - 1) / 2 for j in range(len(names))])
    ax.set_xticklabels(names, fontsize=8)
    ax.set_ylabel("mean value")
    ax.set_ylim(0.0, 1.05)
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    _save(fig, path)
