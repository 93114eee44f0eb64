"""Acceptance gate for the scoring service.

Each test is one adoption criterion, exercised against the protocol
surface: echo scores by position, batch-split transparency, and an
end-to-end rerank of the bundled fixture by the retrieval toolkit
talking to a live service over HTTP.
"""

from __future__ import annotations

import os
import subprocess
from collections import Counter
from pathlib import Path

import pytest
import requests
from fastapi.testclient import TestClient

from scoring_service import ServiceConfig, create_app

from conftest import CONFIGS_DIR, REPO_ROOT, make_pairs, tagged_pairs


def test_criterion_echo_scores_negative_position_in_order(live_echo_service):
    """Echo mode returns -i for pair i, in request order, over real HTTP."""
    endpoint = live_echo_service.endpoint
    resp = requests.post(f"{endpoint}/score", json={"pairs": make_pairs(3)}, timeout=10)
    assert resp.status_code == 200
    assert resp.json() == {"scores": [0.0, -1.0, -2.0]}

    resp = requests.post(f"{endpoint}/score", json={"pairs": make_pairs(5)}, timeout=10)
    assert resp.json()["scores"] == [0.0, -1.0, -2.0, -3.0, -4.0]

    health = requests.get(f"{endpoint}/health", timeout=10).json()
    assert health == {"status": "ok", "model": "echo"}


def test_criterion_batch_split_transparency_exact_in_echo_mode(live_echo_service):
    """Splitting a batch across requests changes nothing in echo mode.

    Tagged probe queries pin each pair's score independently of its
    position in a request, so any split must reproduce the one-shot
    scores exactly.
    """
    endpoint = live_echo_service.endpoint
    tags = [31, 4, 15, 9, 2, 65, 35, 8, 97, 93, 23, 84]
    pairs = tagged_pairs(tags)

    def score(batch: list[dict]) -> list[float]:
        resp = requests.post(f"{endpoint}/score", json={"pairs": batch}, timeout=10)
        assert resp.status_code == 200
        return resp.json()["scores"]

    whole = score(pairs)
    assert whole == [-float(tag) for tag in tags]
    for size in (1, 2, 3, 4, 5, 12):
        split: list[float] = []
        for start in range(0, len(pairs), size):
            split.extend(score(pairs[start : start + size]))
        assert split == whole, f"split at size {size} changed echo scores"


def test_criterion_batch_split_transparency_in_model_mode(model_scorer):
    """Model-mode scores drift at most 1e-5 under client-side batch splits."""
    client = TestClient(create_app(ServiceConfig(mode="model"), scorer=model_scorer))
    queries = [
        "solar panel efficiency",
        "marathon training plan",
        "volcanic eruption warning signs",
        "ancient trade routes",
    ]
    texts = [
        "Engineers measured solar panel efficiency across winter months.",
        "A beginner marathon training plan builds distance gradually.",
        "Seismometers pick up warning signs before a volcanic eruption.",
        "Caravans followed ancient trade routes across the steppe.",
        "The recipe calls for two cups of flour and a pinch of salt.",
        "Quarterly earnings beat expectations across the retail sector.",
        "The museum restored a collection of medieval manuscripts.",
        "Night trains connect the capital with three coastal towns.",
    ]
    pairs = [
        {"topic_id": f"t{i}", "doc_id": f"d{i}", "query": queries[i % 4], "text": texts[i]}
        for i in range(8)
    ]

    def score(batch: list[dict]) -> list[float]:
        resp = client.post("/score", json={"pairs": batch})
        assert resp.status_code == 200
        return resp.json()["scores"]

    whole = score(pairs)
    assert len(whole) == 8
    for size in (3, 4):
        split: list[float] = []
        for start in range(0, len(pairs), size):
            split.extend(score(pairs[start : start + size]))
        drift = max(abs(a - b) for a, b in zip(split, whole))
        assert drift <= 1e-5, f"split at size {size} drifted by {drift}"


def _read_run_file(path: Path) -> dict[str, list[tuple[str, int, float, str]]]:
    by_topic: dict[str, list[tuple[str, int, float, str]]] = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        topic_id, q0, doc_id, rank, score, tag = line.split()
        assert q0 == "Q0"
        by_topic.setdefault(topic_id, []).append((doc_id, int(rank), float(score), tag))
    return by_topic


def test_criterion_end_to_end_pipeline_over_live_service(live_echo_service, clirkit_cli, tmp_path):
    """The full pipeline reranks the fixture through the live service.

    The toolkit runs as a subprocess and reaches the service only over
    HTTP, so this also checks that the two packages meet solely at the
    wire protocol.
    """
    sources = list((Path(__file__).resolve().parents[1] / "src").rglob("*.py"))
    assert sources, "service sources not found"
    for source in sources:
        assert "clirkit" not in source.read_text(encoding="utf-8"), f"{source} imports the client"

    out_dir = tmp_path / "out"
    env = {**os.environ, "CLIR_SCORER_ENDPOINT": live_echo_service.endpoint}
    proc = subprocess.run(
        [*clirkit_cli, "pipeline", "--config", str(CONFIGS_DIR / "zh.json"),
         "--output", str(out_dir)],
        capture_output=True,
        text=True,
        env=env,
        cwd=REPO_ROOT,
    )
    assert proc.returncode == 0, f"pipeline failed:\n{proc.stdout}\n{proc.stderr}"

    first = _read_run_file(out_dir / "first_stage.run")
    reranked = _read_run_file(out_dir / "reranked.run")
    assert set(reranked) == set(first) and len(reranked) >= 10

    for topic_id, entries in reranked.items():
        docs = [doc_id for doc_id, _, _, _ in entries]
        ranks = [rank for _, rank, _, _ in entries]
        scores = [score for _, _, score, _ in entries]
        assert ranks == list(range(1, len(entries) + 1))
        assert all(a >= b for a, b in zip(scores, scores[1:]))
        assert len(set(docs)) == len(docs)
        stage_docs = [doc_id for doc_id, _, _, _ in first[topic_id]]
        assert Counter(docs) == Counter(stage_docs), f"topic {topic_id} multiset changed"

    tags = {tag for entries in reranked.values() for _, _, _, tag in entries}
    assert len(tags) == 1

    for name in ("report.tsv", "summary.json"):
        assert (out_dir / name).is_file(), f"missing {name}"
    assert list((out_dir / "figures").glob("*.png")), "no figures rendered"

    rerun_dir = tmp_path / "out2"
    proc = subprocess.run(
        [*clirkit_cli, "pipeline", "--config", str(CONFIGS_DIR / "zh.json"),
         "--output", str(rerun_dir)],
        capture_output=True,
        text=True,
        env=env,
        cwd=REPO_ROOT,
    )
    assert proc.returncode == 0
    assert (rerun_dir / "reranked.run").read_bytes() == (out_dir / "reranked.run").read_bytes()
