"""Shared fixtures: bundled corpus loaders and a local echo scoring stub."""

from __future__ import annotations

import json
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest

from clirkit import (
    Analyzer,
    build_index,
    read_corpus,
    read_qrels,
    read_topics,
)

FIXTURES_DIR = Path(__file__).resolve().parent.parent / "fixtures"
CONFIGS_DIR = Path(__file__).resolve().parent.parent / "configs"

_TAG_RE = re.compile(r"#(\d+)\Z")


def pytest_runtest_logreport(report):
    """Print one status line per acceptance criterion."""
    if report.when != "call" or "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    label = name.removeprefix("test_criterion_").replace("_", " ")
    if report.passed:
        status = "PASS"
    elif report.skipped:
        status = "SKIP"
    else:
        status = "FAIL"
    print(f"\n[acceptance] {status}: {label}", flush=True)


class StubState:
    """Mutable knobs for the echo scoring stub, shared with the handler."""

    def __init__(self):
        self.lock = threading.Lock()
        self.reset()

    def reset(self):
        self.mode = "echo"
        self.fail_next = 0
        self.batch_sizes = []


class _StubHandler(BaseHTTPRequestHandler):
    state: StubState

    def log_message(self, fmt, *args):
        pass

    def _send_json(self, code: int, payload) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(code)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        if self.path != "/health":
            self._send_json(404, {"error": "not found"})
            return
        with self.state.lock:
            mode = self.state.mode
        if mode == "unhealthy":
            self._send_json(200, {"status": "down", "model": "echo-stub"})
        else:
            self._send_json(200, {"status": "ok", "model": "echo-stub"})

    def do_POST(self):
        if self.path != "/score":
            self._send_json(404, {"error": "not found"})
            return
        length = int(self.headers.get("Content-Length", "0"))
        payload = json.loads(self.rfile.read(length).decode("utf-8"))
        pairs = payload["pairs"]
        with self.state.lock:
            mode = self.state.mode
            self.state.batch_sizes.append(len(pairs))
            if self.state.fail_next > 0:
                self.state.fail_next -= 1
                self._send_json(503, {"error": "transient"})
                return
        if mode == "bad_request":
            self._send_json(400, {"error": "rejected"})
            return
        if mode == "empty":
            self._send_json(200, {"scores": []})
            return
        if mode == "not_json":
            body = b"not json at all"
            self.send_response(200)
            self.send_header("Content-Type", "text/plain")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)
            return
        if mode == "nan":
            self._send_json(200, {"scores": [float("nan")] * len(pairs)})
            return
        scores = []
        for i, pair in enumerate(pairs):
            match = _TAG_RE.match(pair.get("query", ""))
            if match:
                scores.append(-float(match.group(1)))
            else:
                scores.append(-float(i))
        self._send_json(200, {"scores": scores})


@pytest.fixture(scope="session")
def _stub_server():
    state = StubState()
    handler = type("Handler", (_StubHandler,), {"state": state})
    server = ThreadingHTTPServer(("127.0.0.1", 0), handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    endpoint = f"http://127.0.0.1:{server.server_address[1]}"
    yield endpoint, state
    server.shutdown()
    thread.join(timeout=5)


@pytest.fixture
def echo_server(_stub_server):
    """Echo scoring stub, state reset per test. Yields (endpoint, state)."""
    endpoint, state = _stub_server
    with state.lock:
        state.reset()
    return endpoint, state


@pytest.fixture(scope="session")
def fixture_topics():
    return read_topics(FIXTURES_DIR / "topics.jsonl")


@pytest.fixture(scope="session")
def fixture_topics_map(fixture_topics):
    return {t.topic_id: t for t in fixture_topics}


def _load_lang(lang: str):
    corpus = {d.doc_id: d for d in read_corpus(FIXTURES_DIR / f"corpus.{lang}.jsonl")}
    qrels = read_qrels(FIXTURES_DIR / f"qrels.{lang}.txt")
    return corpus, qrels


@pytest.fixture(scope="session")
def fa_data():
    return _load_lang("fa")


@pytest.fixture(scope="session")
def ru_data():
    return _load_lang("ru")


@pytest.fixture(scope="session")
def zh_data():
    return _load_lang("zh")


@pytest.fixture(scope="session")
def fa_index(fa_data):
    corpus, _ = fa_data
    return build_index(corpus.values(), Analyzer(lang="fa"))


@pytest.fixture(scope="session")
def zh_index(zh_data):
    corpus, _ = zh_data
    return build_index(corpus.values(), Analyzer(lang="zh"))
