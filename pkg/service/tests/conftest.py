"""Shared fixtures for the scoring service tests."""

from __future__ import annotations

import contextlib
import os
import socket
import subprocess
import sys
import time
from pathlib import Path

import pytest
import requests
from fastapi.testclient import TestClient

from scoring_service import DEFAULT_MODEL, ServiceConfig, create_app

REPO_ROOT = Path(__file__).resolve().parents[2]
FIXTURES_DIR = REPO_ROOT / "fixtures"
CONFIGS_DIR = REPO_ROOT / "configs"


def pytest_runtest_logreport(report):
    """Print one status line per acceptance criterion."""
    if "test_acceptance.py" not in report.nodeid:
        return
    # Skips raised while building a fixture never reach the call phase.
    setup_skip = report.when == "setup" and report.skipped
    if report.when != "call" and not setup_skip:
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


def make_pairs(n: int, query: str = "q", text: str = "x") -> list[dict]:
    return [
        {"topic_id": f"t{i}", "doc_id": f"d{i}", "query": query, "text": text}
        for i in range(n)
    ]


def tagged_pairs(tags: list[int]) -> list[dict]:
    return [
        {"topic_id": f"t{i}", "doc_id": f"d{i}", "query": f"#{tag}", "text": "x"}
        for i, tag in enumerate(tags)
    ]


@pytest.fixture(scope="session")
def echo_client() -> TestClient:
    return TestClient(create_app(ServiceConfig(mode="echo")))


@pytest.fixture(scope="session")
def small_batch_client() -> TestClient:
    return TestClient(create_app(ServiceConfig(mode="echo", max_batch=8)))


@pytest.fixture(scope="session")
def model_scorer():
    """Real cross-encoder, or a skip when weights are not available."""
    from scoring_service.scoring import CrossEncoderScorer

    try:
        return CrossEncoderScorer(DEFAULT_MODEL, device="cpu")
    except Exception as exc:
        pytest.skip(f"cross-encoder weights unavailable: {exc}")


def free_port() -> int:
    with contextlib.closing(socket.socket()) as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


class LiveService:
    """A scoring service subprocess started through the real CLI."""

    def __init__(self, args: list[str]) -> None:
        self.port = free_port()
        self.endpoint = f"http://127.0.0.1:{self.port}"
        self.proc = subprocess.Popen(
            [sys.executable, "-m", "scoring_service", "--port", str(self.port), *args],
            stdout=subprocess.DEVNULL,
            stderr=subprocess.DEVNULL,
        )
        deadline = time.monotonic() + 30.0
        while True:
            try:
                resp = requests.get(f"{self.endpoint}/health", timeout=1.0)
                if resp.status_code == 200 and resp.json().get("status") == "ok":
                    return
            except requests.RequestException:
                pass
            if self.proc.poll() is not None:
                raise RuntimeError(f"service exited early with code {self.proc.returncode}")
            if time.monotonic() > deadline:
                self.stop()
                raise RuntimeError("service did not become healthy in 30s")
            time.sleep(0.05)

    def stop(self) -> None:
        self.proc.terminate()
        try:
            self.proc.wait(timeout=10)
        except subprocess.TimeoutExpired:
            self.proc.kill()
            self.proc.wait(timeout=10)


@pytest.fixture(scope="session")
def live_echo_service():
    service = LiveService(["--mode", "echo", "--max-batch", "64"])
    yield service
    service.stop()


@pytest.fixture()
def clirkit_cli() -> list[str]:
    """Command prefix for the retrieval toolkit CLI, or a skip if absent."""
    probe = subprocess.run([sys.executable, "-m", "clirkit.cli", "--help"], capture_output=True)
    if probe.returncode != 0:
        pytest.skip("the clirkit package is not installed")
    return [sys.executable, "-m", "clirkit.cli"]
