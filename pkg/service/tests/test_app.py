"""Wire protocol conformance for /health and /score."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import pytest
import requests
from fastapi.testclient import TestClient

from scoring_service import ServiceConfig, create_app

from conftest import make_pairs, tagged_pairs


class TestHealth:
    def test_health_shape(self, echo_client):
        resp = echo_client.get("/health")
        assert resp.status_code == 200
        assert resp.json() == {"status": "ok", "model": "echo"}

    def test_health_is_get_only(self, echo_client):
        assert echo_client.post("/health").status_code == 405


class TestScoreEcho:
    def test_three_pairs_score_zero_minus_one_minus_two(self, echo_client):
        resp = echo_client.post("/score", json={"pairs": make_pairs(3)})
        assert resp.status_code == 200
        assert resp.json() == {"scores": [0.0, -1.0, -2.0]}

    def test_single_pair(self, echo_client):
        resp = echo_client.post("/score", json={"pairs": make_pairs(1)})
        assert resp.json()["scores"] == [0.0]

    def test_empty_batch(self, echo_client):
        resp = echo_client.post("/score", json={"pairs": []})
        assert resp.status_code == 200
        assert resp.json() == {"scores": []}

    def test_response_order_matches_request_order(self, echo_client):
        resp = echo_client.post("/score", json={"pairs": tagged_pairs([5, 3, 9, 1])})
        assert resp.json()["scores"] == [-5.0, -3.0, -9.0, -1.0]

    def test_response_has_only_scores_key(self, echo_client):
        resp = echo_client.post("/score", json={"pairs": make_pairs(2)})
        assert set(resp.json().keys()) == {"scores"}

    def test_utf8_text_round_trips(self, echo_client):
        pairs = [
            {"topic_id": "t1", "doc_id": "d1", "query": "气候 变化", "text": "全球 变暖 研究"},
            {"topic_id": "t2", "doc_id": "d2", "query": "تغییر اقلیم", "text": "گرمایش زمین"},
        ]
        resp = echo_client.post("/score", json={"pairs": pairs})
        assert resp.status_code == 200
        assert resp.json()["scores"] == [0.0, -1.0]

    def test_extra_pair_keys_are_ignored(self, echo_client):
        pairs = make_pairs(1)
        pairs[0]["rank"] = 4
        resp = echo_client.post("/score", json={"pairs": pairs})
        assert resp.status_code == 200

    def test_score_is_post_only(self, echo_client):
        assert echo_client.get("/score").status_code == 405


class TestStatelessness:
    def test_identical_requests_get_identical_responses(self, echo_client):
        body = {"pairs": make_pairs(5, query="repeat")}
        first = echo_client.post("/score", json=body)
        second = echo_client.post("/score", json=body)
        assert first.content == second.content

    def test_request_history_does_not_leak(self, echo_client):
        echo_client.post("/score", json={"pairs": make_pairs(7)})
        resp = echo_client.post("/score", json={"pairs": make_pairs(2)})
        assert resp.json()["scores"] == [0.0, -1.0]


class TestBadRequests:
    def test_non_json_body(self, echo_client):
        resp = echo_client.post(
            "/score", content=b"not json", headers={"content-type": "application/json"}
        )
        assert resp.status_code == 400
        assert resp.json()["error"]

    def test_json_but_not_object(self, echo_client):
        resp = echo_client.post("/score", json=[1, 2, 3])
        assert resp.status_code == 400

    def test_missing_pairs_key(self, echo_client):
        resp = echo_client.post("/score", json={"batch": []})
        assert resp.status_code == 400
        assert "pairs" in resp.json()["error"]

    def test_pairs_not_a_list(self, echo_client):
        resp = echo_client.post("/score", json={"pairs": "many"})
        assert resp.status_code == 400

    def test_null_pairs(self, echo_client):
        resp = echo_client.post("/score", json={"pairs": None})
        assert resp.status_code == 400

    def test_pair_missing_field(self, echo_client):
        pairs = [{"topic_id": "t1", "doc_id": "d1", "query": "q"}]
        resp = echo_client.post("/score", json={"pairs": pairs})
        assert resp.status_code == 400
        assert "text" in resp.json()["error"]

    def test_pair_field_with_wrong_type(self, echo_client):
        pairs = [{"topic_id": "t1", "doc_id": "d1", "query": 5, "text": "x"}]
        resp = echo_client.post("/score", json={"pairs": pairs})
        assert resp.status_code == 400

    def test_pair_not_an_object(self, echo_client):
        resp = echo_client.post("/score", json={"pairs": ["q"]})
        assert resp.status_code == 400

    def test_error_body_is_json_with_error_key(self, echo_client):
        resp = echo_client.post("/score", json={"pairs": 1})
        assert resp.status_code == 400
        body = resp.json()
        assert isinstance(body["error"], str) and body["error"]


class TestOversizedBatch:
    def test_batch_at_limit_is_accepted(self, small_batch_client):
        resp = small_batch_client.post("/score", json={"pairs": make_pairs(8)})
        assert resp.status_code == 200
        assert resp.json()["scores"] == [float(-i) for i in range(8)]

    def test_batch_over_limit_gets_413(self, small_batch_client):
        resp = small_batch_client.post("/score", json={"pairs": make_pairs(9)})
        assert resp.status_code == 413
        assert "max_batch" in resp.json()["error"]

    def test_oversized_batch_is_not_scored_partially(self, small_batch_client):
        resp = small_batch_client.post("/score", json={"pairs": make_pairs(20)})
        assert resp.status_code == 413
        assert "scores" not in resp.json()


class _BrokenScorer:
    model_name = "broken"

    def __init__(self, behavior: str) -> None:
        self.behavior = behavior

    def score(self, pairs):
        if self.behavior == "raise":
            raise RuntimeError("weights corrupted")
        if self.behavior == "short":
            return [0.0] * (len(pairs) - 1)
        return [float("nan")] * len(pairs)


class TestScorerFailure:
    @pytest.mark.parametrize("behavior", ["raise", "short", "nan"])
    def test_failure_maps_to_500(self, behavior):
        app = create_app(ServiceConfig(mode="echo"), scorer=_BrokenScorer(behavior))
        client = TestClient(app, raise_server_exceptions=False)
        resp = client.post("/score", json={"pairs": make_pairs(2)})
        assert resp.status_code == 500
        assert "scoring failed" in resp.json()["error"]

    def test_health_still_works_when_scoring_breaks(self):
        app = create_app(ServiceConfig(mode="echo"), scorer=_BrokenScorer("raise"))
        client = TestClient(app, raise_server_exceptions=False)
        assert client.get("/health").status_code == 200


class TestConcurrentRequests:
    def test_parallel_tagged_requests_stay_isolated(self, live_echo_service):
        endpoint = live_echo_service.endpoint

        def probe(tag: int) -> list[float]:
            body = {"pairs": tagged_pairs([tag, tag + 100])}
            resp = requests.post(f"{endpoint}/score", json=body, timeout=10)
            assert resp.status_code == 200
            return resp.json()["scores"]

        with ThreadPoolExecutor(max_workers=8) as pool:
            results = list(pool.map(probe, range(1, 17)))
        for tag, scores in zip(range(1, 17), results):
            assert scores == [-float(tag), -float(tag + 100)]
