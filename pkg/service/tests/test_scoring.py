"""Scorer behavior: echo determinism and cross-encoder sanity."""

from __future__ import annotations

import pytest

from scoring_service.scoring import CrossEncoderScorer, EchoScorer, build_scorer


class TestEchoScorer:
    def test_positional_scores(self):
        scorer = EchoScorer()
        pairs = [("quick fox", "text a"), ("quick fox", "text b"), ("other", "text c")]
        assert scorer.score(pairs) == [0.0, -1.0, -2.0]

    def test_empty_input(self):
        assert EchoScorer().score([]) == []

    def test_tagged_query_overrides_position(self):
        scorer = EchoScorer()
        assert scorer.score([("#7", "x")]) == [-7.0]
        assert scorer.score([("#3", "x"), ("#1", "x"), ("#12", "x")]) == [-3.0, -1.0, -12.0]

    def test_tag_must_cover_whole_query(self):
        scorer = EchoScorer()
        # Anything beyond "#<digits>" falls back to positional scores.
        assert scorer.score([("#7 fox", "x")]) == [0.0]
        assert scorer.score([("fox #7", "x")]) == [0.0]
        assert scorer.score([("#7.5", "x")]) == [0.0]
        assert scorer.score([("#", "x")]) == [0.0]

    def test_leading_zeros_parse_as_integers(self):
        assert EchoScorer().score([("#007", "x")]) == [-7.0]

    def test_deterministic_across_calls(self):
        scorer = EchoScorer()
        pairs = [("a", "x"), ("#5", "y"), ("b", "z")]
        assert scorer.score(pairs) == scorer.score(pairs)

    def test_model_name(self):
        assert EchoScorer().model_name == "echo"


class TestBuildScorer:
    def test_echo_mode(self):
        scorer = build_scorer("echo", "anything", "cpu")
        assert isinstance(scorer, EchoScorer)

    def test_unknown_mode(self):
        with pytest.raises(ValueError, match="unknown mode"):
            build_scorer("proxy", "m", "cpu")

    def test_model_load_failure_is_runtime_error(self, monkeypatch):
        # Offline lookup of a nonexistent identifier fails fast and must
        # surface as RuntimeError so serve() can refuse to start.
        monkeypatch.setenv("HF_HUB_OFFLINE", "1")
        with pytest.raises(RuntimeError, match="cannot load cross-encoder"):
            CrossEncoderScorer("no-such/model-anywhere", device="cpu")


class TestCrossEncoderScorer:
    def test_sanity_probe_prefers_verbatim_match(self, model_scorer):
        # A query paired with text containing it verbatim must beat the
        # same query paired with unrelated text.
        query = "solar panel efficiency in cold climates"
        containing = "New data on solar panel efficiency in cold climates was published."
        unrelated = "The committee postponed the annual budget meeting until spring."
        scores = model_scorer.score([(query, containing), (query, unrelated)])
        assert len(scores) == 2
        assert scores[0] > scores[1]

    def test_scores_are_finite_floats(self, model_scorer):
        import math

        scores = model_scorer.score([("a query", "some text"), ("another", "more text")])
        assert all(isinstance(s, float) and math.isfinite(s) for s in scores)

    def test_model_name_reports_identifier(self, model_scorer):
        assert model_scorer.model_name
        assert model_scorer.model_name != "echo"
