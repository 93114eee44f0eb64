"""Language-aware text-to-token analysis, applied identically at index and query time.

fa/ru/en: NFKC-normalize, lowercase, split on anything that is not a letter,
digit, or combining mark (so whitespace, punctuation, and the Persian
zero-width non-joiner U+200C all separate tokens).

zh: contiguous Han runs emit overlapping character bigrams (a lone Han
character emits a unigram); non-Han spans fall back to the fa/ru/en rule.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass

from .model import check_lang


@dataclass(frozen=True)
class Analyzer:
    """Stateless tokenizer configuration for one language."""

    lang: str
    lowercase: bool = True
    normalization: str = "NFKC"

    def __post_init__(self):
        check_lang(self.lang)

    def tokenize(self, text: str) -> list[str]:
        return tokenize(self, text)


def _is_word_char(ch: str) -> bool:
    cat = unicodedata.category(ch)
    return cat[0] in ("L", "N", "M")


def _is_han(ch: str) -> bool:
    cp = ord(ch)
    return (
        0x4E00 <= cp <= 0x9FFF  # CJK Unified Ideographs
        or 0x3400 <= cp <= 0x4DBF  # Extension A
        or 0xF900 <= cp <= 0xFAFF  # Compatibility Ideographs
        or 0x20000 <= cp <= 0x2FA1F  # Extensions B..F + supplement
    )


def _split_words(text: str) -> list[str]:
    tokens: list[str] = []
    buf: list[str] = []
    for ch in text:
        if _is_word_char(ch):
            buf.append(ch)
        elif buf:
            tokens.append("".join(buf))
            buf.clear()
    if buf:
        tokens.append("".join(buf))
    return tokens


def _split_han_bigrams(text: str) -> list[str]:
    tokens: list[str] = []
    word: list[str] = []
    han: list[str] = []

    def flush_word():
        if word:
            tokens.append("".join(word))
            word.clear()

    def flush_han():
        if len(han) == 1:
            tokens.append(han[0])
        elif han:
            tokens.extend(han[i] + han[i + 1] for i in range(len(han) - 1))
        han.clear()

    for ch in text:
        if _is_han(ch):
            flush_word()
            han.append(ch)
        elif _is_word_char(ch):
            flush_han()
            word.append(ch)
        else:
            flush_word()
            flush_han()
    flush_word()
    flush_han()
    return tokens


def tokenize(analyzer: Analyzer, text: str) -> list[str]:
    """Tokenize `text` under `analyzer`. Deterministic; empty text yields []."""
    text = unicodedata.normalize(analyzer.normalization, text)
    if analyzer.lowercase:
        text = text.lower()
    if analyzer.lang == "zh":
        return _split_han_bigrams(text)
    return _split_words(text)
