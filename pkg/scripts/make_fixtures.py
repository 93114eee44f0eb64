"""Generate the bundled three-language regression fixture.

Builds, for each of fa/ru/zh, a ~200-document corpus with 12 shared topics,
graded judgments, and query variants of controlled translation quality, then
verifies the properties the test suite relies on before writing anything:

  * per language, one designated translator strictly wins mean nDCG@20;
  * judged-relevant "sleeper" documents share no vocabulary with any query,
    so recall at full depth is informative (< 1) and stable;
  * grade-0 "bait" documents are stuffed with query terms, so a first-stage
    ranking is visibly improvable: reranking by judged grade must raise mean
    nDCG@20 while leaving recall at full depth bit-identical.

Every topic has four language-exclusive core terms. A translator of quality
q renders the first q of them faithfully and garbles the rest into tokens
that occur nowhere in the corpus. Deterministic: fixed RNG seeds, canonical
writers.

Usage: python3 scripts/make_fixtures.py [--out fixtures]
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from clirkit.analysis import Analyzer
from clirkit.index import build_index
from clirkit.metrics import evaluate, select_translator
from clirkit.model import Document, Qrels, Topic, TopicFields
from clirkit.rerank import QrelsOracleScorer, RerankConfig, rerank
from clirkit.retrieval import search_topics
from clirkit.trecio import write_corpus, write_qrels, write_topics

N_TOPICS = 12
N_NOISE = 70
DEPTH = 1000

# quality = how many of the 4 core terms survive translation
QUALITY = {
    "fa": {"bing": 4, "facebook": 3, "huawei": 2, "ht": 4},
    "ru": {"bing": 4, "facebook": 2, "huawei": 3, "ht": 4},
    "zh": {"youdao": 4, "bing": 3, "caiyun": 2, "huawei": 1, "ht": 4},
}
WINNER = {"fa": "bing", "ru": "bing", "zh": "youdao"}

# Medium doc m_i is reachable through core slot i-1 alone, so every slot a
# translator garbles drops exactly one graded doc out of the core-matched
# block: translation quality strictly orders mean nDCG@20 by construction.
# Grades are uniform per role (strong 3, medium 1, sleeper 2, bait 0), so
# score reshuffles within a role never move the metric.
MEDIUM_GRADE = 1
SLEEPER_GRADE = 2
STRONG_TF = 4
BAIT_TF = 7

FA_CONS = "بپتثجچحخدذرزژسشصضطظعغفقکگلمنهی"
FA_VOWELS = "اوی"
RU_CONS = "бвгджзклмнпрстфхцчшщ"
RU_VOWELS = "аеиоуыэя"
EN_CONS = "bcdfghklmnprstvz"
EN_VOWELS = "aeiou"

_HAN = (
    "的一是在不了有大这中人上为个国我以要他时来用们生到作地于出就分对成会可主发年动"
    "同工也能下过子说产种面而方后多定行学法所民得经十三之进着等部度家电力里如水化高"
    "自二理起小物现实加量都两体制机当使点从业本去把性好应开它合还因由其些然前外天政"
    "四日那社义事平形相全表间样与关各重新线内数正心反你明看原又么利比或但质气第向道"
    "命此变条只没结解问意建月公无系军很情者最立代想已通并提直题党程展五果料象员革位"
    "入常文总次品式活设及管特件长求老头基资边流路级少图山统接知较将组见计别她手角期"
    "根论运农指几九区强放决西被干做必战先回则任取据处队南给色光门即保治北造百规热领"
)


def syllable_word(rng: random.Random, cons: str, vowels: str, syllables: int) -> str:
    return "".join(rng.choice(cons) + rng.choice(vowels) for _ in range(syllables))


class WordFactory:
    """Per-language pools of mutually exclusive word classes."""

    def __init__(self, lang: str, rng: random.Random):
        self.lang = lang
        self.rng = rng
        if lang == "zh":
            chars = list(dict.fromkeys(_HAN))
            assert len(chars) >= 170, len(chars)
            self._core_chars = chars[:60]
            self._filler_chars = chars[60:130]
            self._garble_chars = chars[130:170]
        self._seen: set[str] = set()
        self.core = [self._new("core", 2) for _ in range(N_TOPICS * 4)]
        # small pool = high document frequency = low idf: filler matches can
        # never outscore a core-term match
        self.query_filler = [self._new("filler", 2) for _ in range(8)]
        self.doc_filler = [self._new("filler", 2) for _ in range(150)]

    def _new(self, kind: str, syllables: int) -> str:
        while True:
            if self.lang == "zh":
                chars = {"core": self._core_chars, "filler": self._filler_chars,
                         "garble": self._garble_chars}[kind]
                word = self.rng.choice(chars) + self.rng.choice(chars)
            elif self.lang == "fa":
                word = syllable_word(self.rng, FA_CONS, FA_VOWELS, syllables)
            elif self.lang == "ru":
                word = syllable_word(self.rng, RU_CONS, RU_VOWELS, syllables)
            else:
                word = syllable_word(self.rng, EN_CONS, EN_VOWELS, syllables)
            if word not in self._seen:
                self._seen.add(word)
                return word

    def cores_for(self, topic: int) -> list[str]:
        return self.core[topic * 4 : topic * 4 + 4]

    def garble(self) -> str:
        # tokens that occur in no document: a garbled translation is pure loss
        return self._new("garble", 4)


def join_text(lang: str, words: list[str], core_set: set[str], rng: random.Random) -> str:
    if lang != "zh":
        return " ".join(words)
    out: list[str] = []
    prev = None
    for i, word in enumerate(words):
        if prev is not None:
            if i % 9 == 0:
                out.append("。")
            elif prev[-1] + word[0] in core_set:
                out.append("，")  # break runs that would forge a core bigram
        out.append(word)
        prev = word
    return "".join(out) + "。"


def make_language(lang: str, topics_acc: dict[int, dict]):
    rng = random.Random(f"{lang}-fixture-1")
    words = WordFactory(lang, rng)
    core_set = set(words.core)
    docs: list[Document] = []
    judgments: dict[tuple[str, str], int] = {}
    cores_by_topic: dict[str, list[str]] = {}

    def emit(doc_id: str, tokens: list[str], grade: int | None, topic_id: str | None):
        rng.shuffle(tokens)
        split = min(3, len(tokens) - 1)
        title = join_text(lang, tokens[:split], core_set, rng)
        body = join_text(lang, tokens[split:], core_set, rng)
        docs.append(Document(doc_id=doc_id, title=title, body=body, lang=lang))
        if grade is not None:
            judgments[(topic_id, doc_id)] = grade

    for t in range(N_TOPICS):
        topic_id = f"t{t + 1:02d}"
        cores = words.cores_for(t)
        cores_by_topic[topic_id] = cores
        desc_filler = rng.sample(words.query_filler, 3)
        # bait and strong docs carry the same two filler words and the same
        # length, so the bait's higher core tf puts it strictly on top under
        # every translation quality
        shared_filler = desc_filler[:2]
        for i in range(1, 4):  # strong: all cores, clearly relevant
            tokens = [c for c in cores for _ in range(STRONG_TF)]
            tokens += shared_filler
            tokens += [rng.choice(words.doc_filler) for _ in range(14)]
            emit(f"{lang}-{topic_id}-s{i}", tokens, 3, topic_id)
        for i in range(1, 5):  # medium: reachable through core slot i-1 alone
            tokens = [cores[i - 1]] * 2
            # a filler word from this topic's own description keeps the doc
            # retrievable (deep) even when a translator garbles its core slot
            tokens += [desc_filler[(i - 1) % 3]]
            tokens += [rng.choice(words.doc_filler) for _ in range(18)]
            emit(f"{lang}-{topic_id}-m{i}", tokens, MEDIUM_GRADE, topic_id)
        for i in range(1, 3):  # bait: judged irrelevant, stuffed with core terms
            tokens = [c for c in cores for _ in range(BAIT_TF)]
            tokens += shared_filler
            tokens += [rng.choice(words.doc_filler) for _ in range(2)]
            emit(f"{lang}-{topic_id}-x{i}", tokens, 0, topic_id)
        for i in range(1, 3):  # sleeper: relevant but shares no vocabulary with queries
            tokens = [rng.choice(words.doc_filler) for _ in range(20)]
            emit(f"{lang}-{topic_id}-u{i}", tokens, SLEEPER_GRADE, topic_id)

        # query variants of graded quality for this language; word-separated
        # so query tokens are exactly the intended terms
        for translator, quality in QUALITY[lang].items():
            rendered = [c if s < quality else words.garble() for s, c in enumerate(cores)]
            topics_acc.setdefault(t, {})[(lang, translator)] = TopicFields(
                title=" ".join(rendered[:2]),
                description=" ".join(rendered[2:] + desc_filler),
            )

    for i in range(1, N_NOISE + 1):
        tokens = [rng.choice(words.doc_filler) for _ in range(rng.randint(10, 30))]
        tokens += rng.sample(words.query_filler, rng.randint(1, 2))
        emit(f"{lang}-n{i:03d}", tokens, None, None)

    return docs, Qrels(judgments), cores_by_topic


def make_english_variants(topics_acc: dict[int, dict]):
    rng = random.Random("en-fixture-1")
    words = WordFactory("en", rng)
    for t in range(N_TOPICS):
        cores = words.cores_for(t)
        filler = rng.sample(words.query_filler, 3)
        topics_acc.setdefault(t, {})[("en", "original")] = TopicFields(
            title=" ".join(cores[:2]),
            description=" ".join(cores[2:] + filler),
        )


def verify(
    lang: str,
    docs: list[Document],
    topics: list[Topic],
    qrels: Qrels,
    cores_by_topic: dict[str, list[str]],
) -> list[str]:
    """Recompute every property the fixture promises; return report lines."""
    analyzer = Analyzer(lang=lang)
    index = build_index(docs, analyzer)
    lines = [f"{lang}: {index.n_docs} docs, vocabulary {index.vocabulary_size}"]

    by_id = {d.doc_id: d for d in docs}
    # core-term exclusivity: a topic's core terms occur only in its own judged docs
    for topic_id, cores in cores_by_topic.items():
        prefix = f"{lang}-{topic_id}-"
        for core in cores:
            assert analyzer.tokenize(core) == [core], (topic_id, core)
            for ordinal, _ in index.postings[core]:
                doc_id = index.doc_ids[ordinal]
                assert doc_id.startswith(prefix) and doc_id[len(prefix)] in "smx", (
                    f"core term {core!r} of {topic_id} leaked into {doc_id}"
                )

    runs = {}
    for translator in QUALITY[lang]:
        runs[translator] = search_topics(
            index, analyzer, topics, "title_and_description", lang, translator, k=DEPTH
        )
        assert len(runs[translator].topics) == N_TOPICS, translator
    table = {
        tr: evaluate(run, qrels, ("ndcg@20", "recall@1000")).means for tr, run in runs.items()
    }
    for tr in sorted(table):
        lines.append(
            f"  bm25 t+d {tr:<9} ndcg@20={table[tr]['ndcg@20']:.4f}"
            f" recall@1000={table[tr]['recall@1000']:.4f}"
        )
    winner = WINNER[lang]
    machine = [tr for tr in QUALITY[lang] if tr != "ht"]
    for a in machine:
        for b in machine:
            if QUALITY[lang][a] > QUALITY[lang][b]:
                assert table[a]["ndcg@20"] > table[b]["ndcg@20"] + 1e-6, (lang, a, b)
    assert select_translator(runs, qrels) == winner
    assert table["ht"]["ndcg@20"] == table[winner]["ndcg@20"]  # same retained terms
    assert 0.0 < table[winner]["recall@1000"] < 1.0
    # recall at full depth is translator-independent: garbled slots lose rank
    # positions, never reachability (query filler still matches every medium)
    for tr in machine:
        assert table[tr]["recall@1000"] == table[winner]["recall@1000"], (lang, tr)

    first = runs[winner]
    config = RerankConfig("description", lang, winner, depth=DEPTH)
    topics_map = {t.topic_id: t for t in topics}
    oracle = rerank(first, topics_map, by_id, QrelsOracleScorer(qrels), config)
    before = evaluate(first, qrels, ("ndcg@20", "recall@1000"))
    after = evaluate(oracle, qrels, ("ndcg@20", "recall@1000"))
    assert after.means["ndcg@20"] > before.means["ndcg@20"] + 1e-6
    for topic_id in before.per_topic:
        assert after.per_topic[topic_id]["recall@1000"] == before.per_topic[topic_id]["recall@1000"]
    lines.append(
        f"  oracle rerank ndcg@20 {before.means['ndcg@20']:.4f} -> {after.means['ndcg@20']:.4f},"
        f" recall@1000 {after.means['recall@1000']:.4f} (unchanged)"
    )
    return lines


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "fixtures"))
    args = parser.parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    topics_acc: dict[int, dict] = {}
    make_english_variants(topics_acc)
    per_lang = {}
    for lang in ("fa", "ru", "zh"):
        per_lang[lang] = make_language(lang, topics_acc)

    topics = [
        Topic(topic_id=f"t{t + 1:02d}", variants=dict(sorted(topics_acc[t].items())))
        for t in range(N_TOPICS)
    ]

    for lang, (docs, qrels, cores_by_topic) in per_lang.items():
        for line in verify(lang, docs, topics, qrels, cores_by_topic):
            print(line)
        write_corpus(docs, out / f"corpus.{lang}.jsonl")
        write_qrels(qrels, out / f"qrels.{lang}.txt")
    write_topics(topics, out / "topics.jsonl")
    print(f"fixture written to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
