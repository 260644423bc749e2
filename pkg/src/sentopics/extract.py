"""Extractive topic labels: relevance + aspect/sentiment co-coverage.

A candidate sentence s for topic t = (l, z) scores

    L(s|t) = alpha * Rel(s|t) + (1 - alpha) * Cov(s|t)

where Rel is the normalized relevance score and Cov is the harmonic mean of
the aspect mass A (sum of phi over the sentence's noun tokens that are among
the topic's top-n words) and the sentiment mass S (likewise for lexicon
words).  Rel and Cov live on very different scales, so by default both are
min-max rescaled to [0, 1] within the topic's candidate pool before mixing
(``rel_normalization``).  Also provides the top-prob and centroid baselines.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import (
    Sentence,
    SentimentLexicon,
    TaggedCorpus,
    is_aspect_word,
    is_sentiment_word,
)
from .errors import ValidationError
from .jst import JstModel, SentimentTopic, estimate_phi, top_words
from .relevance import RelevanceTable


@dataclass
class ExtractConfig:
    alpha: float = 0.4
    top_n: int = 15  # topic-word cutoff for co-coverage
    rel_normalization: bool = True
    candidate_limit: int | None = None  # optional truncation of the pool

    def validate(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise ValidationError("alpha must be in [0, 1]")
        if self.top_n < 1:
            raise ValidationError("top_n must be >= 1")
        if self.candidate_limit is not None and self.candidate_limit < 1:
            raise ValidationError("candidate_limit must be >= 1")


@dataclass(frozen=True)
class LabelScore:
    sentence_id: int
    rel: float
    aspect: float  # A(s|t)
    sentiment: float  # S(s|t)
    cov: float
    total: float


def coverage_scores(
    sent: Sentence,
    topic: SentimentTopic,
    model: JstModel,
    lexicon: SentimentLexicon,
    cfg: ExtractConfig,
) -> tuple[float, float, float]:
    """(A, S, Cov) for one sentence; Cov = 2AS/(A+S), 0 when A + S = 0."""
    top_set = set(top_words(model, topic.l, topic.z, cfg.top_n))
    phi = model.phi if model.phi is not None else estimate_phi(model)
    a = s = 0.0
    for token in sent.tokens:
        if token.vocab_id is None or token.lower not in top_set:
            continue
        weight = float(phi[topic.l, topic.z, token.vocab_id])
        if is_aspect_word(token):
            a += weight
        if is_sentiment_word(token, lexicon):
            s += weight
    cov = 2.0 * a * s / (a + s) if a + s > 0.0 else 0.0
    return a, s, cov


def label_score(
    sent: Sentence,
    topic: SentimentTopic,
    rel_table: RelevanceTable,
    model: JstModel,
    lexicon: SentimentLexicon,
    cfg: ExtractConfig,
) -> LabelScore:
    """Raw (un-rescaled) mixed score for one sentence.

    select_label applies the pool-level min-max rescaling; this standalone
    scorer mixes the raw Rel and Cov values directly.
    """
    rel = rel_table.score_of(topic.l, topic.z, sent.id)
    a, s, cov = coverage_scores(sent, topic, model, lexicon, cfg)
    total = cfg.alpha * rel + (1.0 - cfg.alpha) * cov
    return LabelScore(sent.id, rel, a, s, cov, total)


def _minmax(values: list[float]) -> list[float]:
    lo, hi = min(values), max(values)
    if hi <= lo:
        return [0.0] * len(values)
    return [(v - lo) / (hi - lo) for v in values]


def _token_key(sent: Sentence) -> tuple:
    return tuple((t.surface, t.pos) for t in sent.tokens)


def select_label(
    topic: SentimentTopic,
    corpus: TaggedCorpus,
    rel_table: RelevanceTable,
    model: JstModel,
    lexicon: SentimentLexicon,
    cfg: ExtractConfig,
) -> LabelScore | None:
    """Best-scoring candidate for the topic, or None when unlabellable.

    Exact duplicate sentences (identical token sequences) collapse to the
    lowest sentence id before the argmax; ties break by higher Rel, then by
    lower sentence id.
    """
    cfg.validate()
    pairs = rel_table.rank_for(topic.l, topic.z)
    if cfg.candidate_limit is not None:
        pairs = pairs[: cfg.candidate_limit]
    if not pairs:
        return None

    kept: dict[tuple, int] = {}
    for sentence_id, _ in pairs:
        key = _token_key(corpus.sentences[sentence_id])
        if key not in kept or sentence_id < kept[key]:
            kept[key] = sentence_id
    candidate_ids = sorted(kept.values())

    rels = [rel_table.score_of(topic.l, topic.z, sid) for sid in candidate_ids]
    triples = [
        coverage_scores(corpus.sentences[sid], topic, model, lexicon, cfg)
        for sid in candidate_ids
    ]
    covs = [cov for _, _, cov in triples]
    if cfg.rel_normalization:
        rels_mixed = _minmax(rels)
        covs_mixed = _minmax(covs)
    else:
        rels_mixed, covs_mixed = rels, covs

    best = None
    best_key = None
    for sid, rel, (a, s, _), cov in zip(candidate_ids, rels_mixed, triples, covs_mixed):
        total = cfg.alpha * rel + (1.0 - cfg.alpha) * cov
        key = (total, rel, -sid)
        if best_key is None or key > best_key:
            best_key = key
            best = LabelScore(sid, rel, a, s, cov, total)
    return best


def baseline_top_prob(topic: SentimentTopic, rel_table: RelevanceTable) -> int | None:
    """Head of the topic's relevance ranking."""
    pairs = rel_table.rank_for(topic.l, topic.z)
    return pairs[0][0] if pairs else None


def baseline_centroid(
    topic: SentimentTopic,
    rel_table: RelevanceTable,
    corpus: TaggedCorpus,
    k: int = 150,
) -> int | None:
    """Most central sentence (mean cosine over model-vocab term frequencies)
    among the topic's top-k most relevant sentences."""
    ids = rel_table.top_ids(topic.l, topic.z, k)
    if not ids:
        return None
    if len(ids) == 1:
        return ids[0]
    tf = np.zeros((len(ids), len(corpus.vocabulary)))
    for row, sentence_id in enumerate(ids):
        for vocab_id in corpus.sentences[sentence_id].vocab_ids():
            tf[row, vocab_id] += 1.0
    norms = np.linalg.norm(tf, axis=1)
    unit = tf / norms[:, None]
    sims = unit @ unit.T
    mean_other = (sims.sum(axis=1) - sims.diagonal()) / (len(ids) - 1)
    best_row = max(range(len(ids)), key=lambda r: (mean_other[r], -ids[r]))
    return ids[best_row]
