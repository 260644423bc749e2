"""Relevance of sentences (and documents) to each sentiment-bearing topic.

A unit's unnormalized score for topic (l, z) is

    p(l, z | unit) * p(unit)

where p(l, z | unit) is the fraction of the unit's assignment mass on (l, z)
(each token contributes phi at its own assignment; the numerator keeps only
tokens assigned exactly (l, z)) and p(unit) sums, over all (l, z), the
product of phi_{l,z,w} across the unit's in-vocabulary tokens, computed in
log space.  Scores are normalized to sum to 1 within each topic; units with
no in-vocabulary tokens are excluded from every ranking.
"""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np
from scipy.special import logsumexp

from .corpus import Sentence, TaggedCorpus
from .errors import ValidationError
from .jst import JstModel, estimate_phi

logger = logging.getLogger(__name__)


class RelevanceTable:
    """Per-(l, z) descending ranking of (unit_id, normalized score) pairs."""

    def __init__(
        self,
        num_sentiments: int,
        num_topics: int,
        rankings: dict[tuple[int, int], list[tuple[int, float]]],
        unit: str = "sentence",
    ):
        self.num_sentiments = num_sentiments
        self.num_topics = num_topics
        self.unit = unit
        self.rankings = {
            (l, z): list(rankings.get((l, z), []))
            for l in range(num_sentiments)
            for z in range(num_topics)
        }
        self._scores = {key: dict(pairs) for key, pairs in self.rankings.items()}

    def rank_for(self, l: int, z: int) -> list[tuple[int, float]]:
        return self.rankings[(l, z)]

    def top_ids(self, l: int, z: int, k: int | None = None) -> list[int]:
        pairs = self.rankings[(l, z)]
        if k is not None:
            pairs = pairs[:k]
        return [unit_id for unit_id, _ in pairs]

    def score_of(self, l: int, z: int, unit_id: int) -> float:
        return self._scores[(l, z)].get(unit_id, 0.0)

    def topics(self):
        return sorted(self.rankings)

    def write(self, path) -> None:
        """Line format: l<TAB>z<TAB>unit_id<TAB>score, topics in (l, z) order."""
        lines = []
        for l, z in self.topics():
            for unit_id, score in self.rankings[(l, z)]:
                lines.append(f"{l}\t{z}\t{unit_id}\t{score!r}")
        Path(path).write_text("\n".join(lines) + "\n" if lines else "", encoding="utf-8")

    @classmethod
    def read(cls, path, num_sentiments: int, num_topics: int, unit: str = "sentence"):
        rankings: dict[tuple[int, int], list[tuple[int, float]]] = {}
        with open(path, encoding="utf-8") as fh:
            for line_no, raw in enumerate(fh, start=1):
                line = raw.rstrip("\n")
                if not line:
                    continue
                parts = line.split("\t")
                if len(parts) != 4:
                    raise ValidationError(f"{path}:{line_no}: expected 4 fields")
                try:
                    l, z, unit_id, score = int(parts[0]), int(parts[1]), int(parts[2]), float(parts[3])
                except ValueError as exc:
                    raise ValidationError(f"{path}:{line_no}: {exc}") from exc
                if not (0 <= l < num_sentiments and 0 <= z < num_topics):
                    raise ValidationError(f"{path}:{line_no}: topic ({l},{z}) out of range")
                rankings.setdefault((l, z), []).append((unit_id, score))
        table = cls(num_sentiments, num_topics, rankings, unit=unit)
        for key, pairs in table.rankings.items():
            if not pairs:
                continue
            scores = [s for _, s in pairs]
            if any(b > a for a, b in zip(scores, scores[1:])):
                raise ValidationError(f"{path}: ranking for {key} is not descending")
            if abs(sum(scores) - 1.0) > 1e-6:
                raise ValidationError(f"{path}: scores for {key} do not sum to 1")
        return table


def _log_phi(phi: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(phi)


def _model_phi(model: JstModel) -> np.ndarray:
    return model.phi if model.phi is not None else estimate_phi(model)


def p_lz_given_sent(sent: Sentence, l: int, z: int, model: JstModel) -> float:
    """Fraction of the sentence's assignment mass that sits on (l, z)."""
    sl = model.sentence_token_slice(sent.id)
    ws, ls, zs = model.token_word[sl], model.lab[sl], model.top[sl]
    if len(ws) == 0:
        return 0.0
    phi = _model_phi(model)
    vals = phi[ls, zs, ws]
    denom = vals.sum()
    if denom == 0.0:
        return 0.0
    return float(vals[(ls == l) & (zs == z)].sum() / denom)


def log_p_sent(sent: Sentence, model: JstModel) -> float:
    """log p(sent); -inf for sentences with no in-vocabulary token."""
    sl = model.sentence_token_slice(sent.id)
    ws = model.token_word[sl]
    if len(ws) == 0:
        return float("-inf")
    log_products = _log_phi(_model_phi(model))[:, :, ws].sum(axis=2)
    return float(logsumexp(log_products))


def p_sent(sent: Sentence, model: JstModel) -> float:
    """p(sent) = sum over (l, z) of the product of phi over the tokens."""
    lp = log_p_sent(sent, model)
    return 0.0 if lp == float("-inf") else float(np.exp(lp))


def _score_units(
    model: JstModel,
    unit_indices: list[np.ndarray],
    unit: str,
) -> RelevanceTable:
    S, T = model.num_sentiments, model.num_topics
    phi = _model_phi(model)
    log_phi = _log_phi(phi)
    per_topic: dict[tuple[int, int], list[tuple[int, float]]] = {
        (l, z): [] for l in range(S) for z in range(T)
    }
    for unit_id, idx in enumerate(unit_indices):
        if len(idx) == 0:
            continue
        ws, ls, zs = model.token_word[idx], model.lab[idx], model.top[idx]
        vals = phi[ls, zs, ws]
        denom = vals.sum()
        if denom == 0.0:
            continue
        mass = np.zeros((S, T))
        np.add.at(mass, (ls, zs), vals)
        lse = logsumexp(log_phi[:, :, ws].sum(axis=2))
        for l, z in zip(*np.nonzero(mass)):
            log_unnorm = np.log(mass[l, z] / denom) + lse
            per_topic[(int(l), int(z))].append((unit_id, log_unnorm))

    rankings = {}
    for key, entries in per_topic.items():
        if not entries:
            logger.warning("no %s touches topic %s; empty ranking", unit, key)
            rankings[key] = []
            continue
        logs = np.array([log_score for _, log_score in entries])
        norm = np.exp(logs - logsumexp(logs))
        ranked = sorted(
            ((unit_id, float(score)) for (unit_id, _), score in zip(entries, norm)),
            key=lambda pair: (-pair[1], pair[0]),
        )
        rankings[key] = ranked
    return RelevanceTable(S, T, rankings, unit=unit)


def _check_same_corpus(corpus: TaggedCorpus, model: JstModel) -> None:
    if corpus.fingerprint() != model.corpus_fingerprint:
        raise ValidationError(
            "corpus does not match the one the model was trained on "
            f"(fingerprint {corpus.fingerprint()[:12]} vs {model.corpus_fingerprint[:12]})"
        )


def score_sentences(corpus: TaggedCorpus, model: JstModel) -> RelevanceTable:
    """Rank every sentence for every (l, z); scores sum to 1 per topic."""
    _check_same_corpus(corpus, model)
    indices = [
        np.arange(model.sent_offsets[i], model.sent_offsets[i + 1])
        for i in range(len(model.sent_offsets) - 1)
    ]
    return _score_units(model, indices, unit="sentence")


def score_documents(corpus: TaggedCorpus, model: JstModel) -> RelevanceTable:
    """Same scoring with each document's token multiset as the unit."""
    _check_same_corpus(corpus, model)
    order = np.argsort(model.token_doc, kind="stable")
    bounds = np.searchsorted(model.token_doc[order], np.arange(model.num_documents + 1))
    indices = [order[bounds[d] : bounds[d + 1]] for d in range(model.num_documents)]
    return _score_units(model, indices, unit="document")
