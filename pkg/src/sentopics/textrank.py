"""Word salience and keyphrases from a sentence co-occurrence graph.

Lexical units are (lowercase word, POS) pairs of non-stopword adjective,
noun, and verb tokens.  Two units are connected (undirected) once per
sentence in which they co-occur; damped power iteration over that graph
yields salience scores that sum to 1.  Keyphrase candidates are the maximal
contiguous adjective*-noun+ runs of eligible tokens, scored by their units'
summed salience normalized by length + 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .corpus import Sentence, StopwordList, Token, is_punctuation

_UNIT_POS_PREFIXES = ("JJ", "NN", "VB")
_PHRASE_POS_PREFIXES = ("JJ", "NN")

Unit = tuple[str, str]  # (lower, pos)


@dataclass(frozen=True)
class Keyphrase:
    words: tuple[str, ...]
    pos_tags: tuple[str, ...]
    score: float


def is_salience_unit(token: Token, stopwords: StopwordList) -> bool:
    return (
        not is_punctuation(token)
        and token.lower not in stopwords
        and token.pos.startswith(_UNIT_POS_PREFIXES)
    )


def power_iteration_ranks(
    weights: np.ndarray,
    damping: float = 0.85,
    tol: float = 1e-6,
    max_iter: int = 100,
) -> np.ndarray:
    """Damped PageRank over a weighted adjacency matrix; scores sum to 1.

    Nodes with no outgoing weight spread their mass uniformly.
    """
    n = weights.shape[0]
    if n == 0:
        return np.zeros(0)
    out = weights.sum(axis=1)
    dangling = out == 0.0
    transition = np.divide(
        weights.T, out, where=out > 0.0, out=np.zeros_like(weights, dtype=float)
    )
    scores = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        new = damping * (transition @ scores + scores[dangling].sum() / n) + (1.0 - damping) / n
        if np.abs(new - scores).sum() < tol:
            return new
        scores = new
    return scores


def cooccurrence_graph(
    cluster: Sequence[Sentence], stopwords: StopwordList
) -> tuple[list[Unit], np.ndarray]:
    """Eligible units (first-appearance order) and their co-occurrence counts."""
    units: dict[Unit, int] = {}
    for sent in cluster:
        for token in sent.tokens:
            if is_salience_unit(token, stopwords):
                units.setdefault((token.lower, token.pos), len(units))
    weights = np.zeros((len(units), len(units)))
    for sent in cluster:
        present = sorted(
            {
                units[(t.lower, t.pos)]
                for t in sent.tokens
                if is_salience_unit(t, stopwords)
            }
        )
        for i, j in combinations(present, 2):
            weights[i, j] += 1.0
            weights[j, i] += 1.0
    return list(units), weights


def textrank_scores(
    cluster: Sequence[Sentence],
    stopwords: StopwordList,
    *,
    damping: float = 0.85,
    tol: float = 1e-6,
    max_iter: int = 100,
) -> dict[Unit, float]:
    units, weights = cooccurrence_graph(cluster, stopwords)
    ranks = power_iteration_ranks(weights, damping=damping, tol=tol, max_iter=max_iter)
    return {unit: float(score) for unit, score in zip(units, ranks)}


def _phrase_runs(sent: Sentence, stopwords: StopwordList) -> Iterable[list[Token]]:
    """Maximal runs of contiguous non-stopword adjective/noun tokens."""
    run: list[Token] = []
    for token in sent.tokens:
        eligible = (
            not is_punctuation(token)
            and token.lower not in stopwords
            and token.pos.startswith(_PHRASE_POS_PREFIXES)
        )
        if eligible:
            run.append(token)
        elif run:
            yield run
            run = []
    if run:
        yield run


def _phrases_in_run(run: list[Token]) -> Iterable[list[Token]]:
    """Maximal adjective*-noun+ subsequences of one eligible run."""
    i = 0
    while i < len(run):
        j = i
        while j < len(run) and run[j].pos.startswith("JJ"):
            j += 1
        if j < len(run) and run[j].pos.startswith("NN"):
            while j < len(run) and run[j].pos.startswith("NN"):
                j += 1
            yield run[i:j]
        i = max(j, i + 1)


def extract_keyphrases(
    cluster: Sequence[Sentence],
    stopwords: StopwordList,
    *,
    scores: dict[Unit, float] | None = None,
    damping: float = 0.85,
    tol: float = 1e-6,
    max_iter: int = 100,
) -> list[Keyphrase]:
    """Deduplicated adjective*-noun+ phrases scored by summed unit salience
    over length + 1, sorted by descending score then word sequence."""
    if scores is None:
        scores = textrank_scores(
            cluster, stopwords, damping=damping, tol=tol, max_iter=max_iter
        )
    seen: dict[tuple[Unit, ...], Keyphrase] = {}
    for sent in cluster:
        for run in _phrase_runs(sent, stopwords):
            for phrase in _phrases_in_run(run):
                key = tuple((t.lower, t.pos) for t in phrase)
                if key in seen:
                    continue
                total = sum(scores.get(unit, 0.0) for unit in key)
                seen[key] = Keyphrase(
                    words=tuple(t.lower for t in phrase),
                    pos_tags=tuple(t.pos for t in phrase),
                    score=total / (len(phrase) + 1),
                )
    return sorted(seen.values(), key=lambda k: (-k.score, k.words, k.pos_tags))
