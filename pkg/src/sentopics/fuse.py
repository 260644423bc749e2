"""Abstractive topic labels by word-graph multi-sentence compression.

The cluster's sentences are folded into one directed graph whose nodes are
(lowercase word, POS) classes.  The first sentence enters verbatim as a
start-to-end chain; each later sentence maps its tokens in three stages:

  (i)   content words (non-stopword, non-punctuation) that occur once in the
        sentence and have at most one available candidate node: mapped to
        that node, or to a fresh node when none exists;
  (ii)  remaining content words: mapped to the available candidate with the
        best (immediate-context matches, frequency, lowest id) key, or to a
        fresh node when no candidate is available;
  (iii) stopwords and punctuation: mapped like stage (ii) but only when at
        least one immediate-context edge matches, else a fresh node.

A candidate node is available when no token of the current sentence is
already mapped to it (at most one token per sentence per node).  Immediate
context counts existing graph edges between the candidate and the nodes the
token's neighbors are mapped to (the virtual start/end nodes for sentence
boundaries).  Edge weights follow the coherence form

    w(i, j) = coherence(i, j) / (freq(i) * freq(j))
    coherence(i, j) = (freq(i) + freq(j)) / sum_s 1 / (offset_s(j) - offset_s(i))

summing over sentences where i precedes j; lower weight = stronger edge.
Candidate compressions are the k_max cheapest simple start-to-end paths,
filtered to those with >= 8 non-punctuation words, a verb node, and a top-15
topic word.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import islice
from typing import Iterable, Sequence

import networkx as nx

from .corpus import Sentence, StopwordList, TaggedCorpus, is_punctuation, join_words
from .errors import ValidationError
from .jst import JstModel, SentimentTopic, top_words
from .relevance import RelevanceTable
from .textrank import Keyphrase, extract_keyphrases

START_WORD = "<start>"
END_WORD = "<end>"
FUSION_METHODS = ("pathgraph", "keyphrase")


class GraphNode:
    __slots__ = ("id", "lower", "pos", "is_punct", "occurrences")

    def __init__(self, node_id: int, lower: str, pos: str, is_punct: bool):
        self.id = node_id
        self.lower = lower
        self.pos = pos
        self.is_punct = is_punct
        self.occurrences: dict[int, int] = {}  # sentence index -> token offset

    @property
    def freq(self) -> int:
        return len(self.occurrences)

    def __repr__(self):
        return f"GraphNode({self.id}, {self.lower}/{self.pos}, freq={self.freq})"


class WordGraph:
    """Directed word graph over a sentence cluster, with start/end nodes."""

    def __init__(self):
        self.nodes: list[GraphNode] = []
        self.succ: dict[int, set[int]] = {}
        self.weights: dict[tuple[int, int], float] = {}
        self.sentence_paths: list[list[int]] = []
        self.candidates: dict[tuple[str, str], list[int]] = {}
        self.start_id = self.add_node(START_WORD, START_WORD, register=False).id
        self.end_id = self.add_node(END_WORD, END_WORD, register=False).id

    def add_node(self, lower: str, pos: str, is_punct: bool = False, register: bool = True) -> GraphNode:
        node = GraphNode(len(self.nodes), lower, pos, is_punct)
        self.nodes.append(node)
        self.succ[node.id] = set()
        if register:
            self.candidates.setdefault((lower, pos), []).append(node.id)
        return node

    def add_edge(self, i: int, j: int, weight: float | None = None) -> None:
        self.succ[i].add(j)
        if weight is not None:
            self.weights[(i, j)] = weight

    def has_edge(self, i: int, j: int) -> bool:
        return j in self.succ.get(i, ())

    def is_special(self, node_id: int) -> bool:
        return node_id in (self.start_id, self.end_id)

    def total_token_freq(self) -> int:
        """Sum of node frequencies over non-special nodes."""
        return sum(n.freq for n in self.nodes if not self.is_special(n.id))

    def reconstruct_sentence(self, sentence_index: int) -> list[str]:
        """Lowercase word sequence read back off the sentence's node path."""
        path = self.sentence_paths[sentence_index]
        return [self.nodes[i].lower for i in path[1:-1]]

    def finalize(self) -> None:
        """Compute coherence weights for every adjacency; prune non-realizable
        edges (no sentence orders the pair forward)."""
        for i, succs in self.succ.items():
            for j in succs:
                if (i, j) in self.weights:
                    continue
                w = edge_weight(self, i, j)
                if math.isfinite(w):
                    self.weights[(i, j)] = w

    def dump(self, path) -> None:
        """Trivial Graph Format: `id word/POS freq` lines, `#`, then edges."""
        lines = [f"{n.id} {n.lower}/{n.pos} {n.freq}" for n in self.nodes]
        lines.append("#")
        for (i, j), w in sorted(self.weights.items()):
            lines.append(f"{i} {j} {w!r}")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")


def _available(graph: WordGraph, key: tuple[str, str], s_idx: int) -> list[int]:
    return [
        node_id
        for node_id in graph.candidates.get(key, [])
        if s_idx not in graph.nodes[node_id].occurrences
    ]


def _context_matches(
    graph: WordGraph,
    candidate: int,
    mapping: list[int | None],
    position: int,
) -> int:
    """Number of immediate neighbors whose mapped node already links to the
    candidate in the right direction (start/end stand in at the borders)."""
    left = graph.start_id if position == 0 else mapping[position - 1]
    right = graph.end_id if position == len(mapping) - 1 else mapping[position + 1]
    score = 0
    if left is not None and graph.has_edge(left, candidate):
        score += 1
    if right is not None and graph.has_edge(candidate, right):
        score += 1
    return score


def _best_candidate(
    graph: WordGraph,
    available: list[int],
    mapping: list[int | None],
    position: int,
) -> tuple[int, int]:
    """(node id, context score) of the preferred candidate."""
    best = min(
        available,
        key=lambda c: (
            -_context_matches(graph, c, mapping, position),
            -graph.nodes[c].freq,
            c,
        ),
    )
    return best, _context_matches(graph, best, mapping, position)


def _map_sentence(graph: WordGraph, sent: Sentence, s_idx: int, stopwords: StopwordList) -> list[int]:
    tokens = sent.tokens
    keys = [(t.lower, t.pos) for t in tokens]
    sentence_counts: dict[tuple[str, str], int] = {}
    for key in keys:
        sentence_counts[key] = sentence_counts.get(key, 0) + 1
    mapping: list[int | None] = [None] * len(tokens)

    def settle(position: int, node_id: int) -> None:
        mapping[position] = node_id
        graph.nodes[node_id].occurrences[s_idx] = position

    if s_idx == 0:
        for pos_idx, token in enumerate(tokens):
            settle(pos_idx, graph.add_node(token.lower, token.pos, is_punctuation(token)).id)
        return [m for m in mapping if m is not None]

    # stage (i): unambiguous content words
    for pos_idx, token in enumerate(tokens):
        if is_punctuation(token) or token.lower in stopwords:
            continue
        if sentence_counts[keys[pos_idx]] > 1:
            continue
        available = _available(graph, keys[pos_idx], s_idx)
        if not available:
            settle(pos_idx, graph.add_node(token.lower, token.pos, False).id)
        elif len(available) == 1:
            settle(pos_idx, available[0])
        # several candidates: deferred to stage (ii)

    # stage (ii): ambiguous content words, left to right
    for pos_idx, token in enumerate(tokens):
        if is_punctuation(token) or token.lower in stopwords or mapping[pos_idx] is not None:
            continue
        available = _available(graph, keys[pos_idx], s_idx)
        if not available:
            settle(pos_idx, graph.add_node(token.lower, token.pos, False).id)
        else:
            node_id, _ = _best_candidate(graph, available, mapping, pos_idx)
            settle(pos_idx, node_id)

    # stage (iii): stopwords and punctuation need a context match to merge
    for pos_idx, token in enumerate(tokens):
        if mapping[pos_idx] is not None:
            continue
        available = _available(graph, keys[pos_idx], s_idx)
        node_id = None
        if available:
            best, context = _best_candidate(graph, available, mapping, pos_idx)
            if context >= 1:
                node_id = best
        if node_id is None:
            node_id = graph.add_node(token.lower, token.pos, is_punctuation(token)).id
        settle(pos_idx, node_id)

    return [m for m in mapping if m is not None]


def build_word_graph(cluster: Sequence[Sentence], stopwords: StopwordList) -> WordGraph:
    """Fold the cluster into one word graph and compute edge weights."""
    if not cluster:
        raise ValidationError("empty sentence cluster")
    graph = WordGraph()
    start, end = graph.nodes[graph.start_id], graph.nodes[graph.end_id]
    for s_idx, sent in enumerate(cluster):
        if any(not t.pos for t in sent.tokens):
            raise ValidationError(f"sentence {sent.id} has tokens without POS tags")
        inner = _map_sentence(graph, sent, s_idx, stopwords)
        start.occurrences[s_idx] = -1
        end.occurrences[s_idx] = len(sent.tokens)
        path = [graph.start_id] + inner + [graph.end_id]
        for i, j in zip(path, path[1:]):
            graph.add_edge(i, j)
        graph.sentence_paths.append(path)
    graph.finalize()
    return graph


def edge_weight(graph: WordGraph, i: int, j: int) -> float:
    """Eq. coherence/(freq*freq) weight; +inf when no sentence realizes i->j."""
    node_i, node_j = graph.nodes[i], graph.nodes[j]
    inv_dist = 0.0
    for s_idx, off_i in node_i.occurrences.items():
        off_j = node_j.occurrences.get(s_idx)
        if off_j is not None and off_j > off_i:
            inv_dist += 1.0 / (off_j - off_i)
    if inv_dist == 0.0:
        return math.inf
    coherence = (node_i.freq + node_j.freq) / inv_dist
    return coherence / (node_i.freq * node_j.freq)


@dataclass
class CompressionCandidate:
    node_ids: tuple[int, ...]  # full start..end node path
    words: tuple[str, ...]  # inner nodes' lowercase words
    pos_tags: tuple[str, ...]
    punct_flags: tuple[bool, ...]
    raw_weight: float  # sum of edge weights along the path
    length: int  # non-punctuation word count
    rerank_score: float | None = None


def _candidate_from_path(graph: WordGraph, path: list[int]) -> CompressionCandidate:
    inner = [graph.nodes[i] for i in path[1:-1]]
    return CompressionCandidate(
        node_ids=tuple(path),
        words=tuple(n.lower for n in inner),
        pos_tags=tuple(n.pos for n in inner),
        punct_flags=tuple(n.is_punct for n in inner),
        raw_weight=sum(graph.weights[(i, j)] for i, j in zip(path, path[1:])),
        length=sum(1 for n in inner if not n.is_punct),
    )


def passes_constraints(
    candidate: CompressionCandidate,
    topic_word_set: set[str] | None,
    *,
    min_words: int = 8,
    require_verb: bool = True,
) -> bool:
    """Length, verb, and topic-word filters; punctuation never counts."""
    if candidate.length < min_words:
        return False
    content = [
        (w, p)
        for w, p, punct in zip(candidate.words, candidate.pos_tags, candidate.punct_flags)
        if not punct
    ]
    if require_verb and not any(p.startswith("VB") for _, p in content):
        return False
    if topic_word_set is not None and not any(w in topic_word_set for w, _ in content):
        return False
    return True


def enumerate_paths(
    graph: WordGraph,
    k_max: int,
    topic_word_set: set[str] | None,
    *,
    min_words: int = 8,
    require_verb: bool = True,
) -> list[CompressionCandidate]:
    """The k_max cheapest simple start-to-end paths that pass the filters."""
    digraph = nx.DiGraph()
    digraph.add_nodes_from([graph.start_id, graph.end_id])
    for (i, j), w in graph.weights.items():
        digraph.add_edge(i, j, weight=w)
    try:
        paths = list(
            islice(
                nx.shortest_simple_paths(digraph, graph.start_id, graph.end_id, weight="weight"),
                k_max,
            )
        )
    except (nx.NetworkXNoPath, nx.NodeNotFound):
        return []
    candidates = [_candidate_from_path(graph, path) for path in paths]
    return [
        c
        for c in candidates
        if passes_constraints(c, topic_word_set, min_words=min_words, require_verb=require_verb)
    ]


def rank_pathgraph(candidates: Sequence[CompressionCandidate]) -> CompressionCandidate:
    """Cheapest weight-per-word path; ties prefer shorter, then lexicographic."""
    if not candidates:
        raise ValidationError("no candidates to rank")
    best = min(candidates, key=lambda c: (c.raw_weight / c.length, c.length, c.words))
    best.rerank_score = best.raw_weight / best.length
    return best


def rank_keyphrase(
    candidates: Sequence[CompressionCandidate], keyphrases: Sequence[Keyphrase]
) -> CompressionCandidate:
    """Weight over (length * contained-keyphrase-score sum), minimized.

    A candidate containing no keyphrase is penalized with a sentinel
    denominator of one tenth of the smallest positive keyphrase score (1.0
    when there are no positive keyphrases at all).
    """
    if not candidates:
        raise ValidationError("no candidates to rank")
    positive = [k.score for k in keyphrases if k.score > 0.0]
    sentinel = 0.1 * min(positive) if positive else 1.0

    def contains(candidate: CompressionCandidate, phrase: Keyphrase) -> bool:
        words, needle = candidate.words, phrase.words
        return any(
            words[i : i + len(needle)] == needle
            for i in range(len(words) - len(needle) + 1)
        )

    def score(candidate: CompressionCandidate) -> float:
        ksum = sum(k.score for k in keyphrases if contains(candidate, k))
        if ksum <= 0.0:
            ksum = sentinel
        return candidate.raw_weight / (candidate.length * ksum)

    best = min(candidates, key=lambda c: (score(c), c.length, c.words))
    best.rerank_score = score(best)
    return best


@dataclass
class FusionResult:
    label: str | None  # None = no surviving path; caller should fall back
    candidate: CompressionCandidate | None
    cluster_ids: list[int] = field(default_factory=list)
    num_candidates: int = 0


def render_path(candidate: CompressionCandidate) -> str:
    """Lowercase surface string with punctuation attached to the previous word."""
    return join_words(candidate.words, candidate.punct_flags)


def label_abstractive(
    topic: SentimentTopic,
    rel_table: RelevanceTable,
    corpus: TaggedCorpus,
    model: JstModel,
    stopwords: StopwordList,
    *,
    method: str = "pathgraph",
    cluster_size: int = 150,
    k_max: int = 100,
    top_n: int = 15,
    min_words: int = 8,
) -> FusionResult:
    """Fuse the topic's most relevant sentences into one label sentence."""
    if method not in FUSION_METHODS:
        raise ValidationError(f"unknown fusion method {method!r}")
    cluster_ids = rel_table.top_ids(topic.l, topic.z, cluster_size)
    if not cluster_ids:
        return FusionResult(None, None, [])
    cluster = [corpus.sentences[sentence_id] for sentence_id in cluster_ids]
    graph = build_word_graph(cluster, stopwords)
    topic_word_set = set(top_words(model, topic.l, topic.z, top_n))
    candidates = enumerate_paths(
        graph, k_max, topic_word_set, min_words=min_words, require_verb=True
    )
    if not candidates:
        return FusionResult(None, None, cluster_ids)
    if method == "pathgraph":
        best = rank_pathgraph(candidates)
    else:
        best = rank_keyphrase(candidates, extract_keyphrases(cluster, stopwords))
    return FusionResult(render_path(best), best, cluster_ids, len(candidates))
