"""Test-side builders for corpora and frozen-assignment models."""

import numpy as np

from sentopics.corpus import SentimentLexicon, TaggedCorpus, load_corpus
from sentopics.jst import JstConfig, JstModel, build_model, estimate_phi

WORD_POOL = [
    "alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf", "hotel",
    "india", "juliet", "kilo", "lima", "mike", "november", "oscar", "papa",
    "quebec", "romeo", "sierra", "tango", "uniform", "victor", "whiskey",
    "xray", "yankee", "zulu",
]
POS_POOL = ["NN", "NNS", "JJ", "VB", "VBD", "RB", "DT", "IN"]


def load_corpus_from_rows(tmp_path, rows, name="corpus.tsv", **kwargs) -> TaggedCorpus:
    """rows: (doc_key, "word/POS word/POS ...") pairs, one sentence each."""
    path = tmp_path / name
    lines = [f"{doc}\t{i}\t{text}" for i, (doc, text) in enumerate(rows)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return load_corpus(path, **kwargs)


def random_rows(rng: np.random.Generator, n_docs: int, sents_per_doc=(2, 5), words_per_sent=(3, 9)):
    """Random tagged sentences drawn from the word/POS pools."""
    rows = []
    for doc in range(n_docs):
        for _ in range(int(rng.integers(sents_per_doc[0], sents_per_doc[1] + 1))):
            n = int(rng.integers(words_per_sent[0], words_per_sent[1] + 1))
            words = rng.choice(WORD_POOL, size=n)
            tags = rng.choice(POS_POOL, size=n)
            text = " ".join(f"{w}/{t}" for w, t in zip(words, tags))
            rows.append((doc, text + " ./."))
    return rows


def random_corpus(tmp_path, rng: np.random.Generator, n_docs=8, name="rand.tsv") -> TaggedCorpus:
    return load_corpus_from_rows(tmp_path, random_rows(rng, n_docs), name=name)


def frozen_model(
    corpus: TaggedCorpus,
    cfg: JstConfig,
    rng: np.random.Generator,
    lexicon: SentimentLexicon | None = None,
) -> JstModel:
    """Model with random but fixed assignments; phi estimated from them."""
    model = build_model(corpus, lexicon or SentimentLexicon(), cfg)
    lab = rng.integers(0, cfg.num_sentiments, model.num_tokens)
    top = rng.integers(0, cfg.num_topics, model.num_tokens)
    model.set_assignments(lab, top)
    model.phi = estimate_phi(model)
    return model
