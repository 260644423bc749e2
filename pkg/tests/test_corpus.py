"""Corpus, lexicon, and stopword parsing."""

import logging

import pytest

from conftest import FIG_ROWS
from helpers import load_corpus_from_rows, random_corpus

from sentopics.corpus import (
    CorpusFormatError,
    SentimentLexicon,
    Token,
    ValidationError,
    Vocabulary,
    corpus_to_text,
    is_aspect_word,
    is_punctuation,
    is_sentiment_word,
    join_words,
    load_corpus,
    load_lexicon,
    load_stopwords,
    render_sentence,
    write_corpus,
)

import numpy as np


def test_single_sentence_token_counts(tmp_path):
    corpus = load_corpus_from_rows(tmp_path, [(0, "It/PRP was/VBD easy/JJ ./.")])
    assert corpus.num_documents == 1
    assert corpus.num_sentences == 1
    sent = corpus.sentences[0]
    assert len(sent.tokens) == 4
    assert len(sent.vocab_ids()) == 3  # the period is filtered
    assert corpus.total_tokens == 3


def test_non_alphabetic_token_kept_raw_but_out_of_vocab(tmp_path):
    corpus = load_corpus_from_rows(tmp_path, [(0, "The/DT D-Link/NNP works/VBZ ./.")])
    tokens = corpus.sentences[0].tokens
    assert [t.surface for t in tokens] == ["The", "D-Link", "works", "."]
    dlink = tokens[1]
    assert dlink.vocab_id is None
    assert "d-link" not in corpus.vocabulary
    assert {"the", "works"} <= set(corpus.vocabulary.words)


def test_figure_cluster_vocabulary(tmp_path):
    corpus = load_corpus_from_rows(tmp_path, FIG_ROWS)
    assert corpus.num_documents == 1
    assert corpus.num_sentences == 4
    # Hyphenated product names fail the alphabetic filter, leaving 14 words.
    assert set(corpus.vocabulary.words) == {
        "it", "was", "easy", "to", "set", "up", "and", "use",
        "manual", "a", "super", "setup", "the", "very",
    }
    # First-encounter order for the first sentence's words.
    assert corpus.vocabulary.words[:8] == ["it", "was", "easy", "to", "set", "up", "and", "use"]


def test_doc_ids_by_first_appearance_and_dense_sentence_ids(tmp_path):
    corpus = load_corpus_from_rows(
        tmp_path,
        [("rev9", "a/DT b/NN"), ("rev2", "c/NN d/NN"), ("rev9", "e/NN f/NN")],
    )
    assert corpus.num_documents == 2
    assert [s.id for s in corpus.sentences] == [0, 1, 2]
    assert [s.doc_id for s in corpus.sentences] == [0, 1, 0]
    assert [len(d.sentences) for d in corpus.documents] == [2, 1]


def test_word_counts_sum_to_total(tmp_path, rng=np.random.default_rng(3)):
    corpus = random_corpus(tmp_path, rng, n_docs=6)
    assert sum(d.word_count for d in corpus.documents) == corpus.total_tokens
    assert corpus.total_tokens == sum(len(s.vocab_ids()) for s in corpus.sentences)
    assert corpus.average_document_length() == corpus.total_tokens / corpus.num_documents


def test_vocabulary_bijection(tmp_path):
    corpus = load_corpus_from_rows(tmp_path, FIG_ROWS)
    vocab = corpus.vocabulary
    for word in vocab.words:
        assert vocab.word_of(vocab.id_of(word)) == word
    for sent in corpus.sentences:
        for token in sent.tokens:
            if token.vocab_id is not None:
                assert vocab.word_of(token.vocab_id) == token.lower


def test_round_trip(tmp_path):
    corpus = load_corpus_from_rows(tmp_path, FIG_ROWS)
    out = tmp_path / "again.tsv"
    write_corpus(corpus, out)
    reloaded = load_corpus(out)
    assert corpus_to_text(reloaded) == corpus_to_text(corpus)
    assert reloaded.vocabulary.words == corpus.vocabulary.words
    assert reloaded.fingerprint() == corpus.fingerprint()
    for a, b in zip(corpus.sentences, reloaded.sentences):
        assert (a.id, a.doc_id) == (b.id, b.doc_id)
        assert [(t.surface, t.pos, t.vocab_id) for t in a.tokens] == [
            (t.surface, t.pos, t.vocab_id) for t in b.tokens
        ]


def test_fingerprint_changes_with_content(tmp_path):
    a = load_corpus_from_rows(tmp_path, [(0, "a/DT b/NN")], name="a.tsv")
    b = load_corpus_from_rows(tmp_path, [(0, "a/DT c/NN")], name="b.tsv")
    assert a.fingerprint() != b.fingerprint()


def test_malformed_line_names_line_number(tmp_path):
    path = tmp_path / "bad.tsv"
    path.write_text("0\t0\ta/DT b/NN\nonly-two\tfields\n", encoding="utf-8")
    with pytest.raises(CorpusFormatError, match=r"bad\.tsv:2"):
        load_corpus(path)


def test_malformed_token_rejected(tmp_path):
    path = tmp_path / "bad.tsv"
    path.write_text("0\t0\tnopos next/NN\n", encoding="utf-8")
    with pytest.raises(CorpusFormatError, match=r"bad\.tsv:1.*nopos"):
        load_corpus(path)


def test_empty_corpus_rejected(tmp_path):
    path = tmp_path / "empty.tsv"
    path.write_text("\n\n", encoding="utf-8")
    with pytest.raises(ValidationError, match="empty corpus"):
        load_corpus(path)


def test_blank_lines_between_documents_allowed(tmp_path):
    path = tmp_path / "blank.tsv"
    path.write_text("0\t0\ta/DT b/NN\n\n1\t1\tc/NN d/NN\n", encoding="utf-8")
    corpus = load_corpus(path)
    assert corpus.num_documents == 2
    assert corpus.num_sentences == 2


def test_stopword_removal_is_opt_in(tmp_path):
    rows = [(0, "the/DT kitchen/NN was/VBD great/JJ ./.")]
    stop = frozenset({"the", "was"})
    kept = load_corpus_from_rows(tmp_path, rows, name="k.tsv", stopwords=stop)
    assert set(kept.vocabulary.words) == {"the", "kitchen", "was", "great"}
    removed = load_corpus_from_rows(
        tmp_path, rows, name="r.tsv", stopwords=stop, remove_stopwords_for_model=True
    )
    assert set(removed.vocabulary.words) == {"kitchen", "great"}
    # Raw token sequences are identical either way.
    assert [t.surface for t in removed.sentences[0].tokens] == [
        t.surface for t in kept.sentences[0].tokens
    ]


def test_aspect_word_predicate():
    assert is_aspect_word(Token("toaster", "toaster", "NN"))
    assert not is_aspect_word(Token("nice", "nice", "JJ"))
    assert is_aspect_word(Token("toasters", "toasters", "NNS"))


def test_sentiment_word_predicate():
    lex = SentimentLexicon({"disappointed": "negative"})
    assert is_sentiment_word(Token("disappointed", "disappointed", "JJ"), lex)
    assert not is_sentiment_word(Token("kitchen", "kitchen", "NN"), lex)
    # The categories are independent: a noun can also be a sentiment word.
    joy = Token("joy", "joy", "NN")
    assert is_aspect_word(joy) and is_sentiment_word(joy, SentimentLexicon({"joy": "positive"}))


def test_punctuation_predicate():
    assert is_punctuation(Token(".", ".", "."))
    assert is_punctuation(Token("!!", "!!", "."))
    assert not is_punctuation(Token("d-link", "d-link", "NNP"))
    assert not is_punctuation(Token("up", "up", "RP"))


def test_join_words_attaches_punctuation():
    assert join_words(["easy", "to", "use", "."], [False, False, False, True]) == "easy to use."
    assert join_words(["wow", ",", "nice"], [False, True, False]) == "wow, nice"
    # Leading punctuation has nothing to attach to.
    assert join_words([".", "a"], [True, False]) == ". a"


def test_render_sentence(tmp_path):
    corpus = load_corpus_from_rows(tmp_path, [(0, "It/PRP was/VBD easy/JJ ./.")])
    assert render_sentence(corpus.sentences[0]) == "It was easy."


def test_sentence_word_count_excludes_punctuation(tmp_path):
    corpus = load_corpus_from_rows(tmp_path, [(0, "D-Link/NNP was/VBD easy/JJ ./.")])
    sent = corpus.sentences[0]
    assert sent.word_count() == 3  # d-link counts as a word, the period does not
    assert len(sent.vocab_ids()) == 2


def test_token_invariants():
    with pytest.raises(ValidationError):
        Token("Easy", "easy", "")
    with pytest.raises(ValidationError):
        Token("Easy", "Easy", "JJ")


def test_vocabulary_uniqueness():
    with pytest.raises(ValidationError):
        Vocabulary(["a", "b", "a"])


def test_load_lexicon(tmp_path):
    path = tmp_path / "lex.tsv"
    path.write_text("good\tpositive\n", encoding="utf-8")
    lex = load_lexicon(path)
    assert lex.polarity_of("good") == "positive"
    assert len(lex) == 1


def test_load_lexicon_two_entries(tmp_path):
    path = tmp_path / "lex.tsv"
    path.write_text("great\tpositive\nawful\tnegative\n", encoding="utf-8")
    lex = load_lexicon(path)
    assert len(lex) == 2
    assert lex.polarity_of("awful") == "negative"


def test_load_lexicon_duplicates_last_wins_with_warning(tmp_path, caplog):
    path = tmp_path / "lex.tsv"
    path.write_text("bad\tnegative\nbad\tnegative\n", encoding="utf-8")
    with caplog.at_level(logging.WARNING, logger="sentopics.corpus"):
        lex = load_lexicon(path)
    assert len(lex) == 1
    assert any("duplicate" in rec.message for rec in caplog.records)
    # Genuinely conflicting duplicates: the later line wins.
    path.write_text("odd\tnegative\nodd\tpositive\n", encoding="utf-8")
    assert load_lexicon(path).polarity_of("odd") == "positive"


def test_load_lexicon_unknown_polarity(tmp_path):
    path = tmp_path / "lex.tsv"
    path.write_text("good\tmeh\n", encoding="utf-8")
    with pytest.raises(CorpusFormatError, match=r"lex\.tsv:1.*meh"):
        load_lexicon(path)


def test_load_lexicon_field_count(tmp_path):
    path = tmp_path / "lex.tsv"
    path.write_text("good positive\n", encoding="utf-8")
    with pytest.raises(CorpusFormatError):
        load_lexicon(path)


def test_lexicon_add_validates_polarity():
    with pytest.raises(ValidationError):
        SentimentLexicon({"good": "sideways"})


def test_load_stopwords(tmp_path):
    path = tmp_path / "stop.txt"
    path.write_text("The\n\nand\nof\n", encoding="utf-8")
    assert load_stopwords(path) == frozenset({"the", "and", "of"})
