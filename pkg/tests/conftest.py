"""Shared fixtures: the four-sentence manual fixture and tiny word lists."""

import pytest

from helpers import load_corpus_from_rows

# Four opinion sentences about an easy-to-set-up print server, hand-tagged.
# Used throughout the fusion tests; the graph structure they induce was
# worked out by hand and several tests pin exact frequencies and weights.
FIG_ROWS = [
    (0, "It/PRP was/VBD easy/JJ to/TO set/VB up/RP and/CC use/VB ./."),
    (0, "Easy/JJ manual/NN and/CC set/VB up/RP ./."),
    (0, "It/PRP was/VBD a/DT super/JJ easy/JJ setup/NN ./."),
    (0, "The/DT D-Link/NNP DP-300U/NNP was/VBD very/RB easy/JJ to/TO set/VB up/RP ./."),
]

FIG_STOPWORDS = frozenset({"it", "was", "to", "and", "a", "the", "very"})


@pytest.fixture
def fig_corpus(tmp_path):
    return load_corpus_from_rows(tmp_path, FIG_ROWS)


@pytest.fixture
def fig_stopwords():
    return FIG_STOPWORDS


@pytest.fixture
def tiny_lexicon():
    from sentopics.corpus import SentimentLexicon

    return SentimentLexicon(
        {
            "easy": "positive",
            "good": "positive",
            "great": "positive",
            "bad": "negative",
            "poor": "negative",
        }
    )
