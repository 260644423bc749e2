"""Sentiment-topic model training and sentence labelling of the topics.

Pipeline: load a pre-tagged corpus (`corpus`), train a joint sentiment-topic
model by collapsed Gibbs sampling (`jst`), rank sentences by topic relevance
(`relevance`), then label each sentiment-bearing topic with either a corpus
sentence (`extract`) or a fused compression of its top sentences (`fuse`).
The `cli` module wires the stages into the `sentopics` command.
"""

__version__ = "0.1.0"

from .corpus import (
    Document,
    Sentence,
    SentimentLexicon,
    TaggedCorpus,
    Token,
    Vocabulary,
    load_corpus,
    load_lexicon,
    load_stopwords,
)
from .errors import CorpusFormatError, InvariantError, SentopicsError, ValidationError
from .extract import ExtractConfig, LabelScore, select_label
from .fuse import FusionResult, WordGraph, build_word_graph, label_abstractive
from .jst import JstConfig, JstModel, SentimentTopic, load_model, save_model, train
from .relevance import RelevanceTable, score_documents, score_sentences

__all__ = [
    "__version__",
    "CorpusFormatError",
    "Document",
    "ExtractConfig",
    "FusionResult",
    "InvariantError",
    "JstConfig",
    "JstModel",
    "LabelScore",
    "RelevanceTable",
    "Sentence",
    "SentimentLexicon",
    "SentimentTopic",
    "SentopicsError",
    "TaggedCorpus",
    "Token",
    "ValidationError",
    "Vocabulary",
    "WordGraph",
    "build_word_graph",
    "label_abstractive",
    "load_corpus",
    "load_lexicon",
    "load_model",
    "load_stopwords",
    "save_model",
    "score_documents",
    "score_sentences",
    "select_label",
    "train",
]
