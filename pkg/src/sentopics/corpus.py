"""Pre-tagged corpus, sentiment lexicon, and stopword list loading.

Input corpora are UTF-8 files with one sentence per line:

    doc_id<TAB>sent_id<TAB>token/POS token/POS ...

Tokenization, sentence splitting, and POS tagging all happen upstream; this
module only parses, validates, and indexes.  The model vocabulary keeps a
token iff its lowercase form is fully alphabetic (punctuation, numbers, and
mixed strings such as "d-link" are excluded from the vocabulary but retained
in the raw token sequence for rendering and fusion).
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .errors import CorpusFormatError, ValidationError

logger = logging.getLogger(__name__)

POSITIVE = "positive"
NEGATIVE = "negative"
POLARITIES = frozenset({POSITIVE, NEGATIVE})


@dataclass(frozen=True)
class Token:
    surface: str
    lower: str
    pos: str
    vocab_id: int | None = None

    def __post_init__(self):
        if not self.pos:
            raise ValidationError(f"token {self.surface!r} has an empty POS tag")
        if self.lower != self.surface.lower():
            raise ValidationError(f"token {self.surface!r}: lower form mismatch")


@dataclass(frozen=True)
class Sentence:
    id: int
    doc_id: int
    tokens: tuple[Token, ...]

    def vocab_ids(self) -> list[int]:
        """Vocabulary ids of in-vocabulary tokens, in order, with repeats."""
        return [t.vocab_id for t in self.tokens if t.vocab_id is not None]

    def word_count(self) -> int:
        """Number of non-punctuation tokens (the label-length notion)."""
        return sum(1 for t in self.tokens if not is_punctuation(t))


@dataclass(frozen=True)
class Document:
    id: int
    sentences: tuple[Sentence, ...]
    word_count: int  # in-vocabulary tokens across all sentences (N_d)


class Vocabulary:
    """Bidirectional word <-> dense integer id map."""

    def __init__(self, words: Iterable[str]):
        self.words: list[str] = list(words)
        self.index: dict[str, int] = {w: i for i, w in enumerate(self.words)}
        if len(self.index) != len(self.words):
            raise ValidationError("vocabulary words are not unique")

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.index

    def id_of(self, word: str) -> int:
        return self.index[word]

    def word_of(self, vocab_id: int) -> str:
        return self.words[vocab_id]


class SentimentLexicon:
    """Map from lowercase word to polarity ("positive" or "negative")."""

    def __init__(self, entries: dict[str, str] | None = None):
        self._polarity: dict[str, str] = {}
        for word, polarity in (entries or {}).items():
            self.add(word, polarity)

    def add(self, word: str, polarity: str) -> None:
        if polarity not in POLARITIES:
            raise ValidationError(f"unknown polarity {polarity!r} for {word!r}")
        self._polarity[word.lower()] = polarity

    def polarity_of(self, word: str) -> str | None:
        return self._polarity.get(word)

    def __contains__(self, word: str) -> bool:
        return word in self._polarity

    def __len__(self) -> int:
        return len(self._polarity)

    def items(self):
        return self._polarity.items()


StopwordList = frozenset


class TaggedCorpus:
    """Immutable indexed corpus: documents -> sentences -> tokens."""

    def __init__(self, documents: tuple[Document, ...], vocabulary: Vocabulary):
        if not documents:
            raise ValidationError("empty corpus")
        self.documents = documents
        self.vocabulary = vocabulary
        flat = [s for d in documents for s in d.sentences]
        flat.sort(key=lambda s: s.id)
        self.sentences: tuple[Sentence, ...] = tuple(flat)
        for i, s in enumerate(self.sentences):
            if s.id != i:
                raise ValidationError("sentence ids are not dense")
        self._fingerprint: str | None = None

    @property
    def num_documents(self) -> int:
        return len(self.documents)

    @property
    def num_sentences(self) -> int:
        return len(self.sentences)

    @property
    def total_tokens(self) -> int:
        """Total in-vocabulary token count across the corpus."""
        return sum(d.word_count for d in self.documents)

    def average_document_length(self) -> float:
        """Mean in-vocabulary tokens per document (the L in the word prior)."""
        return self.total_tokens / len(self.documents)

    def fingerprint(self) -> str:
        """Stable content hash binding model artifacts to this corpus."""
        if self._fingerprint is None:
            payload = corpus_to_text(self) + "\x00" + " ".join(self.vocabulary.words)
            self._fingerprint = hashlib.sha256(payload.encode("utf-8")).hexdigest()
        return self._fingerprint


def is_aspect_word(token: Token) -> bool:
    """Nouns (POS prefix "NN") name aspects."""
    return token.pos.startswith("NN")


def is_sentiment_word(token: Token, lexicon: SentimentLexicon) -> bool:
    return token.lower in lexicon


def is_punctuation(token: Token) -> bool:
    """True when the token carries no alphanumeric character at all."""
    return not any(ch.isalnum() for ch in token.lower)


def join_words(words: Iterable[str], punct_flags: Iterable[bool]) -> str:
    """Space-join words, attaching punctuation to the preceding word."""
    parts: list[str] = []
    for word, punct in zip(words, punct_flags):
        if punct and parts:
            parts[-1] += word
        else:
            parts.append(word)
    return " ".join(parts)


def render_sentence(sent: Sentence) -> str:
    """Surface text of a sentence with punctuation attached."""
    return join_words(
        (t.surface for t in sent.tokens), (is_punctuation(t) for t in sent.tokens)
    )


def _parse_token(chunk: str, path, line_no: int) -> tuple[str, str]:
    word, sep, pos = chunk.rpartition("/")
    if not sep or not word or not pos:
        raise CorpusFormatError(f"malformed token {chunk!r}; expected word/POS", path, line_no)
    return word, pos


def _in_model_vocab(lower: str, stopwords: StopwordList | None) -> bool:
    if not lower.isalpha():
        return False
    if stopwords is not None and lower in stopwords:
        return False
    return True


def load_corpus(
    path,
    *,
    stopwords: StopwordList | None = None,
    remove_stopwords_for_model: bool = False,
) -> TaggedCorpus:
    """Parse a tagged corpus file and build dense document/sentence indexes.

    ``remove_stopwords_for_model`` additionally drops stopwords from the model
    vocabulary (they always stay in the raw token sequence).
    """
    path = Path(path)
    rows: list[tuple[str, list[tuple[str, str]]]] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise CorpusFormatError(
                    f"expected 3 tab-separated fields, found {len(parts)}", path, line_no
                )
            doc_key, sent_key, token_field = parts
            if not doc_key.strip() or not sent_key.strip():
                raise CorpusFormatError("empty doc or sentence id", path, line_no)
            chunks = token_field.split()
            if not chunks:
                raise CorpusFormatError("sentence has no tokens", path, line_no)
            rows.append((doc_key, [_parse_token(c, path, line_no) for c in chunks]))
    if not rows:
        raise ValidationError(f"{path}: empty corpus")

    vocab_filter = stopwords if remove_stopwords_for_model else None
    word_ids: dict[str, int] = {}
    doc_order: dict[str, int] = {}
    doc_sentences: dict[int, list[Sentence]] = {}
    for sent_id, (doc_key, specs) in enumerate(rows):
        if doc_key not in doc_order:
            doc_order[doc_key] = len(doc_order)
            doc_sentences[doc_order[doc_key]] = []
        doc_id = doc_order[doc_key]
        tokens = []
        for surface, pos in specs:
            lower = surface.lower()
            vocab_id = None
            if _in_model_vocab(lower, vocab_filter):
                if lower not in word_ids:
                    word_ids[lower] = len(word_ids)
                vocab_id = word_ids[lower]
            tokens.append(Token(surface, lower, pos, vocab_id))
        doc_sentences[doc_id].append(Sentence(sent_id, doc_id, tuple(tokens)))

    documents = []
    for doc_id in range(len(doc_order)):
        sents = tuple(doc_sentences[doc_id])
        n_d = sum(len(s.vocab_ids()) for s in sents)
        documents.append(Document(doc_id, sents, n_d))
    return TaggedCorpus(tuple(documents), Vocabulary(word_ids))


def corpus_to_text(corpus: TaggedCorpus) -> str:
    """Canonical serialization; inverse of load_corpus up to dense ids."""
    lines = []
    for doc in corpus.documents:
        for sent in doc.sentences:
            toks = " ".join(f"{t.surface}/{t.pos}" for t in sent.tokens)
            lines.append(f"{doc.id}\t{sent.id}\t{toks}")
    return "\n".join(lines) + "\n"


def write_corpus(corpus: TaggedCorpus, path) -> None:
    Path(path).write_text(corpus_to_text(corpus), encoding="utf-8")


def load_lexicon(path) -> SentimentLexicon:
    """Parse a `word<TAB>polarity` lexicon; duplicate words last-wins."""
    path = Path(path)
    lexicon = SentimentLexicon()
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise CorpusFormatError(
                    f"expected `word<TAB>polarity`, found {len(parts)} fields", path, line_no
                )
            word, polarity = parts[0].strip().lower(), parts[1].strip()
            if polarity not in POLARITIES:
                raise CorpusFormatError(f"unknown polarity {polarity!r}", path, line_no)
            if word in lexicon:
                logger.warning("%s:%d: duplicate lexicon entry %r (last wins)", path, line_no, word)
            lexicon.add(word, polarity)
    return lexicon


def load_stopwords(path) -> StopwordList:
    """One lowercase word per line; blank lines ignored."""
    words = set()
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            word = raw.strip().lower()
            if word:
                words.add(word)
    return frozenset(words)
