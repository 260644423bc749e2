"""Joint sentiment-topic model trained by collapsed Gibbs sampling.

Every in-vocabulary token carries a (sentiment label l, topic z) assignment.
The sampler maintains the count tensors

    n_lzw[l, z, w]  tokens of word w assigned (l, z)
    n_lz[l, z]      tokens assigned (l, z)
    n_dlz[d, l, z]  tokens of document d assigned (l, z)
    n_dl[d, l]      tokens of document d assigned sentiment l
    n_d[d]          in-vocabulary tokens of document d

and resamples each token from the collapsed conditional

    p(l, z) ~ (n_lzw + prior(l, w)) / (n_lz + sum_w prior(l, w))
            * (n_dlz + alpha[l, z]) / (n_dl + sum_z alpha[l, z])
            * (n_dl + gamma) / (n_d - 1 + S * gamma)

where prior(l, w) is the lexicon-modulated word prior: lambda * beta on the
matching polarity label, eps * beta on conflicting labels, beta elsewhere.
"""

from __future__ import annotations

import json
import logging
import struct
from dataclasses import dataclass, asdict, field
from pathlib import Path

import numpy as np
from scipy.special import digamma

from . import _gibbs
from .corpus import POSITIVE, SentimentLexicon, TaggedCorpus, Vocabulary
from .errors import InvariantError, ValidationError

logger = logging.getLogger(__name__)

ALPHA_FLOOR = 1e-6
# The per-label alpha fixed point can diverge in magnitude on degenerate data
# (identical per-document topic mixes have a direction but no finite scale);
# capping the row sum keeps the proportions and forces convergence.
ALPHA_SUM_CAP = 1e4

_ARCHIVE_MAGIC = b"SENTJST\x01"
_ARCHIVE_VERSION = 1


@dataclass
class JstConfig:
    num_sentiments: int = 2
    num_topics: int = 10  # topics per sentiment label
    beta: float = 0.01
    gamma: float = 0.01
    alpha_init: float = 1.0
    alpha_update_interval: int = 50
    iterations: int = 1000
    burn_in: int = 500  # recorded for provenance; estimates use the final sample
    seed: int = 0
    lambda_scale: float = 0.05
    eps_conflict: float = 1e-7  # prior multiplier on conflicting-polarity labels
    positive_label: int = 0
    negative_label: int = 1

    def validate(self) -> None:
        if self.num_sentiments < 1:
            raise ValidationError("num_sentiments must be >= 1")
        if self.num_topics < 1:
            raise ValidationError("num_topics must be >= 1")
        if self.beta <= 0:
            raise ValidationError("beta must be > 0")
        if self.gamma <= 0:
            raise ValidationError("gamma must be > 0")
        if self.alpha_init <= 0:
            raise ValidationError("alpha_init must be > 0")
        if self.burn_in < 0 or self.iterations <= self.burn_in:
            raise ValidationError("need iterations > burn_in >= 0")
        if self.alpha_update_interval < 1:
            raise ValidationError("alpha_update_interval must be >= 1")
        if self.seed < 0:
            raise ValidationError("seed must be >= 0")
        if self.lambda_scale <= 0:
            raise ValidationError("lambda_scale must be > 0")
        if self.eps_conflict < 0:
            raise ValidationError("eps_conflict must be >= 0")
        for name in ("positive_label", "negative_label"):
            value = getattr(self, name)
            if not 0 <= value < self.num_sentiments:
                raise ValidationError(f"{name} must be a valid sentiment index")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "JstConfig":
        return cls(**data)


@dataclass(frozen=True, order=True)
class SentimentTopic:
    """A (sentiment label, topic) pair naming one sentiment-bearing topic."""

    l: int
    z: int


class JstModel:
    """Count tensors, per-token assignments, and estimated distributions."""

    def __init__(
        self,
        config: JstConfig,
        vocabulary: Vocabulary,
        corpus_fingerprint: str,
        token_word: np.ndarray,
        token_doc: np.ndarray,
        token_sent: np.ndarray,
        sent_offsets: np.ndarray,
        n_d: np.ndarray,
        prior: np.ndarray,
        lexicon_labels: np.ndarray,
    ):
        self.config = config
        self.vocabulary = vocabulary
        self.corpus_fingerprint = corpus_fingerprint
        self.token_word = token_word
        self.token_doc = token_doc
        self.token_sent = token_sent
        self.sent_offsets = sent_offsets
        self.n_d = n_d
        self.prior = prior
        self.lexicon_labels = lexicon_labels

        S, T, V = config.num_sentiments, config.num_topics, len(vocabulary)
        self.lab = np.full(len(token_word), -1, dtype=np.int32)
        self.top = np.full(len(token_word), -1, dtype=np.int32)
        self.n_lzw = np.zeros((S, T, V))
        self.n_lz = np.zeros((S, T))
        self.n_dlz = np.zeros((len(n_d), S, T))
        self.n_dl = np.zeros((len(n_d), S))
        self.alpha = np.full((S, T), config.alpha_init)
        self.phi: np.ndarray | None = None
        self.pi: np.ndarray | None = None
        self.theta: np.ndarray | None = None
        self.train_log: list[tuple[int, float]] = []

    @property
    def num_sentiments(self) -> int:
        return self.config.num_sentiments

    @property
    def num_topics(self) -> int:
        return self.config.num_topics

    @property
    def num_documents(self) -> int:
        return len(self.n_d)

    @property
    def num_tokens(self) -> int:
        return len(self.token_word)

    @property
    def prior_sum(self) -> np.ndarray:
        """Per-label total word prior, the denominator constant of phi."""
        return self.prior.sum(axis=1)

    @property
    def alpha_sum(self) -> np.ndarray:
        return self.alpha.sum(axis=1)

    def sentiment_topics(self) -> list[SentimentTopic]:
        return [
            SentimentTopic(l, z)
            for l in range(self.num_sentiments)
            for z in range(self.num_topics)
        ]

    def sentence_token_slice(self, sentence_id: int) -> slice:
        """Range of this sentence's in-vocabulary tokens in the flat arrays."""
        return slice(self.sent_offsets[sentence_id], self.sent_offsets[sentence_id + 1])

    def set_assignments(self, lab: np.ndarray, top: np.ndarray) -> None:
        """Install per-token assignments and rebuild all counts from them."""
        lab = np.asarray(lab, dtype=np.int32)
        top = np.asarray(top, dtype=np.int32)
        if lab.shape != self.token_word.shape or top.shape != self.token_word.shape:
            raise ValidationError("assignment arrays must have one entry per token")
        if len(lab) and (
            lab.min() < 0
            or lab.max() >= self.num_sentiments
            or top.min() < 0
            or top.max() >= self.num_topics
        ):
            raise ValidationError("assignment out of range")
        self.lab, self.top = lab.copy(), top.copy()
        self.n_lzw, self.n_lz, self.n_dlz, self.n_dl = self.rebuild_counts()

    def rebuild_counts(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Recompute all count tensors from scratch out of the assignments."""
        S, T, V = self.num_sentiments, self.num_topics, len(self.vocabulary)
        n_lzw = np.zeros((S, T, V))
        n_lz = np.zeros((S, T))
        n_dlz = np.zeros((self.num_documents, S, T))
        n_dl = np.zeros((self.num_documents, S))
        np.add.at(n_lzw, (self.lab, self.top, self.token_word), 1.0)
        np.add.at(n_lz, (self.lab, self.top), 1.0)
        np.add.at(n_dlz, (self.token_doc, self.lab, self.top), 1.0)
        np.add.at(n_dl, (self.token_doc, self.lab), 1.0)
        return n_lzw, n_lz, n_dlz, n_dl

    def validate_counts(self) -> None:
        """Check the incrementally maintained tensors against a rebuild."""
        rebuilt = self.rebuild_counts()
        for name, have, want in zip(
            ("n_lzw", "n_lz", "n_dlz", "n_dl"),
            (self.n_lzw, self.n_lz, self.n_dlz, self.n_dl),
            rebuilt,
        ):
            if not np.array_equal(have, want):
                raise InvariantError(f"count tensor {name} inconsistent with assignments")
        if self.n_lzw.min() < 0:
            raise InvariantError("negative count")
        if self.n_lz.sum() != self.num_tokens or self.n_dl.sum(axis=1).tolist() != self.n_d.tolist():
            raise InvariantError("token count not conserved")

    def log_likelihood(self) -> float:
        """Complete-data log-likelihood of the words under the current state."""
        phi = estimate_phi(self)
        return float(np.log(phi[self.lab, self.top, self.token_word]).sum())

    def top_words(self, l: int, z: int, n: int) -> list[str]:
        return top_words(self, l, z, n)


def build_lexicon_prior(
    lexicon: SentimentLexicon,
    vocab: Vocabulary,
    cfg: JstConfig,
    avg_doc_len: float,
) -> np.ndarray:
    """Per-(label, word) effective word prior.

    Non-lexicon words get the symmetric beta on every label.  A lexicon word
    gets lambda * beta on its matching polarity label and eps * beta on every
    other label, with lambda = lambda_scale * L / S for average document
    length L.
    """
    prior = np.full((cfg.num_sentiments, len(vocab)), cfg.beta)
    if len(lexicon) == 0:
        return prior
    if cfg.num_sentiments < 2:
        raise ValidationError("a sentiment lexicon requires at least 2 sentiment labels")
    if cfg.positive_label == cfg.negative_label:
        raise ValidationError("positive_label and negative_label must differ")
    lam = cfg.lambda_scale * avg_doc_len / cfg.num_sentiments
    for word, polarity in lexicon.items():
        if word not in vocab:
            continue
        w = vocab.id_of(word)
        match = cfg.positive_label if polarity == POSITIVE else cfg.negative_label
        prior[:, w] = cfg.eps_conflict * cfg.beta
        prior[match, w] = lam * cfg.beta
    return prior


def lexicon_label_array(lexicon: SentimentLexicon, vocab: Vocabulary, cfg: JstConfig) -> np.ndarray:
    """Per-word matching sentiment label, -1 for non-lexicon words."""
    labels = np.full(len(vocab), -1, dtype=np.int32)
    for word, polarity in lexicon.items():
        if word in vocab:
            labels[vocab.id_of(word)] = (
                cfg.positive_label if polarity == POSITIVE else cfg.negative_label
            )
    return labels


def build_model(corpus: TaggedCorpus, lexicon: SentimentLexicon, cfg: JstConfig) -> JstModel:
    """Lay out the flat token arrays and priors; assignments left unset."""
    cfg.validate()
    words, docs, sents = [], [], []
    sent_offsets = [0]
    for sent in corpus.sentences:
        for vocab_id in sent.vocab_ids():
            words.append(vocab_id)
            docs.append(sent.doc_id)
            sents.append(sent.id)
        sent_offsets.append(len(words))
    if not words:
        raise ValidationError("corpus has no in-vocabulary tokens")
    n_d = np.array([d.word_count for d in corpus.documents], dtype=np.float64)
    prior = build_lexicon_prior(lexicon, corpus.vocabulary, cfg, corpus.average_document_length())
    return JstModel(
        config=cfg,
        vocabulary=corpus.vocabulary,
        corpus_fingerprint=corpus.fingerprint(),
        token_word=np.array(words, dtype=np.int32),
        token_doc=np.array(docs, dtype=np.int32),
        token_sent=np.array(sents, dtype=np.int32),
        sent_offsets=np.array(sent_offsets, dtype=np.int64),
        n_d=n_d,
        prior=prior,
        lexicon_labels=lexicon_label_array(lexicon, corpus.vocabulary, cfg),
    )


def init_assignments(model: JstModel, rng: np.random.Generator) -> None:
    """Random (l, z) per token, with lexicon words pinned to their polarity."""
    cfg = model.config
    lab = rng.integers(0, cfg.num_sentiments, model.num_tokens, dtype=np.int32)
    top = rng.integers(0, cfg.num_topics, model.num_tokens, dtype=np.int32)
    pinned = model.lexicon_labels[model.token_word]
    lab = np.where(pinned >= 0, pinned, lab).astype(np.int32)
    model.set_assignments(lab, top)


def gibbs_sweep(model: JstModel, rng: np.random.Generator) -> None:
    """One full resampling pass over every token, in corpus order."""
    uniforms = rng.random(model.num_tokens)
    buf = np.empty(model.num_sentiments * model.num_topics)
    bad = _gibbs.sweep(
        model.token_word,
        model.token_doc,
        model.lab,
        model.top,
        model.n_lzw,
        model.n_lz,
        model.n_dlz,
        model.n_dl,
        model.n_d,
        model.prior,
        model.prior_sum,
        model.alpha,
        model.alpha_sum,
        model.config.gamma,
        uniforms,
        buf,
    )
    if bad:
        raise InvariantError(f"{bad} tokens had an unnormalizable sampling distribution")


def update_alpha(model: JstModel, *, max_iter: int = 5000, tol: float = 1e-8) -> None:
    """Fixed-point maximum-likelihood update of the asymmetric alpha.

    Per sentiment label, iterate

        alpha_z <- alpha_z * sum_d [psi(n_dlz + alpha_z) - psi(alpha_z)]
                           / sum_d [psi(n_dl + alpha0) - psi(alpha0)]

    flooring entries at ALPHA_FLOOR and rescaling rows whose sum exceeds
    ALPHA_SUM_CAP.  When the per-document counts are (nearly) proportional
    the maximiser runs away to infinity and the raw iteration crawls toward
    the cap in steps that stop shrinking; such rows are detected by a stall
    counter and snapped onto the cap, where the iteration settles in a few
    steps.  A label whose iteration does not converge keeps its previous
    row and logs a warning.
    """
    stall_limit = 50
    for l in range(model.num_sentiments):
        counts = model.n_dlz[:, l, :]
        totals = model.n_dl[:, l]
        if totals.sum() == 0:
            continue  # no evidence for this label; nothing to learn
        a = model.alpha[l].copy()
        converged = False
        projected = False
        stall = 0
        prev_step = None
        for _ in range(max_iter):
            a0 = a.sum()
            num = digamma(counts + a).sum(axis=0) - model.num_documents * digamma(a)
            den = digamma(totals + a0).sum() - model.num_documents * digamma(a0)
            if not np.isfinite(den) or den <= 0 or not np.all(np.isfinite(num)):
                break
            new = a * num / den
            total = new.sum()
            if total > ALPHA_SUM_CAP:
                new *= ALPHA_SUM_CAP / total
            new = np.maximum(new, ALPHA_FLOOR)
            step = np.abs(new - a).max()
            if step <= tol * (1.0 + a0):
                a = new
                converged = True
                break
            if new.sum() > a0 and prev_step is not None and step >= 0.999 * prev_step:
                stall += 1
            else:
                stall = 0
            prev_step = step
            if stall >= stall_limit and not projected:
                new *= ALPHA_SUM_CAP / new.sum()
                new = np.maximum(new, ALPHA_FLOOR)
                projected = True
                stall = 0
                prev_step = None
            a = new
        if converged:
            model.alpha[l] = a
        else:
            logger.warning("alpha update for label %d did not converge; keeping previous", l)


def estimate_phi(model: JstModel) -> np.ndarray:
    """Per-(l, z) word distribution from counts plus the effective prior."""
    num = model.n_lzw + model.prior[:, None, :]
    den = model.n_lz + model.prior_sum[:, None]
    return num / den[:, :, None]


def estimate_pi(model: JstModel) -> np.ndarray:
    """Per-document sentiment proportions, shape (D, S)."""
    S = model.num_sentiments
    return (model.n_dl + model.config.gamma) / (model.n_d[:, None] + S * model.config.gamma)


def estimate_theta(model: JstModel) -> np.ndarray:
    """Per-document, per-label topic proportions, shape (D, S, T)."""
    return (model.n_dlz + model.alpha[None, :, :]) / (
        model.n_dl[:, :, None] + model.alpha_sum[None, :, None]
    )


def top_words(model: JstModel, l: int, z: int, n: int) -> list[str]:
    """Top-n words of topic (l, z) by phi, ties broken by vocab id."""
    phi = model.phi if model.phi is not None else estimate_phi(model)
    row = phi[l, z]
    order = np.lexsort((np.arange(len(row)), -row))
    return [model.vocabulary.word_of(int(i)) for i in order[: max(0, min(n, len(row)))]]


def train(
    corpus: TaggedCorpus,
    lexicon: SentimentLexicon,
    cfg: JstConfig,
    *,
    conservation_check_interval: int = 100,
    progress_interval: int = 0,
) -> JstModel:
    """Run the full sampler and estimate phi/pi/theta from the final sample."""
    model = build_model(corpus, lexicon, cfg)
    rng = np.random.default_rng(cfg.seed)
    init_assignments(model, rng)
    for sweep_no in range(1, cfg.iterations + 1):
        gibbs_sweep(model, rng)
        model.train_log.append((sweep_no, model.log_likelihood()))
        if sweep_no % cfg.alpha_update_interval == 0:
            update_alpha(model)
        if conservation_check_interval and sweep_no % conservation_check_interval == 0:
            model.validate_counts()
        if progress_interval and sweep_no % progress_interval == 0:
            logger.info("sweep %d/%d  log-likelihood %.2f",
                        sweep_no, cfg.iterations, model.train_log[-1][1])
    model.phi = estimate_phi(model)
    model.pi = estimate_pi(model)
    model.theta = estimate_theta(model)
    return model


_ARRAY_FIELDS = (
    "token_word",
    "token_doc",
    "token_sent",
    "sent_offsets",
    "n_d",
    "prior",
    "lexicon_labels",
    "lab",
    "top",
    "n_lzw",
    "n_lz",
    "n_dlz",
    "n_dl",
    "alpha",
    "phi",
    "pi",
    "theta",
)


def save_model(model: JstModel, path) -> None:
    """Write a byte-deterministic single-file archive of the model."""
    if model.phi is None:
        model.phi = estimate_phi(model)
        model.pi = estimate_pi(model)
        model.theta = estimate_theta(model)
    arrays = []
    blobs = []
    for name in _ARRAY_FIELDS:
        arr = np.ascontiguousarray(getattr(model, name))
        arrays.append({"name": name, "dtype": arr.dtype.str, "shape": list(arr.shape)})
        blobs.append(arr.tobytes())
    header = {
        "format_version": _ARCHIVE_VERSION,
        "config": model.config.to_dict(),
        "vocabulary": model.vocabulary.words,
        "corpus_fingerprint": model.corpus_fingerprint,
        "train_log": model.train_log,
        "arrays": arrays,
    }
    head = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_ARCHIVE_MAGIC)
        fh.write(struct.pack(">Q", len(head)))
        fh.write(head)
        for blob in blobs:
            fh.write(blob)


def load_model(path) -> JstModel:
    """Read an archive, rebuild the model, and re-validate its invariants."""
    with open(path, "rb") as fh:
        magic = fh.read(len(_ARCHIVE_MAGIC))
        if magic != _ARCHIVE_MAGIC:
            raise ValidationError(f"{path}: not a sentopics model archive")
        (head_len,) = struct.unpack(">Q", fh.read(8))
        try:
            header = json.loads(fh.read(head_len).decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ValidationError(f"{path}: corrupt archive header: {exc}") from exc
        if header.get("format_version") != _ARCHIVE_VERSION:
            raise ValidationError(f"{path}: unsupported archive version")
        data = {}
        for spec in header["arrays"]:
            arr = np.frombuffer(
                fh.read(int(np.prod(spec["shape"], dtype=np.int64)) * np.dtype(spec["dtype"]).itemsize),
                dtype=spec["dtype"],
            ).reshape(spec["shape"])
            data[spec["name"]] = arr.copy()

    cfg = JstConfig.from_dict(header["config"])
    model = JstModel(
        config=cfg,
        vocabulary=Vocabulary(header["vocabulary"]),
        corpus_fingerprint=header["corpus_fingerprint"],
        token_word=data["token_word"],
        token_doc=data["token_doc"],
        token_sent=data["token_sent"],
        sent_offsets=data["sent_offsets"],
        n_d=data["n_d"],
        prior=data["prior"],
        lexicon_labels=data["lexicon_labels"],
    )
    try:
        model.set_assignments(data["lab"], data["top"])
    except ValidationError as exc:
        raise ValidationError(f"{path}: corrupt assignments: {exc}") from exc
    for name in ("n_lzw", "n_lz", "n_dlz", "n_dl"):
        if not np.array_equal(getattr(model, name), data[name]):
            raise ValidationError(f"{path}: stored counts disagree with assignments ({name})")
    model.alpha = data["alpha"]
    model.phi = data["phi"]
    model.pi = data["pi"]
    model.theta = data["theta"]
    model.train_log = [(int(s), float(ll)) for s, ll in header["train_log"]]
    rows = model.phi.sum(axis=2)
    if np.abs(rows - 1.0).max() > 1e-9:
        raise ValidationError(f"{path}: stored phi rows do not sum to 1")
    model.validate_counts()
    return model
