"""Command-line pipeline: train -> relevance -> label -> report.

Each stage reads the previous stage's on-disk artifacts, so every step can
be re-run and tested in isolation.  Exit codes: 0 success (including
unlabellable topics), 1 usage error, 2 validation error, 3 internal
invariant violation.  Options may come from a JSON config file
(``--config``); explicit flags win over the file, which wins over defaults.
Every command writes the fully resolved configuration next to its outputs.
"""

from __future__ import annotations

import argparse
import json
import logging
import multiprocessing
import sys
from pathlib import Path

from . import __version__
from .corpus import (
    TaggedCorpus,
    load_corpus,
    load_lexicon,
    load_stopwords,
    render_sentence,
)
from .errors import InvariantError, SentopicsError, ValidationError
from .extract import (
    ExtractConfig,
    LabelScore,
    baseline_centroid,
    baseline_top_prob,
    select_label,
)
from .fuse import label_abstractive
from .jst import JstConfig, JstModel, SentimentTopic, load_model, save_model, top_words, train
from .relevance import RelevanceTable, score_documents, score_sentences

logger = logging.getLogger(__name__)

METHODS = ("sent-label", "pathgraph", "keyphrase", "top-prob", "centroid")
FUSION = ("pathgraph", "keyphrase")

MODEL_FILENAME = "model.jst"
TRAIN_LOG_FILENAME = "train_log.tsv"
RELEVANCE_FILENAME = "relevance.tsv"
RELEVANCE_DOCS_FILENAME = "relevance.documents.tsv"


class _UsageError(Exception):
    """Missing or inconsistent command-line arguments (exit code 1)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


_TRAIN_DEFAULTS = {
    "corpus": None,
    "lexicon": None,
    "stopwords": None,
    "out": None,
    "sentiments": 2,
    "topics": 10,
    "beta": 0.01,
    "gamma": 0.01,
    "alpha_init": 1.0,
    "alpha_update_interval": 50,
    "iterations": 1000,
    "burn_in": 500,
    "seed": 0,
    "lambda_scale": 0.05,
    "eps_conflict": 1e-7,
    "remove_stopwords_for_model": False,
    "conservation_check_interval": 100,
    "progress_interval": 100,
}

_RELEVANCE_DEFAULTS = {
    "model": None,
    "corpus": None,
    "stopwords": None,
    "out": None,
    "unit": "sentence",
    "remove_stopwords_for_model": False,
}

_LABEL_DEFAULTS = {
    "model": None,
    "corpus": None,
    "relevance": None,
    "lexicon": None,
    "stopwords": None,
    "out": None,
    "method": None,
    "alpha": 0.4,
    "top_n": 15,
    "rel_normalization": True,
    "candidate_limit": None,
    "cluster_size": 150,
    "k_max": 100,
    "jobs": 1,
    "remove_stopwords_for_model": False,
}

_REPORT_DEFAULTS = {
    "out": None,
}


def build_parser() -> _Parser:
    parser = _Parser(prog="sentopics", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"sentopics {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add_common(p):
        p.add_argument("--config", help="JSON config file; explicit flags win")
        p.add_argument("--out", help="output directory")

    p_train = sub.add_parser("train", help="train a sentiment-topic model")
    add_common(p_train)
    p_train.add_argument("--corpus", help="tagged corpus file")
    p_train.add_argument("--lexicon", help="word<TAB>polarity sentiment lexicon")
    p_train.add_argument("--stopwords", help="stopword list (one word per line)")
    p_train.add_argument("--sentiments", type=int, help="number of sentiment labels")
    p_train.add_argument("--topics", type=int, help="topics per sentiment label")
    p_train.add_argument("--beta", type=float)
    p_train.add_argument("--gamma", type=float)
    p_train.add_argument("--alpha-init", type=float, dest="alpha_init")
    p_train.add_argument("--alpha-update-interval", type=int, dest="alpha_update_interval")
    p_train.add_argument("--iterations", type=int)
    p_train.add_argument("--burn-in", type=int, dest="burn_in")
    p_train.add_argument("--seed", type=int)
    p_train.add_argument("--lambda-scale", type=float, dest="lambda_scale")
    p_train.add_argument("--eps-conflict", type=float, dest="eps_conflict")
    p_train.add_argument(
        "--remove-stopwords-for-model",
        action=argparse.BooleanOptionalAction,
        dest="remove_stopwords_for_model",
        help="drop stopwords from the model vocabulary",
    )
    p_train.add_argument("--conservation-check-interval", type=int, dest="conservation_check_interval")
    p_train.add_argument("--progress-interval", type=int, dest="progress_interval")
    p_train.set_defaults(func=cmd_train, defaults=_TRAIN_DEFAULTS)

    p_rel = sub.add_parser("relevance", help="rank sentences per sentiment-bearing topic")
    add_common(p_rel)
    p_rel.add_argument("--model", help="trained model archive")
    p_rel.add_argument("--corpus", help="tagged corpus file (must match the model)")
    p_rel.add_argument("--stopwords")
    p_rel.add_argument(
        "--remove-stopwords-for-model",
        action=argparse.BooleanOptionalAction,
        dest="remove_stopwords_for_model",
    )
    p_rel.add_argument("--unit", choices=("sentence", "document", "both"))
    p_rel.add_argument("--pretty", action="store_true", help="also print a table")
    p_rel.set_defaults(func=cmd_relevance, defaults=_RELEVANCE_DEFAULTS)

    p_label = sub.add_parser("label", help="generate one label per topic")
    add_common(p_label)
    p_label.add_argument("--model")
    p_label.add_argument("--corpus")
    p_label.add_argument("--relevance", help="relevance table from the relevance command")
    p_label.add_argument("--lexicon")
    p_label.add_argument("--stopwords")
    p_label.add_argument("--method", choices=METHODS)
    p_label.add_argument("--alpha", type=float, help="relevance/coverage mixing weight")
    p_label.add_argument("--top-n", type=int, dest="top_n", help="topic-word cutoff")
    p_label.add_argument(
        "--rel-normalization",
        action=argparse.BooleanOptionalAction,
        dest="rel_normalization",
        help="min-max rescale Rel and Cov within each topic's pool",
    )
    p_label.add_argument("--candidate-limit", type=int, dest="candidate_limit")
    p_label.add_argument("--cluster-size", type=int, dest="cluster_size",
                         help="sentences fed to fusion / centroid")
    p_label.add_argument("--k-max", type=int, dest="k_max", help="paths enumerated before filtering")
    p_label.add_argument("--jobs", type=int, help="parallel workers across topics")
    p_label.add_argument(
        "--remove-stopwords-for-model",
        action=argparse.BooleanOptionalAction,
        dest="remove_stopwords_for_model",
    )
    p_label.add_argument("--pretty", action="store_true")
    p_label.set_defaults(func=cmd_label, defaults=_LABEL_DEFAULTS)

    p_report = sub.add_parser("report", help="summarize label reports")
    p_report.add_argument("inputs", nargs="+", help="label .jsonl files")
    p_report.add_argument("--config", help="JSON config file; explicit flags win")
    p_report.add_argument("--out", help="output directory")
    p_report.add_argument("--pretty", action="store_true")
    p_report.set_defaults(func=cmd_report, defaults=_REPORT_DEFAULTS)

    return parser


def _resolve(args: argparse.Namespace) -> dict:
    """defaults < config file < explicit flags, with unknown keys rejected."""
    defaults = args.defaults
    from_file = {}
    if getattr(args, "config", None):
        try:
            from_file = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read config file {args.config}: {exc}") from exc
        if not isinstance(from_file, dict):
            raise ValidationError(f"config file {args.config} must hold a JSON object")
        unknown = set(from_file) - set(defaults)
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
    resolved = {}
    for key, default in defaults.items():
        flag = getattr(args, key, None)
        if flag is not None:
            resolved[key] = flag
        elif key in from_file:
            resolved[key] = from_file[key]
        else:
            resolved[key] = default
    return resolved


def _require(resolved: dict, *keys: str) -> None:
    missing = [k for k in keys if resolved.get(k) is None]
    if missing:
        raise _UsageError(
            "missing required option(s): " + ", ".join(f"--{k.replace('_', '-')}" for k in missing)
        )


def _out_dir(resolved: dict) -> Path:
    out = Path(resolved["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path: Path, payload) -> None:
    path.write_text(
        json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def _write_jsonl(path: Path, records: list[dict]) -> None:
    lines = [json.dumps(r, sort_keys=True, separators=(",", ":")) for r in records]
    path.write_text("\n".join(lines) + "\n" if lines else "", encoding="utf-8")


def _read_jsonl(path) -> list[dict]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}:{line_no}: bad record: {exc}") from exc
    return records


def _load_inputs(resolved: dict) -> tuple[TaggedCorpus, object]:
    stopwords = load_stopwords(resolved["stopwords"]) if resolved.get("stopwords") else None
    if resolved.get("remove_stopwords_for_model") and stopwords is None:
        raise _UsageError("--remove-stopwords-for-model requires --stopwords")
    corpus = load_corpus(
        resolved["corpus"],
        stopwords=stopwords,
        remove_stopwords_for_model=bool(resolved.get("remove_stopwords_for_model")),
    )
    return corpus, stopwords


def _print_table(headers: list[str], rows: list[list[str]]) -> None:
    widths = [len(h) for h in headers]
    for row in rows:
        widths = [max(w, len(cell)) for w, cell in zip(widths, row)]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    print(fmt.format(*headers))
    print(fmt.format(*("-" * w for w in widths)))
    for row in rows:
        print(fmt.format(*row))


def cmd_train(args: argparse.Namespace) -> int:
    resolved = _resolve(args)
    _require(resolved, "corpus", "lexicon", "out")
    corpus, _ = _load_inputs(resolved)
    lexicon = load_lexicon(resolved["lexicon"])
    cfg = JstConfig(
        num_sentiments=resolved["sentiments"],
        num_topics=resolved["topics"],
        beta=resolved["beta"],
        gamma=resolved["gamma"],
        alpha_init=resolved["alpha_init"],
        alpha_update_interval=resolved["alpha_update_interval"],
        iterations=resolved["iterations"],
        burn_in=resolved["burn_in"],
        seed=resolved["seed"],
        lambda_scale=resolved["lambda_scale"],
        eps_conflict=resolved["eps_conflict"],
    )
    cfg.validate()
    logger.info(
        "training: %d docs, %d sentences, %d tokens, V=%d",
        corpus.num_documents, corpus.num_sentences, corpus.total_tokens, len(corpus.vocabulary),
    )
    model = train(
        corpus,
        lexicon,
        cfg,
        conservation_check_interval=resolved["conservation_check_interval"],
        progress_interval=resolved["progress_interval"],
    )
    out = _out_dir(resolved)
    save_model(model, out / MODEL_FILENAME)
    log_lines = [f"{sweep}\t{ll!r}" for sweep, ll in model.train_log]
    (out / TRAIN_LOG_FILENAME).write_text("\n".join(log_lines) + "\n", encoding="utf-8")
    _write_json(out / "config.train.json", resolved)
    logger.info("model written to %s", out / MODEL_FILENAME)
    return 0


def cmd_relevance(args: argparse.Namespace) -> int:
    resolved = _resolve(args)
    _require(resolved, "model", "corpus", "out")
    model = load_model(resolved["model"])
    corpus, _ = _load_inputs(resolved)
    out = _out_dir(resolved)
    tables = []
    if resolved["unit"] in ("sentence", "both"):
        table = score_sentences(corpus, model)
        table.write(out / RELEVANCE_FILENAME)
        tables.append(table)
    if resolved["unit"] in ("document", "both"):
        table = score_documents(corpus, model)
        table.write(out / RELEVANCE_DOCS_FILENAME)
        tables.append(table)
    _write_json(out / "config.relevance.json", resolved)
    if getattr(args, "pretty", False):
        for table in tables:
            for l, z in table.topics():
                head = table.rank_for(l, z)[:5]
                rows = [[str(l), str(z), str(uid), f"{score:.6f}"] for uid, score in head]
                print(f"top {table.unit}s for topic (l={l}, z={z}):")
                _print_table(["l", "z", f"{table.unit}_id", "score"], rows)
                print()
    return 0


_CTX: dict = {}


def _label_topic(topic_pair: tuple[int, int]) -> dict:
    """Produce one label record; reads the worker context installed by cmd_label."""
    l, z = topic_pair
    topic = SentimentTopic(l, z)
    model: JstModel = _CTX["model"]
    corpus: TaggedCorpus = _CTX["corpus"]
    rel_table: RelevanceTable = _CTX["rel_table"]
    method: str = _CTX["method"]
    extract_cfg: ExtractConfig = _CTX["extract_cfg"]

    record = {
        "l": l,
        "z": z,
        "method": method,
        "topic_words": top_words(model, l, z, 10),
        "sentence_id": None,
        "label": None,
        "length": None,
        "rel": None,
        "aspect": None,
        "sentiment": None,
        "cov": None,
        "total": None,
        "raw_weight": None,
        "rerank_score": None,
        "num_candidates": None,
        "fallback": False,
        "note": None,
    }

    def fill_extractive(score: LabelScore) -> None:
        sent = corpus.sentences[score.sentence_id]
        record.update(
            sentence_id=score.sentence_id,
            label=render_sentence(sent),
            length=sent.word_count(),
            rel=score.rel,
            aspect=score.aspect,
            sentiment=score.sentiment,
            cov=score.cov,
            total=score.total,
        )

    if method == "sent-label":
        score = select_label(topic, corpus, rel_table, model, _CTX["lexicon"], extract_cfg)
        if score is None:
            record["note"] = "unlabellable topic"
        else:
            fill_extractive(score)
    elif method == "top-prob":
        sentence_id = baseline_top_prob(topic, rel_table)
        if sentence_id is None:
            record["note"] = "unlabellable topic"
        else:
            sent = corpus.sentences[sentence_id]
            record.update(
                sentence_id=sentence_id,
                label=render_sentence(sent),
                length=sent.word_count(),
                rel=rel_table.score_of(l, z, sentence_id),
            )
    elif method == "centroid":
        sentence_id = baseline_centroid(topic, rel_table, corpus, k=_CTX["cluster_size"])
        if sentence_id is None:
            record["note"] = "unlabellable topic"
        else:
            sent = corpus.sentences[sentence_id]
            record.update(
                sentence_id=sentence_id,
                label=render_sentence(sent),
                length=sent.word_count(),
                rel=rel_table.score_of(l, z, sentence_id),
            )
    else:  # pathgraph / keyphrase
        result = label_abstractive(
            topic,
            rel_table,
            corpus,
            model,
            _CTX["stopwords"],
            method=method,
            cluster_size=_CTX["cluster_size"],
            k_max=_CTX["k_max"],
            top_n=extract_cfg.top_n,
        )
        if result.label is not None:
            candidate = result.candidate
            record.update(
                label=result.label,
                length=candidate.length,
                raw_weight=candidate.raw_weight,
                rerank_score=candidate.rerank_score,
                num_candidates=result.num_candidates,
            )
        else:
            score = select_label(topic, corpus, rel_table, model, _CTX["lexicon"], extract_cfg)
            record["fallback"] = True
            if score is None:
                record["note"] = "unlabellable topic"
            else:
                fill_extractive(score)
                record["note"] = "no surviving compression path; extractive fallback"
    return record


def cmd_label(args: argparse.Namespace) -> int:
    resolved = _resolve(args)
    _require(resolved, "model", "corpus", "relevance", "out", "method")
    method = resolved["method"]
    if method not in METHODS:
        raise _UsageError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    if method in ("sent-label",) + FUSION:
        _require(resolved, "lexicon")
    if method in FUSION:
        _require(resolved, "stopwords")
    if resolved["jobs"] < 1:
        raise _UsageError("--jobs must be >= 1")

    model = load_model(resolved["model"])
    corpus, stopwords = _load_inputs(resolved)
    if corpus.fingerprint() != model.corpus_fingerprint:
        raise ValidationError(
            "corpus does not match the model (check --stopwords and "
            "--remove-stopwords-for-model match the training run)"
        )
    rel_table = RelevanceTable.read(
        resolved["relevance"], model.num_sentiments, model.num_topics
    )
    lexicon = load_lexicon(resolved["lexicon"]) if resolved.get("lexicon") else None
    extract_cfg = ExtractConfig(
        alpha=resolved["alpha"],
        top_n=resolved["top_n"],
        rel_normalization=bool(resolved["rel_normalization"]),
        candidate_limit=resolved["candidate_limit"],
    )
    extract_cfg.validate()

    _CTX.clear()
    _CTX.update(
        model=model,
        corpus=corpus,
        rel_table=rel_table,
        lexicon=lexicon,
        stopwords=stopwords if stopwords is not None else frozenset(),
        method=method,
        extract_cfg=extract_cfg,
        cluster_size=resolved["cluster_size"],
        k_max=resolved["k_max"],
    )
    topics = [(t.l, t.z) for t in model.sentiment_topics()]
    if resolved["jobs"] > 1:
        with multiprocessing.get_context("fork").Pool(resolved["jobs"]) as pool:
            records = pool.map(_label_topic, topics, chunksize=1)
    else:
        records = [_label_topic(pair) for pair in topics]

    out = _out_dir(resolved)
    report_path = out / f"labels.{method}.jsonl"
    _write_jsonl(report_path, records)
    _write_json(out / f"config.label.{method}.json", resolved)
    unlabelled = sum(1 for r in records if r["label"] is None)
    if unlabelled:
        logger.warning("%d topic(s) unlabellable", unlabelled)
    if getattr(args, "pretty", False):
        rows = [
            [str(r["l"]), str(r["z"]), r["method"], r["label"] or f"<{r['note']}>"]
            for r in records
        ]
        _print_table(["l", "z", "method", "label"], rows)
    logger.info("labels written to %s", report_path)
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    resolved = _resolve(args)
    by_method: dict[str, list[dict]] = {}
    by_topic: dict[tuple[int, int], dict[str, str | None]] = {}
    for path in args.inputs:
        for record in _read_jsonl(path):
            by_method.setdefault(record["method"], []).append(record)
            by_topic.setdefault((record["l"], record["z"]), {})[record["method"]] = record["label"]

    out_records = []
    for method in sorted(by_method):
        records = by_method[method]
        lengths = [r["length"] for r in records if r["label"] is not None]
        out_records.append(
            {
                "record": "method_summary",
                "method": method,
                "topics": len(records),
                "labelled": len(lengths),
                "avg_length": sum(lengths) / len(lengths) if lengths else None,
                "fallbacks": sum(1 for r in records if r.get("fallback")),
            }
        )
    for l, z in sorted(by_topic):
        out_records.append(
            {
                "record": "topic",
                "l": l,
                "z": z,
                "labels": dict(sorted(by_topic[(l, z)].items())),
            }
        )

    lines = [json.dumps(r, sort_keys=True, separators=(",", ":")) for r in out_records]
    if resolved.get("out"):
        out = _out_dir(resolved)
        (out / "report.jsonl").write_text("\n".join(lines) + "\n", encoding="utf-8")
        _write_json(out / "config.report.json", {**resolved, "inputs": list(args.inputs)})
    if getattr(args, "pretty", False):
        summary_rows = [
            [
                r["method"],
                str(r["topics"]),
                str(r["labelled"]),
                "-" if r["avg_length"] is None else f"{r['avg_length']:.2f}",
                str(r["fallbacks"]),
            ]
            for r in out_records
            if r["record"] == "method_summary"
        ]
        _print_table(["method", "topics", "labelled", "avg_length", "fallbacks"], summary_rows)
        print()
        methods = sorted(by_method)
        topic_rows = [
            [f"({l},{z})"] + [str(by_topic[(l, z)].get(m)) for m in methods]
            for l, z in sorted(by_topic)
        ]
        _print_table(["topic"] + methods, topic_rows)
    else:
        for line in lines:
            print(line)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"sentopics {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except InvariantError as exc:
        logger.error("invariant violation: %s", exc)
        return 3
    except ValidationError as exc:
        logger.error("%s", exc)
        return 2
    except SentopicsError as exc:
        logger.error("%s", exc)
        return 2
    except OSError as exc:
        logger.error("%s", exc)
        return 2


def console_main() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    console_main()
