"""End-to-end command-line pipeline: train, relevance, label, report."""

import json

import pytest

from sentopics.cli import main
from sentopics.jst import load_model
from sentopics.relevance import RelevanceTable

TEMPLATES = [
    "the/DT printer/NN works/VBZ well/RB and/CC prints/VBZ clean/JJ pages/NNS quickly/RB ./.",
    "setup/NN was/VBD easy/JJ because/IN the/DT manual/NN explains/VBZ every/DT step/NN ./.",
    "the/DT scanner/NN feels/VBZ slow/JJ and/CC drops/VBZ large/JJ jobs/NNS often/RB ./.",
    "support/NN was/VBD bad/JJ because/IN nobody/NN answers/VBZ the/DT phone/NN line/NN ./.",
    "the/DT screen/NN shows/VBZ sharp/JJ colors/NNS and/CC saves/VBZ power/NN nicely/RB ./.",
    "install/NN was/VBD easy/JJ and/CC the/DT wizard/NN finds/VBZ drivers/NNS fast/RB ./.",
    "the/DT tray/NN jams/VBZ often/RB and/CC wastes/VBZ paper/NN every/DT week/NN ./.",
    "battery/NN life/NN seems/VBZ bad/JJ because/IN games/NNS drain/VBP the/DT cell/NN ./.",
]

LEXICON = "easy\tpositive\nclean\tpositive\nsharp\tpositive\nslow\tnegative\nbad\tnegative\n"
STOPWORDS = "the\nand\nwas\nbecause\nevery\nit\na\n"


def write_inputs(root):
    rows = []
    for doc in range(12):
        rows.append(f"{doc}\t0\t{TEMPLATES[doc % len(TEMPLATES)]}")
        rows.append(f"{doc}\t1\t{TEMPLATES[(doc + 3) % len(TEMPLATES)]}")
    (root / "corpus.tsv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    (root / "lexicon.tsv").write_text(LEXICON, encoding="utf-8")
    (root / "stopwords.txt").write_text(STOPWORDS, encoding="utf-8")


TRAIN_ARGS = [
    "--sentiments", "2", "--topics", "2", "--iterations", "60", "--burn-in", "20",
    "--alpha-update-interval", "25", "--seed", "11", "--progress-interval", "0",
]


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """Inputs, a trained model, relevance tables, and labels for every method."""
    root = tmp_path_factory.mktemp("pipeline")
    write_inputs(root)
    run = root / "run"
    assert main(
        ["train", "--corpus", str(root / "corpus.tsv"), "--lexicon", str(root / "lexicon.tsv"),
         "--out", str(run)] + TRAIN_ARGS
    ) == 0
    assert main(
        ["relevance", "--model", str(run / "model.jst"), "--corpus", str(root / "corpus.tsv"),
         "--unit", "both", "--out", str(run)]
    ) == 0
    for method in ("sent-label", "pathgraph", "keyphrase", "top-prob", "centroid"):
        assert main(
            ["label", "--model", str(run / "model.jst"), "--corpus", str(root / "corpus.tsv"),
             "--relevance", str(run / "relevance.tsv"), "--lexicon", str(root / "lexicon.tsv"),
             "--stopwords", str(root / "stopwords.txt"), "--method", method,
             "--out", str(run)]
        ) == 0
    return root, run


def read_jsonl(path):
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]


def label_args(pipeline_dirs, method="top-prob", **overrides):
    root, run = pipeline_dirs
    base = {
        "model": str(run / "model.jst"),
        "corpus": str(root / "corpus.tsv"),
        "relevance": str(run / "relevance.tsv"),
        "lexicon": str(root / "lexicon.tsv"),
        "stopwords": str(root / "stopwords.txt"),
        "method": method,
        "out": str(run),
    }
    base.update(overrides)
    args = ["label"]
    for key, value in base.items():
        if value is not None:
            args += [f"--{key.replace('_', '-')}", str(value)]
    return args


# ---------------------------------------------------------------- artifacts


def test_train_artifacts(pipeline):
    root, run = pipeline
    assert (run / "model.jst").exists()
    assert (run / "config.train.json").exists()
    model = load_model(run / "model.jst")
    assert model.num_sentiments == 2 and model.num_topics == 2
    log_lines = (run / "train_log.tsv").read_text(encoding="utf-8").splitlines()
    for line in log_lines:
        sweep, ll = line.split("\t")
        assert int(sweep) >= 0 and float(ll) < 0.0
    resolved = json.loads((run / "config.train.json").read_text(encoding="utf-8"))
    assert resolved["iterations"] == 60 and resolved["seed"] == 11


def test_relevance_artifacts(pipeline):
    _, run = pipeline
    table = RelevanceTable.read(run / "relevance.tsv", 2, 2)
    assert any(table.rank_for(l, z) for l in range(2) for z in range(2))
    docs = RelevanceTable.read(run / "relevance.documents.tsv", 2, 2)
    doc_ids = {i for key in docs.topics() for i in docs.top_ids(*key)}
    assert doc_ids <= set(range(12))


def test_label_reports_structure(pipeline):
    root, run = pipeline
    rendered = {
        " ".join(t.split("/")[0] for t in template.split()).replace(" .", ".")
        for template in TEMPLATES
    }
    for method in ("sent-label", "top-prob", "centroid"):
        records = read_jsonl(run / f"labels.{method}.jsonl")
        assert [(r["l"], r["z"]) for r in records] == [(0, 0), (0, 1), (1, 0), (1, 1)]
        for r in records:
            assert r["method"] == method
            assert len(r["topic_words"]) == 10
            if r["label"] is not None:
                assert r["label"].lower() in {s.lower() for s in rendered}
                assert r["sentence_id"] is not None and r["length"] >= 8
            else:
                assert r["note"] == "unlabellable topic"


def test_fusion_reports_structure(pipeline):
    _, run = pipeline
    for method in ("pathgraph", "keyphrase"):
        records = read_jsonl(run / f"labels.{method}.jsonl")
        assert len(records) == 4
        for r in records:
            if r["label"] is not None and not r["fallback"]:
                assert r["raw_weight"] > 0.0
                assert r["rerank_score"] is not None
                assert r["num_candidates"] >= 1
                assert r["length"] >= 8
            elif r["fallback"] and r["label"] is not None:
                assert r["note"] == "no surviving compression path; extractive fallback"
            else:
                assert r["note"] == "unlabellable topic"


def test_train_rerun_is_byte_identical(pipeline, tmp_path):
    root, run = pipeline
    again = tmp_path / "again"
    assert main(
        ["train", "--corpus", str(root / "corpus.tsv"), "--lexicon", str(root / "lexicon.tsv"),
         "--out", str(again)] + TRAIN_ARGS
    ) == 0
    assert (again / "model.jst").read_bytes() == (run / "model.jst").read_bytes()
    assert (again / "train_log.tsv").read_bytes() == (run / "train_log.tsv").read_bytes()


def test_label_jobs_parallel_identical(pipeline, tmp_path):
    pair = label_args(pipeline, method="sent-label", out=str(tmp_path / "j1"), jobs=1)
    assert main(pair) == 0
    parallel = label_args(pipeline, method="sent-label", out=str(tmp_path / "j2"), jobs=2)
    assert main(parallel) == 0
    assert (tmp_path / "j1" / "labels.sent-label.jsonl").read_bytes() == (
        tmp_path / "j2" / "labels.sent-label.jsonl"
    ).read_bytes()


def test_relevance_document_unit_only(pipeline, tmp_path):
    root, run = pipeline
    out = tmp_path / "docs-only"
    assert main(
        ["relevance", "--model", str(run / "model.jst"), "--corpus", str(root / "corpus.tsv"),
         "--unit", "document", "--out", str(out)]
    ) == 0
    assert (out / "relevance.documents.tsv").exists()
    assert not (out / "relevance.tsv").exists()


# ---------------------------------------------------------------- exit codes


def test_no_command_is_usage_error(capsys):
    assert main([]) == 1
    capsys.readouterr()


def test_version_exits_zero(capsys):
    assert main(["--version"]) == 0
    assert capsys.readouterr().out.startswith("sentopics ")


def test_unknown_method_rejected_by_parser(pipeline, capsys):
    assert main(label_args(pipeline, method="bogus")) == 1
    capsys.readouterr()


def test_unknown_method_from_config_file(pipeline, tmp_path, capsys):
    cfg = tmp_path / "label.json"
    cfg.write_text('{"method": "bogus"}', encoding="utf-8")
    args = label_args(pipeline, method=None, config=str(cfg))
    assert main(args) == 1
    capsys.readouterr()


def test_missing_required_options(tmp_path, capsys):
    assert main(["train", "--out", str(tmp_path)]) == 1
    err = capsys.readouterr().err
    assert "--corpus" in err and "--lexicon" in err


def test_label_method_specific_requirements(pipeline, capsys):
    assert main(label_args(pipeline, method="sent-label", lexicon=None)) == 1
    assert "--lexicon" in capsys.readouterr().err
    assert main(label_args(pipeline, method="pathgraph", stopwords=None)) == 1
    assert "--stopwords" in capsys.readouterr().err
    assert main(label_args(pipeline, jobs=0)) == 1
    assert "--jobs" in capsys.readouterr().err


def test_remove_stopwords_requires_stopword_file(tmp_path, capsys):
    write_inputs(tmp_path)
    code = main(
        ["train", "--corpus", str(tmp_path / "corpus.tsv"),
         "--lexicon", str(tmp_path / "lexicon.tsv"), "--out", str(tmp_path / "o"),
         "--remove-stopwords-for-model"]
    )
    assert code == 1
    assert "--stopwords" in capsys.readouterr().err


def test_corrupt_model_is_validation_error(pipeline, tmp_path):
    root, run = pipeline
    bogus = tmp_path / "model.jst"
    bogus.write_bytes(b"not a model at all")
    assert main(label_args(pipeline, model=str(bogus))) == 2


def test_corpus_model_mismatch(pipeline, tmp_path):
    root, run = pipeline
    other = tmp_path / "other.tsv"
    other.write_text(f"0\t0\t{TEMPLATES[0]}\n", encoding="utf-8")
    assert main(label_args(pipeline, corpus=str(other))) == 2
    assert main(
        ["relevance", "--model", str(run / "model.jst"), "--corpus", str(other),
         "--out", str(tmp_path / "rel")]
    ) == 2


def test_unknown_config_key(pipeline, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"bogus_key": 1}', encoding="utf-8")
    assert main(label_args(pipeline, config=str(cfg))) == 2


def test_malformed_config_file(pipeline, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("[1, 2]", encoding="utf-8")
    assert main(label_args(pipeline, config=str(cfg))) == 2
    cfg.write_text("{nope", encoding="utf-8")
    assert main(label_args(pipeline, config=str(cfg))) == 2


def test_missing_input_file_is_io_error(pipeline, tmp_path):
    assert main(label_args(pipeline, corpus=str(tmp_path / "nope.tsv"))) == 2


# ---------------------------------------------------------------- config precedence


def test_config_file_and_flag_precedence(tmp_path):
    write_inputs(tmp_path)
    cfg = tmp_path / "train.json"
    cfg.write_text(
        json.dumps({"iterations": 30, "burn_in": 5, "seed": 3, "topics": 2, "sentiments": 2}),
        encoding="utf-8",
    )
    out = tmp_path / "out"
    code = main(
        ["train", "--config", str(cfg), "--corpus", str(tmp_path / "corpus.tsv"),
         "--lexicon", str(tmp_path / "lexicon.tsv"), "--out", str(out), "--seed", "5"]
    )
    assert code == 0
    resolved = json.loads((out / "config.train.json").read_text(encoding="utf-8"))
    assert resolved["iterations"] == 30  # from the config file
    assert resolved["seed"] == 5  # flag beats file
    assert resolved["gamma"] == 0.01  # untouched default
    model = load_model(out / "model.jst")
    assert model.config.seed == 5 and model.config.iterations == 30


# ---------------------------------------------------------------- unlabellable topics


def test_unlabellable_topics_exit_zero(pipeline, tmp_path):
    sparse = tmp_path / "sparse.tsv"
    sparse.write_text("0\t0\t0\t1.0\n", encoding="utf-8")
    out = tmp_path / "sparse-out"
    assert main(label_args(pipeline, relevance=str(sparse), out=str(out))) == 0
    records = read_jsonl(out / "labels.top-prob.jsonl")
    assert records[0]["label"] is not None
    for r in records[1:]:
        assert r["label"] is None and r["note"] == "unlabellable topic"


# ---------------------------------------------------------------- report


def test_report_summary_and_topics(tmp_path, capsys):
    a = tmp_path / "labels.a.jsonl"
    a.write_text(
        "\n".join([
            json.dumps({"method": "top-prob", "l": 0, "z": 0, "label": "x.", "length": 8, "fallback": False}),
            json.dumps({"method": "top-prob", "l": 0, "z": 1, "label": "y.", "length": 12, "fallback": False}),
            json.dumps({"method": "top-prob", "l": 1, "z": 0, "label": None, "length": None, "fallback": False}),
        ]) + "\n",
        encoding="utf-8",
    )
    b = tmp_path / "labels.b.jsonl"
    b.write_text(
        json.dumps({"method": "pathgraph", "l": 0, "z": 0, "label": "z.", "length": 9, "fallback": True})
        + "\n",
        encoding="utf-8",
    )
    out = tmp_path / "report"
    assert main(["report", str(a), str(b), "--out", str(out)]) == 0
    capsys.readouterr()
    records = read_jsonl(out / "report.jsonl")
    summaries = {r["method"]: r for r in records if r["record"] == "method_summary"}
    assert summaries["top-prob"]["topics"] == 3
    assert summaries["top-prob"]["labelled"] == 2
    assert summaries["top-prob"]["avg_length"] == 10.0
    assert summaries["top-prob"]["fallbacks"] == 0
    assert summaries["pathgraph"]["fallbacks"] == 1
    topics = {(r["l"], r["z"]): r["labels"] for r in records if r["record"] == "topic"}
    assert topics[(0, 0)] == {"pathgraph": "z.", "top-prob": "x."}
    assert topics[(1, 0)] == {"top-prob": None}


def test_report_prints_json_without_out(tmp_path, capsys):
    a = tmp_path / "labels.a.jsonl"
    a.write_text(
        json.dumps({"method": "top-prob", "l": 0, "z": 0, "label": "x.", "length": 8}) + "\n",
        encoding="utf-8",
    )
    assert main(["report", str(a)]) == 0
    lines = [l for l in capsys.readouterr().out.splitlines() if l]
    parsed = [json.loads(line) for line in lines]
    assert parsed[0]["record"] == "method_summary"


def test_report_rejects_bad_jsonl(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text("{not json}\n", encoding="utf-8")
    assert main(["report", str(bad)]) == 2


# ---------------------------------------------------------------- pretty output


def test_pretty_flags_smoke(pipeline, tmp_path, capsys):
    root, run = pipeline
    assert main(
        ["relevance", "--model", str(run / "model.jst"), "--corpus", str(root / "corpus.tsv"),
         "--out", str(tmp_path / "p"), "--pretty"]
    ) == 0
    assert "topic" in capsys.readouterr().out
    assert main(label_args(pipeline, out=str(tmp_path / "pl")) + ["--pretty"]) == 0
    assert "method" in capsys.readouterr().out
    assert main(["report", str(tmp_path / "pl" / "labels.top-prob.jsonl"), "--pretty"]) == 0
    assert "avg_length" in capsys.readouterr().out
