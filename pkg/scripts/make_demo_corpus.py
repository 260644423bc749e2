#!/usr/bin/env python3
"""Generate the bundled demo corpus of pre-tagged product reviews.

Writes ``corpus.tsv`` (doc<TAB>sent<TAB>word/POS tokens), ``lexicon.tsv``
(word<TAB>polarity) and ``stopwords.txt`` into the output directory.  The
output is fully determined by ``--seed`` and ``--docs``, so the files shipped
in ``data/demo/`` can be reproduced exactly.

Reviews mix three sentence families, mirroring how real reviews read:

* narrative sentences — long, stopword-heavy frames shared across aspects,
  with one or two aspect words dropped in;
* dense sentences — short statements packed with adjective+noun aspect
  phrases;
* medium sentences — single-clause opinions.

Each aspect contributes its own nouns and verbs while the sentiment-bearing
adjectives come from the lexicon, matched to the document's polarity (with a
little noise).  The shared frames give sentences within one aspect enough
lexical overlap for word-graph fusion to find multi-sentence compressions.
"""

from __future__ import annotations

import argparse
import random
from pathlib import Path

ASPECTS = {
    "printing": {
        "nouns": [("printer", "NN"), ("pages", "NNS"), ("text", "NN"), ("photos", "NNS")],
        "verbs": ["prints"],
    },
    "battery": {
        "nouns": [("battery", "NN"), ("charge", "NN"), ("cell", "NN"), ("runtime", "NN")],
        "verbs": ["lasts"],
    },
    "setup": {
        "nouns": [("setup", "NN"), ("manual", "NN"), ("wizard", "NN"), ("install", "NN")],
        "verbs": ["guides"],
    },
    "support": {
        "nouns": [("support", "NN"), ("agent", "NN"), ("hotline", "NN"), ("ticket", "NN")],
        "verbs": ["answers"],
    },
    "screen": {
        "nouns": [("screen", "NN"), ("display", "NN"), ("colors", "NNS"), ("panel", "NN")],
        "verbs": ["shows"],
    },
    "shipping": {
        "nouns": [("box", "NN"), ("package", "NN"), ("courier", "NN"), ("delivery", "NN")],
        "verbs": ["arrives"],
    },
    "audio": {
        "nouns": [("speaker", "NN"), ("sound", "NN"), ("volume", "NN"), ("bass", "NN")],
        "verbs": ["plays"],
    },
    "keyboard": {
        "nouns": [("keyboard", "NN"), ("keys", "NNS"), ("layout", "NN"), ("touchpad", "NN")],
        "verbs": ["responds"],
    },
    "software": {
        "nouns": [("software", "NN"), ("app", "NN"), ("update", "NN"), ("driver", "NN")],
        "verbs": ["syncs"],
    },
    "build": {
        "nouns": [("case", "NN"), ("hinge", "NN"), ("frame", "NN"), ("finish", "NN")],
        "verbs": ["feels"],
    },
}

POSITIVE_ADJ = [
    "great", "excellent", "crisp", "quiet", "sturdy", "reliable",
    "smooth", "bright", "fast", "solid", "accurate", "comfortable",
]
NEGATIVE_ADJ = [
    "poor", "terrible", "blurry", "noisy", "flimsy", "slow",
    "dull", "weak", "clumsy", "faulty", "rough", "sluggish",
]

# Linguistic stopwords plus the generic review nouns the narrative frames
# introduce; keeping those out of keyphrases keeps labels aspect-focused.
STOPWORDS = [
    "a", "after", "always", "and", "as", "at", "because", "but", "charm",
    "day", "days", "every", "for", "i", "is", "it", "like", "my", "office",
    "overall", "price", "still", "the", "these", "this", "to", "toy",
    "very", "week", "well", "wife", "with",
]

# Slots: n1/n2/n3 draw distinct aspect nouns, v1 an aspect verb (VBZ),
# a1/a2/a3 distinct polarity-matched lexicon adjectives.  Every skeleton
# has at least eight non-punctuation words and a verb.  The main narrative
# frame appears three times as often as the variant so that clusters share
# one strong spine.
NARRATIVE = {
    "shared": [
        ["i/PRP", "bought/VBD", "this/DT", "for/IN", "my/PRP$", "office/NN", "and/CC",
         "after/IN", "a/DT", "week/NN", "it/PRP", "still/RB", "v1", "very/RB",
         "well/RB", "every/DT", "day/NN", "./."],
    ] * 3,
    "positive": [
        ["my/PRP$", "wife/NN", "uses/VBZ", "it/PRP", "every/DT", "day/NN", "and/CC",
         "says/VBZ", "it/PRP", "v1", "like/IN", "a/DT", "charm/NN", "./."],
    ],
    "negative": [
        ["my/PRP$", "wife/NN", "uses/VBZ", "it/PRP", "every/DT", "day/NN", "and/CC",
         "says/VBZ", "it/PRP", "v1", "like/IN", "a/DT", "toy/NN", "./."],
    ],
}

DENSE = {
    "shared": [
        ["the/DT", "a1", "n1", "v1", "the/DT", "a2", "n2", "these/DT",
         "days/NNS", "./."],
        ["the/DT", "a1", "n1", "always/RB", "v1", "the/DT", "a2", "n2",
         "as/IN", "well/RB", "./."],
    ],
    "positive": [],
    "negative": [],
}

MEDIUM = {
    "shared": [
        ["overall/RB", "the/DT", "n1", "v1", "a1", "n2", "for/IN", "the/DT",
         "price/NN", "./."],
    ],
    "positive": [],
    "negative": [],
}

ADJ_NOISE = 0.1  # chance an adjective is drawn from the opposite polarity
CROSS_ASPECT = 0.25  # chance the last sentence switches to a second aspect


def render_sentence(rng: random.Random, family: dict, aspect: str, polarity: str) -> str:
    spec = ASPECTS[aspect]
    skeleton = rng.choice(family["shared"] + family[polarity])

    nouns = rng.sample(spec["nouns"], 3)
    own, other = (POSITIVE_ADJ, NEGATIVE_ADJ) if polarity == "positive" else (NEGATIVE_ADJ, POSITIVE_ADJ)
    adjectives = rng.sample(own, 3)
    tokens = []
    for item in skeleton:
        if item in ("n1", "n2", "n3"):
            word, tag = nouns[("n1", "n2", "n3").index(item)]
            tokens.append(f"{word}/{tag}")
        elif item == "v1":
            tokens.append(f"{rng.choice(spec['verbs'])}/VBZ")
        elif item in ("a1", "a2", "a3"):
            word = adjectives[("a1", "a2", "a3").index(item)]
            if rng.random() < ADJ_NOISE:
                word = rng.choice(other)
            tokens.append(f"{word}/JJ")
        else:
            tokens.append(item)
    return " ".join(tokens)


def make_documents(num_docs: int, seed: int) -> list[list[str]]:
    rng = random.Random(seed)
    aspect_names = list(ASPECTS)
    documents = []
    for doc in range(num_docs):
        polarity = "positive" if doc % 2 == 0 else "negative"
        primary = aspect_names[doc % len(aspect_names)]
        secondary = aspect_names[(doc * 3 + 1) % len(aspect_names)]
        families = [NARRATIVE, NARRATIVE, DENSE, MEDIUM]
        if rng.random() < 0.5:
            families.append(rng.choice((NARRATIVE, DENSE)))
        rng.shuffle(families)
        sentences = []
        for sent, family in enumerate(families):
            aspect = primary
            if sent == len(families) - 1 and rng.random() < CROSS_ASPECT:
                aspect = secondary
            sentences.append(render_sentence(rng, family, aspect, polarity))
        documents.append(sentences)
    return documents


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=Path("data/demo"))
    parser.add_argument("--docs", type=int, default=160)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    documents = make_documents(args.docs, args.seed)

    with open(args.out / "corpus.tsv", "w", encoding="utf-8") as fh:
        for doc, sentences in enumerate(documents):
            for sent, tokens in enumerate(sentences):
                fh.write(f"{doc}\t{sent}\t{tokens}\n")

    with open(args.out / "lexicon.tsv", "w", encoding="utf-8") as fh:
        for word in POSITIVE_ADJ:
            fh.write(f"{word}\tpositive\n")
        for word in NEGATIVE_ADJ:
            fh.write(f"{word}\tnegative\n")

    with open(args.out / "stopwords.txt", "w", encoding="utf-8") as fh:
        fh.write("\n".join(STOPWORDS) + "\n")

    total = sum(len(s) for s in documents)
    print(f"wrote {len(documents)} documents / {total} sentences to {args.out}")


if __name__ == "__main__":
    main()
