#!/usr/bin/env python3
"""Write the bundled synthetic fixtures to disk as JSONL/CSV corpora.

Produces, under the output directory (default data/fixtures):
  imdb-l-like/   train, test, ctf_test, human_ctf_train (JSONL) + annotated_terms.txt
  kindle-like/   train, test, ctf_test (JSONL), train.csv (id,text,label,rating)
  spurious-demo/ train, flipped_test (JSONL)
"""

import argparse
import csv
from pathlib import Path

import numpy as np

from ctfaug.corpus import save_corpus
from ctfaug.synth import (
    annotated_causal_terms,
    make_kindle_bundle,
    make_review_bundle,
    make_spurious_demo,
    rating_for_label,
)


def write_bundle(bundle, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    save_corpus(bundle.train, out / "train.jsonl")
    save_corpus(bundle.test, out / "test.jsonl")
    if bundle.ctf_test is not None:
        save_corpus(bundle.ctf_test, out / "ctf_test.jsonl")
    if bundle.human_ctf_train is not None:
        save_corpus(bundle.human_ctf_train, out / "human_ctf_train.jsonl")
    (out / "annotated_terms.txt").write_text(
        "\n".join(annotated_causal_terms(bundle)) + "\n", encoding="utf-8"
    )


def write_kindle_csv(bundle, path: Path, seed: int = 3) -> None:
    """CSV variant with star ratings; sprinkles unlabelable 3-star rows."""
    rng = np.random.default_rng(seed)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "text", "label", "rating"])
        for doc in bundle.train:
            writer.writerow([doc.id, doc.raw_text, "", rating_for_label(rng, doc.label)])
            if rng.random() < 0.02:
                writer.writerow([f"{doc.id}-mid", "it was a book. i read it.", "", 3])


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="data/fixtures")
    args = parser.parse_args()
    root = Path(args.out)

    review = make_review_bundle()
    write_bundle(review, root / "imdb-l-like")

    kindle = make_kindle_bundle()
    write_bundle(kindle, root / "kindle-like")
    write_kindle_csv(kindle, root / "kindle-like" / "train.csv")

    train, flipped, _, _ = make_spurious_demo()
    demo_dir = root / "spurious-demo"
    demo_dir.mkdir(parents=True, exist_ok=True)
    save_corpus(train, demo_dir / "train.jsonl")
    save_corpus(flipped, demo_dir / "flipped_test.jsonl")

    for path in sorted(root.rglob("*")):
        if path.is_file():
            print(path)


if __name__ == "__main__":
    main()
