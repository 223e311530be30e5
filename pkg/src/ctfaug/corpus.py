"""Loading, labeling, tokenization, and sentence segmentation of review corpora.

Documents carry a binary label in {-1, +1} and a provenance tag so that
counterfactual samples remain traceable to the originals they derive from.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

_TOKEN_RE = re.compile(r"[a-z]+")
_SENTENCE_SPLIT_RE = re.compile(r"(?<=[.!?])\s+")

POSITIVE = 1
NEGATIVE = -1


class Origin(str, Enum):
    ORIGINAL = "original"
    AUTO_COUNTERFACTUAL = "auto_counterfactual"
    HUMAN_COUNTERFACTUAL = "human_counterfactual"


class Split(str, Enum):
    TRAIN = "train"
    TEST = "test"


def tokenize(text: str) -> list[str]:
    """Lowercase and split on non-alphabetic characters, dropping empty tokens."""
    return _TOKEN_RE.findall(text.lower())


def label_from_rating(rating: int) -> int | None:
    """Map a 1-5 star rating to a binary label; the middle rating maps to None."""
    if not isinstance(rating, int) or not 1 <= rating <= 5:
        raise ValueError(f"rating must be an integer in 1..5, got {rating!r}")
    if rating >= 4:
        return POSITIVE
    if rating <= 2:
        return NEGATIVE
    return None


@dataclass(frozen=True)
class Document:
    id: str
    raw_text: str
    tokens: tuple[str, ...]
    label: int
    origin: Origin = Origin.ORIGINAL
    source_id: str | None = None

    def __post_init__(self):
        if self.label not in (POSITIVE, NEGATIVE):
            raise ValueError(f"label must be +1 or -1, got {self.label!r}")
        if self.origin == Origin.AUTO_COUNTERFACTUAL and self.source_id is None:
            raise ValueError("auto counterfactual documents must reference a source_id")
        if tuple(self.tokens) != tuple(tokenize(self.raw_text)):
            raise ValueError(f"tokens do not match tokenize(raw_text) for doc {self.id!r}")

    @classmethod
    def make(
        cls,
        id: str,
        raw_text: str,
        label: int,
        origin: Origin = Origin.ORIGINAL,
        source_id: str | None = None,
    ) -> "Document":
        return cls(
            id=id,
            raw_text=raw_text,
            tokens=tuple(tokenize(raw_text)),
            label=label,
            origin=origin,
            source_id=source_id,
        )

    @property
    def token_set(self) -> frozenset[str]:
        return frozenset(self.tokens)


@dataclass(frozen=True)
class LabeledCorpus:
    documents: tuple[Document, ...]
    name: str
    split: Split = Split.TRAIN
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        ids = [d.id for d in self.documents]
        if len(ids) != len(set(ids)):
            seen, dups = set(), set()
            for i in ids:
                (dups if i in seen else seen).add(i)
            raise ValueError(f"duplicate document ids in corpus {self.name!r}: {sorted(dups)[:5]}")

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    def labels(self) -> list[int]:
        return [d.label for d in self.documents]

    def by_id(self) -> dict[str, Document]:
        return {d.id: d for d in self.documents}

    def with_documents(self, documents: Iterable[Document], **meta) -> "LabeledCorpus":
        return replace(self, documents=tuple(documents), meta={**self.meta, **meta})


def _label_of_record(record: dict) -> int | None:
    """Resolve a record's label; an explicit label wins over a rating."""
    label = record.get("label")
    if label is not None:
        if label in ("pos", POSITIVE, "1"):
            return POSITIVE
        if label in ("neg", NEGATIVE, "-1"):
            return NEGATIVE
        return None
    rating = record.get("rating")
    if rating is not None:
        try:
            return label_from_rating(int(rating))
        except (ValueError, TypeError):
            return None
    return None


def load_corpus(
    path: str | Path,
    format: str | None = None,
    name: str | None = None,
    split: Split | str = Split.TRAIN,
) -> LabeledCorpus:
    """Load a JSONL or CSV corpus, mapping labels/ratings to {-1, +1}.

    Records that map to neither class (e.g. a 3-star rating with no label)
    are skipped; the skip count is recorded in ``corpus.meta["skipped"]``.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"corpus file not found: {path}")
    if format is None:
        format = "csv" if path.suffix.lower() == ".csv" else "jsonl"
    if format not in ("jsonl", "csv"):
        raise ValueError(f"unsupported corpus format {format!r}")

    records: list[dict] = []
    if format == "jsonl":
        with path.open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    records.append(json.loads(line))
                except json.JSONDecodeError as exc:
                    raise ValueError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from exc
    else:
        with path.open(encoding="utf-8", newline="") as fh:
            for row in csv.DictReader(fh):
                records.append({k: (v if v != "" else None) for k, v in row.items()})

    documents: list[Document] = []
    skipped = 0
    for i, record in enumerate(records):
        text = record.get("text")
        label = _label_of_record(record)
        if text is None or label is None:
            skipped += 1
            continue
        doc_id = str(record.get("id") or f"doc{i}")
        origin = Origin(record.get("origin") or "original")
        documents.append(
            Document.make(
                id=doc_id,
                raw_text=text,
                label=label,
                origin=origin,
                source_id=record.get("source_id"),
            )
        )
    if not documents:
        raise ValueError(f"no usable records in {path} ({skipped} skipped)")
    return LabeledCorpus(
        documents=tuple(documents),
        name=name or path.stem,
        split=Split(split),
        meta={"path": str(path), "skipped": skipped},
    )


def save_corpus(corpus: LabeledCorpus, path: str | Path) -> None:
    """Write a corpus as canonical JSONL (fixed key order, defaults omitted)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for doc in corpus:
            record: dict = {
                "id": doc.id,
                "text": doc.raw_text,
                "label": "pos" if doc.label == POSITIVE else "neg",
            }
            if doc.origin != Origin.ORIGINAL:
                record["origin"] = doc.origin.value
            if doc.source_id is not None:
                record["source_id"] = doc.source_id
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def split_sentences(text: str) -> list[str]:
    """Split on ., !, ? followed by whitespace. Abbreviations are not handled."""
    return [s for s in (p.strip() for p in _SENTENCE_SPLIT_RE.split(text)) if s]


def segment_sentences(corpus: LabeledCorpus, keywords: Sequence[str] | set[str]) -> LabeledCorpus:
    """Explode documents into single-sentence documents that contain a keyword.

    Sentence labels are inherited from the parent document and each sentence
    records the parent id as its source.
    """
    keyword_set = frozenset(keywords)
    if not keyword_set:
        raise ValueError("keyword set must be nonempty")
    out: list[Document] = []
    for doc in corpus:
        for j, sentence in enumerate(split_sentences(doc.raw_text)):
            tokens = tokenize(sentence)
            if not keyword_set.intersection(tokens):
                continue
            out.append(
                Document.make(
                    id=f"{doc.id}:s{j}",
                    raw_text=sentence,
                    label=doc.label,
                    origin=doc.origin,
                    source_id=doc.id,
                )
            )
    return LabeledCorpus(
        documents=tuple(out),
        name=f"{corpus.name}-sentences",
        split=corpus.split,
        meta={"parent": corpus.name, "keywords": len(keyword_set)},
    )
