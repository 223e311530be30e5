"""Vocabulary construction and one-hot (binary presence) document vectors."""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .corpus import Document, LabeledCorpus


@dataclass(frozen=True)
class Vocabulary:
    index_to_term: tuple[str, ...]

    @property
    def term_to_index(self) -> dict[str, int]:
        return self._index  # type: ignore[attr-defined]

    def __post_init__(self):
        index = {t: i for i, t in enumerate(self.index_to_term)}
        if len(index) != len(self.index_to_term):
            raise ValueError("vocabulary terms must be unique")
        object.__setattr__(self, "_index", index)

    @property
    def size(self) -> int:
        return len(self.index_to_term)

    def __len__(self) -> int:
        return len(self.index_to_term)

    def __contains__(self, term: str) -> bool:
        return term in self.term_to_index

    def index_of(self, term: str) -> int:
        return self.term_to_index[term]

    def hash(self) -> str:
        h = hashlib.sha256()
        for term in self.index_to_term:
            h.update(term.encode("utf-8"))
            h.update(b"\n")
        return h.hexdigest()[:16]


@dataclass(frozen=True)
class FeatureVector:
    indices: tuple[int, ...]

    def __post_init__(self):
        if list(self.indices) != sorted(set(self.indices)):
            raise ValueError("feature indices must be sorted and unique")


def build_vocabulary(corpus: LabeledCorpus, min_df: int = 1) -> Vocabulary:
    """Collect terms appearing in at least ``min_df`` documents, indexed lexicographically."""
    if len(corpus) == 0:
        raise ValueError("cannot build a vocabulary from an empty corpus")
    if min_df < 1:
        raise ValueError("min_df must be >= 1")
    df: Counter[str] = Counter()
    for doc in corpus:
        df.update(doc.token_set)
    terms = sorted(t for t, n in df.items() if n >= min_df)
    return Vocabulary(index_to_term=tuple(terms))


def vectorize(doc: Document, vocab: Vocabulary) -> FeatureVector:
    """Binary presence vector; out-of-vocabulary tokens are ignored."""
    t2i = vocab.term_to_index
    indices = sorted({t2i[t] for t in doc.token_set if t in t2i})
    return FeatureVector(indices=tuple(indices))


def design_matrix(corpus: LabeledCorpus, vocab: Vocabulary) -> tuple[sp.csr_matrix, np.ndarray]:
    """Sparse binary document-term matrix and the label vector in {-1, +1}."""
    indptr = [0]
    col_indices: list[int] = []
    t2i = vocab.term_to_index
    for doc in corpus:
        cols = sorted({t2i[t] for t in doc.token_set if t in t2i})
        col_indices.extend(cols)
        indptr.append(len(col_indices))
    data = np.ones(len(col_indices), dtype=np.float64)
    X = sp.csr_matrix(
        (data, np.asarray(col_indices, dtype=np.int32), np.asarray(indptr, dtype=np.int32)),
        shape=(len(corpus), vocab.size),
    )
    y = np.asarray([d.label for d in corpus], dtype=np.float64)
    return X, y


def save_vocabulary(vocab: Vocabulary, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for i, term in enumerate(vocab.index_to_term):
            fh.write(f"{term}\t{i}\n")


def load_vocabulary(path: str | Path) -> Vocabulary:
    pairs: list[tuple[int, str]] = []
    with Path(path).open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                term, idx = line.split("\t")
                pairs.append((int(idx), term))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: malformed vocabulary row") from exc
    pairs.sort()
    if [i for i, _ in pairs] != list(range(len(pairs))):
        raise ValueError(f"{path}: vocabulary indices must be a permutation of 0..V-1")
    return Vocabulary(index_to_term=tuple(t for _, t in pairs))
