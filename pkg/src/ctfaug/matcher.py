"""Closest-opposite-match search for likely-causal terms.

For a term t, the context of a document is its token sequence with every
occurrence of t removed. A candidate match pairs a document containing t with
an opposite-label document that contains a different top term (and not t);
the match score is the cosine similarity of the two context embeddings. Terms
whose best match scores above a threshold are treated as likely causal.

Context embedding is pluggable so externally computed transformer vectors can
be injected without running a model in-process.
"""

from __future__ import annotations

import abc
import hashlib
import json
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import Document, LabeledCorpus, tokenize
from .linear_model import TopTermSet

DEFAULT_MATCH_THRESHOLD = 0.95
DEFAULT_MAX_PAIRS = 5000


def _stable_u64(*parts: str | int) -> int:
    digest = hashlib.sha256(":".join(str(p) for p in parts).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


class ContextEmbedder(abc.ABC):
    """Deterministic map from context text to a fixed-dimension vector.

    Implementations must never return the all-zero vector for nonempty input
    and must be safe to call from concurrent workers.
    """

    dimension: int

    @abc.abstractmethod
    def embed(self, context: str) -> np.ndarray: ...


class HashedRandomVectors(ContextEmbedder):
    """Averaged per-token vectors drawn from a token-hash-seeded Gaussian.

    A lightweight, file-free embedder: identical token multisets embed
    identically, disjoint ones are nearly orthogonal in high dimension.
    """

    def __init__(self, dimension: int = 256, seed: int = 0):
        if dimension < 1:
            raise ValueError("dimension must be positive")
        self.dimension = dimension
        self.seed = seed
        self._token_vectors: dict[str, np.ndarray] = {}
        self._lock = threading.Lock()

    def _token_vector(self, token: str) -> np.ndarray:
        with self._lock:
            vec = self._token_vectors.get(token)
            if vec is None:
                rng = np.random.default_rng(_stable_u64("tok", self.seed, token))
                vec = rng.standard_normal(self.dimension)
                self._token_vectors[token] = vec
        return vec

    def embed(self, context: str) -> np.ndarray:
        tokens = tokenize(context)
        if not tokens:
            return _unit_fallback(self.dimension)
        return np.mean([self._token_vector(t) for t in tokens], axis=0)


class AveragedWordVectors(ContextEmbedder):
    """Mean of per-token vectors loaded from a word-vector text file.

    File format: one line per token, ``token v1 ... vD``. Out-of-vocabulary
    tokens are skipped; a context with no known tokens falls back to a
    designated unit vector.
    """

    def __init__(self, path: str | Path):
        self._vectors: dict[str, np.ndarray] = {}
        dimension = None
        with Path(path).open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                parts = line.split()
                if not parts:
                    continue
                token, values = parts[0], parts[1:]
                if dimension is None:
                    dimension = len(values)
                if len(values) != dimension or dimension == 0:
                    raise ValueError(f"{path}:{lineno}: expected {dimension} vector components")
                self._vectors[token] = np.asarray(values, dtype=np.float64)
        if dimension is None:
            raise ValueError(f"{path}: empty word-vector file")
        self.dimension = dimension

    def embed(self, context: str) -> np.ndarray:
        vectors = [self._vectors[t] for t in tokenize(context) if t in self._vectors]
        if not vectors:
            return _unit_fallback(self.dimension)
        return np.mean(vectors, axis=0)


class PrecomputedLookup(ContextEmbedder):
    """Exact-match table from normalized context text to an external vector.

    File format: TSV rows ``sha256(normalized context) \\t v1 ... vD``. Lets
    users inject vectors computed offline (e.g. by a transformer) while the
    search itself stays in-process.
    """

    def __init__(self, path: str | Path):
        self._vectors: dict[str, np.ndarray] = {}
        dimension = None
        with Path(path).open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    key, values = line.split("\t")
                except ValueError as exc:
                    raise ValueError(f"{path}:{lineno}: expected two tab-separated fields") from exc
                vec = np.asarray(values.split(), dtype=np.float64)
                if dimension is None:
                    dimension = vec.size
                if vec.size != dimension or dimension == 0:
                    raise ValueError(f"{path}:{lineno}: expected {dimension} vector components")
                self._vectors[key] = vec
        if dimension is None:
            raise ValueError(f"{path}: empty precomputed-context file")
        self.dimension = dimension

    @staticmethod
    def key_for(context: str) -> str:
        return hashlib.sha256(context.encode("utf-8")).hexdigest()

    def embed(self, context: str) -> np.ndarray:
        key = self.key_for(context)
        if key not in self._vectors:
            raise KeyError(f"no precomputed vector for context {context!r} (sha256 {key[:12]}...)")
        return self._vectors[key]


def _unit_fallback(dimension: int) -> np.ndarray:
    vec = np.zeros(dimension)
    vec[0] = 1.0
    return vec


class EmbeddingCache:
    """Thread-safe cache of unit-normalized context vectors."""

    def __init__(self, embedder: ContextEmbedder):
        self.embedder = embedder
        self._cache: dict[str, np.ndarray] = {}
        self._lock = threading.Lock()

    def unit_vector(self, context: str) -> np.ndarray:
        with self._lock:
            vec = self._cache.get(context)
        if vec is not None:
            return vec
        raw = np.asarray(self.embedder.embed(context), dtype=np.float64)
        norm = np.linalg.norm(raw)
        if norm == 0.0:
            raise ValueError("embedder returned an all-zero vector")
        vec = raw / norm
        with self._lock:
            self._cache[context] = vec
        return vec


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    denom = float(np.linalg.norm(u) * np.linalg.norm(v))
    if denom == 0.0:
        raise ValueError("cosine undefined for zero vectors")
    return float(np.clip(np.dot(u, v) / denom, -1.0, 1.0))


@dataclass(frozen=True)
class Match:
    term: str
    doc_id: str
    matched_doc_id: str
    matched_term: str
    score: float

    def to_dict(self) -> dict:
        return {
            "term": self.term,
            "doc_id": self.doc_id,
            "matched_doc_id": self.matched_doc_id,
            "matched_term": self.matched_term,
            "score": self.score,
        }


@dataclass(frozen=True)
class CausalTermSet:
    terms: dict[str, Match]
    threshold: float

    def __contains__(self, term: str) -> bool:
        return term in self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def sorted_terms(self) -> list[str]:
        return sorted(self.terms)


def context_of(doc: Document, term: str) -> str:
    """The document's token sequence with all occurrences of ``term`` removed."""
    if term not in doc.token_set:
        raise ValueError(f"term {term!r} does not occur in document {doc.id!r}")
    return " ".join(t for t in doc.tokens if t != term)


class _SearchIndex:
    """Per-corpus structures shared by every per-term search."""

    def __init__(self, corpus: LabeledCorpus, top_terms: Sequence[str]):
        self.docs = sorted(corpus, key=lambda d: d.id)
        self.by_label: dict[int, list[Document]] = {1: [], -1: []}
        for d in self.docs:
            self.by_label[d.label].append(d)
        top = set(top_terms)
        self.top_in_doc: dict[str, tuple[str, ...]] = {
            d.id: tuple(sorted(top.intersection(d.token_set))) for d in self.docs
        }
        self.docs_with: dict[str, list[Document]] = {t: [] for t in top}
        for d in self.docs:
            for t in self.top_in_doc[d.id]:
                self.docs_with[t].append(d)


def _term_candidates(index: _SearchIndex, term: str):
    """Candidate lists and cumulative triple counts for one term.

    Triples follow canonical order: documents containing the term sorted by
    id, then opposite-label candidate documents sorted by id, then matched
    top terms sorted lexicographically.
    """
    docs_with_term = index.docs_with.get(term)
    if docs_with_term is None:
        docs_with_term = [d for d in index.docs if term in d.token_set]
    opp: dict[int, list[Document]] = {}
    opp_counts: dict[int, np.ndarray] = {}
    totals: dict[int, int] = {}
    for side in (1, -1):
        candidates = [
            d for d in index.by_label[-side]
            if term not in d.token_set and index.top_in_doc[d.id]
        ]
        counts = np.asarray([len(index.top_in_doc[d.id]) for d in candidates], dtype=np.int64)
        opp[side] = candidates
        opp_counts[side] = np.concatenate([[0], np.cumsum(counts)])
        totals[side] = int(opp_counts[side][-1])
    doc_offsets = np.concatenate(
        [[0], np.cumsum([totals[d.label] for d in docs_with_term], dtype=np.int64)]
    )
    return docs_with_term, opp, opp_counts, doc_offsets


def _decode_triples(index, docs_with_term, opp, opp_counts, doc_offsets, flats: np.ndarray):
    """Map flat candidate indices back to (doc, matched doc, matched term)."""
    doc_pos = np.searchsorted(doc_offsets, flats, side="right") - 1
    remainders = flats - doc_offsets[doc_pos]
    out = []
    for i, r in zip(doc_pos, remainders):
        d = docs_with_term[int(i)]
        cum = opp_counts[d.label]
        j = int(np.searchsorted(cum, r, side="right")) - 1
        d_star = opp[d.label][j]
        t_star = index.top_in_doc[d_star.id][int(r - cum[j])]
        out.append((d, d_star, t_star))
    return out


def closest_opposite_match(
    term: str,
    corpus: LabeledCorpus,
    top_terms: TopTermSet | Sequence[str],
    embedder: ContextEmbedder,
    max_pairs: int = DEFAULT_MAX_PAIRS,
    seed: int = 0,
    cache: EmbeddingCache | None = None,
    _index: _SearchIndex | None = None,
) -> Match | None:
    """Best-scoring opposite-label context match for ``term``, or None.

    Ties break toward the lexicographically smallest
    (doc_id, matched_doc_id, matched_term). Candidate triples beyond
    ``max_pairs`` are subsampled uniformly, deterministically in the seed.
    """
    terms = top_terms.terms if isinstance(top_terms, TopTermSet) else tuple(top_terms)
    index = _index or _SearchIndex(corpus, terms if term in terms else (*terms, term))
    docs_with_term, opp, opp_counts, doc_offsets = _term_candidates(index, term)
    total = int(doc_offsets[-1]) if len(docs_with_term) else 0
    if total == 0:
        return None

    if total > max_pairs:
        rng = np.random.default_rng(_stable_u64("pairs", seed, term))
        flats = np.sort(rng.choice(total, size=max_pairs, replace=False))
    else:
        flats = np.arange(total)
    triples = _decode_triples(index, docs_with_term, opp, opp_counts, doc_offsets, flats)

    cache = cache or EmbeddingCache(embedder)
    left_keys: dict[str, int] = {}
    right_keys: dict[tuple[str, str], int] = {}
    left_rows, right_rows = [], []
    left_idx = np.empty(len(triples), dtype=np.int64)
    right_idx = np.empty(len(triples), dtype=np.int64)
    for k, (d, d_star, t_star) in enumerate(triples):
        li = left_keys.get(d.id)
        if li is None:
            li = left_keys[d.id] = len(left_rows)
            left_rows.append(cache.unit_vector(context_of(d, term)))
        ri = right_keys.get((d_star.id, t_star))
        if ri is None:
            ri = right_keys[(d_star.id, t_star)] = len(right_rows)
            right_rows.append(cache.unit_vector(context_of(d_star, t_star)))
        left_idx[k] = li
        right_idx[k] = ri
    left_mat = np.stack(left_rows)
    right_mat = np.stack(right_rows)
    scores = np.empty(len(triples), dtype=np.float64)
    chunk = 8192  # bound the gathered-row working set
    for start in range(0, len(triples), chunk):
        sl = slice(start, start + chunk)
        scores[sl] = np.einsum(
            "ij,ij->i", left_mat[left_idx[sl]], right_mat[right_idx[sl]]
        )
    scores = np.clip(scores, -1.0, 1.0)

    top = np.flatnonzero(scores == scores.max())
    best = min(
        (int(i) for i in top),
        key=lambda i: (triples[i][0].id, triples[i][1].id, triples[i][2]),
    )
    d, d_star, t_star = triples[best]
    return Match(
        term=term,
        doc_id=d.id,
        matched_doc_id=d_star.id,
        matched_term=t_star,
        score=float(scores[best]),
    )


def match_all(
    corpus: LabeledCorpus,
    top_terms: TopTermSet | Sequence[str],
    embedder: ContextEmbedder,
    max_pairs: int = DEFAULT_MAX_PAIRS,
    seed: int = 0,
    jobs: int = 1,
) -> dict[str, Match]:
    """Closest opposite match per top term; terms without candidates are omitted.

    Per-term searches are independent; ``jobs`` controls the worker count
    without affecting the result.
    """
    terms = top_terms.terms if isinstance(top_terms, TopTermSet) else tuple(top_terms)
    cache = EmbeddingCache(embedder)
    index = _SearchIndex(corpus, terms)

    def search(term: str) -> Match | None:
        return closest_opposite_match(
            term, corpus, terms, embedder,
            max_pairs=max_pairs, seed=seed, cache=cache, _index=index,
        )

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(search, terms))
    else:
        results = [search(t) for t in terms]
    return {t: m for t, m in zip(terms, results) if m is not None}


def identify_causal_terms(
    matches: Mapping[str, Match], threshold: float = DEFAULT_MATCH_THRESHOLD
) -> CausalTermSet:
    """Terms whose best-match score meets the threshold, evidence retained."""
    if not 0 < threshold <= 1:
        raise ValueError("threshold must be in (0, 1]")
    selected = {t: m for t, m in matches.items() if m.score >= threshold}
    return CausalTermSet(terms=selected, threshold=threshold)


def precision_recall_curve(
    matches: Mapping[str, Match],
    annotated_causal: Iterable[str],
    thresholds: Sequence[float],
) -> list[dict]:
    """Precision/recall of thresholded causal-term prediction vs an annotation.

    Precision is None (with predicted count 0) when no term clears the
    threshold.
    """
    annotated = set(annotated_causal)
    if not annotated:
        raise ValueError("annotated causal term set must be nonempty")
    points = []
    for threshold in sorted(thresholds):
        predicted = {t for t, m in matches.items() if m.score >= threshold}
        hits = len(predicted & annotated)
        points.append(
            {
                "threshold": threshold,
                "precision": (hits / len(predicted)) if predicted else None,
                "recall": hits / len(annotated),
                "n_predicted": len(predicted),
            }
        )
    return points


def save_matches(matches: Mapping[str, Match], path: str | Path) -> None:
    records = [matches[t].to_dict() for t in sorted(matches)]
    Path(path).write_text(json.dumps(records, indent=2, sort_keys=True), encoding="utf-8")


def load_matches(path: str | Path) -> dict[str, Match]:
    records = json.loads(Path(path).read_text(encoding="utf-8"))
    return {r["term"]: Match(**r) for r in records}
