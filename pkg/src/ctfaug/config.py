"""Run configuration shared by the CLI, experiment harness, and service."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path

from .matcher import (
    AveragedWordVectors,
    ContextEmbedder,
    HashedRandomVectors,
    PrecomputedLookup,
)

# Coefficient thresholds for top-term extraction by text granularity.
COEF_THRESHOLD_LONG = 0.4
COEF_THRESHOLD_SENTENCE = 1.0

EMBEDDINGS_ENV_VAR = "CTF_EMBEDDINGS"
PORT_ENV_VAR = "CTF_PORT"


@dataclass(frozen=True)
class Config:
    seed: int = 7
    coef_threshold: float | None = None  # None: resolved per dataset kind
    match_threshold: float = 0.95
    l2_c: float = 1.0
    min_df: int = 1
    embedder: str = "hash:256"
    lexicon_path: str | None = None  # None: packaged starter lexicon
    max_pairs: int = 5000
    jobs: int = 1
    rebuild_vocab: bool = True  # rebuild vocabulary over the augmented corpus

    def __post_init__(self):
        if self.coef_threshold is not None and self.coef_threshold <= 0:
            raise ValueError("coef_threshold must be positive")
        if not 0 < self.match_threshold <= 1:
            raise ValueError("match_threshold must be in (0, 1]")
        if self.l2_c <= 0:
            raise ValueError("l2_c must be positive")
        if self.min_df < 1:
            raise ValueError("min_df must be >= 1")
        if self.max_pairs < 1:
            raise ValueError("max_pairs must be >= 1")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")

    def resolve_coef_threshold(self, dataset_kind: str) -> float:
        if self.coef_threshold is not None:
            return self.coef_threshold
        return COEF_THRESHOLD_LONG if dataset_kind == "long" else COEF_THRESHOLD_SENTENCE

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "Config":
        return cls(**json.loads(Path(path).read_text(encoding="utf-8")))


def make_embedder(spec: str | None) -> ContextEmbedder:
    """Build an embedder from a spec string.

    Specs: ``hash:<dim>[:<seed>]``, ``wordvec:<path>``, ``precomputed:<path>``.
    A bare path (or a None spec with ``CTF_EMBEDDINGS`` set) is treated as a
    word-vector file.
    """
    if spec is None:
        spec = os.environ.get(EMBEDDINGS_ENV_VAR)
        if spec is None:
            raise ValueError(
                f"no embedder spec given and {EMBEDDINGS_ENV_VAR} is not set"
            )
    if spec.startswith("hash:"):
        parts = spec.split(":")
        dim = int(parts[1])
        seed = int(parts[2]) if len(parts) > 2 else 0
        return HashedRandomVectors(dimension=dim, seed=seed)
    if spec.startswith("wordvec:"):
        return AveragedWordVectors(spec.split(":", 1)[1])
    if spec.startswith("precomputed:"):
        return PrecomputedLookup(spec.split(":", 1)[1])
    return AveragedWordVectors(spec)
