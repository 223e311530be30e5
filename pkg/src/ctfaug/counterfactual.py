"""Counterfactual sample generation: antonym substitution with label flip.

Every occurrence of every causal term in a document is substituted; when a
term has several candidate antonyms one is drawn uniformly per occurrence.
Documents containing no substitutable causal term yield no counterfactual.
Per-document generators are derived from the global seed and the document id,
so parallel generation order cannot change the output.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

from .corpus import Document, LabeledCorpus, Origin, Split
from .lexicon import AntonymCandidates


@dataclass(frozen=True)
class CounterfactualSample:
    document: Document
    substitutions: tuple[tuple[int, str, str], ...]
    source_id: str

    def __post_init__(self):
        if not self.substitutions:
            raise ValueError("a counterfactual sample requires at least one substitution")
        if self.document.origin != Origin.AUTO_COUNTERFACTUAL:
            raise ValueError("counterfactual documents must carry the auto_counterfactual origin")


def _doc_rng(seed: int, doc_id: str) -> np.random.Generator:
    digest = hashlib.sha256(f"{seed}:{doc_id}".encode("utf-8")).digest()
    return np.random.default_rng(int.from_bytes(digest[:8], "big"))


def generate(
    doc: Document,
    causal_antonyms: Mapping[str, AntonymCandidates],
    seed: int = 0,
) -> CounterfactualSample | None:
    """Substitute causal terms with antonyms and flip the label, or None.

    Causal terms without candidates are left in place; the document is
    eligible as long as at least one substitution happened.
    """
    if not causal_antonyms:
        raise ValueError("causal_antonyms must be nonempty")
    rng = _doc_rng(seed, doc.id)
    new_tokens: list[str] = []
    substitutions: list[tuple[int, str, str]] = []
    for pos, token in enumerate(doc.tokens):
        candidates = causal_antonyms.get(token)
        if candidates is not None and candidates.antonym_terms:
            options = candidates.antonym_terms
            antonym = options[int(rng.integers(len(options)))]
            new_tokens.append(antonym)
            substitutions.append((pos, token, antonym))
        else:
            new_tokens.append(token)
    if not substitutions:
        return None
    flipped = Document.make(
        id=f"{doc.id}::ctf",
        raw_text=" ".join(new_tokens),
        label=-doc.label,
        origin=Origin.AUTO_COUNTERFACTUAL,
        source_id=doc.id,
    )
    return CounterfactualSample(
        document=flipped,
        substitutions=tuple(substitutions),
        source_id=doc.id,
    )


def augment(
    corpus: LabeledCorpus,
    causal_antonyms: Mapping[str, AntonymCandidates],
    seed: int = 0,
) -> LabeledCorpus:
    """Original documents first, then one counterfactual per eligible original.

    The generation count lands in ``meta["n_counterfactuals"]``.
    """
    if corpus.split != Split.TRAIN:
        raise ValueError("augmentation is defined for the training split only")
    samples = []
    if causal_antonyms:
        for doc in corpus:
            sample = generate(doc, causal_antonyms, seed=seed)
            if sample is not None:
                samples.append(sample)
    documents = list(corpus.documents) + [s.document for s in samples]
    return LabeledCorpus(
        documents=tuple(documents),
        name=f"{corpus.name}+ctf",
        split=corpus.split,
        meta={
            **corpus.meta,
            "n_counterfactuals": len(samples),
            "n_originals": len(corpus),
        },
    )


def write_substitution_sidecar(samples: list[CounterfactualSample], path: str | Path) -> None:
    """JSONL sidecar: one ``{"source_id", "substitutions"}`` record per sample."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for sample in samples:
            record = {
                "source_id": sample.source_id,
                "substitutions": [[p, o, a] for p, o, a in sample.substitutions],
            }
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def generate_all(
    corpus: LabeledCorpus,
    causal_antonyms: Mapping[str, AntonymCandidates],
    seed: int = 0,
) -> list[CounterfactualSample]:
    out = []
    for doc in corpus:
        sample = generate(doc, causal_antonyms, seed=seed)
        if sample is not None:
            out.append(sample)
    return out
