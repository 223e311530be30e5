"""Experiment grid: supervision levels, sweeps, and coefficient-change analyses.

The grid trains one classifier per supervision level, from original-data-only
up to human-written counterfactuals, and evaluates each on the original and
counterfactual test sets. All cells are deterministic in (data, config, seed)
and report rows carry the config hash needed to re-run them bit-identically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

from .config import Config
from .corpus import LabeledCorpus, Split
from .counterfactual import augment
from .features import Vocabulary, build_vocabulary
from .lexicon import AntonymCandidates, AntonymLexicon, antonyms_for
from .linear_model import LinearModel, accuracy, coefficient_of, fit, predict, top_terms


class SupervisionLevel(str, Enum):
    ORIGINAL_ONLY = "original_only"
    AUTO_PREDICTED_TERMS = "auto_predicted_terms"
    AUTO_ANNOTATED_TOP_TERMS = "auto_annotated_top_terms"
    AUTO_ANNOTATED_VOCAB_TERMS = "auto_annotated_vocab_terms"
    HUMAN_COUNTERFACTUALS = "human_counterfactuals"


LEVEL_ORDER = list(SupervisionLevel)


@dataclass(frozen=True)
class DatasetBundle:
    name: str
    train: LabeledCorpus
    test: LabeledCorpus
    ctf_test: LabeledCorpus | None = None
    human_ctf_train: LabeledCorpus | None = None
    kind: str = "long"  # "long" or "sentence"; picks the top-term threshold


@dataclass(frozen=True)
class CausalInputs:
    predicted: tuple[str, ...] | None = None
    annotated_top: tuple[str, ...] | None = None
    annotated_vocab: tuple[str, ...] | None = None


@dataclass(frozen=True)
class ReportRow:
    dataset: str
    level: str
    orig_accuracy: float | None
    ctf_accuracy: float | None
    n_train: int | None
    n_counterfactuals: int | None
    seed: int
    config_hash: str
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "level": self.level,
            "orig_accuracy": self.orig_accuracy,
            "ctf_accuracy": self.ctf_accuracy,
            "n_train": self.n_train,
            "n_counterfactuals": self.n_counterfactuals,
            "seed": self.seed,
            "config_hash": self.config_hash,
            "note": self.note,
        }


@dataclass(frozen=True)
class ExperimentReport:
    rows: tuple[ReportRow, ...]

    def row(self, dataset: str, level: SupervisionLevel | str) -> ReportRow:
        level = SupervisionLevel(level).value
        for r in self.rows:
            if r.dataset == dataset and r.level == level:
                return r
        raise KeyError(f"no row for ({dataset}, {level})")

    def to_json(self) -> str:
        return json.dumps([r.to_dict() for r in self.rows], indent=2, sort_keys=True)

    def to_markdown(self) -> str:
        datasets = sorted({r.dataset for r in self.rows})
        lines = []
        for ds in datasets:
            lines.append(f"### {ds}")
            lines.append("")
            lines.append("| Counterfactual training samples | Orig | CTF | n train | n ctf |")
            lines.append("|---|---|---|---|---|")
            for level in LEVEL_ORDER:
                try:
                    r = self.row(ds, level)
                except KeyError:
                    continue
                fmt = lambda v: "n/a" if v is None else f"{v:.3f}"
                n_tr = "n/a" if r.n_train is None else str(r.n_train)
                n_cf = "n/a" if r.n_counterfactuals is None else str(r.n_counterfactuals)
                lines.append(
                    f"| {level.value} | {fmt(r.orig_accuracy)} | {fmt(r.ctf_accuracy)} "
                    f"| {n_tr} | {n_cf} |"
                )
            lines.append("")
        return "\n".join(lines)


def exclude_test_leakage(train: LabeledCorpus, *test_sets: LabeledCorpus | None) -> LabeledCorpus:
    """Drop training documents that share an id lineage with any test document."""
    blocked: set[str] = set()
    for ts in test_sets:
        if ts is None:
            continue
        for d in ts:
            blocked.add(d.id)
            if d.source_id:
                blocked.add(d.source_id)
    kept = [d for d in train if d.id not in blocked and (d.source_id or d.id) not in blocked]
    if len(kept) == len(train):
        return train
    return train.with_documents(kept, leakage_excluded=len(train) - len(kept))


def antonym_candidates_for_terms(
    terms: Sequence[str],
    model: LinearModel,
    vocab: Vocabulary,
    lexicon: AntonymLexicon,
) -> dict[str, AntonymCandidates]:
    """Per-term antonym candidates; terms that fail lookup or filtering are dropped."""
    out: dict[str, AntonymCandidates] = {}
    for term in sorted(set(terms)):
        idx = vocab.term_to_index.get(term)
        if idx is None or model.coefficients[idx] == 0.0:
            continue
        candidates = antonyms_for(term, model, vocab, lexicon)
        if candidates is not None:
            out[term] = candidates
    return out


def _terms_for_level(
    level: SupervisionLevel,
    bundle: DatasetBundle,
    inputs: CausalInputs,
    baseline: LinearModel,
    vocab: Vocabulary,
    config: Config,
) -> tuple[str, ...]:
    if level == SupervisionLevel.AUTO_PREDICTED_TERMS:
        if inputs.predicted is None:
            raise ValueError(f"{bundle.name}: predicted causal terms required for {level.value}")
        return tuple(inputs.predicted)
    if level == SupervisionLevel.AUTO_ANNOTATED_TOP_TERMS:
        if inputs.annotated_top is not None:
            return tuple(inputs.annotated_top)
        if inputs.annotated_vocab is None:
            raise ValueError(f"{bundle.name}: annotated terms required for {level.value}")
        threshold = config.resolve_coef_threshold(bundle.kind)
        top = set(top_terms(baseline, vocab, threshold).terms)
        return tuple(t for t in inputs.annotated_vocab if t in top)
    if level == SupervisionLevel.AUTO_ANNOTATED_VOCAB_TERMS:
        if inputs.annotated_vocab is None:
            raise ValueError(f"{bundle.name}: annotated terms required for {level.value}")
        return tuple(inputs.annotated_vocab)
    raise ValueError(f"level {level} does not use a causal term list")


def build_level_corpus(
    level: SupervisionLevel,
    bundle: DatasetBundle,
    inputs: CausalInputs,
    baseline: LinearModel,
    vocab: Vocabulary,
    lexicon: AntonymLexicon,
    config: Config,
    train: LabeledCorpus | None = None,
) -> LabeledCorpus | None:
    """Training corpus for a supervision level; None when inputs are missing."""
    train = train if train is not None else bundle.train
    if level == SupervisionLevel.ORIGINAL_ONLY:
        return train
    if level == SupervisionLevel.HUMAN_COUNTERFACTUALS:
        if bundle.human_ctf_train is None:
            return None
        merged = list(train.documents) + list(bundle.human_ctf_train.documents)
        return LabeledCorpus(
            documents=tuple(merged),
            name=f"{train.name}+human",
            split=Split.TRAIN,
            meta={"n_counterfactuals": len(bundle.human_ctf_train), "n_originals": len(train)},
        )
    terms = _terms_for_level(level, bundle, inputs, baseline, vocab, config)
    candidates = antonym_candidates_for_terms(terms, baseline, vocab, lexicon)
    return augment(train, candidates, seed=config.seed)


def _evaluate(
    corpus: LabeledCorpus,
    bundle: DatasetBundle,
    config: Config,
    base_vocab: Vocabulary,
) -> tuple[float, float | None, LinearModel, Vocabulary]:
    vocab = build_vocabulary(corpus, config.min_df) if config.rebuild_vocab else base_vocab
    model = fit(corpus, vocab, l2_c=config.l2_c, seed=config.seed)
    orig_acc = accuracy(model, bundle.test, vocab)
    ctf_acc = accuracy(model, bundle.ctf_test, vocab) if bundle.ctf_test is not None else None
    return orig_acc, ctf_acc, model, vocab


def run_supervision_grid(
    datasets: Sequence[DatasetBundle],
    causal_inputs: Mapping[str, CausalInputs],
    config: Config,
    lexicon: AntonymLexicon,
    levels: Sequence[SupervisionLevel] | None = None,
) -> ExperimentReport:
    """Train and evaluate every (dataset, supervision level) cell."""
    levels = list(levels) if levels is not None else LEVEL_ORDER
    rows: list[ReportRow] = []
    for bundle in sorted(datasets, key=lambda b: b.name):
        inputs = causal_inputs.get(bundle.name, CausalInputs())
        train = exclude_test_leakage(bundle.train, bundle.test, bundle.ctf_test)
        vocab = build_vocabulary(train, config.min_df)
        baseline = fit(train, vocab, l2_c=config.l2_c, seed=config.seed)
        for level in levels:
            corpus = build_level_corpus(
                level, bundle, inputs, baseline, vocab, lexicon, config, train=train
            )
            if corpus is None:
                rows.append(
                    ReportRow(
                        dataset=bundle.name,
                        level=level.value,
                        orig_accuracy=None,
                        ctf_accuracy=None,
                        n_train=None,
                        n_counterfactuals=None,
                        seed=config.seed,
                        config_hash=config.hash(),
                        note="human counterfactual training data not available",
                    )
                )
                continue
            orig_acc, ctf_acc, _, _ = _evaluate(corpus, bundle, config, vocab)
            rows.append(
                ReportRow(
                    dataset=bundle.name,
                    level=level.value,
                    orig_accuracy=orig_acc,
                    ctf_accuracy=ctf_acc,
                    n_train=len(corpus),
                    n_counterfactuals=int(corpus.meta.get("n_counterfactuals", 0)),
                    seed=config.seed,
                    config_hash=config.hash(),
                )
            )
    return ExperimentReport(rows=tuple(rows))


def sweep_term_count(
    bundle: DatasetBundle,
    annotated_terms: Sequence[str],
    counts: Sequence[int],
    config: Config,
    lexicon: AntonymLexicon,
) -> list[dict]:
    """Counterfactual test accuracy as the annotated causal-term budget grows.

    Terms are consumed in descending baseline coefficient magnitude; counts
    beyond the list length are clipped.
    """
    train = exclude_test_leakage(bundle.train, bundle.test, bundle.ctf_test)
    vocab = build_vocabulary(train, config.min_df)
    baseline = fit(train, vocab, l2_c=config.l2_c, seed=config.seed)

    def magnitude(term: str) -> float:
        coef = coefficient_of(baseline, vocab, term)
        return abs(coef) if coef is not None else 0.0

    ordered = sorted(set(annotated_terms), key=lambda t: (-magnitude(t), t))
    rows = []
    for n in sorted(set(int(c) for c in counts)):
        n_used = min(n, len(ordered))
        candidates = antonym_candidates_for_terms(ordered[:n_used], baseline, vocab, lexicon)
        corpus = augment(train, candidates, seed=config.seed) if n_used else train
        orig_acc, ctf_acc, _, _ = _evaluate(corpus, bundle, config, vocab)
        rows.append(
            {
                "n_terms": n_used,
                "orig_accuracy": orig_acc,
                "ctf_accuracy": ctf_acc,
                "n_counterfactuals": int(corpus.meta.get("n_counterfactuals", 0)),
            }
        )
    return rows


def sweep_to_csv(rows: Sequence[dict]) -> str:
    lines = ["n,orig_acc,ctf_acc"]
    for r in rows:
        ctf = "" if r["ctf_accuracy"] is None else f"{r['ctf_accuracy']:.6f}"
        lines.append(f"{r['n_terms']},{r['orig_accuracy']:.6f},{ctf}")
    return "\n".join(lines) + "\n"


def coefficient_change_report(
    model_orig: LinearModel,
    model_robust: LinearModel,
    test_corpus: LabeledCorpus,
    causal_terms: Sequence[str],
    vocab: Vocabulary,
    vocab_robust: Vocabulary | None = None,
) -> dict:
    """Before/after coefficients, corrected samples, and causal/non-causal impact.

    A sample is corrected when the original model misclassifies it and the
    robust model does not. For a document with true label y, the change
    contributed by one term occurrence is y * (coef_robust - coef_orig);
    per-document and per-term aggregates are split causal vs non-causal.
    Magnitude-change aggregates (|coef_robust| - |coef_orig|, positive when a
    term gains importance) and raw per-term deltas are also emitted so other
    aggregations remain possible.
    """
    vocab_robust = vocab_robust or vocab
    causal = set(causal_terms)
    shared = sorted(set(vocab.index_to_term) & set(vocab_robust.index_to_term))
    per_term = []
    for term in shared:
        before = coefficient_of(model_orig, vocab, term)
        after = coefficient_of(model_robust, vocab_robust, term)
        per_term.append(
            {
                "term": term,
                "coef_orig": before,
                "coef_robust": after,
                "delta": after - before,
                "causal": term in causal,
            }
        )
    per_term.sort(key=lambda e: (-abs(e["delta"]), e["term"]))

    coef_o = {e["term"]: e["coef_orig"] for e in per_term}
    coef_r = {e["term"]: e["coef_robust"] for e in per_term}

    corrected = []
    doc_changes = {"causal": [], "non_causal": []}
    occurrence_changes = {"causal": [], "non_causal": []}
    doc_magnitude = {"causal": [], "non_causal": []}
    occurrence_magnitude = {"causal": [], "non_causal": []}
    for doc in test_corpus:
        pred_o, _ = predict(model_orig, doc, vocab)
        pred_r, _ = predict(model_robust, doc, vocab_robust)
        if not (pred_o != doc.label and pred_r == doc.label):
            continue
        terms_in_doc = sorted(set(doc.tokens) & set(coef_o))
        corrected.append(
            {
                "id": doc.id,
                "text": doc.raw_text,
                "label": doc.label,
                "terms": [
                    {"term": t, "coef_orig": coef_o[t], "coef_robust": coef_r[t]}
                    for t in terms_in_doc
                ],
            }
        )
        sums = {"causal": 0.0, "non_causal": 0.0}
        mag_sums = {"causal": 0.0, "non_causal": 0.0}
        for token in doc.tokens:
            if token not in coef_o:
                continue
            change = doc.label * (coef_r[token] - coef_o[token])
            magnitude_change = abs(coef_r[token]) - abs(coef_o[token])
            kind = "causal" if token in causal else "non_causal"
            sums[kind] += change
            mag_sums[kind] += magnitude_change
            occurrence_changes[kind].append(change)
            occurrence_magnitude[kind].append(magnitude_change)
        for kind in ("causal", "non_causal"):
            doc_changes[kind].append(sums[kind])
            doc_magnitude[kind].append(mag_sums[kind])

    def mean(values: list[float]) -> float | None:
        return float(np.mean(values)) if values else None

    return {
        "per_term": per_term,
        "corrected_samples": corrected,
        "n_corrected": len(corrected),
        "change_per_document": {k: mean(v) for k, v in doc_changes.items()},
        "change_per_term": {k: mean(v) for k, v in occurrence_changes.items()},
        "magnitude_change_per_document": {k: mean(v) for k, v in doc_magnitude.items()},
        "magnitude_change_per_term": {k: mean(v) for k, v in occurrence_magnitude.items()},
    }


def regularization_sweep(
    bundle: DatasetBundle,
    c_values: Sequence[float],
    config: Config,
) -> list[dict]:
    """Baseline accuracy on both test sets across inverse regularization strengths."""
    if any(c <= 0 for c in c_values):
        raise ValueError("all C values must be positive")
    train = exclude_test_leakage(bundle.train, bundle.test, bundle.ctf_test)
    vocab = build_vocabulary(train, config.min_df)
    rows = []
    for c in sorted(set(float(c) for c in c_values)):
        model = fit(train, vocab, l2_c=c, seed=config.seed)
        rows.append(
            {
                "c": c,
                "orig_accuracy": accuracy(model, bundle.test, vocab),
                "ctf_accuracy": (
                    accuracy(model, bundle.ctf_test, vocab)
                    if bundle.ctf_test is not None
                    else None
                ),
            }
        )
    return rows


def size_controlled_augment(
    bundle: DatasetBundle,
    level: SupervisionLevel,
    causal_inputs: CausalInputs,
    config: Config,
    lexicon: AntonymLexicon,
) -> ReportRow:
    """Downsample the augmented corpus to the original size, retrain, evaluate."""
    train = exclude_test_leakage(bundle.train, bundle.test, bundle.ctf_test)
    vocab = build_vocabulary(train, config.min_df)
    baseline = fit(train, vocab, l2_c=config.l2_c, seed=config.seed)
    corpus = build_level_corpus(
        level, bundle, causal_inputs, baseline, vocab, lexicon, config, train=train
    )
    if corpus is None:
        return ReportRow(
            dataset=bundle.name,
            level=level.value,
            orig_accuracy=None,
            ctf_accuracy=None,
            n_train=None,
            n_counterfactuals=None,
            seed=config.seed,
            config_hash=config.hash(),
            note="human counterfactual training data not available",
        )
    note = ""
    if len(corpus) > len(train):
        rng = np.random.default_rng(config.seed)
        keep = np.sort(rng.choice(len(corpus), size=len(train), replace=False))
        docs = [corpus.documents[i] for i in keep]
        n_ctf = sum(1 for d in docs if d.id.endswith("::ctf") or d.origin.value != "original")
        corpus = LabeledCorpus(
            documents=tuple(docs),
            name=f"{corpus.name}-sized",
            split=Split.TRAIN,
            meta={"n_counterfactuals": n_ctf, "size_controlled": True},
        )
    else:
        note = "augmented corpus not larger than original; size control is a no-op"
    orig_acc, ctf_acc, _, _ = _evaluate(corpus, bundle, config, vocab)
    return ReportRow(
        dataset=bundle.name,
        level=level.value,
        orig_accuracy=orig_acc,
        ctf_accuracy=ctf_acc,
        n_train=len(corpus),
        n_counterfactuals=int(corpus.meta.get("n_counterfactuals", 0)),
        seed=config.seed,
        config_hash=config.hash(),
        note=note,
    )
