"""Command-line entry point for the counterfactual augmentation pipeline.

Every subcommand writes its outputs into a fresh run directory
``runs/<timestamp>-<confighash>/`` together with the exact config snapshot,
so a run can be reproduced bit-for-bit (directory names carry the only
timestamp).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import corpus as corpus_mod
from .config import Config, PORT_ENV_VAR, make_embedder
from .counterfactual import generate_all, write_substitution_sidecar
from .experiments import (
    CausalInputs,
    DatasetBundle,
    SupervisionLevel,
    antonym_candidates_for_terms,
    coefficient_change_report,
    regularization_sweep,
    run_supervision_grid,
    sweep_term_count,
    sweep_to_csv,
)
from .features import build_vocabulary, save_vocabulary
from .lexicon import load_lexicon
from .linear_model import accuracy, fit, load_model, save_model, top_terms
from .matcher import identify_causal_terms, load_matches, match_all, save_matches

FIXTURE_NAMES = ("imdb-l-like", "imdb-s-like", "kindle-like", "match-fix", "spurious-demo")


def _load_split(path: str, split: str, name: str | None = None) -> corpus_mod.LabeledCorpus:
    return corpus_mod.load_corpus(path, split=split, name=name)


def resolve_bundle(args) -> DatasetBundle:
    """Dataset from --dataset fixture name or explicit --train/--test paths."""
    if getattr(args, "dataset", None):
        from . import synth

        name = args.dataset
        if name == "imdb-l-like":
            return synth.make_review_bundle()
        if name == "imdb-s-like":
            long_bundle = synth.make_review_bundle()
            keywords = _fixture_keywords(long_bundle)
            return synth.make_sentence_bundle(long_bundle, keywords)
        if name == "kindle-like":
            return synth.make_kindle_bundle()
        if name == "match-fix":
            return synth.make_matching_bundle()
        if name == "spurious-demo":
            train, flipped, _, _ = synth.make_spurious_demo()
            return DatasetBundle(name="spurious-demo", train=train, test=flipped,
                                 ctf_test=flipped, kind="sentence")
        raise SystemExit(f"unknown fixture dataset {name!r}; choose from {FIXTURE_NAMES}")
    if not getattr(args, "train", None):
        raise SystemExit("either --dataset or --train is required")
    train = _load_split(args.train, "train")
    test = _load_split(args.test, "test") if getattr(args, "test", None) else train
    ctf = _load_split(args.ctf_test, "test") if getattr(args, "ctf_test", None) else None
    human = (
        _load_split(args.human_ctf_train, "train")
        if getattr(args, "human_ctf_train", None)
        else None
    )
    return DatasetBundle(
        name=Path(args.train).stem,
        train=train,
        test=test,
        ctf_test=ctf,
        human_ctf_train=human,
        kind=getattr(args, "kind", "long"),
    )


def _fixture_keywords(bundle: DatasetBundle) -> set[str]:
    vocab = build_vocabulary(bundle.train)
    model = fit(bundle.train, vocab, l2_c=1.0, seed=0)
    return set(top_terms(model, vocab, 0.4).terms)


def config_from_args(args) -> Config:
    kwargs = {}
    for field in ("seed", "coef_threshold", "match_threshold", "l2_c", "min_df",
                  "embedder", "lexicon_path", "max_pairs", "jobs"):
        value = getattr(args, field.replace("-", "_"), None)
        if value is not None:
            kwargs[field] = value
    if getattr(args, "freeze_vocab", False):
        kwargs["rebuild_vocab"] = False
    return Config(**kwargs)


def make_run_dir(base: str, config: Config) -> Path:
    stamp = time.strftime("%Y%m%d-%H%M%S", time.gmtime())
    run_dir = Path(base) / f"{stamp}-{config.hash()}"
    run_dir.mkdir(parents=True, exist_ok=True)
    config.save(run_dir / "config.json")
    return run_dir


def _annotated_terms(args, bundle: DatasetBundle) -> tuple[str, ...] | None:
    if getattr(args, "annotated", None):
        lines = Path(args.annotated).read_text(encoding="utf-8").split()
        return tuple(sorted(set(lines)))
    if getattr(args, "dataset", None):
        from . import synth

        return synth.annotated_causal_terms(bundle)
    return None


def cmd_ingest(args) -> int:
    config = config_from_args(args)
    run_dir = make_run_dir(args.run_base, config)
    corpus = corpus_mod.load_corpus(args.input, format=args.format, split=args.split)
    if args.segment:
        if not args.keywords:
            raise SystemExit("--segment requires --keywords FILE")
        keywords = set(Path(args.keywords).read_text(encoding="utf-8").split())
        corpus = corpus_mod.segment_sentences(corpus, keywords)
    out = run_dir / "corpus.jsonl"
    corpus_mod.save_corpus(corpus, out)
    print(f"{len(corpus)} documents written to {out} "
          f"({corpus.meta.get('skipped', 0)} records skipped)")
    return 0


def cmd_train(args) -> int:
    config = config_from_args(args)
    run_dir = make_run_dir(args.run_base, config)
    bundle = resolve_bundle(args)
    vocab = build_vocabulary(bundle.train, config.min_df)
    model = fit(bundle.train, vocab, l2_c=config.l2_c, seed=config.seed)
    save_model(model, vocab, run_dir / "model.json")
    save_vocabulary(vocab, run_dir / "vocab.tsv")
    acc = accuracy(model, bundle.test, vocab)
    print(f"trained on {len(bundle.train)} docs, vocab {vocab.size}; "
          f"test accuracy {acc:.3f}; model at {run_dir/'model.json'}")
    return 0


def cmd_match(args) -> int:
    config = config_from_args(args)
    run_dir = make_run_dir(args.run_base, config)
    bundle = resolve_bundle(args)
    vocab = build_vocabulary(bundle.train, config.min_df)
    model = fit(bundle.train, vocab, l2_c=config.l2_c, seed=config.seed)
    threshold = config.resolve_coef_threshold(bundle.kind)
    terms = top_terms(model, vocab, threshold)
    embedder = make_embedder(config.embedder)
    matches = match_all(
        bundle.train, terms, embedder,
        max_pairs=config.max_pairs, seed=config.seed, jobs=config.jobs,
    )
    save_matches(matches, run_dir / "matches.json")
    print(f"{len(matches)} of {len(terms)} top terms matched; "
          f"report at {run_dir/'matches.json'}")
    return 0


def cmd_causal_terms(args) -> int:
    config = config_from_args(args)
    run_dir = make_run_dir(args.run_base, config)
    matches = load_matches(args.matches)
    causal = identify_causal_terms(matches, config.match_threshold)
    payload = {
        "threshold": causal.threshold,
        "terms": {t: causal.terms[t].to_dict() for t in causal.sorted_terms()},
    }
    out = run_dir / "causal_terms.json"
    out.write_text(json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8")
    print(f"{len(causal)} causal terms at threshold {causal.threshold}; {out}")
    return 0


def cmd_gen_ctf(args) -> int:
    config = config_from_args(args)
    run_dir = make_run_dir(args.run_base, config)
    bundle = resolve_bundle(args)
    lexicon = load_lexicon(config.lexicon_path)
    vocab = build_vocabulary(bundle.train, config.min_df)
    model = fit(bundle.train, vocab, l2_c=config.l2_c, seed=config.seed)
    if args.causal_terms:
        payload = json.loads(Path(args.causal_terms).read_text(encoding="utf-8"))
        terms = sorted(payload["terms"]) if isinstance(payload, dict) else sorted(payload)
    else:
        annotated = _annotated_terms(args, bundle)
        if annotated is None:
            raise SystemExit("gen-ctf needs --causal-terms or a fixture --dataset")
        terms = list(annotated)
    candidates = antonym_candidates_for_terms(terms, model, vocab, lexicon)
    samples = generate_all(bundle.train, candidates, seed=config.seed)
    ctf_corpus = corpus_mod.LabeledCorpus(
        documents=tuple(s.document for s in samples),
        name=f"{bundle.name}-ctf",
        split=corpus_mod.Split.TRAIN,
    )
    corpus_mod.save_corpus(ctf_corpus, run_dir / "counterfactuals.jsonl")
    write_substitution_sidecar(samples, run_dir / "substitutions.jsonl")
    print(f"{len(samples)} counterfactuals from {len(candidates)} substitutable terms; "
          f"{run_dir/'counterfactuals.jsonl'}")
    return 0


def cmd_grid(args) -> int:
    config = config_from_args(args)
    run_dir = make_run_dir(args.run_base, config)
    bundle = resolve_bundle(args)
    lexicon = load_lexicon(config.lexicon_path)
    annotated = _annotated_terms(args, bundle)
    predicted = None
    if getattr(args, "predicted", None):
        payload = json.loads(Path(args.predicted).read_text(encoding="utf-8"))
        predicted = tuple(sorted(payload["terms"])) if isinstance(payload, dict) else tuple(sorted(payload))
    inputs = CausalInputs(predicted=predicted, annotated_vocab=annotated)
    levels = [SupervisionLevel.ORIGINAL_ONLY]
    if predicted is not None:
        levels.append(SupervisionLevel.AUTO_PREDICTED_TERMS)
    if annotated is not None:
        levels.extend(
            [SupervisionLevel.AUTO_ANNOTATED_TOP_TERMS, SupervisionLevel.AUTO_ANNOTATED_VOCAB_TERMS]
        )
    levels.append(SupervisionLevel.HUMAN_COUNTERFACTUALS)
    report = run_supervision_grid([bundle], {bundle.name: inputs}, config, lexicon, levels=levels)
    (run_dir / "report.json").write_text(report.to_json() + "\n", encoding="utf-8")
    (run_dir / "report.md").write_text(report.to_markdown() + "\n", encoding="utf-8")
    print(report.to_markdown())
    print(f"report at {run_dir/'report.json'}")
    return 0


def cmd_sweep(args) -> int:
    config = config_from_args(args)
    run_dir = make_run_dir(args.run_base, config)
    bundle = resolve_bundle(args)
    lexicon = load_lexicon(config.lexicon_path)
    annotated = _annotated_terms(args, bundle)
    if annotated is None:
        raise SystemExit("sweep needs --annotated FILE or a fixture --dataset")
    counts = [int(c) for c in args.counts.split(",")]
    rows = sweep_term_count(bundle, annotated, counts, config, lexicon)
    (run_dir / "sweep.csv").write_text(sweep_to_csv(rows), encoding="utf-8")
    for row in rows:
        ctf = "n/a" if row["ctf_accuracy"] is None else f"{row['ctf_accuracy']:.3f}"
        print(f"n={row['n_terms']:4d}  orig={row['orig_accuracy']:.3f}  ctf={ctf}")
    print(f"curve at {run_dir/'sweep.csv'}")
    return 0


def cmd_coef_report(args) -> int:
    config = config_from_args(args)
    run_dir = make_run_dir(args.run_base, config)
    model_orig, vocab_orig = load_model(args.model_orig)
    model_robust, vocab_robust = load_model(args.model_robust)
    test = _load_split(args.test, "test")
    causal = Path(args.causal_terms).read_text(encoding="utf-8").split() if args.causal_terms else []
    report = coefficient_change_report(
        model_orig, model_robust, test, causal, vocab_orig, vocab_robust
    )
    out = run_dir / "coef_report.json"
    out.write_text(json.dumps(report, indent=2, sort_keys=True), encoding="utf-8")
    agg = report["change_per_document"]
    print(f"{report['n_corrected']} corrected samples; per-document change "
          f"causal={agg['causal']} non-causal={agg['non_causal']}; {out}")
    return 0


def cmd_reg_sweep(args) -> int:
    config = config_from_args(args)
    run_dir = make_run_dir(args.run_base, config)
    bundle = resolve_bundle(args)
    c_values = [float(c) for c in args.c_values.split(",")]
    rows = regularization_sweep(bundle, c_values, config)
    (run_dir / "reg_sweep.json").write_text(
        json.dumps(rows, indent=2, sort_keys=True), encoding="utf-8"
    )
    for row in rows:
        ctf = "n/a" if row["ctf_accuracy"] is None else f"{row['ctf_accuracy']:.3f}"
        print(f"C={row['c']:<8g} orig={row['orig_accuracy']:.3f} ctf={ctf}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import build_app

    port = args.port or int(os.environ.get(PORT_ENV_VAR, "8000"))
    config = config_from_args(args)
    bundle = resolve_bundle(args)
    app = build_app(
        bundle,
        config,
        session_dir=Path(args.session_dir),
        static_dir=Path(args.static_dir) if args.static_dir else None,
    )
    uvicorn.run(app, host=args.host, port=port)
    return 0


def _add_dataset_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dataset", help=f"built-in fixture dataset: {', '.join(FIXTURE_NAMES)}")
    p.add_argument("--train", help="training corpus (JSONL/CSV)")
    p.add_argument("--test", help="original test corpus")
    p.add_argument("--ctf-test", dest="ctf_test", help="counterfactual test corpus")
    p.add_argument("--human-ctf-train", dest="human_ctf_train",
                   help="human-written counterfactual training corpus")
    p.add_argument("--kind", choices=("long", "sentence"), default="long",
                   help="text granularity; sets the default top-term threshold")


def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int)
    p.add_argument("--coef-threshold", dest="coef_threshold", type=float)
    p.add_argument("--match-threshold", dest="match_threshold", type=float)
    p.add_argument("--l2-c", dest="l2_c", type=float)
    p.add_argument("--min-df", dest="min_df", type=int)
    p.add_argument("--embedder", help="hash:<dim>[:<seed>] | wordvec:<path> | precomputed:<path>")
    p.add_argument("--lexicon", dest="lexicon_path")
    p.add_argument("--max-pairs", dest="max_pairs", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--freeze-vocab", action="store_true",
                   help="keep the original vocabulary when retraining on augmented data")
    p.add_argument("--run-base", dest="run_base", default="runs",
                   help="parent directory for run outputs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctfaug",
        description="Counterfactual data augmentation for robust text classification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load, label, and canonicalize a corpus")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("jsonl", "csv"))
    p.add_argument("--split", choices=("train", "test"), default="train")
    p.add_argument("--segment", action="store_true", help="split into keyword-bearing sentences")
    p.add_argument("--keywords", help="whitespace-separated keyword file for --segment")
    _add_config_args(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("train", help="fit the baseline classifier")
    _add_dataset_args(p)
    _add_config_args(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("match", help="closest-opposite-match search over top terms")
    _add_dataset_args(p)
    _add_config_args(p)
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("causal-terms", help="threshold matches into causal terms")
    p.add_argument("--matches", required=True, help="matches.json from the match step")
    _add_config_args(p)
    p.set_defaults(func=cmd_causal_terms)

    p = sub.add_parser("gen-ctf", help="generate counterfactual training samples")
    _add_dataset_args(p)
    p.add_argument("--causal-terms", dest="causal_terms", help="causal_terms.json or term list")
    p.add_argument("--annotated", help="whitespace-separated annotated causal term file")
    _add_config_args(p)
    p.set_defaults(func=cmd_gen_ctf)

    p = sub.add_parser("grid", help="run the supervision-level experiment grid")
    _add_dataset_args(p)
    p.add_argument("--annotated", help="annotated causal term file")
    p.add_argument("--predicted", help="predicted causal terms (causal_terms.json)")
    _add_config_args(p)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("sweep", help="accuracy vs number of annotated causal terms")
    _add_dataset_args(p)
    p.add_argument("--annotated", help="annotated causal term file")
    p.add_argument("--counts", default="0,10,25,50,100,150,200",
                   help="comma-separated term budgets")
    _add_config_args(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("coef-report", help="coefficient changes between two models")
    p.add_argument("--model-orig", dest="model_orig", required=True)
    p.add_argument("--model-robust", dest="model_robust", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--causal-terms", dest="causal_terms", help="annotated causal term file")
    _add_config_args(p)
    p.set_defaults(func=cmd_coef_report)

    p = sub.add_parser("reg-sweep", help="baseline accuracy across L2 strengths")
    _add_dataset_args(p)
    p.add_argument("--c-values", dest="c_values", default="0.01,0.1,1,10,100")
    _add_config_args(p)
    p.set_defaults(func=cmd_reg_sweep)

    p = sub.add_parser("serve", help="run the annotation service")
    _add_dataset_args(p)
    p.add_argument("--port", type=int, help=f"default from ${PORT_ENV_VAR} or 8000")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--session-dir", dest="session_dir", default="sessions")
    p.add_argument("--static-dir", dest="static_dir", help="UI bundle directory to serve")
    _add_config_args(p)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
