"""HTTP service for human-in-the-loop causal-term annotation.

Presents top terms with their closest-opposite-match evidence and antonym
candidates, records per-term decisions, and retrains on demand, reporting
accuracy on both test sets plus the largest coefficient changes. Session
state lives in one JSON file per session and every mutation is persisted
before the response goes out.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import asdict, dataclass, field
from pathlib import Path

from fastapi import Body, FastAPI, HTTPException, Query
from fastapi.staticfiles import StaticFiles

from .config import Config, make_embedder
from .counterfactual import augment, generate
from .experiments import DatasetBundle
from .features import build_vocabulary
from .lexicon import AntonymCandidates, antonyms_for, load_lexicon
from .linear_model import accuracy, coefficient_of, fit, top_terms
from .matcher import match_all

RETRAIN_BUDGET_SECONDS = 120.0


@dataclass
class SessionState:
    session_id: str
    dataset: str
    decisions: dict[str, dict] = field(default_factory=dict)
    revision: int = 0
    last_report: dict | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, payload: dict) -> "SessionState":
        return cls(**payload)


class SessionStore:
    """One JSON file per session; writes are atomic and serialized per session."""

    def __init__(self, directory: Path):
        self.directory = directory
        self.directory.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._sessions: dict[str, SessionState] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._retrain_locks: dict[str, threading.Lock] = {}

    def _path(self, session_id: str) -> Path:
        safe = "".join(c for c in session_id if c.isalnum() or c in "-_")
        if not safe:
            raise HTTPException(status_code=400, detail="invalid session id")
        return self.directory / f"{safe}.json"

    def lock_for(self, session_id: str) -> threading.Lock:
        with self._lock:
            return self._locks.setdefault(session_id, threading.Lock())

    def retrain_lock_for(self, session_id: str) -> threading.Lock:
        with self._lock:
            return self._retrain_locks.setdefault(session_id, threading.Lock())

    def get(self, session_id: str, dataset: str) -> SessionState:
        with self._lock:
            state = self._sessions.get(session_id)
        if state is not None:
            return state
        path = self._path(session_id)
        if path.is_file():
            state = SessionState.from_dict(json.loads(path.read_text(encoding="utf-8")))
        else:
            state = SessionState(session_id=session_id, dataset=dataset)
        with self._lock:
            self._sessions[session_id] = state
        return state

    def persist(self, state: SessionState) -> None:
        path = self._path(state.session_id)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(state.to_dict(), indent=2, sort_keys=True), encoding="utf-8")
        os.replace(tmp, path)


class Workspace:
    """Shared immutable snapshot: corpora, baseline model, matches, antonyms."""

    def __init__(self, bundle: DatasetBundle, config: Config):
        self.bundle = bundle
        self.config = config
        self.lexicon = load_lexicon(config.lexicon_path)
        self.vocab = build_vocabulary(bundle.train, config.min_df)
        self.baseline = fit(bundle.train, self.vocab, l2_c=config.l2_c, seed=config.seed)
        threshold = config.resolve_coef_threshold(bundle.kind)
        self.top_terms = top_terms(self.baseline, self.vocab, threshold)
        embedder = make_embedder(config.embedder)
        self.matches = match_all(
            bundle.train,
            self.top_terms,
            embedder,
            max_pairs=config.max_pairs,
            seed=config.seed,
            jobs=config.jobs,
        )
        self._antonym_cache: dict[str, AntonymCandidates | None] = {}

    def offered_antonyms(self, term: str) -> AntonymCandidates | None:
        if term not in self._antonym_cache:
            try:
                self._antonym_cache[term] = antonyms_for(
                    term, self.baseline, self.vocab, self.lexicon
                )
            except ValueError:
                self._antonym_cache[term] = None
        return self._antonym_cache[term]

    def candidate_rows(self, state: SessionState) -> list[dict]:
        by_id = self.bundle.train.by_id()
        rows = []
        for term, coef in self.top_terms.entries:
            match = self.matches.get(term)
            evidence = None
            if match is not None:
                evidence = match.to_dict()
                evidence["doc_text"] = by_id[match.doc_id].raw_text
                evidence["matched_doc_text"] = by_id[match.matched_doc_id].raw_text
            predicted = match is not None and match.score >= self.config.match_threshold
            decision = state.decisions.get(term)
            offered = self.offered_antonyms(term)
            rows.append(
                {
                    "term": term,
                    "coefficient": coef,
                    "best_match": evidence,
                    "predicted_causal": predicted,
                    "antonym_candidates": list(offered.antonym_terms) if offered else [],
                    "decision": decision,
                }
            )
        return rows


def _selected_antonyms(workspace: Workspace, state: SessionState) -> dict[str, AntonymCandidates]:
    selected: dict[str, AntonymCandidates] = {}
    for term, decision in sorted(state.decisions.items()):
        if not decision.get("causal"):
            continue
        offered = workspace.offered_antonyms(term)
        if offered is None:
            continue
        chosen = decision.get("antonyms") or list(offered.antonym_terms)
        kept = tuple((a, c) for a, c in offered.candidates if a in set(chosen))
        if kept:
            selected[term] = AntonymCandidates(
                term=term, term_coef=offered.term_coef, candidates=kept
            )
    return selected


def _retrain(workspace: Workspace, state: SessionState, seed: int) -> dict:
    causal_antonyms = _selected_antonyms(workspace, state)
    if not causal_antonyms:
        raise HTTPException(
            status_code=400,
            detail="retrain requires at least one causal term with an antonym",
        )
    bundle = workspace.bundle
    config = workspace.config
    augmented = augment(bundle.train, causal_antonyms, seed=seed)
    vocab = build_vocabulary(augmented, config.min_df) if config.rebuild_vocab else workspace.vocab
    model = fit(augmented, vocab, l2_c=config.l2_c, seed=seed)
    orig_acc = accuracy(model, bundle.test, vocab)
    ctf_acc = (
        accuracy(model, bundle.ctf_test, vocab) if bundle.ctf_test is not None else None
    )
    shared = sorted(set(workspace.vocab.index_to_term) & set(vocab.index_to_term))
    deltas = []
    for term in shared:
        before = coefficient_of(workspace.baseline, workspace.vocab, term)
        after = coefficient_of(model, vocab, term)
        deltas.append({"term": term, "before": before, "after": after, "delta": after - before})
    deltas.sort(key=lambda d: (-abs(d["delta"]), d["term"]))
    return {
        "dataset": bundle.name,
        "orig_accuracy": orig_acc,
        "ctf_accuracy": ctf_acc,
        "n_train": len(augmented),
        "n_counterfactuals": int(augmented.meta.get("n_counterfactuals", 0)),
        "n_causal_terms": len(causal_antonyms),
        "seed": seed,
        "config_hash": config.hash(),
        "coefficient_deltas": deltas[:10],
    }


def build_app(
    bundle: DatasetBundle,
    config: Config,
    session_dir: Path | str = "sessions",
    static_dir: Path | str | None = None,
) -> FastAPI:
    app = FastAPI(title="ctfaug annotation service")
    workspace = Workspace(bundle, config)
    store = SessionStore(Path(session_dir))
    app.state.workspace = workspace
    app.state.store = store

    def session(session_id: str) -> SessionState:
        return store.get(session_id, workspace.bundle.name)

    @app.get("/api/session/{session_id}/candidates")
    def list_candidates(session_id: str):
        state = session(session_id)
        return {
            "session_id": state.session_id,
            "dataset": state.dataset,
            "revision": state.revision,
            "candidates": workspace.candidate_rows(state),
        }

    @app.post("/api/session/{session_id}/annotations")
    def submit_annotation(session_id: str, payload: dict = Body(...)):
        term = payload.get("term")
        causal = payload.get("causal")
        antonyms = payload.get("antonyms") or []
        if not isinstance(term, str) or not isinstance(causal, bool):
            raise HTTPException(status_code=400, detail="body must carry term and causal")
        if term not in workspace.top_terms:
            raise HTTPException(status_code=400, detail=f"unknown candidate term {term!r}")
        offered = workspace.offered_antonyms(term)
        offered_terms = set(offered.antonym_terms) if offered else set()
        unknown = [a for a in antonyms if a not in offered_terms]
        if unknown:
            raise HTTPException(
                status_code=400,
                detail=f"antonyms not among offered candidates: {unknown}",
            )
        decision = {"causal": causal, "antonyms": sorted(antonyms)}
        state = session(session_id)
        lock = store.lock_for(session_id)
        with lock:
            if state.decisions.get(term) != decision:
                state.decisions[term] = decision
                state.revision += 1
                store.persist(state)
        return {
            "session_id": state.session_id,
            "revision": state.revision,
            "term": term,
            "decision": decision,
        }

    @app.get("/api/session/{session_id}/antonyms")
    def antonym_candidates(session_id: str, term: str = Query(...)):
        session(session_id)
        if term not in workspace.top_terms:
            raise HTTPException(status_code=400, detail=f"unknown candidate term {term!r}")
        offered = workspace.offered_antonyms(term)
        return {
            "term": term,
            "candidates": [
                {"antonym": a, "coefficient": c} for a, c in (offered.candidates if offered else ())
            ],
        }

    @app.post("/api/session/{session_id}/retrain")
    def retrain(session_id: str, payload: dict = Body(default={})):
        seed = int(payload.get("seed", workspace.config.seed))
        state = session(session_id)
        retrain_lock = store.retrain_lock_for(session_id)
        if not retrain_lock.acquire(blocking=False):
            raise HTTPException(status_code=409, detail="retrain already running")
        try:
            report = _retrain(workspace, state, seed)
            lock = store.lock_for(session_id)
            with lock:
                state.last_report = report
                state.revision += 1
                store.persist(state)
            return {"revision": state.revision, "report": report}
        finally:
            retrain_lock.release()

    @app.get("/api/session/{session_id}/report")
    def last_report(session_id: str):
        state = session(session_id)
        if state.last_report is None:
            raise HTTPException(status_code=404, detail="no retrain has completed yet")
        return {"revision": state.revision, "report": state.last_report}

    @app.get("/api/session/{session_id}/counterfactuals")
    def preview_counterfactuals(
        session_id: str,
        term: str | None = Query(default=None),
        limit: int = Query(default=10, ge=1, le=200),
    ):
        state = session(session_id)
        causal_antonyms = _selected_antonyms(workspace, state)
        if term is not None:
            if term not in causal_antonyms:
                return {"term": term, "counterfactuals": []}
            causal_antonyms = {term: causal_antonyms[term]}
        previews = []
        for doc in workspace.bundle.train:
            if term is not None and term not in doc.token_set:
                continue
            sample = generate(doc, causal_antonyms, seed=workspace.config.seed) if causal_antonyms else None
            if sample is None:
                continue
            previews.append(
                {
                    "source_id": sample.source_id,
                    "original": doc.raw_text,
                    "counterfactual": sample.document.raw_text,
                    "label": sample.document.label,
                    "substitutions": [[p, o, a] for p, o, a in sample.substitutions],
                }
            )
            if len(previews) >= limit:
                break
        return {"term": term, "counterfactuals": previews}

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
