"""Service-side walk of the UI's API sequence, with the built bundle served.

The browser-level behavior itself is covered by the frontend vitest suite
(frontend/tests/uiloop.test.ts); here the same annotate -> retrain -> report
sequence runs against the real service, and the compiled bundle is served
from the static route when it has been built.
"""

from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from ctfaug.config import Config
from ctfaug.service import build_app
from ctfaug.synth import ReviewFixtureParams, make_review_bundle

FRONTEND_DIST = Path(__file__).resolve().parent.parent / "frontend" / "dist"


@pytest.fixture(scope="module")
def ui_client(tmp_path_factory):
    params = ReviewFixtureParams(n_train_per_class=100, n_test_per_class=50)
    bundle = make_review_bundle(seed=41, params=params)
    config = Config(seed=3, embedder="hash:64", max_pairs=800, coef_threshold=0.5)
    app = build_app(
        bundle,
        config,
        session_dir=tmp_path_factory.mktemp("sessions"),
        static_dir=FRONTEND_DIST if FRONTEND_DIST.is_dir() else None,
    )
    return TestClient(app)


def test_annotate_three_terms_retrain_and_reload(ui_client):
    payload = ui_client.get("/api/session/ui/candidates").json()
    with_antonyms = [r for r in payload["candidates"] if r["antonym_candidates"]]
    assert len(with_antonyms) >= 3

    for row in with_antonyms[:3]:
        reply = ui_client.post(
            "/api/session/ui/annotations",
            json={"term": row["term"], "causal": True,
                  "antonyms": row["antonym_candidates"][:1]},
        )
        assert reply.status_code == 200

    retrain = ui_client.post("/api/session/ui/retrain", json={"seed": 7})
    assert retrain.status_code == 200
    report = retrain.json()["report"]
    assert 0.0 <= report["orig_accuracy"] <= 1.0
    assert 0.0 <= report["ctf_accuracy"] <= 1.0
    assert len(report["coefficient_deltas"]) >= 1

    # what a hard page reload sees: candidates carry the decisions, the
    # report endpoint returns the same report
    reloaded = ui_client.get("/api/session/ui/candidates").json()
    decided = [r for r in reloaded["candidates"] if r["decision"]]
    assert len(decided) == 3
    stored = ui_client.get("/api/session/ui/report").json()
    assert stored["report"] == report


@pytest.mark.skipif(not FRONTEND_DIST.is_dir(), reason="frontend bundle not built")
def test_built_bundle_served_from_static_route(ui_client):
    index = ui_client.get("/")
    assert index.status_code == 200
    assert 'id="app"' in index.text
    for asset in ("main.js", "styles.css", "state.js", "render.js"):
        reply = ui_client.get(f"/{asset}")
        assert reply.status_code == 200, asset
