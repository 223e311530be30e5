import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE_RESULTS: list[str] = []


def record_acceptance(name: str, detail: str) -> None:
    ACCEPTANCE_RESULTS.append(f"[PASS] {name}: {detail}")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_RESULTS:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)

from ctfaug.corpus import Document, LabeledCorpus, Split
from ctfaug.features import build_vocabulary
from ctfaug.lexicon import load_lexicon
from ctfaug.linear_model import fit


def doc(doc_id, text, label, **kwargs):
    return Document.make(id=doc_id, raw_text=text, label=label, **kwargs)


def corpus(pairs, name="tiny", split=Split.TRAIN):
    docs = [doc(f"d{i}", text, label) for i, (text, label) in enumerate(pairs)]
    return LabeledCorpus(documents=tuple(docs), name=name, split=split)


@pytest.fixture
def tiny_corpus():
    return corpus(
        [
            ("fantastic film", 1),
            ("terrible film", -1),
            ("great story and great acting", 1),
            ("boring story", -1),
            ("the movie was interesting", 1),
            ("the movie was dull", -1),
        ]
    )


@pytest.fixture
def tiny_model(tiny_corpus):
    vocab = build_vocabulary(tiny_corpus)
    return fit(tiny_corpus, vocab, l2_c=1.0, seed=0), vocab


@pytest.fixture(scope="session")
def starter_lexicon():
    return load_lexicon()


@pytest.fixture(scope="session")
def review_bundle():
    from ctfaug.synth import make_review_bundle

    return make_review_bundle()


@pytest.fixture(scope="session")
def review_baseline(review_bundle):
    vocab = build_vocabulary(review_bundle.train)
    model = fit(review_bundle.train, vocab, l2_c=1.0, seed=0)
    return model, vocab
