import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ctfaug.corpus import Document, LabeledCorpus, Origin, Split
from ctfaug.counterfactual import augment, generate, generate_all, write_substitution_sidecar
from ctfaug.lexicon import AntonymCandidates


def candidates(term, coef, *antonyms):
    return AntonymCandidates(
        term=term,
        term_coef=coef,
        candidates=tuple((a, -np.sign(coef) * (i + 1) / 10) for i, a in enumerate(antonyms)),
    )


BORING_MAP = {"boring": candidates("boring", -2.592, "interesting")}


def doc(text, label, doc_id="d0"):
    return Document.make(id=doc_id, raw_text=text, label=label)


class TestGenerate:
    def test_flagship_substitution(self):
        d = doc("this was a free book that sounded boring to me", -1)
        sample = generate(d, BORING_MAP, seed=0)
        assert sample.document.raw_text == "this was a free book that sounded interesting to me"
        assert sample.document.label == 1
        assert sample.document.origin == Origin.AUTO_COUNTERFACTUAL
        assert sample.document.source_id == "d0"
        assert sample.substitutions == ((7, "boring", "interesting"),)

    def test_doc_without_causal_terms_yields_none(self):
        assert generate(doc("plain text here", 1), BORING_MAP, seed=0) is None

    def test_terrible_movie_becomes_fantastic_movie(self):
        mapping = {"terrible": candidates("terrible", -1.283, "fantastic")}
        sample = generate(doc("terrible movie", -1), mapping, seed=0)
        assert sample.document.raw_text == "fantastic movie"
        assert sample.document.label == 1

    def test_all_occurrences_substituted(self):
        sample = generate(doc("boring and boring again", -1), BORING_MAP, seed=0)
        assert sample.document.tokens.count("interesting") == 2
        assert "boring" not in sample.document.token_set
        assert [p for p, _, _ in sample.substitutions] == [0, 2]

    def test_tokens_differ_exactly_at_substitution_positions(self):
        mapping = {
            "boring": candidates("boring", -2.0, "interesting", "lively"),
            "bad": candidates("bad", -1.0, "good"),
        }
        d = doc("a bad and boring book but boring works", -1)
        sample = generate(d, mapping, seed=42)
        positions = {p for p, _, _ in sample.substitutions}
        for i, (old, new) in enumerate(zip(d.tokens, sample.document.tokens)):
            assert (old != new) == (i in positions)

    def test_empty_causal_map_errors(self):
        with pytest.raises(ValueError):
            generate(doc("x", 1), {}, seed=0)

    def test_deterministic_in_seed(self):
        mapping = {"boring": candidates("boring", -2.0, "interesting", "lively", "colorful")}
        d = doc("boring boring boring boring", -1)
        a = generate(d, mapping, seed=5)
        b = generate(d, mapping, seed=5)
        assert a.document == b.document
        assert a.substitutions == b.substitutions

    def test_round_trip_with_involutive_map(self):
        forward = {"boring": candidates("boring", -2.0, "interesting")}
        backward = {"interesting": candidates("interesting", 2.0, "boring")}
        d = doc("a boring book about boring things", -1)
        once = generate(d, forward, seed=1).document
        twice = generate(once, backward, seed=2).document
        assert twice.tokens == d.tokens
        assert twice.label == d.label

    @given(st.integers(min_value=0, max_value=10**6))
    @settings(max_examples=50, deadline=None)
    def test_label_always_flips(self, seed):
        d = doc("boring stuff", -1)
        sample = generate(d, BORING_MAP, seed=seed)
        assert sample.document.label == -d.label


class TestAugment:
    def make_train(self):
        return LabeledCorpus(
            documents=(
                doc("free book sounded boring", -1, "a"),
                doc("what a nice day", 1, "b"),
            ),
            name="train",
            split=Split.TRAIN,
        )

    def test_originals_first_then_counterfactuals(self):
        augmented = augment(self.make_train(), BORING_MAP, seed=0)
        assert len(augmented) == 3
        assert [d.id for d in augmented] == ["a", "b", "a::ctf"]
        assert augmented.meta["n_counterfactuals"] == 1
        assert augmented.documents[2].origin == Origin.AUTO_COUNTERFACTUAL

    def test_no_eligible_docs_leaves_corpus_unchanged(self):
        mapping = {"zzz": candidates("zzz", -1.0, "yyy")}
        augmented = augment(self.make_train(), mapping, seed=0)
        assert [d.id for d in augmented] == ["a", "b"]
        assert augmented.meta["n_counterfactuals"] == 0

    def test_test_split_rejected(self):
        test = LabeledCorpus(
            documents=(doc("boring", -1, "a"), doc("fine", 1, "b")),
            name="t",
            split=Split.TEST,
        )
        with pytest.raises(ValueError, match="training split"):
            augment(test, BORING_MAP, seed=0)

    def test_spurious_token_frequency_balances(self):
        # "free" rides only negative docs; augmentation must add it to the
        # positive class (counted by brute force)
        docs = tuple(
            doc(f"free book sounded boring number {w}", -1, f"n{i}")
            for i, w in enumerate(["one", "two", "three"])
        ) + tuple(
            doc(f"lovely interesting read number {w}", 1, f"p{i}")
            for i, w in enumerate(["one", "two", "three"])
        )
        train = LabeledCorpus(documents=docs, name="train", split=Split.TRAIN)

        def df(corpus, term, label):
            return sum(1 for d in corpus if term in d.token_set and d.label == label)

        before = df(train, "free", 1)
        augmented = augment(train, BORING_MAP, seed=0)
        after = df(augmented, "free", 1)
        assert before == 0
        assert after > before

    def test_determinism(self):
        train = self.make_train()
        a = augment(train, BORING_MAP, seed=9)
        b = augment(train, BORING_MAP, seed=9)
        assert a.documents == b.documents

    def test_parallel_stability_of_per_doc_seeds(self):
        # per-document generators are independent of iteration order
        train = self.make_train()
        full = augment(train, BORING_MAP, seed=9)
        alone = generate(train.documents[0], BORING_MAP, seed=9)
        assert alone.document == full.documents[2]


class TestSidecar:
    def test_sidecar_format(self, tmp_path):
        train = LabeledCorpus(
            documents=(doc("boring tale", -1, "a"),), name="t", split=Split.TRAIN
        )
        samples = generate_all(train, BORING_MAP, seed=0)
        path = tmp_path / "subs.jsonl"
        write_substitution_sidecar(samples, path)
        import json

        record = json.loads(path.read_text().strip())
        assert record == {"source_id": "a", "substitutions": [[0, "boring", "interesting"]]}
