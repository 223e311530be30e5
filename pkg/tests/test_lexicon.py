import numpy as np
import pytest

from ctfaug.features import Vocabulary
from ctfaug.lexicon import AntonymCandidates, antonyms_for, load_lexicon
from ctfaug.linear_model import LinearModel


def write_lexicon(tmp_path, rows):
    path = tmp_path / "lex.tsv"
    path.write_text("".join("\t".join(r) + "\n" for r in rows))
    return path


def model_over(coef_by_term):
    terms = tuple(sorted(coef_by_term))
    vocab = Vocabulary(index_to_term=terms)
    coefs = np.array([coef_by_term[t] for t in terms], dtype=float)
    return LinearModel(coefficients=coefs, intercept=0.0, l2_c=1.0, trained_on="t"), vocab


class TestLoadLexicon:
    def test_symmetric_closure(self, tmp_path):
        lex = load_lexicon(write_lexicon(tmp_path, [("boring", "ant", "interesting")]))
        assert "interesting" in lex.antonyms_of("boring")
        assert "boring" in lex.antonyms_of("interesting")

    def test_synonyms_also_closed(self, tmp_path):
        lex = load_lexicon(write_lexicon(tmp_path, [("fantastic", "syn", "awesome")]))
        assert "awesome" in lex.synonyms_of("fantastic")
        assert "fantastic" in lex.synonyms_of("awesome")

    def test_duplicates_deduplicated(self, tmp_path):
        rows = [("a", "ant", "b"), ("a", "ant", "b"), ("b", "ant", "a")]
        lex = load_lexicon(write_lexicon(tmp_path, rows))
        assert lex.antonyms_of("a") == frozenset({"b"})

    def test_malformed_rows_report_line_numbers(self, tmp_path):
        path = write_lexicon(tmp_path, [("a", "ant", "b"), ("broken", "row")])
        with pytest.raises(ValueError, match=":2"):
            load_lexicon(path)

    def test_unknown_relation_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="unknown relation"):
            load_lexicon(write_lexicon(tmp_path, [("a", "huh", "b")]))

    def test_multiword_terms_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="single alphabetic"):
            load_lexicon(write_lexicon(tmp_path, [("not good", "ant", "fine")]))

    def test_empty_file_errors(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("# only comments\n")
        with pytest.raises(ValueError, match="no relations"):
            load_lexicon(path)

    def test_packaged_starter_lexicon_loads(self, starter_lexicon):
        assert "interesting" in starter_lexicon.antonyms_of("boring")
        assert "unimpressive" in starter_lexicon.antonyms_of("fantastic")
        assert "inferior" in starter_lexicon.antonyms_of("fantastic")


class TestAntonymsFor:
    def test_direct_antonym_with_opposite_coefficient(self, tmp_path):
        lex = load_lexicon(write_lexicon(tmp_path, [("boring", "ant", "interesting")]))
        model, vocab = model_over({"boring": -2.592, "interesting": 0.734})
        result = antonyms_for("boring", model, vocab, lex)
        assert result.candidates == (("interesting", 0.734),)

    def test_multiple_candidates_sorted_by_magnitude(self, tmp_path):
        rows = [("fantastic", "ant", "unimpressive"), ("fantastic", "ant", "inferior")]
        lex = load_lexicon(write_lexicon(tmp_path, rows))
        model, vocab = model_over(
            {"fantastic": 1.638, "unimpressive": -0.462, "inferior": -0.644}
        )
        result = antonyms_for("fantastic", model, vocab, lex)
        assert result.antonym_terms == ("inferior", "unimpressive")
        assert dict(result.candidates) == {"inferior": -0.644, "unimpressive": -0.462}

    def test_same_sign_antonym_rejected(self, tmp_path):
        lex = load_lexicon(write_lexicon(tmp_path, [("dull", "ant", "dreary")]))
        model, vocab = model_over({"dull": -1.881, "dreary": -0.5})
        assert antonyms_for("dull", model, vocab, lex) is None

    def test_synonym_fallback_only_when_direct_fails(self, tmp_path):
        rows = [
            ("dull", "ant", "dreary"),        # same sign: rejected
            ("dull", "syn", "boring"),
            ("boring", "ant", "lively"),
        ]
        lex = load_lexicon(write_lexicon(tmp_path, rows))
        model, vocab = model_over({"dull": -1.881, "dreary": -0.5, "lively": 0.302})
        result = antonyms_for("dull", model, vocab, lex)
        assert result.antonym_terms == ("lively",)

    def test_step_two_not_consulted_when_step_one_succeeds(self, tmp_path):
        rows = [
            ("dull", "ant", "lively"),
            ("dull", "syn", "boring"),
            ("boring", "ant", "colorful"),
        ]
        lex = load_lexicon(write_lexicon(tmp_path, rows))
        model, vocab = model_over({"dull": -1.881, "lively": 0.302, "colorful": 0.252})
        result = antonyms_for("dull", model, vocab, lex)
        assert result.antonym_terms == ("lively",)

    def test_oov_term_errors(self, tmp_path, starter_lexicon):
        model, vocab = model_over({"boring": -1.0})
        with pytest.raises(ValueError, match="not in the vocabulary"):
            antonyms_for("unseen", model, vocab, starter_lexicon)

    def test_zero_coefficient_errors(self, starter_lexicon):
        model, vocab = model_over({"boring": 0.0, "interesting": 0.5})
        with pytest.raises(ValueError, match="zero coefficient"):
            antonyms_for("boring", model, vocab, starter_lexicon)

    def test_oov_candidates_skipped(self, tmp_path):
        lex = load_lexicon(write_lexicon(tmp_path, [("boring", "ant", "interesting")]))
        model, vocab = model_over({"boring": -1.0})  # interesting not in vocab
        assert antonyms_for("boring", model, vocab, lex) is None

    def test_every_candidate_has_opposite_sign(self, review_baseline, starter_lexicon):
        model, vocab = review_baseline
        from ctfaug.synth import GOLD_FLIP

        checked = 0
        for term in sorted(GOLD_FLIP):
            if term not in vocab or model.coefficients[vocab.index_of(term)] == 0:
                continue
            result = antonyms_for(term, model, vocab, starter_lexicon)
            if result is None:
                continue
            checked += 1
            for antonym, coef in result.candidates:
                assert antonym in vocab
                assert coef * result.term_coef < 0
        assert checked >= 80


class TestAntonymCandidates:
    def test_rejects_same_sign_candidates(self):
        with pytest.raises(ValueError):
            AntonymCandidates(term="good", term_coef=1.0, candidates=(("bad", 0.5),))
