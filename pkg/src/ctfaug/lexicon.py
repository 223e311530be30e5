"""Offline antonym/synonym lexicon and coefficient-sign-filtered antonym selection.

Selection is two-step: direct antonyms of the term first; only if none
survive the sign filter are the antonyms of the term's synonyms consulted
(depth 1). A candidate survives only when it is in-vocabulary with a
coefficient of strictly opposite sign to the term's.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .corpus import tokenize
from .features import Vocabulary
from .linear_model import LinearModel

STARTER_LEXICON = "lexicon.tsv"


@dataclass(frozen=True)
class AntonymLexicon:
    antonyms: dict[str, frozenset[str]]
    synonyms: dict[str, frozenset[str]]

    def antonyms_of(self, term: str) -> frozenset[str]:
        return self.antonyms.get(term, frozenset())

    def synonyms_of(self, term: str) -> frozenset[str]:
        return self.synonyms.get(term, frozenset())


@dataclass(frozen=True)
class AntonymCandidates:
    term: str
    term_coef: float
    candidates: tuple[tuple[str, float], ...]

    def __post_init__(self):
        if any(coef * self.term_coef >= 0 for _, coef in self.candidates):
            raise ValueError("every candidate must have strictly opposite sign")

    @property
    def antonym_terms(self) -> tuple[str, ...]:
        return tuple(a for a, _ in self.candidates)

    def to_dict(self) -> dict:
        return {
            "term": self.term,
            "term_coef": self.term_coef,
            "candidates": [[a, c] for a, c in self.candidates],
        }


def _parse_rows(lines, source: str) -> tuple[dict, dict, list[str]]:
    ant: dict[str, set[str]] = {}
    syn: dict[str, set[str]] = {}
    problems: list[str] = []
    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip("\n")
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            problems.append(f"{source}:{lineno}: expected 3 tab-separated fields")
            continue
        term, relation, other = (p.strip().lower() for p in parts)
        if relation not in ("ant", "syn"):
            problems.append(f"{source}:{lineno}: unknown relation {relation!r}")
            continue
        if len(tokenize(term)) != 1 or len(tokenize(other)) != 1:
            problems.append(f"{source}:{lineno}: terms must be single alphabetic tokens")
            continue
        table = ant if relation == "ant" else syn
        table.setdefault(term, set()).add(other)
        table.setdefault(other, set()).add(term)
    return ant, syn, problems


def load_lexicon(path: str | Path | None = None) -> AntonymLexicon:
    """Load a TSV lexicon (rows ``term \\t ant|syn \\t other_term``).

    Both relations are stored with symmetric closure and duplicates removed.
    Malformed rows raise with their line numbers; None loads the packaged
    starter lexicon of sentiment adjectives.
    """
    if path is None:
        text = resources.files("ctfaug").joinpath("data", STARTER_LEXICON).read_text("utf-8")
        lines, source = text.splitlines(), f"<packaged {STARTER_LEXICON}>"
    else:
        lines, source = Path(path).read_text(encoding="utf-8").splitlines(), str(path)
    ant, syn, problems = _parse_rows(lines, source)
    if problems:
        raise ValueError("malformed lexicon rows:\n" + "\n".join(problems))
    if not ant and not syn:
        raise ValueError(f"{source}: lexicon contains no relations")
    return AntonymLexicon(
        antonyms={t: frozenset(s) for t, s in ant.items()},
        synonyms={t: frozenset(s) for t, s in syn.items()},
    )


def _sign_filtered(
    candidates, term_coef: float, model: LinearModel, vocab: Vocabulary
) -> list[tuple[str, float]]:
    out = []
    for cand in candidates:
        idx = vocab.term_to_index.get(cand)
        if idx is None:
            continue
        coef = float(model.coefficients[idx])
        if coef * term_coef < 0:
            out.append((cand, coef))
    out.sort(key=lambda e: (-abs(e[1]), e[0]))
    return out


def antonyms_for(
    term: str,
    model: LinearModel,
    vocab: Vocabulary,
    lexicon: AntonymLexicon,
) -> AntonymCandidates | None:
    """Opposite-sign antonym candidates for a term, or None when both steps fail.

    Raises for out-of-vocabulary terms and zero coefficients, where the sign
    test is undefined.
    """
    idx = vocab.term_to_index.get(term)
    if idx is None:
        raise ValueError(f"term {term!r} is not in the vocabulary")
    term_coef = float(model.coefficients[idx])
    if term_coef == 0.0:
        raise ValueError(f"term {term!r} has a zero coefficient; sign test undefined")

    direct = _sign_filtered(sorted(lexicon.antonyms_of(term)), term_coef, model, vocab)
    if direct:
        return AntonymCandidates(term=term, term_coef=term_coef, candidates=tuple(direct))

    via_synonyms: set[str] = set()
    for synonym in sorted(lexicon.synonyms_of(term)):
        via_synonyms.update(lexicon.antonyms_of(synonym))
    via_synonyms.discard(term)
    fallback = _sign_filtered(sorted(via_synonyms), term_coef, model, vocab)
    if fallback:
        return AntonymCandidates(term=term, term_coef=term_coef, candidates=tuple(fallback))
    return None


def candidates_report(candidates: dict[str, AntonymCandidates]) -> str:
    return json.dumps(
        {t: candidates[t].to_dict() for t in sorted(candidates)}, indent=2, sort_keys=True
    )
