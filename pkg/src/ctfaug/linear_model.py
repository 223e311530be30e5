"""L2-regularized binary logistic regression with a deterministic L-BFGS optimizer.

The objective is the mean logistic loss plus ``1/(2*C*n) * ||w||^2`` with an
unregularized intercept, so larger C means a weaker penalty. Optimization is
full-batch L-BFGS with Armijo backtracking, which keeps the objective
monotonically decreasing and the fit bit-for-bit reproducible.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from scipy.special import expit

from .corpus import Document, LabeledCorpus, NEGATIVE, POSITIVE
from .features import Vocabulary, design_matrix

GRAD_TOL = 1e-6
MAX_ITER = 1000
_LBFGS_MEMORY = 10
_ARMIJO_C1 = 1e-4


class ConvergenceWarning(UserWarning):
    pass


@dataclass
class FitDiagnostics:
    n_iter: int
    converged: bool
    final_grad_norm: float
    objective_history: list[float] = field(repr=False)


@dataclass(frozen=True)
class LinearModel:
    coefficients: np.ndarray
    intercept: float
    l2_c: float
    trained_on: str
    seed: int = 0
    vocab_hash: str = ""
    diagnostics: FitDiagnostics | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not np.all(np.isfinite(self.coefficients)):
            raise ValueError("model coefficients must be finite")


@dataclass(frozen=True)
class TopTermSet:
    entries: tuple[tuple[str, float], ...]
    threshold: float

    @property
    def terms(self) -> tuple[str, ...]:
        return tuple(t for t, _ in self.entries)

    def __contains__(self, term: str) -> bool:
        return any(t == term for t, _ in self.entries)

    def __len__(self) -> int:
        return len(self.entries)


def objective_and_gradient(
    params: np.ndarray, X: sp.csr_matrix, y: np.ndarray, l2_c: float
) -> tuple[float, np.ndarray]:
    """Regularized mean logistic loss and its gradient over [w, b]."""
    n = X.shape[0]
    w, b = params[:-1], params[-1]
    margins = y * (X @ w + b)
    lam = 1.0 / (l2_c * n)
    loss = float(np.mean(np.logaddexp(0.0, -margins)) + 0.5 * lam * (w @ w))
    # d/dz log(1+e^(-z)) = -sigmoid(-z)
    s = expit(-margins)
    grad_w = -(X.T @ (y * s)) / n + lam * w
    grad_b = -np.mean(y * s)
    return loss, np.concatenate([grad_w, [grad_b]])


def _lbfgs_direction(grad: np.ndarray, s_hist: list[np.ndarray], y_hist: list[np.ndarray]) -> np.ndarray:
    """Two-loop recursion for the L-BFGS descent direction."""
    q = grad.copy()
    alphas = []
    rhos = [1.0 / (yk @ sk) for sk, yk in zip(s_hist, y_hist)]
    for sk, yk, rho in zip(reversed(s_hist), reversed(y_hist), reversed(rhos)):
        a = rho * (sk @ q)
        alphas.append(a)
        q -= a * yk
    if s_hist:
        sk, yk = s_hist[-1], y_hist[-1]
        q *= (sk @ yk) / (yk @ yk)
    for sk, yk, rho, a in zip(s_hist, y_hist, rhos, reversed(alphas)):
        beta = rho * (yk @ q)
        q += (a - beta) * sk
    return -q


def fit(
    corpus: LabeledCorpus,
    vocab: Vocabulary,
    l2_c: float = 1.0,
    seed: int = 0,
    max_iter: int = MAX_ITER,
    tol: float = GRAD_TOL,
) -> LinearModel:
    """Fit by minimizing the regularized mean logistic loss to gradient tolerance.

    Raises on a single-class corpus; warns (and flags the model) if the
    gradient tolerance is not reached within ``max_iter`` iterations.
    """
    if l2_c <= 0:
        raise ValueError("l2_c must be positive")
    labels = set(corpus.labels())
    if labels != {POSITIVE, NEGATIVE}:
        raise ValueError(f"training corpus must contain both labels, found {sorted(labels)}")

    X, y = design_matrix(corpus, vocab)
    params = np.zeros(vocab.size + 1, dtype=np.float64)
    loss, grad = objective_and_gradient(params, X, y, l2_c)
    history = [loss]
    s_hist: list[np.ndarray] = []
    y_hist: list[np.ndarray] = []

    n_iter = 0
    converged = bool(np.max(np.abs(grad)) < tol)
    while not converged and n_iter < max_iter:
        direction = _lbfgs_direction(grad, s_hist, y_hist)
        descent = grad @ direction
        if descent >= 0:  # safeguard: fall back to steepest descent
            direction = -grad
            descent = -(grad @ grad)
        step = 1.0
        while True:
            new_params = params + step * direction
            new_loss, new_grad = objective_and_gradient(new_params, X, y, l2_c)
            if new_loss <= loss + _ARMIJO_C1 * step * descent:
                break
            step *= 0.5
            if step < 1e-20:
                new_params, new_loss, new_grad = params, loss, grad
                break
        s_k = new_params - params
        y_k = new_grad - grad
        sy = s_k @ y_k
        if sy > 1e-10 * np.linalg.norm(s_k) * np.linalg.norm(y_k):
            s_hist.append(s_k)
            y_hist.append(y_k)
            if len(s_hist) > _LBFGS_MEMORY:
                s_hist.pop(0)
                y_hist.pop(0)
        params, loss, grad = new_params, new_loss, new_grad
        history.append(loss)
        n_iter += 1
        converged = bool(np.max(np.abs(grad)) < tol)

    if not converged:
        warnings.warn(
            f"optimizer did not reach |grad| < {tol:g} after {n_iter} iterations "
            f"(final |grad| = {np.max(np.abs(grad)):.3g})",
            ConvergenceWarning,
        )
    return LinearModel(
        coefficients=params[:-1].copy(),
        intercept=float(params[-1]),
        l2_c=l2_c,
        trained_on=corpus.name,
        seed=seed,
        vocab_hash=vocab.hash(),
        diagnostics=FitDiagnostics(
            n_iter=n_iter,
            converged=converged,
            final_grad_norm=float(np.max(np.abs(grad))),
            objective_history=history,
        ),
    )


def decision_value(model: LinearModel, doc: Document, vocab: Vocabulary) -> float:
    t2i = vocab.term_to_index
    active = {t2i[t] for t in doc.token_set if t in t2i}
    return float(sum(model.coefficients[i] for i in active) + model.intercept)


def predict(model: LinearModel, doc: Document, vocab: Vocabulary) -> tuple[int, float]:
    """Predicted label and positive-class probability. Ties at 0.5 go to +1."""
    prob = float(expit(decision_value(model, doc, vocab)))
    return (POSITIVE if prob >= 0.5 else NEGATIVE), prob


def accuracy(model: LinearModel, corpus: LabeledCorpus, vocab: Vocabulary) -> float:
    if len(corpus) == 0:
        raise ValueError("cannot evaluate accuracy on an empty corpus")
    X, y = design_matrix(corpus, vocab)
    scores = X @ model.coefficients + model.intercept
    predicted = np.where(scores >= 0.0, POSITIVE, NEGATIVE)
    return float(np.mean(predicted == y))


def top_terms(model: LinearModel, vocab: Vocabulary, threshold: float) -> TopTermSet:
    """Terms whose coefficient magnitude meets the threshold, largest first."""
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    entries = [
        (term, float(coef))
        for term, coef in zip(vocab.index_to_term, model.coefficients)
        if abs(coef) >= threshold
    ]
    entries.sort(key=lambda e: (-abs(e[1]), e[0]))
    return TopTermSet(entries=tuple(entries), threshold=threshold)


def coefficient_of(model: LinearModel, vocab: Vocabulary, term: str) -> float | None:
    idx = vocab.term_to_index.get(term)
    return None if idx is None else float(model.coefficients[idx])


def save_model(model: LinearModel, vocab: Vocabulary, path: str | Path) -> None:
    payload = {
        "vocab_hash": vocab.hash(),
        "intercept": model.intercept,
        "coefficients": [[t, float(c)] for t, c in zip(vocab.index_to_term, model.coefficients)],
        "l2_c": model.l2_c,
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")


def load_model(path: str | Path) -> tuple[LinearModel, Vocabulary]:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    terms = [t for t, _ in payload["coefficients"]]
    vocab = Vocabulary(index_to_term=tuple(terms))
    if vocab.hash() != payload["vocab_hash"]:
        raise ValueError(f"{path}: vocab_hash does not match serialized coefficients")
    model = LinearModel(
        coefficients=np.asarray([c for _, c in payload["coefficients"]], dtype=np.float64),
        intercept=float(payload["intercept"]),
        l2_c=float(payload["l2_c"]),
        trained_on=str(Path(path)),
        vocab_hash=payload["vocab_hash"],
    )
    return model, vocab
