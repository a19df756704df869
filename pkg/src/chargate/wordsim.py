"""Word-similarity evaluation: cosine similarities against human scores,
summarized by Pearson and Spearman correlation and reported on a
[-100, 100] scale (raw correlation times exactly 100).

No pair is ever dropped for vocabulary reasons: out-of-vocabulary words
use the UNK word embedding while their characters still feed the
character path, so the model assigns a vector to every string. The
fraction of in-vocabulary words is reported as coverage.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .autodiff import Tensor, no_grad
from .data import WordSimPair

__all__ = [
    "ZeroVarianceError",
    "cosine_similarity",
    "pearson",
    "spearman",
    "WordEvalReport",
    "evaluate_wordsim",
]


class ZeroVarianceError(ValueError):
    """A correlation was requested for a constant sequence."""


def _as_array(x) -> np.ndarray:
    if isinstance(x, Tensor):
        return x.data
    return np.asarray(x, dtype=np.float64)


def cosine_similarity(u, v) -> float:
    u = _as_array(u)
    v = _as_array(v)
    if u.shape != v.shape or u.ndim != 1:
        raise ValueError(f"cosine_similarity: expected equal-length vectors, got {u.shape}, {v.shape}")
    nu = np.sqrt(u @ u)
    nv = np.sqrt(v @ v)
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine_similarity: zero vector")
    return float((u @ v) / (nu * nv))


def pearson(xs, ys) -> float:
    """Sample Pearson correlation coefficient."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or x.size < 2:
        raise ValueError("pearson: need two equal-length sequences of at least 2 values")
    dx = x - x.mean()
    dy = y - y.mean()
    sx = float(dx @ dx)
    sy = float(dy @ dy)
    if sx == 0.0 or sy == 0.0:
        raise ZeroVarianceError("pearson: zero variance in input")
    return float((dx @ dy) / np.sqrt(sx * sy))


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks; tied values share the mean of their rank range."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size, dtype=np.float64)
    i = 0
    sorted_vals = values[order]
    while i < values.size:
        j = i
        while j + 1 < values.size and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(xs, ys) -> float:
    """Pearson correlation over average-ranked data."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or x.size < 2:
        raise ValueError("spearman: need two equal-length sequences of at least 2 values")
    return pearson(_average_ranks(x), _average_ranks(y))


@dataclass
class WordEvalReport:
    dataset: str
    n_pairs: int
    pearson: float | None
    spearman: float | None
    pearson_x100: float | None
    spearman_x100: float | None
    coverage: float | None
    skipped: bool = False
    note: str = ""


def evaluate_wordsim(model, pairs: list[WordSimPair], dataset: str = "") -> WordEvalReport:
    """Correlate a model's pair cosines with gold scores.

    `model` needs a `word_vector(word, cache)` method; coverage is
    computed against its word vocabulary when it has one. A model that
    produces constant similarities cannot be correlated; the dataset is
    then reported as skipped rather than raising.
    """
    if not pairs:
        raise ValueError("evaluate_wordsim: no pairs")
    sims = []
    golds = []
    cache: dict = {}
    with no_grad():
        for pair in pairs:
            u = model.word_vector(pair.word1, cache)
            v = model.word_vector(pair.word2, cache)
            sims.append(cosine_similarity(u, v))
            golds.append(pair.gold_score)

    coverage = None
    vocab = getattr(model, "word_vocab", None)
    if vocab is not None:
        normalize = getattr(model, "_normalize", lambda w: w)
        words = [w for pair in pairs for w in (pair.word1, pair.word2)]
        coverage = sum(1 for w in words if normalize(w) in vocab) / len(words)

    try:
        pr = pearson(sims, golds)
        sp = spearman(sims, golds)
    except ZeroVarianceError as err:
        return WordEvalReport(
            dataset, len(pairs), None, None, None, None, coverage,
            skipped=True, note=str(err),
        )
    note = "out-of-vocabulary words use the UNK embedding plus their character sequence"
    return WordEvalReport(
        dataset, len(pairs), pr, sp, 100.0 * pr, 100.0 * sp, coverage, note=note
    )
