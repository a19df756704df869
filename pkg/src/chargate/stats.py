"""Statistical machinery for multi-seed experiment analysis.

Includes a self-contained Student-t CDF built on the regularized
incomplete beta function (continued fraction, evaluated with Lentz's
method to a relative tolerance of 1e-12), Welch's two-sided t-test for
independent samples with unequal variances, per-word gate profiles
against corpus frequency, and cross-task rank-correlation matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import exp, lgamma, log, sqrt
from typing import Mapping, Sequence

import numpy as np

from .autodiff import no_grad
from .combine import GATE_METHODS
from .wordsim import spearman

__all__ = [
    "betainc_regularized",
    "student_t_cdf",
    "welch_t_test",
    "GateProfile",
    "gate_profile",
    "performance_correlation_matrix",
    "SeedGroupResult",
    "SignificanceRow",
    "significance_table",
]

_CF_TOLERANCE = 1e-12
_CF_MAX_ITERATIONS = 500


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta, by Lentz's method."""
    tiny = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITERATIONS + 1):
        m2 = 2 * m
        coef = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + coef * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + coef / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        coef = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + coef * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + coef / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_TOLERANCE:
            return h
    raise RuntimeError("incomplete beta continued fraction did not converge")


def betainc_regularized(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise ValueError("betainc_regularized: a and b must be positive")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    front = exp(lgamma(a + b) - lgamma(a) - lgamma(b) + a * log(x) + b * log(1.0 - x))
    # use the branch where the continued fraction converges fastest
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_cdf(t: float, dof: float) -> float:
    """CDF of Student's t distribution with `dof` degrees of freedom."""
    if dof <= 0:
        raise ValueError("student_t_cdf: dof must be positive")
    if t == 0.0:
        return 0.5
    tail = 0.5 * betainc_regularized(dof / 2.0, 0.5, dof / (dof + t * t))
    return 1.0 - tail if t > 0 else tail


def welch_t_test(a: Sequence[float], b: Sequence[float]) -> tuple[float, float, float]:
    """Two-sided Welch's t-test for two independent samples.

    Returns (t statistic, Welch-Satterthwaite degrees of freedom,
    two-sided p value). Equal variances are not assumed; a single
    zero-variance sample is fine, but both constant is undefined.
    """
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if x.ndim != 1 or y.ndim != 1 or x.size < 2 or y.size < 2:
        raise ValueError("welch_t_test: each sample needs at least 2 values")
    # the statistic is invariant under a common rescaling, so compute on
    # centered deviations normalized by the largest one; this keeps the
    # variance terms away from overflow and underflow for extreme inputs
    d1 = x - x.mean()
    d2 = y - y.mean()
    max_dev = max(float(np.max(np.abs(d1))), float(np.max(np.abs(d2))))
    if max_dev == 0.0:
        raise ValueError("welch_t_test: both samples have zero variance")
    d1 /= max_dev
    d2 /= max_dev
    n1, n2 = x.size, y.size
    se1 = float(d1 @ d1) / (n1 - 1) / n1
    se2 = float(d2 @ d2) / (n2 - 1) / n2
    pooled = se1 + se2
    t = (float(x.mean()) - float(y.mean())) / max_dev / sqrt(pooled)
    dof = pooled * pooled / (se1 * se1 / (n1 - 1) + se2 * se2 / (n2 - 1))
    # two-sided p: twice the upper tail at |t|
    p = betainc_regularized(dof / 2.0, 0.5, dof / (dof + t * t))
    return t, dof, p


# ---------------------------------------------------------------------------
# gate analysis


@dataclass
class GateProfile:
    word: str
    frequency: int
    mean_gate: float
    gate: np.ndarray


def gate_profile(model, words: Sequence[str], frequencies: Mapping[str, int]) -> list[GateProfile]:
    """Per-word gate vectors and means, sorted by decreasing frequency.

    The gate depends only on the word-path vector, with the usual UNK
    fallback for out-of-vocabulary words. Ties in frequency are ordered
    lexicographically so the output is deterministic.
    """
    if model.config.method not in GATE_METHODS:
        raise ValueError(f"gate_profile: method {model.config.method!r} has no gate")
    profiles = []
    with no_grad():
        for word in words:
            gate = model.word_gate(word).data
            profiles.append(
                GateProfile(
                    word=word,
                    frequency=int(frequencies.get(word, 0)),
                    mean_gate=float(gate.mean()),
                    gate=gate.copy(),
                )
            )
    profiles.sort(key=lambda p: (-p.frequency, p.word))
    return profiles


# ---------------------------------------------------------------------------
# cross-task correlation and significance tables


def performance_correlation_matrix(
    word_results: Mapping[str, Sequence[float]],
    sent_results: Mapping[str, Sequence[float]],
) -> tuple[list[str], list[str], np.ndarray]:
    """Spearman correlation between every word-task and sentence-task
    result column. Columns must be aligned (same per-seed length)."""
    word_tasks = list(word_results)
    sent_tasks = list(sent_results)
    if not word_tasks or not sent_tasks:
        raise ValueError("performance_correlation_matrix: empty result table")
    lengths = {len(word_results[t]) for t in word_tasks} | {len(sent_results[t]) for t in sent_tasks}
    if len(lengths) != 1:
        raise ValueError(f"performance_correlation_matrix: misaligned column lengths {sorted(lengths)}")
    matrix = np.empty((len(word_tasks), len(sent_tasks)))
    for i, wt in enumerate(word_tasks):
        for j, st in enumerate(sent_tasks):
            matrix[i, j] = spearman(word_results[wt], sent_results[st])
    return word_tasks, sent_tasks, matrix


@dataclass
class SeedGroupResult:
    """Per-seed metric values for one dataset x method x task condition."""

    dataset: str
    task: str
    method: str
    values: list[float]


@dataclass
class SignificanceRow:
    dataset: str
    task: str
    method: str
    mean: float
    is_best: bool
    t: float | None
    dof: float | None
    p: float | None
    significant: bool | None
    note: str = ""


def significance_table(groups: Sequence[SeedGroupResult], alpha: float = 0.05) -> list[SignificanceRow]:
    """Welch-test every method against the best-mean method per condition.

    Within each (dataset, task) pair the method with the highest mean is
    the reference; every other method is tested against it two-sided and
    flagged when p < alpha. A cell whose test is undefined (for example
    both samples constant) is annotated rather than fatal.
    """
    if not 0 < alpha < 1:
        raise ValueError("significance_table: alpha must be in (0, 1)")
    by_condition: dict[tuple[str, str], list[SeedGroupResult]] = {}
    for group in groups:
        by_condition.setdefault((group.dataset, group.task), []).append(group)

    rows: list[SignificanceRow] = []
    for (dataset, task), members in by_condition.items():
        sizes = {len(m.values) for m in members}
        if len(sizes) != 1:
            raise ValueError(
                f"significance_table: seed counts differ in {dataset}/{task}: {sorted(sizes)}"
            )
        best = max(members, key=lambda m: (float(np.mean(m.values)), m.method))
        for member in members:
            mean = float(np.mean(member.values))
            if member is best:
                rows.append(
                    SignificanceRow(dataset, task, member.method, mean, True, None, None, None, None)
                )
                continue
            try:
                t, dof, p = welch_t_test(member.values, best.values)
            except ValueError as err:
                rows.append(
                    SignificanceRow(
                        dataset, task, member.method, mean, False, None, None, None, None,
                        note=str(err),
                    )
                )
                continue
            rows.append(
                SignificanceRow(
                    dataset, task, member.method, mean, False, t, dof, p, p < alpha
                )
            )
    return rows
