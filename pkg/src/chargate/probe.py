"""Linear probes over frozen sentence representations.

A probe is a logistic-regression classifier or ridge regressor fit by
deterministic full-batch gradient descent (zero init, step size set from a
Lipschitz bound on the gradient, stop at gradient norm < 1e-6 or 10k
iterations). Classification reports accuracy in percent; relatedness
reports Pearson correlation scaled by 100, through the same correlation
code used for word-level evaluation. Pair tasks can also be scored
directly by the cosine of the two sentence vectors, with no training.

Task files are TSV: ``label<TAB>sentence`` or ``label<TAB>sentence<TAB>sentence2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .autodiff import no_grad
from .tokenizer import tokenize
from .wordsim import cosine_similarity, pearson

__all__ = [
    "ProbeTask",
    "load_probe_task",
    "LinearProbe",
    "train_probe",
    "evaluate_probe",
    "encode_sentences",
    "pair_features",
    "direct_similarity_metric",
    "run_probe_task",
]

KINDS = ("classification", "relatedness", "similarity")
_KIND_ALIASES = {
    "cls": "classification",
    "classification": "classification",
    "rel": "relatedness",
    "relatedness": "relatedness",
    "sts": "similarity",
    "similarity": "similarity",
}


def normalize_kind(kind: str) -> str:
    try:
        return _KIND_ALIASES[kind.strip().lower()]
    except KeyError:
        raise ValueError(f"unknown probe kind {kind!r}; valid kinds: cls, rel, sts") from None


@dataclass
class ProbeTask:
    name: str
    kind: str
    sentences1: list[list[str]]
    sentences2: list[list[str]] | None
    labels: list


def load_probe_task(path, kind: str, name: str = "") -> ProbeTask:
    """Read a TSV task; labels stay strings for classification and are
    parsed as floats otherwise."""
    kind = normalize_kind(kind)
    labels: list = []
    sentences1: list[list[str]] = []
    sentences2: list[list[str]] = []
    has_pairs = None
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) not in (2, 3):
                raise ValueError(f"{path}:{line_no}: expected 2 or 3 tab-separated fields")
            pair = len(fields) == 3
            if has_pairs is None:
                has_pairs = pair
            elif has_pairs != pair:
                raise ValueError(f"{path}:{line_no}: mixed single and pair rows")
            label = fields[0]
            if kind != "classification":
                try:
                    label = float(label)
                except ValueError:
                    raise ValueError(f"{path}:{line_no}: unparsable numeric label") from None
                if not np.isfinite(label):
                    raise ValueError(f"{path}:{line_no}: label must be finite")
            tokens1 = tokenize(fields[1])
            if not tokens1:
                raise ValueError(f"{path}:{line_no}: empty sentence")
            sentences1.append(tokens1)
            if pair:
                tokens2 = tokenize(fields[2])
                if not tokens2:
                    raise ValueError(f"{path}:{line_no}: empty sentence")
                sentences2.append(tokens2)
            labels.append(label)
    if not labels:
        raise ValueError(f"{path}: empty task file")
    if kind == "similarity" and not has_pairs:
        raise ValueError(f"{path}: similarity tasks need sentence pairs")
    return ProbeTask(name or str(path), kind, sentences1, sentences2 if has_pairs else None, labels)


def encode_sentences(model, sentences: list[list[str]]) -> np.ndarray:
    """Frozen sentence vectors as a plain (n, d) array."""
    with no_grad():
        return np.stack([model.sentence_vector(tokens, {}).data for tokens in sentences])


def pair_features(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """[u ; v ; |u - v| ; u * v] rows for probing pair tasks."""
    return np.concatenate([u, v, np.abs(u - v), u * v], axis=1)


@dataclass
class LinearProbe:
    kind: str
    weights: np.ndarray  # (n_classes, d) for classification, (d,) otherwise
    bias: np.ndarray  # (n_classes,) or scalar array
    classes: list | None
    iterations: int
    grad_norm: float


def _softmax_rows(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=1, keepdims=True)
    ez = np.exp(shifted)
    return ez / ez.sum(axis=1, keepdims=True)


def train_probe(
    representations: np.ndarray,
    labels,
    l2: float = 0.0,
    kind: str = "classification",
    max_iterations: int = 10_000,
    tolerance: float = 1e-6,
) -> LinearProbe:
    """Fit a linear model on frozen representations.

    The l2 penalty applies to the weights only, never the bias, so a very
    large penalty reduces the probe to a prior (majority-class) predictor.
    """
    kind = normalize_kind(kind)
    X = np.asarray(representations, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("train_probe: need an (n >= 2, d) representation matrix")
    if l2 < 0:
        raise ValueError("train_probe: l2 must be non-negative")
    n, d = X.shape

    if kind == "classification":
        classes = sorted(set(labels), key=str)
        if len(classes) < 2:
            raise ValueError("train_probe: classification needs at least 2 classes")
        index = {c: i for i, c in enumerate(classes)}
        y = np.array([index[label] for label in labels])
        onehot = np.zeros((n, len(classes)))
        onehot[np.arange(n), y] = 1.0
        W = np.zeros((len(classes), d))
        b = np.zeros(len(classes))
        # gradient Lipschitz bound for mean softmax CE plus the l2 term
        lr = 1.0 / (0.5 * float(np.sum(X * X)) / n + l2 + 1.0)
        iterations = 0
        grad_norm = np.inf
        for iterations in range(1, max_iterations + 1):
            probs = _softmax_rows(X @ W.T + b)
            delta = (probs - onehot) / n
            grad_w = delta.T @ X + l2 * W
            grad_b = delta.sum(axis=0)
            grad_norm = float(np.sqrt(np.sum(grad_w**2) + np.sum(grad_b**2)))
            if grad_norm < tolerance:
                break
            W -= lr * grad_w
            b -= lr * grad_b
        return LinearProbe("classification", W, b, classes, iterations, grad_norm)

    if kind != "relatedness":
        raise ValueError("train_probe: direct similarity needs no training")
    y = np.asarray(labels, dtype=np.float64)
    if y.shape != (n,):
        raise ValueError("train_probe: labels must align with representations")
    w = np.zeros(d)
    b = np.zeros(())
    lr = 1.0 / (float(np.sum(X * X)) / n + l2 + 1.0)
    iterations = 0
    grad_norm = np.inf
    for iterations in range(1, max_iterations + 1):
        residual = (X @ w + b - y) / n
        grad_w = X.T @ residual + l2 * w
        grad_b = residual.sum()
        grad_norm = float(np.sqrt(np.sum(grad_w**2) + grad_b**2))
        if grad_norm < tolerance:
            break
        w -= lr * grad_w
        b -= lr * grad_b
    return LinearProbe("relatedness", w, np.asarray(b), None, iterations, grad_norm)


def evaluate_probe(probe: LinearProbe, representations: np.ndarray, labels, kind: str) -> float:
    """Accuracy in percent, or Pearson correlation times 100."""
    kind = normalize_kind(kind)
    if kind != probe.kind:
        raise ValueError(f"evaluate_probe: probe is {probe.kind!r}, asked for {kind!r}")
    X = np.asarray(representations, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != probe.weights.shape[-1]:
        raise ValueError(
            f"evaluate_probe: representations shape {X.shape} does not match probe "
            f"dimension {probe.weights.shape[-1]}"
        )
    if kind == "classification":
        predicted = np.argmax(X @ probe.weights.T + probe.bias, axis=1)
        index = {c: i for i, c in enumerate(probe.classes)}
        gold = np.array([index[label] for label in labels])
        return 100.0 * float(np.mean(predicted == gold))
    predictions = X @ probe.weights + probe.bias
    return 100.0 * pearson(predictions, np.asarray(labels, dtype=np.float64))


def direct_similarity_metric(u_reps: np.ndarray, v_reps: np.ndarray, gold) -> float:
    """Pearson (x100) between pair cosines and gold scores, no probe."""
    sims = [cosine_similarity(u, v) for u, v in zip(u_reps, v_reps)]
    return 100.0 * pearson(sims, np.asarray(gold, dtype=np.float64))


def run_probe_task(model, task: ProbeTask, l2: float = 0.0, eval_task: ProbeTask | None = None):
    """Encode, fit (unless direct similarity), and score a task.

    Returns (metric, probe-or-None). With `eval_task` the probe is fit on
    `task` and scored on `eval_task`; otherwise scoring is on the
    training data itself.
    """
    def featurize(t: ProbeTask) -> np.ndarray:
        reps1 = encode_sentences(model, t.sentences1)
        if t.sentences2 is None:
            return reps1
        return pair_features(reps1, encode_sentences(model, t.sentences2))

    if task.kind == "similarity":
        target = eval_task or task
        u = encode_sentences(model, target.sentences1)
        v = encode_sentences(model, target.sentences2)
        return direct_similarity_metric(u, v, target.labels), None

    probe = train_probe(featurize(task), task.labels, l2=l2, kind=task.kind)
    target = eval_task or task
    return evaluate_probe(probe, featurize(target), target.labels, task.kind), probe
