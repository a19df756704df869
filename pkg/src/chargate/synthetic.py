"""Synthetic entailment corpora for desk-scale experiments.

Two generators:

* a tiny separable fixture whose label is carried by a marker word in the
  hypothesis, used to verify that every combination method can drive
  training loss to zero;
* a Zipf-distributed corpus where each word's topic class is readable
  from its final character, with pretrained-style embeddings available
  only for the most frequent words. Rare words therefore have
  uninformative word vectors but informative character sequences, which
  is the regime where a trained gate should shift toward the character
  path as frequency drops.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .data import NliExample

__all__ = ["make_overfit_fixture", "make_overfit_embeddings", "ZipfCorpus", "make_zipf_corpus"]

_SUBJECTS = ("tiger", "horse", "eagle", "shark")
_VERBS = ("runs", "sleeps", "hunts", "swims")
# entailment, neutral, contradiction; repeated characters concentrate the
# per-step embedding gradient on one row, which lets the char-only method
# escape its tiny-uniform init within a small update budget
_MARKERS = ("aaaaaa", "bbbbbb", "cccccc")


def make_overfit_fixture() -> list[NliExample]:
    """64 distinct, trivially separable premise/hypothesis pairs.

    The hypothesis's final word states the label outright, so any method
    that can represent word identity (from the embedding table or from
    characters) can reach perfect training accuracy. Every word occurs
    well above the default frequency floor.
    """
    examples = []
    for i in range(64):
        label = i % 3
        premise = [_SUBJECTS[i % 4], _VERBS[(i // 4) % 4]]
        hypothesis = [_SUBJECTS[(i // 16) % 4], _MARKERS[label]]
        examples.append(NliExample(premise, hypothesis, label))
    return examples


def make_overfit_embeddings(dim: int, seed: int = 99) -> list[str]:
    """Pretrained-scale vectors (text format) for the fixture vocabulary.

    The training recipe fine-tunes pretrained word vectors, whose entries
    are an order of magnitude larger than the uniform(-0.05, 0.05)
    fallback; supplying them keeps the word path's desk-scale gradient
    flow comparable to the full-scale setting.
    """
    rng = np.random.default_rng(seed)
    words = sorted(set(_SUBJECTS) | set(_VERBS) | set(_MARKERS))
    return [
        word + " " + " ".join(repr(float(v)) for v in rng.normal(0.0, 0.4, size=dim))
        for word in words
    ]


@dataclass
class ZipfCorpus:
    train: list[NliExample]
    dev: list[NliExample]
    words: list[str]  # rank order, most frequent first
    word_class: dict[str, int]
    frequencies: Counter  # token counts over the training split
    embedding_lines: list[str]  # text-format vectors for the covered words


def _make_word(rng: np.random.Generator, cls: int, existing: set[str]) -> str:
    suffix = "xyz"[cls]
    while True:
        length = int(rng.integers(3, 7))
        word = "".join(chr(97 + int(c)) for c in rng.integers(0, 23, size=length)) + suffix
        if word not in existing:
            return word


def make_zipf_corpus(
    n_train: int = 1000,
    n_dev: int = 200,
    vocab_size: int = 500,
    embed_dim: int = 16,
    coverage: float = 0.5,
    zipf_exponent: float = 1.0,
    center_scale: float = 1.5,
    quality_decay_rank: float | None = None,
    min_len: int = 4,
    max_len: int = 6,
    seed: int = 0,
) -> ZipfCorpus:
    """Three-class corpus with power-law word frequencies.

    Words are split round-robin over three topic classes so every class
    spans the whole frequency range; a sentence draws all its words from
    one class, and the example label is determined by the premise and
    hypothesis classes. Pretrained vectors (class centroid plus noise)
    exist for the top `coverage` fraction of ranks only, mimicking a
    pretrained table that lacks rare words.
    """
    rng = np.random.default_rng(seed)
    existing: set[str] = set()
    words = []
    word_class = {}
    for rank in range(vocab_size):
        cls = rank % 3
        word = _make_word(rng, cls, existing)
        existing.add(word)
        words.append(word)
        word_class[word] = cls

    rank_of = {w: i + 1 for i, w in enumerate(words)}
    by_class = [[w for w in words if word_class[w] == cls] for cls in range(3)]
    class_weights = []
    for cls in range(3):
        ranks = np.array([rank_of[w] for w in by_class[cls]], dtype=np.float64)
        weights = ranks**-zipf_exponent
        class_weights.append(weights / weights.sum())

    def sentence(cls: int) -> list[str]:
        length = int(rng.integers(min_len, max_len + 1))
        idx = rng.choice(len(by_class[cls]), size=length, p=class_weights[cls])
        return [by_class[cls][i] for i in idx]

    def make_examples(count: int) -> list[NliExample]:
        out = []
        for _ in range(count):
            p_cls = int(rng.integers(0, 3))
            h_cls = int(rng.integers(0, 3))
            label = (p_cls - h_cls) % 3
            out.append(NliExample(sentence(p_cls), sentence(h_cls), label))
        return out

    train = make_examples(n_train)
    dev = make_examples(n_dev)

    frequencies: Counter = Counter()
    for ex in train:
        frequencies.update(ex.premise)
        frequencies.update(ex.hypothesis)

    # pretrained vectors exist for the covered (frequent) ranks only; the
    # uncovered tail falls back to the loader's tiny uniform init, so
    # word-vector quality drops with frequency without handing the model
    # memorizable full-norm fingerprints for rare words. quality_decay_rank
    # optionally also shrinks covered vectors with rank.
    centers = rng.normal(size=(3, embed_dim))
    centers *= center_scale / np.linalg.norm(centers, axis=1, keepdims=True)
    covered = words[: int(round(coverage * vocab_size))]
    embedding_lines = []
    for word in covered:
        quality = 1.0
        if quality_decay_rank is not None:
            quality = (1.0 + rank_of[word] / quality_decay_rank) ** -0.5
        vec = quality * centers[word_class[word]] + rng.uniform(-0.1, 0.1, size=embed_dim)
        embedding_lines.append(word + " " + " ".join(repr(float(v)) for v in vec))

    return ZipfCorpus(train, dev, words, word_class, frequencies, embedding_lines)
