"""Vocabulary construction, pretrained-embedding loading, and dataset I/O.

File formats:

* NLI data: JSON lines with fields ``sentence1``, ``sentence2`` and
  ``gold_label`` (entailment / neutral / contradiction, or ``-`` for
  examples without annotator consensus, which are skipped).
* Embeddings: text format, one line per word: the word followed by its
  vector components, space separated, no header.
* Word similarity: TSV ``word1<TAB>word2<TAB>score`` with an optional
  header row.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .autodiff import Tensor
from .tokenizer import tokenize

__all__ = [
    "PAD_TOKEN",
    "UNK_TOKEN",
    "NLI_LABELS",
    "WordVocab",
    "build_vocab",
    "PretrainedEmbeddings",
    "load_embeddings",
    "NliExample",
    "load_nli",
    "WordSimPair",
    "load_wordsim",
]

PAD_TOKEN = "<pad>"
UNK_TOKEN = "<unk>"
NLI_LABELS = ("entailment", "neutral", "contradiction")


class WordVocab:
    """Word <-> index map with frequency counts and an UNK fallback.

    Index 0 is the padding entry and index 1 is UNK; real words follow in
    frequency-descending order with lexicographic tie-breaks, so identical
    corpora always produce identical index assignments.
    """

    def __init__(self, words_with_counts: Sequence[tuple[str, int]], lowercased: bool = False):
        self.index_to_word: list[str] = [PAD_TOKEN, UNK_TOKEN]
        self.counts: dict[str, int] = {}
        for word, count in words_with_counts:
            self.index_to_word.append(word)
            self.counts[word] = count
        self.word_to_index = {w: i for i, w in enumerate(self.index_to_word)}
        self.pad_index = 0
        self.unk_index = 1
        self.lowercased = lowercased

    def __len__(self) -> int:
        return len(self.index_to_word)

    def __contains__(self, word: str) -> bool:
        return word in self.counts

    def lookup(self, word: str) -> int:
        return self.word_to_index.get(word, self.unk_index)


def build_vocab(tokens: Iterable[str], min_freq: int = 2, lowercased: bool = False) -> WordVocab:
    """Vocabulary of tokens occurring at least `min_freq` times."""
    if min_freq < 1:
        raise ValueError(f"build_vocab: min_freq must be >= 1, got {min_freq}")
    counts = Counter(tokens)
    kept = [(w, c) for w, c in counts.items() if c >= min_freq]
    kept.sort(key=lambda wc: (-wc[1], wc[0]))
    return WordVocab(kept, lowercased=lowercased)


@dataclass
class PretrainedEmbeddings:
    """Embedding table aligned with a WordVocab, one row per entry.

    Rows found in the source file are copied verbatim; all other rows
    (including the specials) are sampled uniform(-0.05, 0.05) from a
    seeded PCG64 generator, so loading is reproducible bit for bit. The
    table is trainable: embeddings are fine-tuned during training.
    """

    table: Tensor
    dim: int
    coverage: float

    @property
    def vocab_size(self) -> int:
        return self.table.shape[0]


def random_embeddings(vocab: WordVocab, dim: int, seed: int = 0) -> PretrainedEmbeddings:
    """A fully random table for training without pretrained vectors."""
    rng = np.random.default_rng(seed)
    table = rng.uniform(-0.05, 0.05, size=(len(vocab), dim))
    return PretrainedEmbeddings(Tensor(table, requires_grad=True), dim, 0.0)


def load_embeddings(path, vocab: WordVocab, dim: int, seed: int = 0) -> PretrainedEmbeddings:
    """Load text-format vectors for a vocabulary.

    Every line must have exactly 1 + dim fields. Vector values are parsed
    (and float errors reported with their line number) for vocabulary
    words; other lines only get the field-count check. When a word appears
    twice, the first occurrence wins.
    """
    rng = np.random.default_rng(seed)
    table = rng.uniform(-0.05, 0.05, size=(len(vocab), dim))
    found: set[int] = set()
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split(" ")
            if len(fields) != dim + 1:
                raise ValueError(
                    f"{path}:{line_no}: expected word plus {dim} values, got {len(fields)} fields"
                )
            index = vocab.word_to_index.get(fields[0])
            if index is None or index in found:
                continue
            try:
                table[index] = [float(v) for v in fields[1:]]
            except ValueError:
                raise ValueError(f"{path}:{line_no}: unparsable float value") from None
            found.add(index)
    n_words = len(vocab) - 2  # exclude the pad and UNK entries
    coverage = len(found) / n_words if n_words else 0.0
    return PretrainedEmbeddings(Tensor(table, requires_grad=True), dim, coverage)


@dataclass
class NliExample:
    premise: list[str]
    hypothesis: list[str]
    label: int  # index into NLI_LABELS


def load_nli(path, lowercase: bool = False) -> list[NliExample]:
    """Parse a JSON-lines entailment file into tokenized examples."""
    label_index = {name: i for i, name in enumerate(NLI_LABELS)}
    examples: list[NliExample] = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as err:
                raise ValueError(f"{path}:{line_no}: malformed JSON ({err.msg})") from None
            for field in ("sentence1", "sentence2", "gold_label"):
                if field not in record:
                    raise ValueError(f"{path}:{line_no}: missing field {field!r}")
            label = record["gold_label"]
            if label == "-":
                continue
            if label not in label_index:
                raise ValueError(f"{path}:{line_no}: unknown gold_label {label!r}")
            s1, s2 = record["sentence1"], record["sentence2"]
            if lowercase:
                s1, s2 = s1.lower(), s2.lower()
            premise = tokenize(s1)
            hypothesis = tokenize(s2)
            if not premise or not hypothesis:
                raise ValueError(f"{path}:{line_no}: sentence tokenized to nothing")
            examples.append(NliExample(premise, hypothesis, label_index[label]))
    return examples


@dataclass
class WordSimPair:
    word1: str
    word2: str
    gold_score: float


def load_wordsim(path, lowercase: bool = True, detect_header: bool = True) -> list[WordSimPair]:
    """Parse a word-similarity TSV into scored pairs."""
    pairs: list[WordSimPair] = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise ValueError(f"{path}:{line_no}: expected 3 tab-separated fields")
            w1, w2, raw_score = fields
            try:
                score = float(raw_score)
            except ValueError:
                if detect_header and line_no == 1:
                    continue
                raise ValueError(f"{path}:{line_no}: unparsable score {raw_score!r}") from None
            if not np.isfinite(score):
                raise ValueError(f"{path}:{line_no}: score must be finite, got {raw_score!r}")
            if not w1 or not w2:
                raise ValueError(f"{path}:{line_no}: empty word")
            if lowercase:
                w1, w2 = w1.lower(), w2.lower()
            pairs.append(WordSimPair(w1, w2, score))
    return pairs
