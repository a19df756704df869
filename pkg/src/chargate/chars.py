"""Character-level word encoder.

A word's characters are embedded from a trainable table, contextualized by
a BiLSTM, and aggregated into a single vector by a linear map over the
concatenation of the forward direction's last state and the backward
direction's state at position 0 (the backward reader's final state, since
it consumes the word end-first).

Every non-empty string is encodable: characters unseen at vocabulary-build
time fall back to the UNK row, so there is no out-of-vocabulary failure at
the character level.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .autodiff import ShapeError, Tensor, add, concat, matmul, row, take_rows
from .lstm import LstmWeights, bilstm, init_lstm_weights

__all__ = ["CharVocab", "CharEncoderParams", "embed_chars", "aggregate", "encode_word"]

UNK_CHAR = "\x00"


class CharVocab:
    """Character <-> index map with an UNK fallback at index 0."""

    def __init__(self, chars: Iterable[str]):
        self.index_to_char: list[str] = [UNK_CHAR]
        seen = set(self.index_to_char)
        for ch in chars:
            if ch not in seen:
                seen.add(ch)
                self.index_to_char.append(ch)
        self.char_to_index = {ch: i for i, ch in enumerate(self.index_to_char)}
        self.unk_index = 0

    @classmethod
    def from_corpus(cls, words: Iterable[str]) -> "CharVocab":
        """Every character observed in the corpus, in first-seen order."""
        def chars():
            for word in words:
                yield from word

        return cls(chars())

    def __len__(self) -> int:
        return len(self.index_to_char)

    def lookup(self, ch: str) -> int:
        return self.char_to_index.get(ch, self.unk_index)

    def encode(self, word: str) -> list[int]:
        return [self.lookup(ch) for ch in word]


@dataclass
class CharEncoderParams:
    """Trainable pieces of the character encoder."""

    embeddings: Tensor  # (|C|, char_dim)
    lstm_fw: LstmWeights
    lstm_bw: LstmWeights
    proj: Tensor  # (hidden, 2*hidden)
    bias: Tensor  # (hidden,)

    @property
    def char_dim(self) -> int:
        return self.embeddings.shape[1]

    @property
    def hidden_dim(self) -> int:
        return self.bias.shape[0]

    def tensors(self) -> dict[str, Tensor]:
        out = {"char.embeddings": self.embeddings, "char.proj": self.proj, "char.bias": self.bias}
        out.update(self.lstm_fw.tensors("char.fw"))
        out.update(self.lstm_bw.tensors("char.bw"))
        return out

    @classmethod
    def init(
        cls, rng: np.random.Generator, vocab_size: int, char_dim: int, hidden_dim: int
    ) -> "CharEncoderParams":
        """Embeddings uniform(-0.05, 0.05); weight matrices Glorot; zero bias."""
        from .lstm import glorot

        return cls(
            embeddings=Tensor(
                rng.uniform(-0.05, 0.05, size=(vocab_size, char_dim)), requires_grad=True
            ),
            lstm_fw=init_lstm_weights(rng, char_dim, hidden_dim),
            lstm_bw=init_lstm_weights(rng, char_dim, hidden_dim),
            proj=Tensor(
                glorot(rng, (hidden_dim, 2 * hidden_dim), 2 * hidden_dim, hidden_dim),
                requires_grad=True,
            ),
            bias=Tensor(np.zeros(hidden_dim), requires_grad=True),
        )


def embed_chars(word: str, params: CharEncoderParams, vocab: CharVocab) -> Tensor:
    """Character embedding matrix for a word, one row per character."""
    if not word:
        raise ValueError("embed_chars: cannot encode an empty word")
    return take_rows(params.embeddings, vocab.encode(word))


def aggregate(h_fw: Tensor, h_bw: Tensor, proj: Tensor, bias: Tensor) -> Tensor:
    """Linear combination of the two directions' final states.

    The forward reader finishes at the last row; the backward reader
    finishes at row 0.
    """
    if h_fw.data.ndim != 2 or h_bw.data.ndim != 2 or h_fw.data.shape[0] < 1:
        raise ShapeError(f"aggregate: expected state matrices, got {h_fw.shape} and {h_bw.shape}")
    last_fw = row(h_fw, h_fw.data.shape[0] - 1)
    first_bw = row(h_bw, 0)
    return add(matmul(proj, concat([last_fw, first_bw])), bias)


def encode_word(word: str, params: CharEncoderParams, vocab: CharVocab) -> Tensor:
    """Full pipeline: embed characters, run the BiLSTM, aggregate."""
    embedded = embed_chars(word, params, vocab)
    h_fw, h_bw = bilstm(embedded, params.lstm_fw, params.lstm_bw)
    return aggregate(h_fw, h_bw, params.proj, params.bias)
