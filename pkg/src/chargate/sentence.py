"""Sentence encoder: BiLSTM over word vectors with max pooling, plus the
three-way entailment classification head used for training.

The per-position representation is the concatenation of the forward and
backward states, and the sentence vector is the coordinatewise max over
positions. The head consumes the pair features
[u ; v ; |u - v| ; u * v] through one tanh hidden layer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .autodiff import (
    ShapeError,
    Tensor,
    absolute,
    add,
    concat,
    matmul,
    max_over_rows,
    mul,
    sub,
    tanh,
)
from .lstm import LstmWeights, bilstm, init_lstm_weights

__all__ = ["SentenceEncoderParams", "encode_sentence", "nli_forward", "NUM_CLASSES"]

NUM_CLASSES = 3  # entailment, neutral, contradiction


@dataclass
class SentenceEncoderParams:
    """BiLSTM weights plus the classifier head.

    The sentence dimension is twice the per-direction hidden size. The
    classifier maps 4 * sentence_dim pair features to a tanh hidden layer
    and then to 3 logits.
    """

    lstm_fw: LstmWeights
    lstm_bw: LstmWeights
    hidden_w: Tensor  # (hidden, 4 * sentence_dim)
    hidden_b: Tensor  # (hidden,)
    out_w: Tensor  # (3, hidden)
    out_b: Tensor  # (3,)

    @property
    def sentence_dim(self) -> int:
        return 2 * self.lstm_fw.hidden_dim

    def tensors(self) -> dict[str, Tensor]:
        out = {
            "sent.hidden_w": self.hidden_w,
            "sent.hidden_b": self.hidden_b,
            "sent.out_w": self.out_w,
            "sent.out_b": self.out_b,
        }
        out.update(self.lstm_fw.tensors("sent.fw"))
        out.update(self.lstm_bw.tensors("sent.bw"))
        return out

    @classmethod
    def init(
        cls,
        rng: np.random.Generator,
        input_dim: int,
        sentence_dim: int,
        classifier_hidden: int,
    ) -> "SentenceEncoderParams":
        if sentence_dim % 2 != 0:
            raise ValueError(f"sentence_dim must be even, got {sentence_dim}")
        from .lstm import glorot

        half = sentence_dim // 2
        return cls(
            lstm_fw=init_lstm_weights(rng, input_dim, half),
            lstm_bw=init_lstm_weights(rng, input_dim, half),
            hidden_w=Tensor(
                glorot(rng, (classifier_hidden, 4 * sentence_dim), 4 * sentence_dim, classifier_hidden),
                requires_grad=True,
            ),
            hidden_b=Tensor(np.zeros(classifier_hidden), requires_grad=True),
            out_w=Tensor(
                glorot(rng, (NUM_CLASSES, classifier_hidden), classifier_hidden, NUM_CLASSES),
                requires_grad=True,
            ),
            out_b=Tensor(np.zeros(NUM_CLASSES), requires_grad=True),
        )


def encode_sentence(word_vectors: Tensor, params: SentenceEncoderParams) -> Tensor:
    """Fixed-size sentence vector from an (n, d_in) matrix of word vectors."""
    if word_vectors.data.ndim != 2 or word_vectors.data.shape[0] < 1:
        raise ShapeError(
            f"encode_sentence: expected a non-empty (n, d) matrix, got shape {word_vectors.shape}"
        )
    h_fw, h_bw = bilstm(word_vectors, params.lstm_fw, params.lstm_bw)
    states = concat([h_fw, h_bw], axis=1)
    return max_over_rows(states)


def nli_forward(premise: Tensor, hypothesis: Tensor, params: SentenceEncoderParams) -> Tensor:
    """Three-way logits for a premise/hypothesis pair of sentence vectors."""
    d = params.sentence_dim
    if premise.shape != (d,) or hypothesis.shape != (d,):
        raise ShapeError(
            f"nli_forward: expected two ({d},) vectors, got {premise.shape} and {hypothesis.shape}"
        )
    features = concat(
        [premise, hypothesis, absolute(sub(premise, hypothesis)), mul(premise, hypothesis)]
    )
    hidden = tanh(add(matmul(params.hidden_w, features), params.hidden_b))
    return add(matmul(params.out_w, hidden), params.out_b)
