"""Character-aware word representations with gated combination.

A numpy-backed library for building word vectors from a pretrained-style
lookup table, from characters, or from both combined by concatenation or
learned sigmoid gates; encoding sentences with a max-pooling BiLSTM;
training the whole stack on entailment data; and evaluating trained
models with the word-similarity, sentence-probe, and gate-analysis
protocols plus Welch's t-test significance machinery.
"""

from .autodiff import Tensor, backward, clip_gradients, grad_check, gradients, no_grad
from .chars import CharEncoderParams, CharVocab, encode_word
from .combine import METHODS, combine, gate_value, normalize_method
from .data import (
    NliExample,
    WordSimPair,
    WordVocab,
    build_vocab,
    load_embeddings,
    load_nli,
    load_wordsim,
)
from .lstm import LstmWeights, bilstm, lstm_step
from .model import ModelConfig, NliModel
from .checkpoint import load_model, save_model
from .sentence import SentenceEncoderParams, encode_sentence, nli_forward
from .stats import gate_profile, performance_correlation_matrix, significance_table, welch_t_test
from .tokenizer import tokenize
from .training import TrainConfig, TrainData, evaluate_accuracy, run_seeds, train_one
from .wordsim import cosine_similarity, evaluate_wordsim, pearson, spearman

__version__ = "0.1.0"

__all__ = [
    "Tensor",
    "backward",
    "gradients",
    "grad_check",
    "clip_gradients",
    "no_grad",
    "CharVocab",
    "CharEncoderParams",
    "encode_word",
    "METHODS",
    "normalize_method",
    "combine",
    "gate_value",
    "LstmWeights",
    "lstm_step",
    "bilstm",
    "SentenceEncoderParams",
    "encode_sentence",
    "nli_forward",
    "WordVocab",
    "build_vocab",
    "load_embeddings",
    "load_nli",
    "load_wordsim",
    "NliExample",
    "WordSimPair",
    "ModelConfig",
    "NliModel",
    "save_model",
    "load_model",
    "TrainConfig",
    "TrainData",
    "train_one",
    "run_seeds",
    "evaluate_accuracy",
    "tokenize",
    "cosine_similarity",
    "pearson",
    "spearman",
    "evaluate_wordsim",
    "welch_t_test",
    "gate_profile",
    "performance_correlation_matrix",
    "significance_table",
    "__version__",
]
