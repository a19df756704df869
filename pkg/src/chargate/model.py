"""End-to-end entailment model: token -> combined word vector -> sentence
vector -> pair classification.

The premise and hypothesis share one encoder (siamese). Words outside the
vocabulary fall back to the UNK embedding on the word path while keeping
their true character sequence on the character path, so every string is
representable.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Mapping, Sequence

import numpy as np

from .autodiff import Tensor, cross_entropy, no_grad, row, stack_rows
from .chars import CharEncoderParams, CharVocab, encode_word
from .combine import (
    GATE_METHODS,
    ScalarGateParams,
    VectorGateParams,
    combine,
    init_gate_params,
    normalize_method,
)
from .data import NliExample, PretrainedEmbeddings, WordVocab
from .sentence import SentenceEncoderParams, encode_sentence, nli_forward

__all__ = ["ModelConfig", "NliModel"]


@dataclass
class ModelConfig:
    """Dimensions and method tag; defaults follow the training recipe."""

    method: str = "vg"
    word_dim: int = 300
    char_dim: int = 50
    char_hidden: int = 300
    sentence_dim: int = 4096
    classifier_hidden: int = 512
    lowercase: bool = False

    def __post_init__(self):
        self.method = normalize_method(self.method)
        for name in ("word_dim", "char_dim", "char_hidden", "sentence_dim", "classifier_hidden"):
            if getattr(self, name) <= 0:
                raise ValueError(f"ModelConfig: {name} must be positive")
        if self.sentence_dim % 2 != 0:
            raise ValueError("ModelConfig: sentence_dim must be even")
        if self.method in ("cat", "sg", "vg") and self.char_hidden != self.word_dim:
            raise ValueError(
                "ModelConfig: combining both paths requires char_hidden == word_dim "
                f"(got {self.char_hidden} and {self.word_dim}); no implicit projection is added"
            )

    @property
    def uses_words(self) -> bool:
        return self.method != "c"

    @property
    def uses_chars(self) -> bool:
        return self.method != "w"

    @property
    def input_dim(self) -> int:
        """Width of the word vectors fed to the sentence encoder."""
        if self.method == "c":
            return self.char_hidden
        if self.method == "cat":
            return self.char_hidden + self.word_dim
        return self.word_dim

    def to_dict(self) -> dict:
        return asdict(self)


class NliModel:
    """Parameter bundles plus the forward passes used in training and eval."""

    def __init__(
        self,
        config: ModelConfig,
        word_vocab: WordVocab,
        char_vocab: CharVocab | None,
        word_embeddings: Tensor | None,
        char_params: CharEncoderParams | None,
        gate_params: ScalarGateParams | VectorGateParams | None,
        sentence_params: SentenceEncoderParams,
    ):
        self.config = config
        self.word_vocab = word_vocab
        self.char_vocab = char_vocab
        self.word_embeddings = word_embeddings
        self.char_params = char_params
        self.gate_params = gate_params
        self.sentence_params = sentence_params

    @classmethod
    def init(
        cls,
        config: ModelConfig,
        word_vocab: WordVocab,
        char_vocab: CharVocab | None,
        seed: int,
        embeddings: PretrainedEmbeddings | None = None,
    ) -> "NliModel":
        """Fresh parameters, all uniform(-0.05, 0.05) from the given seed.

        `embeddings` overrides the random word table (it is still
        trainable). Character parameters exist only for methods that use
        the character path, the gate only for gate methods.
        """
        rng = np.random.default_rng([seed, 0])
        word_embeddings = None
        if config.uses_words:
            if embeddings is not None:
                if embeddings.dim != config.word_dim:
                    raise ValueError(
                        f"embedding dim {embeddings.dim} does not match word_dim {config.word_dim}"
                    )
                word_embeddings = embeddings.table
            else:
                word_embeddings = Tensor(
                    rng.uniform(-0.05, 0.05, size=(len(word_vocab), config.word_dim)),
                    requires_grad=True,
                )
        char_params = None
        if config.uses_chars:
            if char_vocab is None:
                raise ValueError(f"method {config.method!r} needs a character vocabulary")
            char_params = CharEncoderParams.init(
                rng, len(char_vocab), config.char_dim, config.char_hidden
            )
        gate_params = init_gate_params(rng, config.method, config.word_dim)
        sentence_params = SentenceEncoderParams.init(
            rng, config.input_dim, config.sentence_dim, config.classifier_hidden
        )
        return cls(
            config, word_vocab, char_vocab, word_embeddings, char_params, gate_params,
            sentence_params,
        )

    @classmethod
    def from_state(
        cls,
        config: ModelConfig,
        word_vocab: WordVocab,
        char_vocab: CharVocab | None,
        arrays: Mapping[str, np.ndarray],
    ) -> "NliModel":
        """Rebuild a model from named parameter arrays (checkpoint load)."""
        model = cls.init(config, word_vocab, char_vocab, seed=0)
        params = model.parameters()
        missing = set(params) - set(arrays)
        extra = set(arrays) - set(params)
        if missing or extra:
            raise ValueError(f"parameter mismatch: missing {sorted(missing)}, extra {sorted(extra)}")
        for name, tensor in params.items():
            arr = np.asarray(arrays[name], dtype=np.float64)
            if arr.shape != tensor.data.shape:
                raise ValueError(
                    f"parameter {name!r}: stored shape {arr.shape}, expected {tensor.data.shape}"
                )
            tensor.data[...] = arr
        return model

    def parameters(self) -> dict[str, Tensor]:
        out: dict[str, Tensor] = {}
        if self.word_embeddings is not None:
            out["word.embeddings"] = self.word_embeddings
        if self.char_params is not None:
            out.update(self.char_params.tensors())
        if self.gate_params is not None:
            out.update(self.gate_params.tensors())
        out.update(self.sentence_params.tensors())
        return out

    # ------------------------------------------------------------------
    # forward passes

    def _normalize(self, word: str) -> str:
        return word.lower() if self.config.lowercase else word

    def word_lookup_vector(self, word: str) -> Tensor:
        """The word-path vector alone (UNK row when out of vocabulary)."""
        if self.word_embeddings is None:
            raise ValueError("model has no word embedding table (char-only method)")
        word = self._normalize(word)
        return row(self.word_embeddings, self.word_vocab.lookup(word))

    def word_vector(self, word: str, cache: dict | None = None) -> Tensor:
        """Combined representation of one word via the configured method."""
        word = self._normalize(word)
        if cache is not None and word in cache:
            return cache[word]
        v_word = None
        if self.config.uses_words:
            v_word = row(self.word_embeddings, self.word_vocab.lookup(word))
        v_char = None
        if self.config.uses_chars:
            v_char = encode_word(word, self.char_params, self.char_vocab)
        combined, _ = combine(self.config.method, v_word, v_char, self.gate_params)
        if cache is not None:
            cache[word] = combined
        return combined

    def word_gate(self, word: str) -> Tensor:
        """Gate vector the combiner would apply to this word."""
        from .combine import gate_value

        if self.config.method not in GATE_METHODS:
            raise ValueError(f"method {self.config.method!r} has no gate")
        return gate_value(self.config.method, self.word_lookup_vector(word), self.gate_params)

    def sentence_vector(self, tokens: Sequence[str], cache: dict | None = None) -> Tensor:
        if not tokens:
            raise ValueError("cannot encode an empty sentence")
        rows = [self.word_vector(t, cache) for t in tokens]
        return encode_sentence(stack_rows(rows), self.sentence_params)

    def logits(self, example: NliExample, cache: dict | None = None) -> Tensor:
        u = self.sentence_vector(example.premise, cache)
        v = self.sentence_vector(example.hypothesis, cache)
        return nli_forward(u, v, self.sentence_params)

    def predict(self, example: NliExample) -> int:
        """Argmax class; ties resolve to the lowest class index."""
        with no_grad():
            return int(np.argmax(self.logits(example).data))

    def batch_loss(self, batch: Sequence[NliExample]) -> tuple[Tensor, list[int]]:
        """Mean cross-entropy over a batch, plus the argmax predictions.

        Word vectors are cached across the whole batch: parameters are
        fixed during a forward pass, so repeated words share one subgraph.
        """
        if not batch:
            raise ValueError("batch_loss: empty batch")
        cache: dict = {}
        total = None
        predictions: list[int] = []
        for example in batch:
            logits = self.logits(example, cache)
            predictions.append(int(np.argmax(logits.data)))
            loss = cross_entropy(logits, example.label)
            total = loss if total is None else total + loss
        return total * (1.0 / len(batch)), predictions
