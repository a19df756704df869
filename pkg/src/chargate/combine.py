"""Methods for merging a word-level vector with a character-level vector.

Five methods are supported, named by the short tags used throughout the
CLI and configs:

    w   : word vector only
    c   : character vector only
    cat : concatenation, character part first
    sg  : scalar gate  g = sigmoid(w . v_word + b), one mixing weight
    vg  : vector gate  g = sigmoid(W v_word + b), one mixing weight per
          dimension (feature-wise)

Both gates interpolate: v = g * v_char + (1 - g) * v_word, and both are
conditioned on the word vector alone. Large negative bias drives the
output to the word vector, large positive bias to the character vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .autodiff import ShapeError, Tensor, add, concat, matmul, mul, reshape, sigmoid, sub

__all__ = [
    "METHODS",
    "GATE_METHODS",
    "normalize_method",
    "ScalarGateParams",
    "VectorGateParams",
    "init_gate_params",
    "combine",
    "gate_value",
]

METHODS = ("w", "c", "cat", "sg", "vg")
GATE_METHODS = ("sg", "vg")

_ALIASES = {
    "w": "w",
    "word": "w",
    "word_only": "w",
    "c": "c",
    "char": "c",
    "char_only": "c",
    "cat": "cat",
    "concat": "cat",
    "sg": "sg",
    "scalar_gate": "sg",
    "vg": "vg",
    "vector_gate": "vg",
}


def normalize_method(name: str) -> str:
    """Map a method name or alias to its canonical short tag."""
    try:
        return _ALIASES[name.strip().lower()]
    except KeyError:
        raise ValueError(
            f"unknown combination method {name!r}; valid methods: {', '.join(METHODS)}"
        ) from None


@dataclass
class ScalarGateParams:
    weight: Tensor  # (d,)
    bias: Tensor  # scalar, shape ()

    def tensors(self) -> dict[str, Tensor]:
        return {"gate.weight": self.weight, "gate.bias": self.bias}


@dataclass
class VectorGateParams:
    weight: Tensor  # (d, d)
    bias: Tensor  # (d,)

    def tensors(self) -> dict[str, Tensor]:
        return {"gate.weight": self.weight, "gate.bias": self.bias}


def init_gate_params(rng: np.random.Generator, method: str, dim: int):
    """uniform(-0.05, 0.05) for both pieces, so initial gates sit at 0.5.

    Unlike the encoder matrices, gate weights must start small: a
    large-variance init hands every word an arbitrary gate before any
    learning happens, and that noise can drown the learned structure.
    Small weights cost nothing since the mix passes signal at any gate.
    """
    method = normalize_method(method)
    if method == "sg":
        return ScalarGateParams(
            weight=Tensor(rng.uniform(-0.05, 0.05, size=(dim,)), requires_grad=True),
            bias=Tensor(rng.uniform(-0.05, 0.05), requires_grad=True),
        )
    if method == "vg":
        return VectorGateParams(
            weight=Tensor(rng.uniform(-0.05, 0.05, size=(dim, dim)), requires_grad=True),
            bias=Tensor(rng.uniform(-0.05, 0.05, size=(dim,)), requires_grad=True),
        )
    return None


def _check_vector(name: str, t: Tensor) -> None:
    if t is None:
        raise ValueError(f"combine: method requires {name} but it is missing")
    if t.data.ndim != 1:
        raise ShapeError(f"combine: {name} must be a vector, got shape {t.shape}")


def _scalar_gate(v_word: Tensor, params: ScalarGateParams) -> Tensor:
    if params is None:
        raise ValueError("combine: scalar gate requires ScalarGateParams")
    if params.weight.shape != v_word.shape:
        raise ShapeError(
            f"combine: gate weight shape {params.weight.shape} does not match "
            f"word vector shape {v_word.shape}"
        )
    return sigmoid(add(matmul(params.weight, v_word), params.bias))


def _vector_gate(v_word: Tensor, params: VectorGateParams) -> Tensor:
    if params is None:
        raise ValueError("combine: vector gate requires VectorGateParams")
    d = v_word.shape[0]
    if params.weight.shape != (d, d) or params.bias.shape != (d,):
        raise ShapeError(
            f"combine: vector gate shapes {params.weight.shape}/{params.bias.shape} "
            f"do not match word vector shape {v_word.shape}"
        )
    return sigmoid(add(matmul(params.weight, v_word), params.bias))


def combine(
    method: str, v_word: Tensor | None, v_char: Tensor | None, params=None
) -> tuple[Tensor, Tensor | None]:
    """Build the final word representation; returns (vector, gate or None).

    The unused input may be None for the single-source methods. Gate
    methods require both vectors to share one dimensionality; the gate is
    returned as a vector (length 1 for the scalar gate).
    """
    method = normalize_method(method)
    if method == "w":
        _check_vector("v_word", v_word)
        return v_word, None
    if method == "c":
        _check_vector("v_char", v_char)
        return v_char, None

    _check_vector("v_word", v_word)
    _check_vector("v_char", v_char)
    if method == "cat":
        if v_word.shape != v_char.shape:
            raise ShapeError(
                f"combine: cat expects equal dims, got {v_char.shape} and {v_word.shape}"
            )
        return concat([v_char, v_word]), None

    if v_word.shape != v_char.shape:
        raise ShapeError(
            f"combine: gates expect equal dims, got {v_char.shape} and {v_word.shape}"
        )
    if method == "sg":
        g = _scalar_gate(v_word, params)
    else:
        g = _vector_gate(v_word, params)
    mixed = add(mul(g, v_char), mul(sub(Tensor(1.0), g), v_word))
    gate_vec = reshape(g, (1,)) if method == "sg" else g
    return mixed, gate_vec


def gate_value(method: str, v_word: Tensor, params) -> Tensor:
    """The gate a combine() call would use, without forming the output.

    Returned as a vector: length 1 for the scalar gate, length d for the
    vector gate.
    """
    method = normalize_method(method)
    if method not in GATE_METHODS:
        raise ValueError(f"gate_value: method {method!r} has no gate")
    _check_vector("v_word", v_word)
    if method == "sg":
        return reshape(_scalar_gate(v_word, params), (1,))
    return _vector_gate(v_word, params)
