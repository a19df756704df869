"""Central-difference verification of every differentiable component.

Each component is reduced to a scalar through a fixed random projection
and checked at freshly sampled random points: activations and inputs in
[-2, 2], weight matrices in [-0.3, 0.3] so that gate pre-activations stay
out of the saturated sigmoid tails, where central differences are
numerically uninformative rather than wrong.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .autodiff import (
    Tensor,
    concat,
    cross_entropy,
    grad_check,
    matmul,
    max_over_rows,
    no_grad,
    take_rows,
)
from .chars import aggregate
from .combine import ScalarGateParams, VectorGateParams, combine
from .lstm import LstmWeights, bilstm, lstm_step
from .sentence import SentenceEncoderParams, nli_forward

__all__ = ["COMPONENTS", "check_component", "gradient_suite"]

_INPUT_SCALE = 2.0
_WEIGHT_SCALE = 0.3


def _inputs(rng, *shape):
    return Tensor(rng.uniform(-_INPUT_SCALE, _INPUT_SCALE, size=shape), requires_grad=True)


def _weights(rng, *shape):
    return Tensor(rng.uniform(-_WEIGHT_SCALE, _WEIGHT_SCALE, size=shape), requires_grad=True)


def _projection(rng, n) -> Tensor:
    return Tensor(rng.uniform(-1.0, 1.0, size=(n,)))


def _build_lstm_step(rng):
    d_in, hidden = 3, 4
    proj = _projection(rng, 2 * hidden)
    tensors = [
        _inputs(rng, d_in),
        _inputs(rng, hidden),
        _inputs(rng, hidden),
        _weights(rng, 4 * hidden, d_in),
        _weights(rng, 4 * hidden, hidden),
        _weights(rng, 4 * hidden),
    ]

    def f(x, h0, c0, w_x, w_h, b):
        h, c = lstm_step(x, h0, c0, LstmWeights(w_x, w_h, b))
        return matmul(proj, concat([h, c]))

    return f, tensors


def _matrix_probe(rng, n_rows, n_cols):
    u = _projection(rng, n_rows)
    v = _projection(rng, n_cols)
    return lambda m: matmul(u, matmul(m, v))


def _build_bilstm(rng):
    m, d_in, hidden = 3, 3, 3
    probe_fw = _matrix_probe(rng, m, hidden)
    probe_bw = _matrix_probe(rng, m, hidden)
    tensors = [_inputs(rng, m, d_in)]
    for _ in range(2):
        tensors += [
            _weights(rng, 4 * hidden, d_in),
            _weights(rng, 4 * hidden, hidden),
            _weights(rng, 4 * hidden),
        ]

    def f(x, fwx, fwh, fb, bwx, bwh, bb):
        h_fw, h_bw = bilstm(x, LstmWeights(fwx, fwh, fb), LstmWeights(bwx, bwh, bb))
        return probe_fw(h_fw) + probe_bw(h_bw)

    return f, tensors


def _build_aggregation(rng):
    m, hidden = 3, 4
    proj = _projection(rng, hidden)
    tensors = [
        _inputs(rng, m, hidden),
        _inputs(rng, m, hidden),
        _weights(rng, hidden, 2 * hidden),
        _weights(rng, hidden),
    ]

    def f(h_fw, h_bw, w, b):
        return matmul(proj, aggregate(h_fw, h_bw, w, b))

    return f, tensors


def _build_scalar_gate(rng):
    d = 5
    proj = _projection(rng, d)
    tensors = [_inputs(rng, d), _inputs(rng, d), _weights(rng, d), _weights(rng)]

    def f(v_w, v_c, w, b):
        mixed, _ = combine("sg", v_w, v_c, ScalarGateParams(w, b))
        return matmul(proj, mixed)

    return f, tensors


def _build_vector_gate(rng):
    d = 5
    proj = _projection(rng, d)
    tensors = [_inputs(rng, d), _inputs(rng, d), _weights(rng, d, d), _weights(rng, d)]

    def f(v_w, v_c, w, b):
        mixed, _ = combine("vg", v_w, v_c, VectorGateParams(w, b))
        return matmul(proj, mixed)

    return f, tensors


def _build_char_encoder(rng):
    table_size, char_dim, hidden = 6, 3, 3
    indices = [0, 2, 1, 3]
    proj = _projection(rng, hidden)
    tensors = [
        _inputs(rng, table_size, char_dim),
        _weights(rng, 4 * hidden, char_dim),
        _weights(rng, 4 * hidden, hidden),
        _weights(rng, 4 * hidden),
        _weights(rng, 4 * hidden, char_dim),
        _weights(rng, 4 * hidden, hidden),
        _weights(rng, 4 * hidden),
        _weights(rng, hidden, 2 * hidden),
        _weights(rng, hidden),
    ]

    def f(table, fwx, fwh, fb, bwx, bwh, bb, w, b):
        embedded = take_rows(table, indices)
        h_fw, h_bw = bilstm(embedded, LstmWeights(fwx, fwh, fb), LstmWeights(bwx, bwh, bb))
        return matmul(proj, aggregate(h_fw, h_bw, w, b))

    return f, tensors


def _sentence_params(tensors) -> SentenceEncoderParams:
    fwx, fwh, fb, bwx, bwh, bb, hw, hb, ow, ob = tensors
    return SentenceEncoderParams(
        LstmWeights(fwx, fwh, fb), LstmWeights(bwx, bwh, bb), hw, hb, ow, ob
    )


def _build_sentence_encoder(rng):
    n, d_in, half = 3, 4, 3
    proj = _projection(rng, 2 * half)

    def f(x, fwx, fwh, fb, bwx, bwh, bb):
        h_fw, h_bw = bilstm(x, LstmWeights(fwx, fwh, fb), LstmWeights(bwx, bwh, bb))
        pooled = max_over_rows(concat([h_fw, h_bw], axis=1))
        return matmul(proj, pooled)

    # resample until every pooled column has a clear winner: central
    # differences straddle the argmax switch when the top two entries are
    # closer than the perturbation can resolve
    while True:
        tensors = [_inputs(rng, n, d_in)]
        for _ in range(2):
            tensors += [
                _weights(rng, 4 * half, d_in),
                _weights(rng, 4 * half, half),
                _weights(rng, 4 * half),
            ]
        with no_grad():
            x, fwx, fwh, fb, bwx, bwh, bb = tensors
            h_fw, h_bw = bilstm(x, LstmWeights(fwx, fwh, fb), LstmWeights(bwx, bwh, bb))
            states = np.concatenate([h_fw.data, h_bw.data], axis=1)
        top_two = np.sort(states, axis=0)[-2:, :]
        if np.min(top_two[1] - top_two[0]) > 1e-3:
            return f, tensors


def _build_nli_head(rng):
    d_s, hidden_size, half = 6, 5, 3
    proj = _projection(rng, 3)
    lstm_dims = [(4 * half, 1), (4 * half, half), (4 * half,)]
    filler = [Tensor(np.zeros(shape)) for shape in lstm_dims * 2]

    tensors = [
        _inputs(rng, d_s),
        _inputs(rng, d_s),
        _weights(rng, hidden_size, 4 * d_s),
        _weights(rng, hidden_size),
        _weights(rng, 3, hidden_size),
        _weights(rng, 3),
    ]

    def f(u, v, hw, hb, ow, ob):
        params = _sentence_params([*filler, hw, hb, ow, ob])
        return matmul(proj, nli_forward(u, v, params))

    return f, tensors


def _build_cross_entropy(rng):
    tensors = [_inputs(rng, 4)]
    return (lambda logits: cross_entropy(logits, 1)), tensors


COMPONENTS: dict[str, Callable] = {
    "lstm_step": _build_lstm_step,
    "bilstm": _build_bilstm,
    "aggregation": _build_aggregation,
    "scalar_gate": _build_scalar_gate,
    "vector_gate": _build_vector_gate,
    "char_encoder": _build_char_encoder,
    "sentence_encoder": _build_sentence_encoder,
    "nli_head": _build_nli_head,
    "cross_entropy": _build_cross_entropy,
}


def check_component(name: str, points: int = 100, epsilon: float = 1e-5, seed: int = 0) -> float:
    """Worst relative gradient error for one component over random points."""
    builder = COMPONENTS[name]
    rng = np.random.default_rng([seed, sorted(COMPONENTS).index(name)])
    worst = 0.0
    for _ in range(points):
        f, tensors = builder(rng)
        worst = max(worst, grad_check(f, tensors, epsilon))
    return worst


def gradient_suite(points: int = 100, epsilon: float = 1e-5, seed: int = 0) -> dict[str, float]:
    """Run every component check; returns component -> worst error."""
    return {name: check_component(name, points, epsilon, seed) for name in COMPONENTS}
