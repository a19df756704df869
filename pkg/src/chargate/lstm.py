"""Standard LSTM cell and bidirectional sequence runners.

The cell is the usual formulation: input/forget/output gates with sigmoid,
a tanh cell candidate, no peepholes. Weights are packed with the four gate
blocks stacked along the first axis in the order (input, forget, candidate,
output):

    w_x : (4H, D)   input-to-hidden
    w_h : (4H, H)   hidden-to-hidden
    b   : (4H,)     bias

Each step is a single fused tape node with a hand-derived backward rule,
which keeps sequence graphs small; the rule is exercised against central
differences in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .autodiff import ShapeError, Tensor, narrow, register_op, row

__all__ = ["LstmWeights", "init_lstm_weights", "lstm_step", "lstm_sequence", "bilstm"]


@dataclass
class LstmWeights:
    """Packed LSTM parameters for one direction."""

    w_x: Tensor
    w_h: Tensor
    b: Tensor

    def __post_init__(self):
        four_h, d = self.w_x.shape
        if four_h % 4 != 0:
            raise ShapeError(f"LstmWeights: first axis of w_x must be 4*hidden, got {four_h}")
        h = four_h // 4
        if self.w_h.shape != (four_h, h):
            raise ShapeError(f"LstmWeights: w_h shape {self.w_h.shape}, expected {(four_h, h)}")
        if self.b.shape != (four_h,):
            raise ShapeError(f"LstmWeights: b shape {self.b.shape}, expected {(four_h,)}")

    @property
    def input_dim(self) -> int:
        return self.w_x.shape[1]

    @property
    def hidden_dim(self) -> int:
        return self.w_x.shape[0] // 4

    def tensors(self, prefix: str) -> dict[str, Tensor]:
        return {f"{prefix}.w_x": self.w_x, f"{prefix}.w_h": self.w_h, f"{prefix}.b": self.b}


def glorot(rng: np.random.Generator, shape: tuple[int, ...], fan_in: int, fan_out: int) -> np.ndarray:
    """Glorot-uniform weight sample: U(+-sqrt(6 / (fan_in + fan_out)))."""
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=shape)


def init_lstm_weights(rng: np.random.Generator, input_dim: int, hidden_dim: int) -> LstmWeights:
    """Glorot-uniform weight matrices (per gate block) and zero biases.

    Desk-scale dimensions leave no room for the tiny-uniform init used on
    embedding tables: gradient flow through the stacked encoders dies and
    SGD cannot leave the initial plateau, so weight matrices get the
    variance-preserving init instead.
    """
    return LstmWeights(
        w_x=Tensor(
            glorot(rng, (4 * hidden_dim, input_dim), input_dim, hidden_dim), requires_grad=True
        ),
        w_h=Tensor(
            glorot(rng, (4 * hidden_dim, hidden_dim), hidden_dim, hidden_dim), requires_grad=True
        ),
        b=Tensor(np.zeros(4 * hidden_dim), requires_grad=True),
    )


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def lstm_step(x: Tensor, h_prev: Tensor, c_prev: Tensor, w: LstmWeights) -> tuple[Tensor, Tensor]:
    """One LSTM step; returns (h, c)."""
    hidden = w.hidden_dim
    if x.shape != (w.input_dim,):
        raise ShapeError(f"lstm_step: input shape {x.shape}, weights expect ({w.input_dim},)")
    if h_prev.shape != (hidden,) or c_prev.shape != (hidden,):
        raise ShapeError(
            f"lstm_step: state shapes {h_prev.shape}/{c_prev.shape}, expected ({hidden},)"
        )

    x_d, h_d, c_d = x.data, h_prev.data, c_prev.data
    w_x, w_h, b = w.w_x.data, w.w_h.data, w.b.data
    z = w_x @ x_d + w_h @ h_d + b
    i = _sigmoid(z[:hidden])
    f = _sigmoid(z[hidden : 2 * hidden])
    g = np.tanh(z[2 * hidden : 3 * hidden])
    o = _sigmoid(z[3 * hidden :])
    c = f * c_d + i * g
    tc = np.tanh(c)
    h = o * tc

    def backward_fn(grad):
        dh = grad[:hidden]
        dc = grad[hidden:] + dh * o * (1.0 - tc * tc)
        dz = np.concatenate(
            [
                dc * g * i * (1.0 - i),
                dc * c_d * f * (1.0 - f),
                dc * i * (1.0 - g * g),
                dh * tc * o * (1.0 - o),
            ]
        )
        return (
            w_x.T @ dz,
            w_h.T @ dz,
            dc * f,
            np.outer(dz, x_d),
            np.outer(dz, h_d),
            dz,
        )

    hc = register_op(
        np.concatenate([h, c]),
        (x, h_prev, c_prev, w.w_x, w.w_h, w.b),
        backward_fn,
        "lstm_step",
    )
    return narrow(hc, 0, hidden), narrow(hc, hidden, 2 * hidden)


def lstm_sequence(inputs: Tensor, w: LstmWeights, reverse: bool = False) -> Tensor:
    """Run the cell over the rows of a (m, d) matrix from zero states.

    Returns the (m, hidden) matrix of per-position states aligned with the
    input rows: row j is the state after the cell has consumed row j,
    reading left-to-right (or right-to-left when `reverse`).

    The whole sequence is one fused tape node: the forward pass caches the
    per-step activations and the backward rule runs truncation-free
    backpropagation through time over them.
    """
    if inputs.data.ndim != 2 or inputs.data.shape[0] < 1:
        raise ShapeError(f"lstm_sequence: expected a non-empty matrix, got shape {inputs.shape}")
    m = inputs.data.shape[0]
    hidden = w.hidden_dim
    if inputs.data.shape[1] != w.input_dim:
        raise ShapeError(
            f"lstm_sequence: input width {inputs.data.shape[1]}, weights expect {w.input_dim}"
        )
    x = inputs.data
    w_x, w_h, b = w.w_x.data, w.w_h.data, w.b.data
    order = range(m - 1, -1, -1) if reverse else range(m)

    x_proj = x @ w_x.T + b  # every step's input contribution at once
    h_prev = np.zeros(hidden)
    c_prev = np.zeros(hidden)
    states = np.empty((m, hidden))
    cache = []
    for j in order:
        z = x_proj[j] + w_h @ h_prev
        i = _sigmoid(z[:hidden])
        f = _sigmoid(z[hidden : 2 * hidden])
        g = np.tanh(z[2 * hidden : 3 * hidden])
        o = _sigmoid(z[3 * hidden :])
        c = f * c_prev + i * g
        tc = np.tanh(c)
        h = o * tc
        states[j] = h
        cache.append((j, i, f, g, o, tc, h_prev, c_prev))
        h_prev, c_prev = h, c

    def backward_fn(grad):
        d_wx = np.zeros_like(w_x)
        d_wh = np.zeros_like(w_h)
        d_b = np.zeros_like(b)
        d_x = np.zeros_like(x)
        dh_next = np.zeros(hidden)
        dc_next = np.zeros(hidden)
        for j, i, f, g, o, tc, h_in, c_in in reversed(cache):
            dh = grad[j] + dh_next
            dc = dc_next + dh * o * (1.0 - tc * tc)
            dz = np.concatenate(
                [
                    dc * g * i * (1.0 - i),
                    dc * c_in * f * (1.0 - f),
                    dc * i * (1.0 - g * g),
                    dh * tc * o * (1.0 - o),
                ]
            )
            d_wx += np.outer(dz, x[j])
            d_wh += np.outer(dz, h_in)
            d_b += dz
            d_x[j] = w_x.T @ dz
            dh_next = w_h.T @ dz
            dc_next = dc * f
        return d_x, d_wx, d_wh, d_b

    return register_op(states, (inputs, w.w_x, w.w_h, w.b), backward_fn, "lstm_sequence")


def bilstm(inputs: Tensor, fw: LstmWeights, bw: LstmWeights) -> tuple[Tensor, Tensor]:
    """Forward and backward passes over a sequence, as two (m, H) matrices.

    Row j of the forward output depends on input rows 0..j; row j of the
    backward output depends on rows j..m-1. Both directions start from
    zero states.
    """
    return lstm_sequence(inputs, fw), lstm_sequence(inputs, bw, reverse=True)
