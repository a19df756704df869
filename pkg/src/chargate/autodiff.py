"""Minimal reverse-mode automatic differentiation over dense float64 tensors.

The engine is define-by-run: every operation immediately computes its
forward value and, when gradients are enabled, records a backward rule.
Tensors carry a monotonically increasing creation index, so the implicit
tape is simply the set of tensors reachable from a loss, replayed in
reverse creation order (parents are always created before children, so
creation order is a topological order).

Only the operations needed by the encoders in this package are provided:
matrix products, elementwise arithmetic, concatenation and slicing, row
gather (for embedding tables), sigmoid/tanh/abs, elementwise and columnwise
max (for pooling), softmax, and cross-entropy.

Everything is float64. There is no broadcasting beyond numpy's rules for
elementwise add/sub/mul; gradients of broadcast operands are sum-reduced
back to the operand's shape.
"""

from __future__ import annotations

import contextlib
import itertools
from typing import Callable, Mapping, Sequence

import numpy as np

__all__ = [
    "Tensor",
    "ShapeError",
    "no_grad",
    "add",
    "sub",
    "mul",
    "matmul",
    "concat",
    "reshape",
    "narrow",
    "row",
    "take_rows",
    "stack_rows",
    "sigmoid",
    "tanh",
    "absolute",
    "maximum",
    "max_over_rows",
    "softmax",
    "cross_entropy",
    "register_op",
    "backward",
    "gradients",
    "grad_check",
    "clip_gradients",
]


class ShapeError(ValueError):
    """Raised when operand shapes do not conform for an operation."""


_grad_enabled = True
_seq = itertools.count()


@contextlib.contextmanager
def no_grad():
    """Disable tape recording inside the block (evaluation-only forwards)."""
    global _grad_enabled
    previous = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = previous


class Tensor:
    """Dense float64 array plus the bookkeeping needed for backward().

    Construction rejects non-finite values. Operation outputs are checked
    the same way, so a finite-input overflow surfaces at the op that
    produced it rather than as a corrupted gradient later.
    """

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward", "_op", "_seq")

    def __init__(self, data, requires_grad: bool = False):
        arr = np.asarray(data, dtype=np.float64)
        if not np.all(np.isfinite(arr)):
            raise ValueError("tensor data must be finite (got NaN or Inf)")
        self.data = arr
        self.grad: np.ndarray | None = None
        self.requires_grad = bool(requires_grad)
        self._parents: tuple[Tensor, ...] = ()
        self._backward: Callable[[np.ndarray], tuple] | None = None
        self._op = "leaf"
        self._seq = next(_seq)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    def item(self) -> float:
        return float(self.data)

    def zero_grad(self) -> None:
        self.grad = None

    def __repr__(self) -> str:
        return f"Tensor(shape={self.data.shape}, op={self._op!r})"

    # Arithmetic sugar; floats are wrapped as non-trainable constants.
    def __add__(self, other):
        return add(self, _as_tensor(other))

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, _as_tensor(other))

    def __rsub__(self, other):
        return sub(_as_tensor(other), self)

    def __mul__(self, other):
        return mul(self, _as_tensor(other))

    __rmul__ = __mul__

    def __matmul__(self, other):
        return matmul(self, _as_tensor(other))

    def __neg__(self):
        return mul(self, _as_tensor(-1.0))


def _as_tensor(value) -> Tensor:
    if isinstance(value, Tensor):
        return value
    return Tensor(np.asarray(value, dtype=np.float64))


def _make(data: np.ndarray, parents: tuple[Tensor, ...], backward_fn, op: str) -> Tensor:
    """Wrap an op result, attaching the backward rule if recording."""
    if not np.all(np.isfinite(data)):
        raise ValueError(f"{op}: produced non-finite values")
    out = Tensor.__new__(Tensor)
    out.data = data
    out.grad = None
    out._op = op
    out._seq = next(_seq)
    if _grad_enabled and any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = parents
        out._backward = backward_fn
    else:
        out.requires_grad = False
        out._parents = ()
        out._backward = None
    return out


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum-reduce a gradient over axes that were broadcast in the forward."""
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


# ---------------------------------------------------------------------------
# elementwise arithmetic


def add(a: Tensor, b: Tensor) -> Tensor:
    try:
        data = a.data + b.data
    except ValueError:
        raise ShapeError(f"add: shapes {a.shape} and {b.shape} do not broadcast") from None

    def backward_fn(g):
        return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)

    return _make(data, (a, b), backward_fn, "add")


def sub(a: Tensor, b: Tensor) -> Tensor:
    try:
        data = a.data - b.data
    except ValueError:
        raise ShapeError(f"sub: shapes {a.shape} and {b.shape} do not broadcast") from None

    def backward_fn(g):
        return _unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)

    return _make(data, (a, b), backward_fn, "sub")


def mul(a: Tensor, b: Tensor) -> Tensor:
    try:
        data = a.data * b.data
    except ValueError:
        raise ShapeError(f"mul: shapes {a.shape} and {b.shape} do not broadcast") from None
    a_data, b_data = a.data, b.data

    def backward_fn(g):
        return _unbroadcast(g * b_data, a.shape), _unbroadcast(g * a_data, b.shape)

    return _make(data, (a, b), backward_fn, "mul")


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Matrix/vector product: (m,n)@(n,k), (m,n)@(n,), or (n,)@(n,) dot."""
    a_data, b_data = a.data, b.data
    if a_data.ndim == 2 and b_data.ndim == 2:
        if a_data.shape[1] != b_data.shape[0]:
            raise ShapeError(f"matmul: shapes {a.shape} and {b.shape} not aligned")
        data = a_data @ b_data

        def backward_fn(g):
            return g @ b_data.T, a_data.T @ g

    elif a_data.ndim == 2 and b_data.ndim == 1:
        if a_data.shape[1] != b_data.shape[0]:
            raise ShapeError(f"matmul: shapes {a.shape} and {b.shape} not aligned")
        data = a_data @ b_data

        def backward_fn(g):
            return np.outer(g, b_data), a_data.T @ g

    elif a_data.ndim == 1 and b_data.ndim == 1:
        if a_data.shape[0] != b_data.shape[0]:
            raise ShapeError(f"matmul: shapes {a.shape} and {b.shape} not aligned")
        data = np.asarray(a_data @ b_data)

        def backward_fn(g):
            return g * b_data, g * a_data

    else:
        raise ShapeError(f"matmul: unsupported operand ranks {a.shape} and {b.shape}")
    return _make(data, (a, b), backward_fn, "matmul")


# ---------------------------------------------------------------------------
# layout: concatenate, slice, gather, stack


def concat(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    tensors = list(tensors)
    if not tensors:
        raise ShapeError("concat: need at least one tensor")
    try:
        data = np.concatenate([t.data for t in tensors], axis=axis)
    except ValueError:
        shapes = [t.shape for t in tensors]
        raise ShapeError(f"concat: incompatible shapes {shapes} along axis {axis}") from None
    sizes = [t.data.shape[axis] for t in tensors]
    splits = np.cumsum(sizes)[:-1]

    def backward_fn(g):
        return tuple(np.split(g, splits, axis=axis))

    return _make(data, tuple(tensors), backward_fn, "concat")


def reshape(t: Tensor, shape: tuple[int, ...]) -> Tensor:
    if int(np.prod(shape)) != t.data.size:
        raise ShapeError(f"reshape: cannot view shape {t.shape} as {shape}")
    data = t.data.reshape(shape).copy()

    def backward_fn(g):
        return (g.reshape(t.data.shape),)

    return _make(data, (t,), backward_fn, "reshape")


def narrow(t: Tensor, start: int, stop: int) -> Tensor:
    """Contiguous 1-D slice t[start:stop]."""
    if t.data.ndim != 1:
        raise ShapeError(f"narrow: expected a vector, got shape {t.shape}")
    if not (0 <= start <= stop <= t.data.shape[0]):
        raise ShapeError(f"narrow: range [{start}:{stop}] out of bounds for shape {t.shape}")
    data = t.data[start:stop].copy()

    def backward_fn(g):
        full = np.zeros_like(t.data)
        full[start:stop] = g
        return (full,)

    return _make(data, (t,), backward_fn, "narrow")


def row(m: Tensor, index: int) -> Tensor:
    """Row `index` of a matrix as a vector."""
    if m.data.ndim != 2:
        raise ShapeError(f"row: expected a matrix, got shape {m.shape}")
    data = m.data[index].copy()

    def backward_fn(g):
        full = np.zeros_like(m.data)
        full[index] = g
        return (full,)

    return _make(data, (m,), backward_fn, "row")


def take_rows(table: Tensor, indices: Sequence[int]) -> Tensor:
    """Gather rows of an embedding table; repeated indices accumulate grads."""
    if table.data.ndim != 2:
        raise ShapeError(f"take_rows: expected a matrix, got shape {table.shape}")
    idx = np.asarray(indices, dtype=np.intp)
    data = table.data[idx].copy()

    def backward_fn(g):
        full = np.zeros_like(table.data)
        np.add.at(full, idx, g)
        return (full,)

    return _make(data, (table,), backward_fn, "take_rows")


def stack_rows(vectors: Sequence[Tensor]) -> Tensor:
    """Stack equal-length vectors into a matrix, one per row."""
    vectors = list(vectors)
    if not vectors:
        raise ShapeError("stack_rows: need at least one vector")
    width = vectors[0].data.shape
    for v in vectors:
        if v.data.ndim != 1 or v.data.shape != width:
            raise ShapeError(f"stack_rows: expected vectors of shape {width}, got {v.shape}")
    data = np.stack([v.data for v in vectors])

    def backward_fn(g):
        return tuple(g[i] for i in range(len(vectors)))

    return _make(data, tuple(vectors), backward_fn, "stack_rows")


# ---------------------------------------------------------------------------
# nonlinearities and reductions


def sigmoid(t: Tensor) -> Tensor:
    x = t.data
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)

    def backward_fn(g):
        return (g * out * (1.0 - out),)

    return _make(out, (t,), backward_fn, "sigmoid")


def tanh(t: Tensor) -> Tensor:
    out = np.tanh(t.data)

    def backward_fn(g):
        return (g * (1.0 - out * out),)

    return _make(out, (t,), backward_fn, "tanh")


def absolute(t: Tensor) -> Tensor:
    """Elementwise |x|; the subgradient at 0 is 0."""
    data = np.abs(t.data)
    sign = np.sign(t.data)

    def backward_fn(g):
        return (g * sign,)

    return _make(data, (t,), backward_fn, "abs")


def maximum(a: Tensor, b: Tensor) -> Tensor:
    """Elementwise max of two same-shape tensors; ties route grad to `a`."""
    if a.shape != b.shape:
        raise ShapeError(f"maximum: shapes {a.shape} and {b.shape} differ")
    data = np.maximum(a.data, b.data)
    take_a = a.data >= b.data

    def backward_fn(g):
        return g * take_a, g * ~take_a

    return _make(data, (a, b), backward_fn, "maximum")


def max_over_rows(m: Tensor) -> Tensor:
    """Columnwise max of a matrix; ties route grad to the lowest row index."""
    if m.data.ndim != 2:
        raise ShapeError(f"max_over_rows: expected a matrix, got shape {m.shape}")
    winners = np.argmax(m.data, axis=0)
    data = m.data[winners, np.arange(m.data.shape[1])].copy()

    def backward_fn(g):
        full = np.zeros_like(m.data)
        full[winners, np.arange(m.data.shape[1])] = g
        return (full,)

    return _make(data, (m,), backward_fn, "max_over_rows")


def softmax(t: Tensor) -> Tensor:
    if t.data.ndim != 1:
        raise ShapeError(f"softmax: expected a vector, got shape {t.shape}")
    shifted = t.data - np.max(t.data)
    ex = np.exp(shifted)
    out = ex / ex.sum()

    def backward_fn(g):
        return (out * (g - np.dot(g, out)),)

    return _make(out, (t,), backward_fn, "softmax")


def cross_entropy(logits: Tensor, target: int) -> Tensor:
    """Softmax cross-entropy against a class index, as one stable op."""
    if logits.data.ndim != 1:
        raise ShapeError(f"cross_entropy: expected logits vector, got shape {logits.shape}")
    if not (0 <= target < logits.data.shape[0]):
        raise ValueError(f"cross_entropy: target {target} out of range for {logits.shape}")
    shifted = logits.data - np.max(logits.data)
    log_z = np.log(np.exp(shifted).sum())
    data = np.asarray(log_z - shifted[target])
    probs = np.exp(shifted - log_z)

    def backward_fn(g):
        grad = probs.copy()
        grad[target] -= 1.0
        return (grad * g,)

    return _make(data, (logits,), backward_fn, "cross_entropy")


def register_op(data: np.ndarray, parents: Sequence[Tensor], backward_fn, op: str) -> Tensor:
    """Entry point for fused ops defined outside this module (e.g. LSTM cell).

    `backward_fn(grad_out)` must return one gradient per parent, aligned
    with `parents`, each shaped like the parent's data (or None to skip).
    """
    return _make(np.asarray(data, dtype=np.float64), tuple(parents), backward_fn, op)


# ---------------------------------------------------------------------------
# backward pass


def _reachable(loss: Tensor) -> list[Tensor]:
    seen: set[int] = set()
    order: list[Tensor] = []
    stack = [loss]
    while stack:
        node = stack.pop()
        if id(node) in seen or not node.requires_grad:
            continue
        seen.add(id(node))
        order.append(node)
        stack.extend(node._parents)
    order.sort(key=lambda t: t._seq, reverse=True)
    return order


def backward(loss: Tensor) -> None:
    """Populate `.grad` on every trainable tensor the loss depends on.

    The loss must be a scalar (shape () or (1,)). Existing grads on the
    reachable subgraph are cleared first, so each call stands alone and
    repeated calls on identical tapes produce bitwise-identical gradients.
    """
    if loss.data.shape not in ((), (1,)):
        raise ShapeError(f"backward: loss must be scalar, got shape {loss.shape}")
    if not np.all(np.isfinite(loss.data)):
        raise ValueError("backward: loss is non-finite")
    if not loss.requires_grad:
        raise ValueError("backward: loss does not depend on any trainable tensor")
    order = _reachable(loss)
    for node in order:
        node.grad = None
    loss.grad = np.ones_like(loss.data)
    for node in order:
        if node._backward is None or node.grad is None:
            continue
        grads = node._backward(node.grad)
        for parent, g in zip(node._parents, grads):
            if g is None or not parent.requires_grad:
                continue
            if parent.grad is None:
                parent.grad = np.array(g, dtype=np.float64, copy=True)
            else:
                parent.grad += g


def gradients(loss: Tensor, params: Mapping[str, Tensor]) -> dict[str, np.ndarray]:
    """Run backward and return a name -> gradient map for `params`.

    Parameters the loss does not touch get zero gradients of the right
    shape. Every entry must be a trainable tensor.
    """
    for name, p in params.items():
        if not p.requires_grad:
            raise ValueError(f"gradients: parameter {name!r} is not trainable")
    backward(loss)
    out = {}
    for name, p in params.items():
        out[name] = p.grad.copy() if p.grad is not None else np.zeros_like(p.data)
    return out


def grad_check(f: Callable[..., Tensor], tensors: Sequence[Tensor], epsilon: float = 1e-5) -> float:
    """Max relative error between analytic and central-difference gradients.

    `f(*tensors)` must return a scalar Tensor and must read the tensors'
    current data on every call (all ops here do). The error is computed
    per parameter over whole gradient vectors,
    ||analytic - numeric|| / max(||analytic||, ||numeric||, 1e-8),
    and the max over parameters is returned. Comparing norms rather than
    single coordinates keeps the check meaningful where a coordinate's
    true gradient sits below the noise floor of central differences.
    """
    if epsilon <= 0:
        raise ValueError("grad_check: epsilon must be positive")
    loss = f(*tensors)
    if loss.data.shape not in ((), (1,)):
        raise ShapeError(f"grad_check: f must be scalar-valued, got shape {loss.shape}")
    backward(loss)
    analytic = [t.grad.copy() if t.grad is not None else np.zeros_like(t.data) for t in tensors]

    worst = 0.0
    with no_grad():
        for t, ana in zip(tensors, analytic):
            flat = t.data.reshape(-1)
            numeric = np.empty_like(flat)
            for i in range(flat.size):
                saved = flat[i]
                flat[i] = saved + epsilon
                f_plus = float(f(*tensors).data)
                flat[i] = saved - epsilon
                f_minus = float(f(*tensors).data)
                flat[i] = saved
                if not (np.isfinite(f_plus) and np.isfinite(f_minus)):
                    raise ValueError("grad_check: non-finite value during numeric differentiation")
                numeric[i] = (f_plus - f_minus) / (2.0 * epsilon)
            diff = float(np.linalg.norm(ana.reshape(-1) - numeric))
            scale = max(float(np.linalg.norm(ana)), float(np.linalg.norm(numeric)), 1e-8)
            worst = max(worst, diff / scale)
    return worst


def clip_gradients(
    grads: Mapping[str, np.ndarray], threshold: float, mode: str = "norm"
) -> dict[str, np.ndarray]:
    """Rescale a gradient map so its global L2 norm is at most `threshold`.

    mode="norm" (default) scales every gradient by threshold/norm when the
    global norm exceeds the threshold; a 1e-12 relative slack on the
    comparison makes the operation exactly idempotent under rounding.
    mode="element" clips each component to [-threshold, threshold] instead.
    """
    if threshold <= 0:
        raise ValueError("clip_gradients: threshold must be positive")
    if mode == "element":
        return {name: np.clip(g, -threshold, threshold) for name, g in grads.items()}
    if mode != "norm":
        raise ValueError(f"clip_gradients: unknown mode {mode!r}")
    total = 0.0
    for g in grads.values():
        total += float(np.sum(np.square(g)))
    norm = np.sqrt(total)
    if norm <= threshold * (1.0 + 1e-12):
        return dict(grads)
    scale = threshold / norm
    return {name: g * scale for name, g in grads.items()}
