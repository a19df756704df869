"""Tensors, reverse-mode gradients, and gradient checking.

Everything in this package runs on a small define-by-run autodiff engine
over float64 numpy arrays. This script walks through the moving parts:
building expressions, reading gradients, verifying them against central
differences, and norm-clipping a gradient map.
"""

import numpy as np

from chargate.autodiff import (
    Tensor,
    backward,
    clip_gradients,
    grad_check,
    gradients,
    matmul,
    sigmoid,
    tanh,
)

rng = np.random.default_rng(0)

# --- build an expression and differentiate it -----------------------------
w = Tensor(rng.uniform(-1, 1, size=(3, 4)), requires_grad=True)
x = Tensor(rng.uniform(-1, 1, size=4), requires_grad=True)
b = Tensor(np.zeros(3), requires_grad=True)

y = tanh(matmul(w, x) + b)
loss = matmul(y, y)  # squared norm, a scalar
backward(loss)
print("loss:", loss.item())
print("dloss/db:", b.grad)

# the same thing through the name -> gradient map used by the trainer
grads = gradients(loss, {"w": w, "x": x, "b": b})
print("gradient map keys:", sorted(grads))

# --- check analytic gradients against central differences ------------------
def f(w_, x_, b_):
    y_ = tanh(matmul(w_, x_) + b_)
    return matmul(y_, y_)

error = grad_check(f, [w, x, b], epsilon=1e-5)
print(f"max relative gradient error vs central differences: {error:.2e}")

# --- sigmoid is the gate nonlinearity --------------------------------------
print("sigmoid(0) =", sigmoid(Tensor(0.0)).item(), "(gates start near 1/2)")

# --- global-norm clipping ---------------------------------------------------
big = {"a": np.array([12.0]), "b": np.array([16.0])}  # global norm 20
clipped = clip_gradients(big, threshold=5.0)
print("clipped to norm 5:", clipped["a"], clipped["b"])
