"""The five ways to combine a word vector with a character vector.

    w    word vector only
    c    character vector only
    cat  concatenation (character part first)
    sg   scalar gate: one sigmoid mixing weight from the word vector
    vg   vector gate: one sigmoid mixing weight per dimension

Both gates interpolate v = g * v_char + (1 - g) * v_word. Driving the
gate bias to -inf/+inf recovers the word-only and char-only methods.
"""

import numpy as np

from chargate.autodiff import Tensor
from chargate.combine import METHODS, ScalarGateParams, VectorGateParams, combine, gate_value

rng = np.random.default_rng(2)
d = 4
v_word = Tensor(rng.uniform(-1, 1, size=d))
v_char = Tensor(rng.uniform(-1, 1, size=d))
print("v_word:", np.round(v_word.data, 3))
print("v_char:", np.round(v_char.data, 3))

sg = ScalarGateParams(Tensor(rng.uniform(-0.5, 0.5, size=d)), Tensor(0.0))
vg = VectorGateParams(Tensor(rng.uniform(-0.5, 0.5, size=(d, d))), Tensor(np.zeros(d)))
params = {"sg": sg, "vg": vg}

for method in METHODS:
    combined, gate = combine(method, v_word, v_char, params.get(method))
    gate_str = "" if gate is None else f"  gate={np.round(gate.data, 3)}"
    print(f"{method:3s} -> dim {combined.shape[0]}: {np.round(combined.data, 3)}{gate_str}")

# sweep the vector-gate bias: large negative bias -> word vector,
# large positive bias -> character vector
print("\nbias sweep (distance of the mixed vector from each source):")
print(f"{'bias':>6s} {'|v - v_word|':>14s} {'|v - v_char|':>14s}")
for bias in (-50.0, -4.0, 0.0, 4.0, 50.0):
    p = VectorGateParams(Tensor(np.zeros((d, d))), Tensor(np.full(d, bias)))
    mixed, _ = combine("vg", v_word, v_char, p)
    dw = np.max(np.abs(mixed.data - v_word.data))
    dc = np.max(np.abs(mixed.data - v_char.data))
    print(f"{bias:6.0f} {dw:14.2e} {dc:14.2e}")

# the standalone gate matches the one inside combine
gate_alone = gate_value("vg", v_word, vg)
_, gate_inside = combine("vg", v_word, v_char, vg)
print("\ngate_value == combine's gate:", np.array_equal(gate_alone.data, gate_inside.data))
