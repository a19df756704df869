"""Building word vectors from characters.

A word's characters are embedded, read by a BiLSTM in both directions,
and the two final states are linearly combined into one vector. Any
string is encodable: unseen characters fall back to an UNK row.
"""

import numpy as np

from chargate.autodiff import Tensor
from chargate.chars import CharEncoderParams, CharVocab, encode_word
from chargate.lstm import bilstm, init_lstm_weights

rng = np.random.default_rng(1)

vocab = CharVocab.from_corpus(["surf", "surfing", "surfed", "wave"])
print(f"character vocabulary: {len(vocab)} entries (index 0 is UNK)")

params = CharEncoderParams.init(rng, len(vocab), char_dim=8, hidden_dim=12)

for word in ["surf", "surfing", "surfed", "zzz!"]:
    vec = encode_word(word, params, vocab)
    print(f"{word!r:12s} -> vector of shape {vec.shape}, norm {np.linalg.norm(vec.data):.3f}")

# related surface forms share most characters, so their untrained vectors
# already sit closer together than unrelated words
def cos(a, b):
    a, b = a.data, b.data
    return float(a @ b / (np.linalg.norm(a) * np.linalg.norm(b)))

v_surf = encode_word("surf", params, vocab)
v_surfing = encode_word("surfing", params, vocab)
v_wave = encode_word("wave", params, vocab)
print(f"cos(surf, surfing) = {cos(v_surf, v_surfing):.3f}")
print(f"cos(surf, wave)    = {cos(v_surf, v_wave):.3f}")

# the two directions really read the sequence in opposite orders: running
# the forward LSTM on reversed input reproduces the backward outputs
w = init_lstm_weights(rng, 8, 5)
x = rng.uniform(-1, 1, size=(6, 8))
_, h_bw = bilstm(Tensor(x), w, w)
h_fw_rev, _ = bilstm(Tensor(x[::-1].copy()), w, w)
print("reversal symmetry holds:", np.array_equal(h_fw_rev.data, h_bw.data[::-1]))
