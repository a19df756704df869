import numpy as np
import numpy.testing as npt
import pytest

from chargate.autodiff import ShapeError, Tensor, grad_check, matmul, max_over_rows
from chargate.lstm import bilstm, init_lstm_weights
from chargate.sentence import SentenceEncoderParams, encode_sentence, nli_forward


def _params(rng, d_in=4, d_s=6, hidden=5):
    return SentenceEncoderParams.init(rng, d_in, d_s, hidden)


class TestEncodeSentence:
    def test_length_one_is_identity_pooling(self):
        rng = np.random.default_rng(0)
        params = _params(rng)
        x = Tensor(rng.uniform(-1, 1, size=(1, 4)))
        s = encode_sentence(x, params)
        h_fw, h_bw = bilstm(x, params.lstm_fw, params.lstm_bw)
        expected = np.concatenate([h_fw.data[0], h_bw.data[0]])
        npt.assert_array_equal(s.data, expected)

    def test_columnwise_max(self):
        out = max_over_rows(Tensor(np.array([[1.0, 5.0], [3.0, 2.0]])))
        npt.assert_array_equal(out.data, [3.0, 5.0])

    def test_pool_dominates_every_row(self):
        rng = np.random.default_rng(1)
        params = _params(rng)
        x = Tensor(rng.uniform(-1, 1, size=(3, 4)))
        s = encode_sentence(x, params)
        h_fw, h_bw = bilstm(x, params.lstm_fw, params.lstm_bw)
        states = np.concatenate([h_fw.data, h_bw.data], axis=1)
        assert np.all(s.data[None, :] >= states)
        # equality attained in every coordinate by some row
        assert np.all(np.any(states == s.data[None, :], axis=0))

    def test_pooling_permutation_invariant_on_fixed_rows(self):
        # the pooling op alone ignores row order (the BiLSTM before it does not)
        rng = np.random.default_rng(2)
        rows = rng.uniform(-1, 1, size=(5, 3))
        pooled = max_over_rows(Tensor(rows)).data
        for _ in range(5):
            perm = rng.permutation(5)
            npt.assert_array_equal(max_over_rows(Tensor(rows[perm])).data, pooled)

    def test_sentence_dimension(self):
        rng = np.random.default_rng(3)
        params = _params(rng, d_in=3, d_s=8)
        s = encode_sentence(Tensor(rng.uniform(-1, 1, size=(4, 3))), params)
        assert s.shape == (8,)

    def test_empty_sentence_rejected(self):
        rng = np.random.default_rng(4)
        with pytest.raises(ShapeError, match="non-empty"):
            encode_sentence(Tensor(np.zeros((0, 4))), _params(rng))

    def test_deterministic(self):
        rng = np.random.default_rng(5)
        params = _params(rng)
        x = rng.uniform(-1, 1, size=(4, 4))
        s1 = encode_sentence(Tensor(x), params)
        s2 = encode_sentence(Tensor(x.copy()), params)
        assert np.array_equal(s1.data, s2.data)


class TestNliForward:
    def test_identical_inputs_zero_difference_block(self):
        rng = np.random.default_rng(6)
        params = _params(rng, d_s=6)
        u = Tensor(rng.uniform(-1, 1, size=6))
        # with zeroed hidden weights except the |u-v| block, logits are bias-only
        params.hidden_w.data[...] = 0.0
        params.hidden_w.data[:, 12:18] = 1.0
        params.hidden_b.data[...] = 0.0
        params.out_b.data[...] = 0.0
        logits_same = nli_forward(u, u, params)
        expected = params.out_w.data @ np.tanh(np.zeros(5))
        npt.assert_array_equal(logits_same.data, expected)

    def test_zero_classifier_gives_zero_logits(self):
        rng = np.random.default_rng(7)
        params = _params(rng, d_s=6)
        params.hidden_w.data[...] = 0.0
        params.hidden_b.data[...] = 0.0
        params.out_w.data[...] = 0.0
        params.out_b.data[...] = 0.0
        u = Tensor(rng.uniform(-1, 1, size=6))
        v = Tensor(rng.uniform(-1, 1, size=6))
        npt.assert_array_equal(nli_forward(u, v, params).data, [0.0, 0.0, 0.0])

    def test_dimension_mismatch(self):
        rng = np.random.default_rng(8)
        params = _params(rng, d_s=6)
        with pytest.raises(ShapeError, match="nli_forward"):
            nli_forward(Tensor(np.zeros(4)), Tensor(np.zeros(6)), params)

    def test_head_gradients(self):
        rng = np.random.default_rng(9)
        proj = Tensor(rng.uniform(-1, 1, size=3))
        filler = _params(np.random.default_rng(0), d_in=1, d_s=6, hidden=5)

        def f(u, v, hw, hb, ow, ob):
            params = SentenceEncoderParams(filler.lstm_fw, filler.lstm_bw, hw, hb, ow, ob)
            return matmul(proj, nli_forward(u, v, params))

        worst = 0.0
        for _ in range(20):
            tensors = [
                Tensor(rng.uniform(-2, 2, size=6), requires_grad=True),
                Tensor(rng.uniform(-2, 2, size=6), requires_grad=True),
                Tensor(rng.uniform(-0.3, 0.3, size=(5, 24)), requires_grad=True),
                Tensor(rng.uniform(-0.3, 0.3, size=5), requires_grad=True),
                Tensor(rng.uniform(-0.3, 0.3, size=(3, 5)), requires_grad=True),
                Tensor(rng.uniform(-0.3, 0.3, size=3), requires_grad=True),
            ]
            worst = max(worst, grad_check(f, tensors))
        assert worst < 1e-4
