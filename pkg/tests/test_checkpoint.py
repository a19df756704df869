import numpy as np
import pytest

from chargate.chars import CharVocab
from chargate.checkpoint import load_model, save_model, vocab_hash
from chargate.data import build_vocab
from chargate.model import ModelConfig, NliModel


def _model(method="vg", seed=3):
    words = ["red", "green", "blue", "red", "green", "blue"]
    vocab = build_vocab(words, min_freq=2)
    chars = CharVocab.from_corpus(["red", "green", "blue"])
    config = ModelConfig(
        method=method, word_dim=6, char_dim=4, char_hidden=6, sentence_dim=8,
        classifier_hidden=5,
    )
    return NliModel.init(config, vocab, chars, seed=seed)


class TestRoundTrip:
    @pytest.mark.parametrize("method", ["w", "c", "cat", "sg", "vg"])
    def test_parameters_bitwise_identical(self, method, tmp_path):
        model = _model(method)
        path = tmp_path / "model.ckpt"
        save_model(model, path)
        reloaded = load_model(path)
        original = model.parameters()
        restored = reloaded.parameters()
        assert set(original) == set(restored)
        for name in original:
            assert np.array_equal(original[name].data, restored[name].data), name

    def test_vocabs_and_config_survive(self, tmp_path):
        model = _model("vg")
        path = tmp_path / "model.ckpt"
        save_model(model, path)
        reloaded = load_model(path)
        assert reloaded.config == model.config
        assert reloaded.word_vocab.index_to_word == model.word_vocab.index_to_word
        assert reloaded.word_vocab.counts == model.word_vocab.counts
        assert reloaded.char_vocab.index_to_char == model.char_vocab.index_to_char

    def test_word_vectors_identical_after_reload(self, tmp_path):
        model = _model("vg")
        path = tmp_path / "model.ckpt"
        save_model(model, path)
        reloaded = load_model(path)
        for word in ["red", "unseen"]:
            a = model.word_vector(word, None).data
            b = reloaded.word_vector(word, None).data
            assert np.array_equal(a, b)


class TestValidation:
    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "junk.ckpt"
        path.write_bytes(b"not a checkpoint\n{}\n")
        with pytest.raises(ValueError, match="magic"):
            load_model(path)

    def test_truncated_payload_rejected(self, tmp_path):
        model = _model("w")
        path = tmp_path / "model.ckpt"
        save_model(model, path)
        data = path.read_bytes()
        path.write_bytes(data[:-16])
        with pytest.raises(ValueError, match="truncated"):
            load_model(path)

    def test_tampered_vocab_rejected(self, tmp_path):
        model = _model("w")
        path = tmp_path / "model.ckpt"
        save_model(model, path)
        raw = path.read_bytes().split(b"\n", 2)
        header = raw[1].replace(b'"red"', b'"rad"')
        path.write_bytes(raw[0] + b"\n" + header + b"\n" + raw[2])
        with pytest.raises(ValueError, match="hash mismatch"):
            load_model(path)

    def test_vocab_hash_sensitive_to_chars(self):
        words = build_vocab(["a", "a"], min_freq=2)
        assert vocab_hash(words, CharVocab(["a"])) != vocab_hash(words, CharVocab(["b"]))
