import numpy as np
import pytest

from chargate.chars import CharVocab
from chargate.data import NliExample, build_vocab
from chargate.model import ModelConfig, NliModel
from chargate.synthetic import make_overfit_embeddings, make_overfit_fixture
from chargate.training import (
    TrainConfig,
    TrainData,
    evaluate_accuracy,
    run_seeds,
    train_one,
    write_metric_log,
)

TINY_DIMS = dict(
    word_dim=16, char_dim=16, char_hidden=16, sentence_dim=32, classifier_hidden=32
)


@pytest.fixture(scope="module")
def fixture_data():
    examples = make_overfit_fixture()
    return TrainData(train=examples, dev=examples)


@pytest.fixture(scope="module")
def embeddings_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("emb") / "fixture_emb.txt"
    path.write_text("\n".join(make_overfit_embeddings(16)) + "\n")
    return str(path)


def _config(**overrides):
    base = dict(
        method="w",
        batch_size=64,
        max_epochs=4,
        min_freq=2,
        **TINY_DIMS,
    )
    base.update(overrides)
    return TrainConfig(**base)


class TestConfigValidation:
    def test_rejects_nonpositive_lr(self):
        with pytest.raises(ValueError):
            _config(initial_lr=0.0)

    def test_rejects_divisor_at_most_one(self):
        with pytest.raises(ValueError):
            _config(lr_divisor=1.0)

    def test_rejects_empty_seeds(self):
        with pytest.raises(ValueError):
            _config(seeds=())


class TestEvaluateAccuracy:
    def _model_and_data(self):
        examples = make_overfit_fixture()
        words = [w for ex in examples for w in ex.premise + ex.hypothesis]
        vocab = build_vocab(words, min_freq=2)
        config = ModelConfig(
            method="w", word_dim=8, char_dim=4, char_hidden=8, sentence_dim=8,
            classifier_hidden=8,
        )
        model = NliModel.init(config, vocab, CharVocab.from_corpus(words), seed=0)
        return model, examples

    def test_zero_classifier_predicts_class_zero(self):
        model, examples = self._model_and_data()
        model.sentence_params.out_w.data[...] = 0.0
        model.sentence_params.out_b.data[...] = 0.0
        accuracy = evaluate_accuracy(model, examples)
        share_of_class_zero = sum(1 for ex in examples if ex.label == 0) / len(examples)
        assert accuracy == share_of_class_zero

    def test_counting(self):
        model, examples = self._model_and_data()
        model.sentence_params.out_w.data[...] = 0.0
        model.sentence_params.out_b.data[...] = [0.0, 1.0, 0.0]  # always predict class 1
        four = [ex for ex in examples if ex.label == 1][:3] + [
            ex for ex in examples if ex.label != 1
        ][:1]
        assert evaluate_accuracy(model, four) == 0.75

    def test_empty_dataset_rejected(self):
        model, _ = self._model_and_data()
        with pytest.raises(ValueError, match="empty"):
            evaluate_accuracy(model, [])


class TestLrSchedule:
    def test_divides_on_validation_decrease(self, fixture_data, embeddings_file, monkeypatch):
        # force a known validation accuracy sequence
        from chargate import training

        values = iter([0.5, 0.4, 0.4, 0.6])
        monkeypatch.setattr(
            training, "evaluate_accuracy", lambda model, examples: next(values)
        )
        config = _config(max_epochs=4, embeddings_path=embeddings_file)
        state = train_one(config, seed=1, data=fixture_data)
        lrs = [entry.lr for entry in state.log]
        # epoch 1 at 0.1; decrease after epoch 2 -> 0.02 for epoch 3;
        # equal accuracy at epoch 3 keeps it
        assert lrs == [0.1, 0.1, 0.02, 0.02]

    def test_lr_underflow_stops(self, fixture_data, embeddings_file, monkeypatch):
        from chargate import training

        falling = iter([0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2])
        monkeypatch.setattr(
            training, "evaluate_accuracy", lambda model, examples: next(falling)
        )
        config = _config(max_epochs=8, embeddings_path=embeddings_file)
        state = train_one(config, seed=1, data=fixture_data)
        assert "underflow" in state.stop_reason
        assert len(state.log) < 8

    def test_constant_mode_never_decays(self, fixture_data, embeddings_file, monkeypatch):
        from chargate import training

        wobble = iter([0.5, 0.4, 0.5, 0.4])
        monkeypatch.setattr(
            training, "evaluate_accuracy", lambda model, examples: next(wobble)
        )
        config = _config(max_epochs=4, lr_schedule=False, embeddings_path=embeddings_file)
        state = train_one(config, seed=1, data=fixture_data)
        assert [entry.lr for entry in state.log] == [0.1] * 4


class TestDeterminism:
    def test_identical_runs_identical_logs(self, fixture_data, embeddings_file):
        config = _config(max_epochs=3, embeddings_path=embeddings_file)
        s1 = train_one(config, seed=5, data=fixture_data)
        s2 = train_one(config, seed=5, data=fixture_data)
        assert s1.log == s2.log

    def test_different_seeds_differ(self, fixture_data, embeddings_file):
        config = _config(max_epochs=2, embeddings_path=embeddings_file)
        s1 = train_one(config, seed=1, data=fixture_data)
        s2 = train_one(config, seed=2, data=fixture_data)
        assert s1.log != s2.log

    def test_metric_log_bytes_stable(self, fixture_data, embeddings_file, tmp_path):
        config = _config(max_epochs=2, embeddings_path=embeddings_file)
        p1, p2 = tmp_path / "log1.csv", tmp_path / "log2.csv"
        write_metric_log(train_one(config, seed=3, data=fixture_data), p1)
        write_metric_log(train_one(config, seed=3, data=fixture_data), p2)
        assert p1.read_bytes() == p2.read_bytes()


class TestRunSeeds:
    def test_distinct_seed_results(self, fixture_data, embeddings_file):
        config = _config(max_epochs=1, seeds=(1, 2, 3), embeddings_path=embeddings_file)
        outcomes = run_seeds(config, data=fixture_data)
        assert [o.seed for o in outcomes] == [1, 2, 3]
        assert all(not o.failed for o in outcomes)
        logs = [tuple((e.train_loss, e.val_acc) for e in o.state.log) for o in outcomes]
        assert len(set(logs)) == 3

    def test_failure_flagged_and_others_continue(self, fixture_data, embeddings_file, monkeypatch):
        from chargate import training

        real_train_one = training.train_one

        def flaky(config, seed, data=None):
            if seed == 2:
                raise RuntimeError("boom")
            return real_train_one(config, seed, data)

        monkeypatch.setattr(training, "train_one", flaky)
        config = _config(max_epochs=1, seeds=(1, 2, 3), embeddings_path=embeddings_file)
        outcomes = training.run_seeds(config, data=fixture_data)
        assert [o.failed for o in outcomes] == [False, True, False]
        assert "boom" in outcomes[1].error

    def test_same_config_twice_identical(self, fixture_data, embeddings_file):
        config = _config(max_epochs=1, seeds=(1, 2), embeddings_path=embeddings_file)
        first = run_seeds(config, data=fixture_data)
        second = run_seeds(config, data=fixture_data)
        for a, b in zip(first, second):
            assert a.state.log == b.state.log

    def test_parallel_matches_serial(self, fixture_data, embeddings_file):
        config = _config(max_epochs=1, seeds=(1, 2), embeddings_path=embeddings_file)
        serial = run_seeds(config, data=fixture_data, parallel=1)
        parallel = run_seeds(config, data=fixture_data, parallel=2)
        for a, b in zip(serial, parallel):
            assert a.state.log == b.state.log


class TestNonFiniteAbort:
    def test_diagnostic_names_epoch_and_batch(self, fixture_data, embeddings_file, monkeypatch):
        from chargate.model import NliModel

        calls = {"n": 0}
        original = NliModel.batch_loss

        def exploding(self, batch):
            calls["n"] += 1
            if calls["n"] == 2:
                raise ValueError("mul: produced non-finite values")
            return original(self, batch)

        monkeypatch.setattr(NliModel, "batch_loss", exploding)
        config = _config(batch_size=32, max_epochs=2, embeddings_path=embeddings_file)
        with pytest.raises(RuntimeError, match=r"epoch 1, batch 1"):
            train_one(config, seed=1, data=fixture_data)


class TestCheckpointDuringTraining:
    def test_best_checkpoint_reproduces_val_accuracy(
        self, fixture_data, embeddings_file, tmp_path
    ):
        from chargate.checkpoint import load_model

        config = _config(
            method="sg", max_epochs=3, out_dir=str(tmp_path), embeddings_path=embeddings_file
        )
        state = train_one(config, seed=2, data=fixture_data)
        assert state.best_checkpoint_path is not None
        reloaded = load_model(state.best_checkpoint_path)
        assert evaluate_accuracy(reloaded, fixture_data.dev) == state.best_val_acc


class TestOverfitSmoke:
    @pytest.mark.parametrize("method", ["w", "c", "cat", "sg", "vg"])
    def test_loss_strictly_decreasing_over_first_ten_epochs(
        self, method, fixture_data, embeddings_file
    ):
        # seed-averaged training loss falls monotonically early on
        config = _config(
            method=method,
            max_epochs=10,
            lr_schedule=False,
            embeddings_path=None if method == "c" else embeddings_file,
        )
        losses = np.zeros(10)
        for seed in (1, 2, 3):
            state = train_one(config, seed=seed, data=fixture_data)
            losses += np.array([entry.train_loss for entry in state.log])
        losses /= 3.0
        assert all(a > b for a, b in zip(losses, losses[1:]))
