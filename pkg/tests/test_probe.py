import numpy as np
import numpy.testing as npt
import pytest

from chargate.probe import (
    LinearProbe,
    direct_similarity_metric,
    evaluate_probe,
    load_probe_task,
    pair_features,
    run_probe_task,
    train_probe,
)


class TestTrainProbeClassification:
    def test_separable_data_reaches_100(self):
        rng = np.random.default_rng(0)
        n = 40
        X = np.concatenate([rng.normal(-2, 0.3, size=(n, 3)), rng.normal(2, 0.3, size=(n, 3))])
        y = ["neg"] * n + ["pos"] * n
        probe = train_probe(X, y, l2=0.0, kind="cls")
        assert evaluate_probe(probe, X, y, "cls") == 100.0

    def test_huge_l2_falls_back_to_majority_class(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(30, 4))
        y = ["a"] * 20 + ["b"] * 10
        probe = train_probe(X, y, l2=1e6, kind="cls")
        assert np.max(np.abs(probe.weights)) < 1e-3
        assert evaluate_probe(probe, X, y, "cls") == pytest.approx(100 * 20 / 30)

    def test_constant_predictor_on_balanced_binary(self):
        rng = np.random.default_rng(2)
        X = rng.normal(size=(20, 3))
        y = ["a"] * 10 + ["b"] * 10
        constant = LinearProbe("classification", np.zeros((2, 3)), np.zeros(2), ["a", "b"], 0, 0.0)
        assert evaluate_probe(constant, X, y, "cls") == 50.0

    def test_single_class_rejected(self):
        with pytest.raises(ValueError, match="2 classes"):
            train_probe(np.zeros((4, 2)), ["same"] * 4, kind="cls")

    def test_three_classes(self):
        rng = np.random.default_rng(3)
        centers = np.array([[4.0, 0.0], [0.0, 4.0], [-4.0, -4.0]])
        X = np.concatenate([rng.normal(c, 0.2, size=(15, 2)) for c in centers])
        y = [label for label in ("x", "y", "z") for _ in range(15)]
        probe = train_probe(X, y, kind="cls")
        assert evaluate_probe(probe, X, y, "cls") == 100.0

    def test_deterministic(self):
        rng = np.random.default_rng(4)
        X = rng.normal(size=(20, 3))
        y = ["a"] * 10 + ["b"] * 10
        p1 = train_probe(X, y, kind="cls")
        p2 = train_probe(X, y, kind="cls")
        assert np.array_equal(p1.weights, p2.weights)
        assert np.array_equal(p1.bias, p2.bias)


class TestTrainProbeRidge:
    def test_recovers_slope_two_without_penalty(self):
        x = np.linspace(-2, 2, 30).reshape(-1, 1)
        y = 2.0 * x[:, 0]
        probe = train_probe(x, y, l2=0.0, kind="rel")
        assert probe.weights[0] == pytest.approx(2.0, abs=1e-5)

    def test_slope_approaches_two_as_l2_shrinks(self):
        x = np.linspace(-2, 2, 30).reshape(-1, 1)
        y = 2.0 * x[:, 0]
        slopes = [
            train_probe(x, y, l2=l2, kind="rel").weights[0] for l2 in (1.0, 0.1, 0.01, 0.0)
        ]
        errors = [abs(s - 2.0) for s in slopes]
        assert errors == sorted(errors, reverse=True)
        assert errors[-1] < 1e-5

    def test_relatedness_metric_is_pearson_x100(self):
        # cross-module oracle: evaluate_probe must agree with the word-level
        # correlation op exactly
        from chargate.wordsim import pearson

        rng = np.random.default_rng(5)
        X = rng.normal(size=(25, 3))
        y = rng.normal(size=25)
        probe = train_probe(X, y, l2=0.5, kind="rel")
        predictions = X @ probe.weights + probe.bias
        assert evaluate_probe(probe, X, y, "rel") == 100.0 * pearson(predictions, y)


class TestEvaluateProbeValidation:
    def test_dimension_mismatch(self):
        probe = LinearProbe("classification", np.zeros((2, 3)), np.zeros(2), ["a", "b"], 0, 0.0)
        with pytest.raises(ValueError, match="dimension"):
            evaluate_probe(probe, np.zeros((4, 5)), ["a"] * 4, "cls")

    def test_kind_mismatch(self):
        probe = LinearProbe("relatedness", np.zeros(3), np.zeros(()), None, 0, 0.0)
        with pytest.raises(ValueError, match="probe is"):
            evaluate_probe(probe, np.zeros((4, 3)), ["a"] * 4, "cls")

    def test_perfect_predictions_are_100(self):
        probe = LinearProbe("classification", np.eye(2), np.zeros(2), ["a", "b"], 0, 0.0)
        X = np.array([[3.0, 0.0], [0.0, 3.0]])
        assert evaluate_probe(probe, X, ["a", "b"], "cls") == 100.0


class TestDirectSimilarity:
    def test_matches_manual_cosines(self):
        from chargate.wordsim import cosine_similarity, pearson

        rng = np.random.default_rng(6)
        u = rng.normal(size=(10, 4))
        v = rng.normal(size=(10, 4))
        gold = rng.uniform(0, 5, size=10)
        sims = [cosine_similarity(a, b) for a, b in zip(u, v)]
        assert direct_similarity_metric(u, v, gold) == 100.0 * pearson(sims, gold)


class TestTaskLoading:
    def test_single_sentence_classification(self, tmp_path):
        path = tmp_path / "task.tsv"
        path.write_text("pos\tA fine day.\nneg\tA bad day.\n")
        task = load_probe_task(path, "cls")
        assert task.labels == ["pos", "neg"]
        assert task.sentences1[0] == ["A", "fine", "day", "."]
        assert task.sentences2 is None

    def test_pair_regression(self, tmp_path):
        path = tmp_path / "task.tsv"
        path.write_text("3.5\tA cat sat.\tA cat sat down.\n")
        task = load_probe_task(path, "rel")
        assert task.labels == [3.5]
        assert task.sentences2 is not None

    def test_numeric_label_required_for_regression(self, tmp_path):
        path = tmp_path / "task.tsv"
        path.write_text("high\tA cat.\tA dog.\n")
        with pytest.raises(ValueError, match="numeric"):
            load_probe_task(path, "rel")

    def test_mixed_arity_rejected(self, tmp_path):
        path = tmp_path / "task.tsv"
        path.write_text("a\tone sentence\nb\ttwo\tsentences\n")
        with pytest.raises(ValueError, match="mixed"):
            load_probe_task(path, "cls")

    def test_similarity_requires_pairs(self, tmp_path):
        path = tmp_path / "task.tsv"
        path.write_text("1.0\tonly one sentence\n")
        with pytest.raises(ValueError, match="pairs"):
            load_probe_task(path, "sts")


class TestRunProbeTask:
    def _model(self):
        from chargate.chars import CharVocab
        from chargate.data import build_vocab
        from chargate.model import ModelConfig, NliModel

        words = ["good", "bad", "day", "cat", "dog"]
        config = ModelConfig(
            method="c", word_dim=8, char_dim=4, char_hidden=8, sentence_dim=10,
            classifier_hidden=6,
        )
        return NliModel.init(
            config, build_vocab(words * 2, min_freq=2), CharVocab.from_corpus(words), seed=2
        )

    def test_classification_task_runs(self, tmp_path):
        path = tmp_path / "task.tsv"
        rows = [f"pos\tgood day {i}." for i in range(6)] + [
            f"neg\tbad day {i}." for i in range(6)
        ]
        path.write_text("\n".join(rows) + "\n")
        task = load_probe_task(path, "cls")
        metric, probe = run_probe_task(self._model(), task, l2=0.0)
        assert 0.0 <= metric <= 100.0
        assert probe is not None

    def test_similarity_task_runs_without_probe(self, tmp_path):
        path = tmp_path / "task.tsv"
        path.write_text("5.0\tgood cat\tgood dog\n1.0\tbad day\tgood day\n2.0\tcat dog\tdog cat\n")
        task = load_probe_task(path, "sts")
        metric, probe = run_probe_task(self._model(), task)
        assert probe is None
        assert -100.0 <= metric <= 100.0

    def test_pair_features_layout(self):
        u = np.array([[1.0, 2.0]])
        v = np.array([[3.0, 5.0]])
        npt.assert_array_equal(pair_features(u, v), [[1.0, 2.0, 3.0, 5.0, 2.0, 3.0, 3.0, 10.0]])
