import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chargate.autodiff import Tensor
from chargate.data import WordSimPair
from chargate.wordsim import (
    ZeroVarianceError,
    cosine_similarity,
    evaluate_wordsim,
    pearson,
    spearman,
)


class TestCosine:
    def test_identical(self):
        assert cosine_similarity([1.0, 0.0], [1.0, 0.0]) == 1.0

    def test_orthogonal(self):
        assert cosine_similarity([1.0, 0.0], [0.0, 1.0]) == 0.0

    def test_hand_value(self):
        assert cosine_similarity([1.0, 1.0], [1.0, 0.0]) == pytest.approx(1 / np.sqrt(2), abs=1e-15)

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError, match="zero vector"):
            cosine_similarity([0.0, 0.0], [1.0, 0.0])

    def test_accepts_tensors(self):
        assert cosine_similarity(Tensor([2.0, 0.0]), Tensor([1.0, 0.0])) == 1.0


class TestPearson:
    def test_perfect_linear(self):
        assert pearson([1.0, 2.0, 3.0], [2.0, 4.0, 6.0]) == 1.0

    def test_perfect_inverse(self):
        assert pearson([1.0, 2.0, 3.0], [-1.0, -2.0, -3.0]) == -1.0

    def test_hand_value(self):
        # dx=[-1,0,1], dy=[-1,1,0]: cov 1, denominators sqrt(2)*sqrt(2)
        assert pearson([1.0, 2.0, 3.0], [1.0, 3.0, 2.0]) == pytest.approx(0.5, abs=1e-12)

    def test_zero_variance_rejected(self):
        with pytest.raises(ZeroVarianceError):
            pearson([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            pearson([1.0, 2.0], [1.0])

    def test_identical_arrays_exactly_one(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            x = rng.uniform(-3, 3, size=rng.integers(2, 40))
            assert pearson(x, x.copy()) == 1.0

    @given(
        st.lists(
            st.integers(min_value=-100, max_value=100), min_size=3, max_size=20, unique=True
        ),
        st.floats(min_value=0.5, max_value=50),
        st.floats(min_value=-100, max_value=100),
    )
    @settings(max_examples=150, deadline=None)
    def test_invariant_under_positive_affine(self, xs, scale, shift):
        xs = [float(v) for v in xs]
        ys = [2.0 * v + 1.0 for v in xs]
        base = pearson(xs, ys)
        transformed = pearson([scale * v + shift for v in xs], ys)
        assert transformed == pytest.approx(base, abs=1e-9)


class TestSpearman:
    def test_identical_ordering(self):
        assert spearman([1.0, 5.0, 9.0], [10.0, 50.0, 90.0]) == 1.0

    def test_reversed_ordering(self):
        assert spearman([1.0, 2.0, 3.0], [9.0, 5.0, 1.0]) == -1.0

    def test_hand_value(self):
        assert spearman([1.0, 2.0, 3.0, 4.0], [1.0, 2.0, 4.0, 3.0]) == pytest.approx(0.8, abs=1e-12)

    def test_tied_values_average_ranks(self):
        # matches rank-then-pearson with mean ranks for ties
        got = spearman([1.0, 1.0, 2.0], [1.0, 2.0, 3.0])
        ranks_x = np.array([1.5, 1.5, 3.0])
        ranks_y = np.array([1.0, 2.0, 3.0])
        assert got == pytest.approx(pearson(ranks_x, ranks_y), abs=1e-15)

    @given(
        st.lists(st.integers(min_value=-100, max_value=100), min_size=3, max_size=15, unique=True)
    )
    @settings(max_examples=150, deadline=None)
    def test_invariant_under_strictly_monotone_transform(self, xs):
        xs = [float(v) for v in xs]
        ys = list(np.random.default_rng(0).permutation(len(xs)).astype(float))
        base = spearman(xs, ys)
        transformed = spearman([np.exp(v / 50.0) for v in xs], ys)
        assert transformed == pytest.approx(base, abs=1e-12)

    def test_agrees_with_scipy(self):
        scipy_stats = pytest.importorskip("scipy.stats")
        rng = np.random.default_rng(9)
        for _ in range(25):
            x = rng.normal(size=12)
            y = rng.normal(size=12)
            expected = scipy_stats.spearmanr(x, y).statistic
            assert spearman(x, y) == pytest.approx(expected, abs=1e-12)
            assert pearson(x, y) == pytest.approx(scipy_stats.pearsonr(x, y).statistic, abs=1e-12)


class _StubModel:
    """Serves fixed vectors; mimics the model's word_vector interface."""

    def __init__(self, table):
        self.table = table

    def word_vector(self, word, cache=None):
        return Tensor(self.table[word])


class TestEvaluateWordsim:
    def test_cosines_equal_gold_gives_exactly_100(self):
        # gold scores are constructed as the library's own cosines, so the
        # correlation must be exactly 1 and the scaled value exactly 100.0
        rng = np.random.default_rng(3)
        table = {}
        pairs = []
        for i in range(10):
            u = rng.uniform(-1, 1, size=4)
            v = rng.uniform(-1, 1, size=4)
            table[f"u{i}"], table[f"v{i}"] = u, v
            pairs.append(WordSimPair(f"u{i}", f"v{i}", cosine_similarity(u, v)))
        report = evaluate_wordsim(_StubModel(table), pairs, dataset="identity")
        assert report.pearson == 1.0
        assert report.pearson_x100 == 100.0
        assert report.spearman_x100 == 100.0
        assert not report.skipped

    def test_scaling_is_exactly_100x(self):
        rng = np.random.default_rng(4)
        table = {}
        pairs = []
        for i in range(8):
            u = rng.uniform(-1, 1, size=3)
            v = rng.uniform(-1, 1, size=3)
            table[f"a{i}"], table[f"b{i}"] = u, v
            pairs.append(WordSimPair(f"a{i}", f"b{i}", float(rng.uniform(0, 10))))
        report = evaluate_wordsim(_StubModel(table), pairs)
        assert report.pearson_x100 == 100.0 * report.pearson
        assert report.spearman_x100 == 100.0 * report.spearman

    def test_constant_cosine_reported_as_skipped(self):
        table = {"a": np.array([1.0, 0.0]), "b": np.array([2.0, 0.0]), "c": np.array([3.0, 0.0])}
        pairs = [WordSimPair("a", "b", 1.0), WordSimPair("b", "c", 2.0), WordSimPair("a", "c", 3.0)]
        report = evaluate_wordsim(_StubModel(table), pairs)
        assert report.skipped
        assert report.pearson is None and report.pearson_x100 is None
        assert "variance" in report.note

    def test_empty_pairs_rejected(self):
        with pytest.raises(ValueError, match="no pairs"):
            evaluate_wordsim(_StubModel({}), [])

    def test_untrained_char_model_near_noise(self):
        # a random character-only model should carry almost no signal about
        # arbitrary gold scores; the band is derived with a permutation test
        from chargate.chars import CharVocab
        from chargate.model import ModelConfig, NliModel
        from chargate.data import build_vocab

        rng = np.random.default_rng(12)
        words = ["".join(rng.choice(list("abcdefgh"), size=5)) for _ in range(400)]
        pairs = [
            WordSimPair(words[2 * i], words[2 * i + 1], float(rng.uniform(0, 10)))
            for i in range(200)
        ]
        config = ModelConfig(
            method="c", word_dim=8, char_dim=4, char_hidden=8, sentence_dim=8, classifier_hidden=4
        )
        vocab = build_vocab(words, min_freq=1)
        model = NliModel.init(config, vocab, CharVocab.from_corpus(words), seed=5)
        report = evaluate_wordsim(model, pairs)

        golds = np.array([p.gold_score for p in pairs])
        perm_rng = np.random.default_rng(0)
        null_band = []
        sims = np.array(
            [
                cosine_similarity(
                    model.word_vector(p.word1, None).data, model.word_vector(p.word2, None).data
                )
                for p in pairs
            ]
        )
        for _ in range(500):
            null_band.append(abs(pearson(sims, perm_rng.permutation(golds))))
        cutoff = 100.0 * float(np.quantile(null_band, 0.999))
        assert abs(report.pearson_x100) <= max(cutoff, 30.0)
        assert abs(report.pearson_x100) < 30.0

    def test_oov_words_still_scored_with_coverage_reported(self):
        from chargate.chars import CharVocab
        from chargate.model import ModelConfig, NliModel
        from chargate.data import build_vocab

        config = ModelConfig(
            method="vg", word_dim=6, char_dim=4, char_hidden=6, sentence_dim=8, classifier_hidden=4
        )
        vocab = build_vocab(["known", "known", "words", "words"], min_freq=2)
        model = NliModel.init(config, vocab, CharVocab.from_corpus(["known", "words"]), seed=1)
        pairs = [
            WordSimPair("known", "words", 5.0),
            WordSimPair("unseen", "tokens", 3.0),
            WordSimPair("known", "unseen", 1.0),
        ]
        report = evaluate_wordsim(model, pairs)
        assert report.n_pairs == 3
        assert report.coverage == pytest.approx(3 / 6)
