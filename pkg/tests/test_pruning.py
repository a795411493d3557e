import itertools

import numpy as np
import pytest

from imbkit.learners import ClassifierPool, member_predictions
from imbkit.metrics import classification_metrics
from imbkit.pruning import Genome, digitize, evaluate_mask, jaya_update, prune


class FixedPredictor:
    """Always predicts one label; a deliberately useless pool member."""

    def __init__(self, label):
        self.label = int(label)

    def predict(self, x):
        return np.full(np.atleast_2d(x).shape[0], self.label, dtype=np.int64)


class OraclePredictor:
    """Replays the ground-truth labels for the fitness set: the planted optimum."""

    def __init__(self, features, labels):
        self._keys = [tuple(row) for row in np.atleast_2d(features)]
        self._map = dict(zip(self._keys, labels))

    def predict(self, x):
        return np.array([self._map[tuple(row)] for row in np.atleast_2d(x)], dtype=np.int64)


def build_pool(members, n_classes, n_features=1):
    return ClassifierPool(classifiers=tuple(members), kinds=tuple("stub" for _ in members),
                          n_classes=n_classes, n_features=n_features)


def exhaustive_optimum(pool, x, y):
    """Brute force over all non-empty masks: the pruning oracle."""
    best = -1.0
    for bits in itertools.product([0, 1], repeat=pool.size):
        if not any(bits):
            continue
        best = max(best, evaluate_mask(pool, np.array(bits), x, y))
    return best


class TestDigitize:
    def test_strict_threshold(self):
        assert digitize(np.array([0.7, 0.5, 0.2])).tolist() == [1, 0, 0]

    def test_all_ones_identity(self):
        assert digitize(np.ones(4)).tolist() == [1, 1, 1, 1]

    def test_empty_mask_repaired_to_largest(self):
        assert digitize(np.array([0.4, 0.45, 0.1])).tolist() == [0, 1, 0]


class TestJayaUpdate:
    class HalfRng:
        def random(self, n):
            return np.full(n, 0.5)

    def test_fixed_point_when_best_equals_worst_equals_value(self):
        v = np.array([0.3, 0.8])
        out = jaya_update(v, v, v, self.HalfRng())
        assert np.allclose(out, v)

    def test_direct_arithmetic(self):
        # 0.4 + 0.5*|1.0-0.4| - 0.5*|0.0-0.4| = 0.4 + 0.3 - 0.2 = 0.5
        out = jaya_update(np.array([0.4]), np.array([1.0]), np.array([0.0]), self.HalfRng())
        assert out[0] == pytest.approx(0.5)

    def test_clipping(self):
        class BigRng:
            def random(self, n):
                return np.ones(n) * 0.999999

        out = jaya_update(np.array([0.9]), np.array([0.0]), np.array([0.9]), BigRng())
        assert 0.0 <= out[0] <= 1.0

    def test_stays_in_unit_box(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            v, b, w = rng.random(6), rng.random(6), rng.random(6)
            out = jaya_update(v, b, w, rng)
            assert np.all((out >= 0.0) & (out <= 1.0))


class TestPrune:
    def fitness_data(self, m=24):
        rng = np.random.default_rng(8)
        x = rng.normal(size=(m, 1))
        y = (np.arange(m) % 2).astype(np.int64)
        return x, y

    def test_pool_of_one_forced_mask(self):
        x, y = self.fitness_data()
        pool = build_pool([OraclePredictor(x, y)], n_classes=2)
        result = prune(pool, x, y, n_pop=2, t_max=1, rng=np.random.default_rng(0))
        assert result.mask.tolist() == [1]
        assert result.fitness == pytest.approx(1.0)

    def test_planted_oracle_found(self):
        x, y = self.fitness_data()
        pool = build_pool([FixedPredictor(0), FixedPredictor(1), OraclePredictor(x, y),
                           FixedPredictor(0)], n_classes=2)
        result = prune(pool, x, y, n_pop=20, t_max=50, rng=np.random.default_rng(1))
        assert result.fitness == pytest.approx(1.0)

    def test_determinism(self):
        x, y = self.fitness_data()
        pool = build_pool([FixedPredictor(0), OraclePredictor(x, y), FixedPredictor(1)], 2)
        a = prune(pool, x, y, n_pop=10, t_max=20, rng=np.random.default_rng(3))
        b = prune(pool, x, y, n_pop=10, t_max=20, rng=np.random.default_rng(3))
        assert a.mask.tolist() == b.mask.tolist()
        assert a.fitness == b.fitness
        assert a.history == b.history

    def test_history_monotone_nondecreasing(self):
        x, y = self.fitness_data()
        pool = build_pool([FixedPredictor(0), FixedPredictor(1), OraclePredictor(x, y),
                           FixedPredictor(1), FixedPredictor(0)], 2)
        for seed in range(5):
            result = prune(pool, x, y, n_pop=8, t_max=30, rng=np.random.default_rng(seed))
            hist = np.array(result.history)
            assert np.all(np.diff(hist) >= 0.0)

    def test_final_fitness_at_least_initial_best(self):
        x, y = self.fitness_data()
        pool = build_pool([FixedPredictor(0), FixedPredictor(1), OraclePredictor(x, y)], 2)
        rng = np.random.default_rng(11)
        # replicate the initial population evaluation with an identical stream
        probe = np.random.default_rng(11)
        init_best = max(
            evaluate_mask(pool, digitize(probe.random(pool.size)), x, y) for _ in range(6))
        result = prune(pool, x, y, n_pop=6, t_max=10, rng=rng)
        assert result.fitness >= init_best - 1e-12

    def test_matches_exhaustive_enumeration_most_seeds(self):
        x, y = self.fitness_data()
        pool = build_pool([FixedPredictor(0), FixedPredictor(1), OraclePredictor(x, y),
                           FixedPredictor(0), FixedPredictor(1), FixedPredictor(0)], 2)
        target = exhaustive_optimum(pool, x, y)
        hits = sum(
            prune(pool, x, y, n_pop=20, t_max=50,
                  rng=np.random.default_rng(seed)).fitness >= target - 0.02
            for seed in range(20))
        assert hits >= 16

    def test_fitness_equals_independent_reevaluation(self):
        x, y = self.fitness_data()
        pool = build_pool([FixedPredictor(0), OraclePredictor(x, y)], 2)
        result = prune(pool, x, y, n_pop=6, t_max=10, rng=np.random.default_rng(2))
        assert result.fitness == pytest.approx(evaluate_mask(pool, result.mask, x, y), abs=1e-12)
        assert result.selected_count == int(result.mask.sum()) >= 1

    def test_bad_args(self):
        x, y = self.fitness_data()
        pool = build_pool([FixedPredictor(0)], 2)
        with pytest.raises(ValueError):
            prune(pool, x, y, n_pop=1, t_max=5)
        with pytest.raises(ValueError):
            prune(pool, x, y, n_pop=4, t_max=0)
        with pytest.raises(ValueError):
            prune(pool, np.empty((0, 1)), np.empty(0, dtype=int), n_pop=4, t_max=2)
