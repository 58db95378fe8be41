from __future__ import annotations

import math

import numpy as np
import pytest

from tarsim.errors import DegenerateTraining, DimensionMismatch
from tarsim.featurize import SparseVector
from tarsim.model import (
    Hyperparams,
    Model,
    loss_and_gradient,
    score,
    train,
    write_model_csv,
)


def vec(entries: dict[int, float]) -> SparseVector:
    positions = tuple(sorted(entries))
    return SparseVector(positions=positions, weights=tuple(entries[p] for p in positions))


def random_sparse(rng: np.random.Generator, dim: int, max_nnz: int = 6) -> SparseVector:
    nnz = int(rng.integers(0, max_nnz + 1))
    if nnz == 0:
        return SparseVector(positions=(), weights=())
    positions = sorted(rng.choice(dim, size=nnz, replace=False).tolist())
    raw = rng.uniform(0.05, 1.0, size=nnz)
    raw = raw / raw.sum()  # mimic normalized-frequency scale
    return SparseVector(positions=tuple(positions), weights=tuple(raw.tolist()))


def reference_loss(
    weights: list[float],
    bias: float,
    batch: list[tuple[SparseVector, int]],
    l2_lambda: float,
) -> float:
    """Plain-Python regularized logistic loss, independent of the
    vectorized implementation."""
    total = 0.0
    for x, y in batch:
        z = bias
        for p, w in zip(x.positions, x.weights):
            z += weights[p] * w
        # log(1 + e^z) - y z, stabilized
        if z > 0:
            total += z + math.log1p(math.exp(-z)) - y * z
        else:
            total += math.log1p(math.exp(z)) - y * z
    total /= len(batch)
    total += 0.5 * l2_lambda * sum(w * w for w in weights)
    return total


class TestLossAndGradient:
    def test_zero_model_single_positive_empty_vector(self):
        model = Model(weights=np.zeros(3), bias=0.0, hyperparams=Hyperparams())
        loss, grad_w, grad_b = loss_and_gradient(model, [(vec({}), 1)], l2_lambda=0.0)
        assert loss == pytest.approx(math.log(2))
        assert grad_b == pytest.approx(-0.5)
        assert np.allclose(grad_w, 0.0)

    def test_symmetric_batch_zero_bias_gradient(self):
        model = Model(weights=np.zeros(3), bias=0.0, hyperparams=Hyperparams())
        x = vec({0: 0.5, 2: 0.5})
        _, _, grad_b = loss_and_gradient(model, [(x, 1), (x, 0)], l2_lambda=0.0)
        assert grad_b == pytest.approx(0.0)

    @pytest.mark.parametrize("l2_lambda", [0.0, 1e-4, 1e-2])
    def test_gradient_matches_finite_differences(self, l2_lambda):
        rng = np.random.default_rng(17)
        dim = 12
        h = 1e-5
        for _ in range(50):
            weights = rng.normal(0, 1, size=dim) / math.sqrt(dim)
            bias = float(rng.normal(0, 1))
            batch = []
            while not batch or len({y for _, y in batch}) == 0:
                batch = [
                    (random_sparse(rng, dim), int(rng.integers(0, 2)))
                    for _ in range(int(rng.integers(2, 10)))
                ]
            model = Model(weights=weights, bias=bias, hyperparams=Hyperparams())
            loss, grad_w, grad_b = loss_and_gradient(model, batch, l2_lambda)

            w_list = weights.tolist()
            assert loss == pytest.approx(reference_loss(w_list, bias, batch, l2_lambda), rel=1e-10)

            fd = np.zeros(dim + 1)
            for j in range(dim):
                bumped_up = list(w_list)
                bumped_dn = list(w_list)
                bumped_up[j] += h
                bumped_dn[j] -= h
                fd[j] = (
                    reference_loss(bumped_up, bias, batch, l2_lambda)
                    - reference_loss(bumped_dn, bias, batch, l2_lambda)
                ) / (2 * h)
            fd[dim] = (
                reference_loss(w_list, bias + h, batch, l2_lambda)
                - reference_loss(w_list, bias - h, batch, l2_lambda)
            ) / (2 * h)

            analytic = np.concatenate([grad_w, [grad_b]])
            rel_err = np.linalg.norm(analytic - fd) / max(np.linalg.norm(fd), 1e-8)
            assert rel_err < 1e-4


class TestTrain:
    def test_zero_iterations_identity(self):
        training = [(vec({0: 1.0}), 1), (vec({1: 1.0}), 0)]
        model = train(training, dim=2, hp=Hyperparams(max_iters=0))
        assert np.all(model.weights == 0.0)
        assert model.bias == 0.0
        scored = score(model, [("a", vec({0: 0.7}), 1)])
        assert scored[0].score == pytest.approx(0.5)

    def test_separable_pair_orders_and_loss_decreases(self):
        training = [(vec({0: 1.0}), 1), (vec({1: 1.0}), 0)]
        model = train(training, dim=2, hp=Hyperparams(max_iters=200))
        scored = score(model, [("pos", vec({0: 1.0}), 1), ("neg", vec({1: 1.0}), 0)])
        assert scored[0].score > 0.5 > scored[1].score
        history = model.loss_history
        assert len(history) > 2
        assert all(b <= a + 1e-9 for a, b in zip(history, history[1:]))

    def test_single_class_rejected(self):
        with pytest.raises(DegenerateTraining):
            train([(vec({0: 1.0}), 1), (vec({1: 1.0}), 1)], dim=2)

    def test_empty_rejected(self):
        with pytest.raises(DegenerateTraining):
            train([], dim=2)

    def test_bitwise_determinism(self):
        rng = np.random.default_rng(3)
        training = [
            (random_sparse(rng, 20), int(rng.integers(0, 2))) for _ in range(40)
        ]
        training[0] = (training[0][0], 1)
        training[1] = (training[1][0], 0)
        first = train(training, dim=20)
        second = train(training, dim=20)
        assert first.weights.tobytes() == second.weights.tobytes()
        assert first.bias == second.bias
        assert first.loss_history == second.loss_history

    def test_loss_monotone_on_default_rate(self):
        rng = np.random.default_rng(29)
        training = [
            (random_sparse(rng, 30), int(rng.integers(0, 2))) for _ in range(60)
        ]
        training[0] = (training[0][0], 1)
        training[1] = (training[1][0], 0)
        model = train(training, dim=30)
        history = model.loss_history
        assert all(b <= a + 1e-9 for a, b in zip(history, history[1:]))


class TestScore:
    def test_zero_model_scores_half(self):
        model = Model(weights=np.zeros(4), bias=0.0, hyperparams=Hyperparams())
        scored = score(model, [("a", vec({2: 0.3}), 0)])
        assert scored[0].score == pytest.approx(0.5)

    def test_saturation_stays_inside_open_interval(self):
        model = Model(weights=np.full(1, 5000.0), bias=0.0, hyperparams=Hyperparams())
        scored = score(model, [("hi", vec({0: 1.0}), 1)])
        assert 0.0 < scored[0].score < 1.0
        low_model = Model(weights=np.full(1, -5000.0), bias=0.0, hyperparams=Hyperparams())
        scored = score(low_model, [("lo", vec({0: 1.0}), 0)])
        assert 0.0 < scored[0].score < 1.0

    def test_matches_independent_dot_product(self):
        rng = np.random.default_rng(41)
        dim = 25
        model = Model(
            weights=rng.normal(0, 2, size=dim), bias=float(rng.normal()),
            hyperparams=Hyperparams(),
        )
        docs = [(f"d{i}", random_sparse(rng, dim), int(rng.integers(0, 2))) for i in range(20)]
        scored = score(model, docs)
        for (doc_id, x, label), out in zip(docs, scored):
            z = model.bias
            for p, w in zip(x.positions, x.weights):
                z += model.weights[p] * w
            expected = 1.0 / (1.0 + math.exp(-z))
            assert out.doc_id == doc_id
            assert out.label == label
            assert abs(out.score - expected) < 1e-12

    def test_dimension_mismatch(self):
        model = Model(weights=np.zeros(2), bias=0.0, hyperparams=Hyperparams())
        with pytest.raises(DimensionMismatch):
            score(model, [("a", vec({5: 1.0}), 0)])

    def test_output_order_matches_input(self):
        model = Model(weights=np.zeros(3), bias=0.0, hyperparams=Hyperparams())
        docs = [(f"d{i}", vec({}), 0) for i in (3, 1, 2)]
        assert [s.doc_id for s in score(model, docs)] == ["d3", "d1", "d2"]


def test_model_csv_dump(tmp_path):
    training = [(vec({0: 1.0}), 1), (vec({1: 1.0}), 0)]
    model = train(training, dim=2, hp=Hyperparams(max_iters=50))
    out = tmp_path / "model.csv"
    write_model_csv(model, out)
    lines = out.read_text().splitlines()
    assert lines[0] == "feature,weight"
    assert lines[1].startswith("bias,")
    assert len(lines) == 4  # bias + two nonzero weights
