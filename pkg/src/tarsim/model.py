"""L2-regularized logistic regression trained by full-batch gradient descent.

The trainer starts from zero weights and takes fixed-size steps on the
mean logistic loss plus (lambda/2)*||w||^2 (bias excluded from the
penalty). Full-batch descent with a fixed summation order keeps training
bitwise reproducible, which the experiment harness relies on. Scores are
probabilities clamped into the open interval (0, 1).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.special import expit

from .errors import DegenerateTraining, DimensionMismatch, NonFiniteLoss
from .featurize import SparseVector, stack

# Keeps emitted probabilities strictly inside (0, 1) when the sigmoid
# saturates in float64.
_SCORE_FLOOR = 1e-15


@dataclass(frozen=True)
class Hyperparams:
    l2_lambda: float = 1e-4
    learning_rate: float = 1.0
    max_iters: int = 300
    tol: float = 1e-7

    def __post_init__(self) -> None:
        if self.l2_lambda < 0 or self.learning_rate <= 0 or self.max_iters < 0 or self.tol < 0:
            raise ValueError(f"invalid hyperparameters: {self}")


@dataclass(frozen=True)
class Model:
    weights: np.ndarray
    bias: float
    hyperparams: Hyperparams
    loss_history: tuple[float, ...] = field(default=(), repr=False)

    @property
    def dim(self) -> int:
        return int(self.weights.shape[0])


@dataclass(frozen=True)
class ScoredDoc:
    doc_id: str
    score: float
    label: int


def _loss_grad(
    X: sp.csr_matrix,
    y: np.ndarray,
    w: np.ndarray,
    b: float,
    l2_lambda: float,
) -> tuple[float, np.ndarray, float]:
    n = X.shape[0]
    z = X @ w + b
    # log(1 + exp(z)) - y*z, numerically stable for large |z|
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z))
    loss += 0.5 * l2_lambda * float(w @ w)
    residual = expit(z) - y
    grad_w = (X.T @ residual) / n + l2_lambda * w
    grad_b = float(np.mean(residual))
    return loss, grad_w, grad_b


def train(
    training: Sequence[tuple[SparseVector, int]],
    dim: int,
    hp: Hyperparams = Hyperparams(),
) -> Model:
    """Gradient descent from zero init; stops at max_iters or when the
    loss change drops below tol.

    Raises DegenerateTraining for a single-class training set and
    NonFiniteLoss if the loss diverges.
    """
    if not training:
        raise DegenerateTraining("empty training set")
    labels = {label for _, label in training}
    if labels in ({0}, {1}):
        raise DegenerateTraining(f"single-class training set (label {labels.pop()})")
    X = stack([vec for vec, _ in training], dim)
    y = np.asarray([label for _, label in training], dtype=np.float64)
    w = np.zeros(dim, dtype=np.float64)
    b = 0.0
    losses: list[float] = []
    for _ in range(hp.max_iters):
        loss, grad_w, grad_b = _loss_grad(X, y, w, b, hp.l2_lambda)
        if not np.isfinite(loss) or not np.all(np.isfinite(grad_w)):
            raise NonFiniteLoss(f"loss diverged at iteration {len(losses)}")
        losses.append(loss)
        if len(losses) > 1 and abs(losses[-1] - losses[-2]) < hp.tol:
            break
        w = w - hp.learning_rate * grad_w
        b = b - hp.learning_rate * grad_b
    if not np.all(np.isfinite(w)) or not np.isfinite(b):
        raise NonFiniteLoss("non-finite parameters after training")
    return Model(weights=w, bias=b, hyperparams=hp, loss_history=tuple(losses))


def score(
    model: Model,
    docs: Sequence[tuple[str, SparseVector, int]],
) -> list[ScoredDoc]:
    """Sigmoid scores in input order, clamped into (0, 1)."""
    if not docs:
        return []
    for _, vec, _ in docs:
        if vec.positions and vec.positions[-1] >= model.dim:
            raise DimensionMismatch(
                f"feature position {vec.positions[-1]} >= model dim {model.dim}"
            )
    X = stack([vec for _, vec, _ in docs], model.dim)
    z = X @ model.weights + model.bias
    scores = np.clip(expit(z), _SCORE_FLOOR, 1.0 - _SCORE_FLOOR)
    return [
        ScoredDoc(doc_id=doc_id, score=float(s), label=label)
        for (doc_id, _, label), s in zip(docs, scores)
    ]


def loss_and_gradient(
    model: Model,
    batch: Sequence[tuple[SparseVector, int]],
    l2_lambda: float,
) -> tuple[float, np.ndarray, float]:
    """Mean regularized logistic loss and its analytic gradient at the
    model's current parameters. Exposed so gradient checks can compare
    against finite differences."""
    if not batch:
        raise ValueError("empty batch")
    X = stack([vec for vec, _ in batch], model.dim)
    y = np.asarray([label for _, label in batch], dtype=np.float64)
    return _loss_grad(X, y, model.weights, model.bias, l2_lambda)


def write_model_csv(model: Model, path: str | Path) -> None:
    """Debug dump: bias row, then nonzero (feature position, weight)."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["feature", "weight"])
        writer.writerow(["bias", repr(model.bias)])
        for pos in np.flatnonzero(model.weights):
            writer.writerow([int(pos), repr(float(model.weights[pos]))])
