"""Minimal trainable predictor: an affine map with optional exp output.

The model is a feedforward network with no hidden layer.  Training
minimises mean squared error (plus an optional ridge penalty on the
weights, never the bias) by full-batch nonlinear conjugate gradient,
Polak-Ribiere variant with automatic restarts and a backtracking Armijo
line search.  The squared error is always taken in the original target
space, also for the exponential output, matching the architecture rather
than a log-transform shortcut.

With ``folds >= 2`` the ridge strength is picked from a fixed grid by
stratified k-fold cross validation (samples ranked by target and dealt
round-robin into folds) and the model is refit on all data.  Everything is
deterministic given the config seed; weights start at zero, which for the
exponential output means a safe all-ones prediction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DimensionMismatch, InvalidTarget, TooFewSamples

L2_GRID = (0.0, 1e-6, 1e-4, 1e-2)

_ARMIJO_C1 = 1e-4
_MAX_BACKTRACKS = 60


class Activation(Enum):
    IDENTITY = "identity"
    EXPONENTIAL = "exponential"


@dataclass(frozen=True)
class LinearModel:
    """Trained weight vector, bias and output activation."""

    weights: np.ndarray
    bias: float
    activation: Activation

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if not np.all(np.isfinite(w)) or not math.isfinite(self.bias):
            raise ValueError("model parameters must be finite")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", float(self.bias))

    @property
    def dim(self) -> int:
        return self.weights.size

    def to_dict(self) -> dict:
        return {
            "weights": [float(v) for v in self.weights],
            "bias": float(self.bias),
            "activation": self.activation.value,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "LinearModel":
        return cls(
            weights=np.asarray(doc["weights"], dtype=np.float64),
            bias=float(doc["bias"]),
            activation=Activation(doc["activation"]),
        )


@dataclass(frozen=True)
class TrainConfig:
    """Optimiser and model-selection settings."""

    max_iterations: int = 500
    gradient_tolerance: float = 1e-10
    folds: int = 5
    seed: int = 0
    l2_penalty: float = 0.0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.gradient_tolerance > 0.0:
            raise ValueError("gradient_tolerance must be > 0")
        if self.folds < 1:
            raise ValueError("folds must be >= 1")
        if self.l2_penalty < 0.0:
            raise ValueError("l2_penalty must be >= 0")


def predict(model: LinearModel, x) -> float:
    """Model output for a single binary input vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.dim,):
        raise DimensionMismatch(
            f"input has length {x.size}, model expects {model.dim}"
        )
    z = float(x @ model.weights) + model.bias
    if model.activation is Activation.EXPONENTIAL:
        return math.exp(z)
    return z


def predict_batch(model: LinearModel, X) -> np.ndarray:
    """Vectorised model output for a (n, d) matrix of inputs."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.dim:
        raise DimensionMismatch(
            f"input matrix has shape {X.shape}, model expects (*, {model.dim})"
        )
    z = X @ model.weights + model.bias
    if model.activation is Activation.EXPONENTIAL:
        return np.exp(z)
    return z


def stratified_folds(ts, k: int, seed) -> np.ndarray:
    """Assign each sample to one of k folds, stratified on the target.

    Samples are ranked by target value (ties broken by a seeded shuffle)
    and dealt round-robin into folds, so every fold sees the full spread of
    targets and sizes differ by at most one.
    """
    ts = np.asarray(ts, dtype=np.float64)
    n = ts.size
    if n < k:
        raise TooFewSamples(f"{n} samples cannot fill {k} folds")
    rng = np.random.default_rng(seed)
    tiebreak = rng.permutation(n)
    order = np.lexsort((tiebreak, ts))
    folds = np.empty(n, dtype=np.int64)
    folds[order] = np.arange(n) % k
    return folds


def _loss_terms(z, w_sq, t, activation, l2):
    """Objective value from precomputed affine outputs; inf if overflowed."""
    if activation is Activation.EXPONENTIAL:
        with np.errstate(over="ignore"):
            p = np.exp(z)
        if not np.all(np.isfinite(p)):
            return np.inf
        r = p - t
    else:
        r = z - t
    return float(r @ r) / z.size + l2 * w_sq


def loss_and_gradient(w, b, X, t, activation, l2):
    """MSE + ridge objective and its analytic gradient in (w, b)."""
    n = X.shape[0]
    z = X @ w + b
    if activation is Activation.EXPONENTIAL:
        p = np.exp(z)
        r = p - t
        gz = (2.0 / n) * r * p
    else:
        r = z - t
        gz = (2.0 / n) * r
    loss = float(r @ r) / n + l2 * float(w @ w)
    gw = X.T @ gz + 2.0 * l2 * w
    gb = float(gz.sum())
    return loss, gw, gb


def _train_single(X, t, activation, l2, max_iterations, gradient_tolerance):
    """Conjugate-gradient fit from zero initialisation.

    Returns (weights, bias, per-iteration losses).  The trial step each
    iteration comes from the (Gauss-Newton) curvature along the search
    direction and is then vetted by Armijo backtracking, so accepted steps
    strictly decrease the objective.
    """
    n, dim = X.shape
    w = np.zeros(dim)
    b = 0.0
    z = np.zeros(n)

    exp_act = activation is Activation.EXPONENTIAL
    loss, gw, gb = loss_and_gradient(w, b, X, t, activation, l2)
    g = np.concatenate([gw, [gb]])
    direction = -g
    losses = [loss]
    alpha_prev = 1.0

    for _ in range(max_iterations):
        if np.max(np.abs(g)) <= gradient_tolerance:
            break

        steepest = bool(np.array_equal(direction, -g))
        gd = float(g @ direction)
        if gd >= 0.0:
            direction = -g
            steepest = True
            gd = float(g @ direction)
            if gd >= 0.0:
                break

        dw = direction[:-1]
        db = direction[-1]
        dz = X @ dw + db

        # curvature along the direction (exact for identity, Gauss-Newton
        # for the exponential output) gives the trial step
        if exp_act:
            p = np.exp(z)
            curv = (2.0 / n) * float((p * dz) @ (p * dz)) + 2.0 * l2 * float(dw @ dw)
        else:
            curv = (2.0 / n) * float(dz @ dz) + 2.0 * l2 * float(dw @ dw)
        if curv > 0.0 and math.isfinite(curv):
            alpha = -gd / curv
        else:
            alpha = alpha_prev

        w_sq = float(w @ w)
        w_dw = float(w @ dw)
        dw_sq = float(dw @ dw)
        accepted = False
        for _ in range(_MAX_BACKTRACKS):
            z_cand = z + alpha * dz
            w_sq_cand = w_sq + 2.0 * alpha * w_dw + alpha * alpha * dw_sq
            cand = _loss_terms(z_cand, w_sq_cand, t, activation, l2)
            if cand <= loss + _ARMIJO_C1 * alpha * gd:
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            if steepest:
                break
            direction = -g
            continue

        w = w + alpha * dw
        b = b + alpha * db
        z = z_cand
        alpha_prev = alpha
        loss, gw, gb = loss_and_gradient(w, b, X, t, activation, l2)
        g_new = np.concatenate([gw, [gb]])
        beta = max(0.0, float(g_new @ (g_new - g)) / max(float(g @ g), 1e-300))
        direction = -g_new + beta * direction
        g = g_new
        losses.append(loss)

    return w, b, losses


def train(xs, ts, activation: Activation, config: TrainConfig) -> LinearModel:
    """Fit a LinearModel to (input, target) pairs.

    For the exponential output, targets are floored at 1e-9 before
    training so zero-spread groups remain usable.  With ``config.folds >=
    2`` the ridge strength is selected from ``L2_GRID`` by stratified
    cross validation (``config.l2_penalty`` is only used when selection is
    disabled via ``folds=1``).

    Raises
    ------
    InvalidTarget
        On non-finite targets.
    """
    X = np.asarray(xs, dtype=np.float64)
    if X.ndim != 2:
        X = X.reshape(len(ts), -1)
    t = np.asarray(ts, dtype=np.float64)
    if X.shape[0] != t.size or t.size < 1:
        raise ValueError(f"got {X.shape[0]} inputs and {t.size} targets")
    if not np.all(np.isfinite(t)):
        raise InvalidTarget("targets must be finite")
    if activation is Activation.EXPONENTIAL:
        t = np.maximum(t, 1e-9)

    k = min(config.folds, t.size)
    if k >= 2:
        fold_of = stratified_folds(t, k, config.seed)
        best_l2 = L2_GRID[0]
        best_err = np.inf
        for l2 in L2_GRID:
            err = 0.0
            for j in range(k):
                held = fold_of == j
                w, b, _ = _train_single(
                    X[~held], t[~held], activation, l2,
                    config.max_iterations, config.gradient_tolerance,
                )
                z = X[held] @ w + b
                pred = np.exp(z) if activation is Activation.EXPONENTIAL else z
                err += float(np.mean((pred - t[held]) ** 2))
            err /= k
            if err < best_err:
                best_err = err
                best_l2 = l2
        l2 = best_l2
    else:
        l2 = config.l2_penalty

    w, b, _ = _train_single(
        X, t, activation, l2, config.max_iterations, config.gradient_tolerance
    )
    return LinearModel(weights=w, bias=b, activation=activation)
