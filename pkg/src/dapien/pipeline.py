"""Distribution-adaptive prediction intervals for nominal inputs.

Fitting proceeds in four phases: group training records by unique input,
fit the chosen noise family to every group, train one regressor per
distribution parameter on the (input, parameter) pairs, and at prediction
time plug the regressed parameters into the family's quantile machinery.

For the Gaussian family the two regressors predict the mean (identity
output) and the noise standard deviation (exponential output, so the
predicted spread is always positive); intervals use Student-t critical
values with the mean group size as degrees of freedom.  For the gamma
family three regressors predict shape and rate (exponential outputs) and
location (identity), and intervals come from the gamma inverse CDF.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .distributions import (
    DistFamily,
    GammaParams,
    GaussianParams,
    gamma_interval,
    gaussian_interval,
    t_quantile,
)
from .errors import DimensionMismatch, DomainError
from .grouping import build_dist_dataset, group_by_unique_input, mean_group_size
from .regressor import Activation, LinearModel, TrainConfig, predict, train

SERIAL_FORMAT = "dapien-model"
SERIAL_VERSION = 1


@dataclass(frozen=True)
class PredictionInterval:
    """A [lower, upper] range asserted to contain the target."""

    lower: float
    upper: float
    confidence: float

    def __post_init__(self):
        if not (self.lower <= self.upper):
            raise ValueError(f"lower {self.lower} exceeds upper {self.upper}")
        if not (0.0 < self.confidence < 1.0):
            raise ValueError(f"confidence must lie in (0, 1), got {self.confidence}")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, y: float) -> bool:
        return self.lower <= y <= self.upper


@dataclass(frozen=True)
class DapienModel:
    """Per-parameter regressors for one noise family.

    ``param_models`` order is (mean, sigma) for the Gaussian family and
    (shape, rate, location) for the gamma family.  ``ndf`` is the mean
    training group size; it is present exactly for the Gaussian family,
    where it feeds the t critical value.
    """

    family: DistFamily
    param_models: tuple[LinearModel, ...]
    ndf: float | None = None

    def __post_init__(self):
        expected = 2 if self.family is DistFamily.GAUSSIAN else 3
        if len(self.param_models) != expected:
            raise ValueError(
                f"{self.family.value} family needs {expected} parameter models, "
                f"got {len(self.param_models)}"
            )
        if (self.ndf is None) == (self.family is DistFamily.GAUSSIAN):
            raise ValueError("ndf must be present exactly for the Gaussian family")
        if self.ndf is not None and not self.ndf > 0:
            raise ValueError("ndf must be positive")

    @property
    def dim(self) -> int:
        return self.param_models[0].dim

    def to_dict(self) -> dict:
        doc = {
            "format": SERIAL_FORMAT,
            "version": SERIAL_VERSION,
            "family": self.family.value,
            "models": [m.to_dict() for m in self.param_models],
        }
        if self.ndf is not None:
            doc["ndf"] = float(self.ndf)
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "DapienModel":
        if doc.get("format") != SERIAL_FORMAT:
            raise ValueError(f"not a {SERIAL_FORMAT} document")
        if doc.get("version") != SERIAL_VERSION:
            raise ValueError(f"unsupported version {doc.get('version')}")
        return cls(
            family=DistFamily(doc["family"]),
            param_models=tuple(LinearModel.from_dict(m) for m in doc["models"]),
            ndf=doc.get("ndf"),
        )

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)

    @classmethod
    def load(cls, path) -> "DapienModel":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _child_config(config: TrainConfig, index: int) -> TrainConfig:
    child = np.random.SeedSequence(entropy=config.seed, spawn_key=(index,))
    return replace(config, seed=int(child.generate_state(1, np.uint64)[0]))


def dapien_fit(samples, family: DistFamily, config: TrainConfig) -> DapienModel:
    """Fit the full pipeline on raw samples.

    For the gamma family every group must satisfy the gamma fit
    preconditions (at least 3 observations, nonzero spread); grouping and
    fit errors propagate with the offending input attached.
    """
    grouped = group_by_unique_input(samples)
    dist = build_dist_dataset(grouped, family)
    X = np.asarray([x for x, _ in dist.rows], dtype=np.float64)

    if family is DistFamily.GAUSSIAN:
        means = [p.mean for _, p in dist.rows]
        sigmas = [math.sqrt(p.variance) for _, p in dist.rows]
        models = (
            train(X, means, Activation.IDENTITY, _child_config(config, 0)),
            train(X, sigmas, Activation.EXPONENTIAL, _child_config(config, 1)),
        )
        return DapienModel(
            family=family, param_models=models, ndf=mean_group_size(grouped)
        )

    shapes = [p.shape for _, p in dist.rows]
    rates = [p.rate for _, p in dist.rows]
    locs = [p.location for _, p in dist.rows]
    models = (
        train(X, shapes, Activation.EXPONENTIAL, _child_config(config, 0)),
        train(X, rates, Activation.EXPONENTIAL, _child_config(config, 1)),
        train(X, locs, Activation.IDENTITY, _child_config(config, 2)),
    )
    return DapienModel(family=family, param_models=models, ndf=None)


def _check_input(model: DapienModel, x):
    if len(x) != model.dim:
        raise DimensionMismatch(
            f"input has length {len(x)}, model expects {model.dim}"
        )


def predict_params(model: DapienModel, x):
    """Regressed distribution parameters for one input vector."""
    _check_input(model, x)
    if model.family is DistFamily.GAUSSIAN:
        mean = predict(model.param_models[0], x)
        sigma = predict(model.param_models[1], x)
        return GaussianParams(mean=mean, variance=sigma * sigma)
    shape = predict(model.param_models[0], x)
    rate = predict(model.param_models[1], x)
    loc = predict(model.param_models[2], x)
    return GammaParams(shape=shape, rate=rate, location=loc)


def dapien_predict_interval(
    model: DapienModel, x, confidence: float
) -> PredictionInterval:
    """Prediction interval for one input at the requested confidence."""
    if not (0.0 < confidence < 1.0):
        raise DomainError(f"confidence must lie in (0, 1), got {confidence}")
    params = predict_params(model, x)
    if model.family is DistFamily.GAUSSIAN:
        c = t_quantile(confidence, model.ndf)
        lower, upper = gaussian_interval(params, c)
    else:
        lower, upper = gamma_interval(params, confidence)
    return PredictionInterval(lower=lower, upper=upper, confidence=confidence)


def dapien_predict_point(model: DapienModel, x) -> float:
    """Centre estimate: predicted mean (Gaussian) or location + shape/rate."""
    params = predict_params(model, x)
    if model.family is DistFamily.GAUSSIAN:
        return params.mean
    return params.location + params.shape / params.rate
