"""Synthetic dataset generation with recorded ground truth.

A single base seed derives independent sub-streams for the regression
coefficients, the noise variance, the covariates and the observation
noise, so sweeping n keeps beta_true fixed.

Regression coefficients are drawn U(-7, 7) for linear/logistic models
and U(-1, 1) for the survival model; the noise variance is U(2, 10).
Covariates are iid standard normal with the first column pinned to 1
(intercept); binary covariate schedules are defined for p in {4, 16, 50}.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "Dataset",
    "GroundTruth",
    "gen_linear",
    "gen_logistic",
    "gen_mixture",
    "gen_aft",
    "dataset_to_csv",
]

LOG2 = math.log(2.0)

# Bernoulli success probabilities for binary covariate columns (excluding
# the intercept), keyed by p.
BINARY_SCHEDULES = {
    4: [0.1, 0.5, 0.8],
    16: [0.1, 0.2, 0.3, 0.4, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.6, 0.7, 0.8, 0.9],
}


class ConfigurationError(ValueError):
    pass


@dataclass
class GroundTruth:
    beta: np.ndarray | None = None
    sigma2: float | None = None
    mixture: dict | None = None  # keys: weights, means, sds
    censoring_target: float | None = None

    def to_jsonable(self) -> dict:
        out = {}
        if self.beta is not None:
            out["beta"] = list(map(float, self.beta))
        if self.sigma2 is not None:
            out["sigma2"] = float(self.sigma2)
        if self.mixture is not None:
            out["mixture"] = {k: list(map(float, v)) for k, v in self.mixture.items()}
        if self.censoring_target is not None:
            out["censoring_target"] = float(self.censoring_target)
        return out


@dataclass
class Dataset:
    y: np.ndarray
    X: np.ndarray | None = None
    delta: np.ndarray | None = None
    truth: GroundTruth = field(default_factory=GroundTruth)

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def p(self) -> int:
        return 0 if self.X is None else self.X.shape[1]


def _streams(seed: int, n_streams: int = 4):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n_streams)]


def _draw_beta(rng, p: int, lo: float, hi: float, zero_pattern: int) -> np.ndarray:
    beta = rng.uniform(lo, hi, size=p)
    if zero_pattern:
        if zero_pattern >= p:
            raise ConfigurationError("zero_pattern must be < p")
        # zero the trailing non-intercept coefficients
        beta[p - zero_pattern :] = 0.0
    return beta


def _draw_X(rng, n: int, p: int, covariates: str) -> np.ndarray:
    X = np.empty((n, p))
    X[:, 0] = 1.0
    if covariates == "continuous":
        X[:, 1:] = rng.standard_normal((n, p - 1))
    elif covariates == "binary":
        if p == 50:
            probs = rng.uniform(0.05, 0.95, size=p - 1)
        elif p in BINARY_SCHEDULES:
            probs = np.asarray(BINARY_SCHEDULES[p])
        else:
            raise ConfigurationError(f"binary covariates not defined for p={p}")
        X[:, 1:] = (rng.random((n, p - 1)) < probs).astype(float)
    else:
        raise ConfigurationError(f"unknown covariate kind {covariates!r}")
    return X


def gen_linear(
    n: int,
    p: int,
    covariates: str = "continuous",
    zero_pattern: int = 0,
    seed: int = 0,
) -> Dataset:
    """Gaussian linear regression data y ~ N(x'beta, sigma2)."""
    r_beta, r_sig, r_x, r_noise = _streams(seed)
    beta = _draw_beta(r_beta, p, -7.0, 7.0, zero_pattern)
    sigma2 = r_sig.uniform(2.0, 10.0)
    X = _draw_X(r_x, n, p, covariates)
    y = X @ beta + math.sqrt(sigma2) * r_noise.standard_normal(n)
    return Dataset(y=y, X=X, truth=GroundTruth(beta=beta, sigma2=sigma2))


def gen_logistic(n: int, p: int, zero_pattern: int = 0, seed: int = 0) -> Dataset:
    """Binary data y ~ Bernoulli(sigmoid(x'beta))."""
    r_beta, _, r_x, r_noise = _streams(seed)
    beta = _draw_beta(r_beta, p, -7.0, 7.0, zero_pattern)
    X = _draw_X(r_x, n, p, "continuous")
    prob = 1.0 / (1.0 + np.exp(-(X @ beta)))
    y = (r_noise.random(n) < prob).astype(float)
    return Dataset(y=y, X=X, truth=GroundTruth(beta=beta))


def gen_mixture(n: int, H: int, seed: int = 0) -> Dataset:
    """Equal-weight univariate Gaussian mixture data, unit component sd."""
    if H == 2:
        r_mu, _, _, r_noise = _streams(seed)
        mu = np.array([r_mu.uniform(-2.0, 0.0), r_mu.uniform(1.0, 3.0)])
    elif H == 4:
        _, _, _, r_noise = _streams(seed)
        mu = np.array([-4.0, 0.0, 2.0, 6.0])
    else:
        raise ConfigurationError("H must be 2 or 4")
    weights = np.full(H, 1.0 / H)
    z = r_noise.integers(0, H, size=n)
    y = mu[z] + r_noise.standard_normal(n)
    truth = GroundTruth(
        mixture={"weights": weights, "means": mu, "sds": np.ones(H)}
    )
    return Dataset(y=y, truth=truth)


def gen_aft(n: int, p: int, k: float, seed: int = 0) -> Dataset:
    """Right-censored Weibull survival data.

    Failure times follow T ~ Wei(1/sigma, log(2) * exp(-x'beta/sigma));
    censoring times use the same shape with the rate scaled by k/(1-k),
    which censors a fraction k of observations on average.
    """
    if not 0.0 < k < 1.0:
        raise ConfigurationError("censoring fraction k must be in (0, 1)")
    r_beta, r_sig, r_x, r_noise = _streams(seed)
    beta = _draw_beta(r_beta, p, -1.0, 1.0, 0)
    sigma2 = r_sig.uniform(2.0, 10.0)
    sigma = math.sqrt(sigma2)
    X = _draw_X(r_x, n, p, "continuous")
    lam_T = LOG2 * np.exp(-(X @ beta) / sigma)
    lam_C = (k / (1.0 - k)) * lam_T
    T = (r_noise.exponential(1.0, size=n) / lam_T) ** sigma
    C = (r_noise.exponential(1.0, size=n) / lam_C) ** sigma
    y = np.minimum(T, C)
    delta = (T <= C).astype(np.int64)
    truth = GroundTruth(beta=beta, sigma2=sigma2, censoring_target=k)
    return Dataset(y=y, X=X, delta=delta, truth=truth)


def dataset_to_csv(ds: Dataset, path: str | Path) -> None:
    """Write observations as CSV plus a ground-truth JSON sidecar."""
    path = Path(path)
    header = ["y"]
    if ds.delta is not None:
        header.append("delta")
    header.extend(f"x{j + 1}" for j in range(ds.p))
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(ds.n):
            row = [repr(float(ds.y[i]))]
            if ds.delta is not None:
                row.append(str(int(ds.delta[i])))
            if ds.X is not None:
                row.extend(repr(float(v)) for v in ds.X[i])
            writer.writerow(row)
    sidecar = path.with_suffix(path.suffix + ".truth.json")
    sidecar.write_text(json.dumps(ds.truth.to_jsonable(), indent=2))
