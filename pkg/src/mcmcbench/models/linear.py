"""Gaussian linear regression under four priors.

Priors on (beta, scale):

- ``LM-C``  conjugate: beta | s2 ~ N(0, s2 I), s2 ~ IG(eta0/2, eta0*s02/2)
- ``LM-WI`` weakly informative: beta_j ~ N(0, M^2), sigma ~ HalfCauchy(0, d0)
- ``LM-NI`` non-informative: beta_j ~ N(0, M^2), sigma ~ U(0, sigma0)
- ``LM-L``  lasso: beta_j | l2 ~ DoubleExponential(0, 1/sqrt(l2)),
  l2 ~ Exp(lambda0), s2 ~ IG(nu0/2, nu0*s02/2)

The conjugate case also provides the exact Normal-Inverse-Gamma
posterior used as a sanity oracle by the samplers' tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve, solve_triangular
from scipy.special import gammaln

from ..datagen import Dataset
from ..distributions import InverseGamma, MvGaussian, UnsupportedOperationError
from ..params import Block, Identity, Log, ParamSpace, ScaledLogit
from .base import ConditionalSpec, Model, gaussian_loglik

HYPER_DEFAULTS = {
    "LM-C": {"sigma02": 1.0, "eta0": 1e-4},
    "LM-WI": {"M": 100.0, "d0": 2.5},
    "LM-NI": {"M": 100.0, "sigma0": 1000.0},
    "LM-L": {"lambda0": 0.1, "nu0": 1e-4, "sigma02": 1.0},
}


@dataclass
class ClosedFormLMPosterior:
    """Normal-Inverse-Gamma posterior of the conjugate linear model.

    beta | s2, y ~ N(beta_hat, s2 * V_n) and s2 | y ~ IG(alpha_n, beta_n).
    """

    V_n: np.ndarray
    beta_hat: np.ndarray
    alpha_n: float
    beta_n: float

    @property
    def beta_mean(self) -> np.ndarray:
        return self.beta_hat

    @property
    def sigma2_mean(self) -> float:
        return self.beta_n / (self.alpha_n - 1.0)

    @property
    def beta_marginal_var(self) -> np.ndarray:
        return np.diag(self.V_n) * self.sigma2_mean


def _ig_logpdf(x: float, a: float, b: float) -> float:
    if x <= 0:
        return -math.inf
    return a * math.log(b) - gammaln(a) - b / x - (a + 1.0) * math.log(x)


class LinearModel(Model):
    family = "LM"

    def __init__(self, dataset: Dataset, prior_id: str, hyper: dict | None = None):
        if prior_id not in HYPER_DEFAULTS:
            raise ValueError(f"unknown linear-model prior {prior_id!r}")
        self.prior_id = prior_id
        h = dict(HYPER_DEFAULTS[prior_id])
        if hyper:
            h.update(hyper)
        p = dataset.X.shape[1]
        blocks = [Block("beta", p, Identity())]
        if prior_id in ("LM-C", "LM-L"):
            blocks.append(Block("sigma2", 1, Log()))
        elif prior_id == "LM-WI":
            blocks.append(Block("sigma", 1, Log()))
        else:  # LM-NI
            blocks.append(Block("sigma", 1, ScaledLogit(h["sigma0"])))
        if prior_id == "LM-L":
            blocks.append(Block("lambda2", 1, Log()))
        super().__init__(dataset, ParamSpace(blocks), h)
        self.X = dataset.X
        self.y = dataset.y
        self.p = p
        self.XtX = self.X.T @ self.X
        self.Xty = self.X.T @ self.y
        if prior_id == "LM-C":
            # V = (X'X + I)^-1 via its Cholesky; reused by Gibbs and oracle
            self._cho_A = cho_factor(self.XtX + np.eye(p), lower=True)
            self._V = cho_solve(self._cho_A, np.eye(p))
            self._Lv = np.linalg.cholesky(self._V)
            self._beta_hat = self._V @ self.Xty

    # ---- helpers ---------------------------------------------------

    def _sigma2_of(self, params: dict) -> float:
        if "sigma2" in params:
            return float(np.atleast_1d(params["sigma2"])[0])
        return float(np.atleast_1d(params["sigma"])[0]) ** 2

    # ---- densities -------------------------------------------------

    def log_likelihood_pointwise(self, params):
        s2 = self._sigma2_of(params)
        return gaussian_loglik(self.y, self.X @ params["beta"], s2)

    def log_prior(self, params):
        beta = np.asarray(params["beta"], dtype=float)
        h = self.hyper
        if self.prior_id == "LM-C":
            s2 = self._sigma2_of(params)
            lp = -0.5 * self.p * math.log(2.0 * math.pi * s2) - beta @ beta / (2.0 * s2)
            return lp + _ig_logpdf(s2, h["eta0"] / 2.0, h["eta0"] * h["sigma02"] / 2.0)
        if self.prior_id == "LM-WI":
            sig = float(np.atleast_1d(params["sigma"])[0])
            lp = -0.5 * self.p * math.log(2.0 * math.pi * h["M"] ** 2) - beta @ beta / (
                2.0 * h["M"] ** 2
            )
            if sig <= 0:
                return -math.inf
            return lp + math.log(2.0 * h["d0"] / math.pi) - math.log(
                sig**2 + h["d0"] ** 2
            )
        if self.prior_id == "LM-NI":
            sig = float(np.atleast_1d(params["sigma"])[0])
            lp = -0.5 * self.p * math.log(2.0 * math.pi * h["M"] ** 2) - beta @ beta / (
                2.0 * h["M"] ** 2
            )
            if not 0.0 < sig < h["sigma0"]:
                return -math.inf
            return lp - math.log(h["sigma0"])
        # LM-L
        s2 = self._sigma2_of(params)
        lam2 = float(np.atleast_1d(params["lambda2"])[0])
        if lam2 <= 0:
            return -math.inf
        root = math.sqrt(lam2)
        lp = self.p * (0.5 * math.log(lam2) - math.log(2.0)) - root * np.abs(beta).sum()
        lp += math.log(h["lambda0"]) - h["lambda0"] * lam2
        lp += _ig_logpdf(s2, h["nu0"] / 2.0, h["nu0"] * h["sigma02"] / 2.0)
        return float(lp)

    # ---- gradient --------------------------------------------------

    def logp_and_grad(self, u):
        params = self.space.constrain(u)
        beta = params["beta"]
        h = self.hyper
        r = self.y - self.X @ beta
        rr = r @ r
        value = float(
            np.sum(self.log_likelihood_pointwise(params))
            + self.log_prior(params)
            + self.space.log_jac(u)
        )
        grads = {}
        if self.prior_id == "LM-C":
            s2 = self._sigma2_of(params)
            a = h["eta0"] / 2.0
            b = h["eta0"] * h["sigma02"] / 2.0
            grads["beta"] = (self.X.T @ r - beta) / s2
            grads["sigma2"] = (
                -(self.n + self.p) / (2.0 * s2)
                + (rr + beta @ beta) / (2.0 * s2**2)
                - (a + 1.0) / s2
                + b / s2**2
            )
        elif self.prior_id in ("LM-WI", "LM-NI"):
            sig = float(np.atleast_1d(params["sigma"])[0])
            s2 = sig**2
            grads["beta"] = self.X.T @ r / s2 - beta / h["M"] ** 2
            dlik_ds2 = -self.n / (2.0 * s2) + rr / (2.0 * s2**2)
            g_sig = dlik_ds2 * 2.0 * sig
            if self.prior_id == "LM-WI":
                g_sig += -2.0 * sig / (s2 + h["d0"] ** 2)
            grads["sigma"] = g_sig
        else:  # LM-L
            s2 = self._sigma2_of(params)
            lam2 = float(np.atleast_1d(params["lambda2"])[0])
            root = math.sqrt(lam2)
            a = h["nu0"] / 2.0
            b = h["nu0"] * h["sigma02"] / 2.0
            grads["beta"] = self.X.T @ r / s2 - np.sign(beta) * root
            grads["sigma2"] = (
                -self.n / (2.0 * s2) + rr / (2.0 * s2**2) - (a + 1.0) / s2 + b / s2**2
            )
            grads["lambda2"] = (
                self.p / (2.0 * lam2)
                - np.abs(beta).sum() / (2.0 * root)
                - h["lambda0"]
            )
        return value, self.space.grad_to_unconstrained(u, grads)

    # ---- sampler hooks ---------------------------------------------

    def initial_params(self):
        out = {"beta": np.zeros(self.p)}
        s2 = max(float(np.var(self.y)), 1e-3)
        if self.prior_id in ("LM-C", "LM-L"):
            out["sigma2"] = np.array([s2])
        else:
            out["sigma"] = np.array([math.sqrt(s2)])
        if self.prior_id == "LM-L":
            out["lambda2"] = np.array([1.0])
        return out

    def gibbs_scan(self, state, rng, slice_fn):
        h = self.hyper
        if self.prior_id == "LM-C":
            s2 = float(state["sigma2"][0])
            z = rng.standard_normal(self.p)
            state["beta"] = self._beta_hat + math.sqrt(s2) * (self._Lv @ z)
            r = self.y - self.X @ state["beta"]
            a = (h["eta0"] + self.n + self.p) / 2.0
            b = (h["eta0"] * h["sigma02"] + r @ r + state["beta"] @ state["beta"]) / 2.0
            state["sigma2"] = np.array([1.0 / rng.gamma(a, 1.0 / b)])
            return
        if self.prior_id in ("LM-WI", "LM-NI"):
            sig = float(state["sigma"][0])
            s2 = sig**2
            A = self.XtX / s2 + np.eye(self.p) / h["M"] ** 2
            cA = cho_factor(A, lower=True)
            mean = cho_solve(cA, self.Xty / s2)
            z = rng.standard_normal(self.p)
            state["beta"] = mean + solve_triangular(cA[0], z, lower=True, trans="T")
            spec = self.full_conditional("sigma", state)
            state["sigma"] = np.array([slice_fn(spec.logpdf, sig, "sigma")])
            return
        # LM-L: coordinate slice on beta, conjugate sigma2, slice on lambda2
        beta = state["beta"]
        s2 = float(state["sigma2"][0])
        lam2 = float(state["lambda2"][0])
        root = math.sqrt(lam2)
        r = self.y - self.X @ beta
        col_sq = getattr(self, "_col_sq", None)
        if col_sq is None:
            col_sq = self._col_sq = np.einsum("ij,ij->j", self.X, self.X)
        for j in range(self.p):
            xj = self.X[:, j]
            cj = xj @ r
            bj = beta[j]

            def logpdf(b, bj=bj, cj=cj, sq=col_sq[j]):
                d = b - bj
                return -(-2.0 * d * cj + d * d * sq) / (2.0 * s2) - abs(b) * root

            new = slice_fn(logpdf, bj, f"beta[{j}]")
            if new != bj:
                r -= (new - bj) * xj
                beta[j] = new
        a = (h["nu0"] + self.n) / 2.0
        b = (h["nu0"] * h["sigma02"] + r @ r) / 2.0
        state["sigma2"] = np.array([1.0 / rng.gamma(a, 1.0 / b)])
        spec = self.full_conditional("lambda2", state)
        state["lambda2"] = np.array([slice_fn(spec.logpdf, lam2, "lambda2")])

    def full_conditional(self, block, params):
        h = self.hyper
        beta = np.asarray(params["beta"], dtype=float)
        if self.prior_id == "LM-C":
            s2 = float(np.atleast_1d(params["sigma2"])[0])
            if block == "beta":
                return ConditionalSpec.closed_form(
                    MvGaussian(self._beta_hat, s2 * self._V)
                )
            if block == "sigma2":
                r = self.y - self.X @ beta
                a = (h["eta0"] + self.n + self.p) / 2.0
                b = (h["eta0"] * h["sigma02"] + r @ r + beta @ beta) / 2.0
                return ConditionalSpec.closed_form(InverseGamma(a, b))
        if self.prior_id in ("LM-WI", "LM-NI"):
            if block == "beta":
                sig = float(np.atleast_1d(params["sigma"])[0])
                A = self.XtX / sig**2 + np.eye(self.p) / h["M"] ** 2
                cov = np.linalg.inv(A)
                return ConditionalSpec.closed_form(
                    MvGaussian(cov @ (self.Xty / sig**2), cov)
                )
            if block == "sigma":
                r = self.y - self.X @ beta
                rr = float(r @ r)

                def logpdf(sig):
                    if sig <= 0:
                        return -math.inf
                    s2 = sig**2
                    out = -self.n * math.log(sig) - rr / (2.0 * s2)
                    if self.prior_id == "LM-WI":
                        return out - math.log(s2 + h["d0"] ** 2)
                    if sig >= h["sigma0"]:
                        return -math.inf
                    return out

                return ConditionalSpec.generic(logpdf)
        if self.prior_id == "LM-L":
            s2 = float(np.atleast_1d(params["sigma2"])[0])
            lam2 = float(np.atleast_1d(params["lambda2"])[0])
            if block == "sigma2":
                r = self.y - self.X @ beta
                a = (h["nu0"] + self.n) / 2.0
                b = (h["nu0"] * h["sigma02"] + r @ r) / 2.0
                return ConditionalSpec.closed_form(InverseGamma(a, b))
            if block == "lambda2":
                abs_sum = float(np.abs(beta).sum())

                def logpdf(lam):
                    if lam <= 0:
                        return -math.inf
                    return (
                        0.5 * self.p * math.log(lam)
                        - math.sqrt(lam) * abs_sum
                        - h["lambda0"] * lam
                    )

                return ConditionalSpec.generic(logpdf)
            if block.startswith("beta["):
                j = int(block[5:-1])
                others = beta.copy()
                r0 = self.y - self.X @ others + others[j] * self.X[:, j]
                xj = self.X[:, j]
                root = math.sqrt(lam2)

                def logpdf(b):
                    r = r0 - b * xj
                    return -float(r @ r) / (2.0 * s2) - abs(b) * root

                return ConditionalSpec.generic(logpdf)
        raise KeyError(f"no conditional for block {block!r} under {self.prior_id}")

    def rw_block_names(self):
        return [b.name for b in self.space.blocks]

    # ---- conjugate oracle ------------------------------------------

    def closed_form_posterior(self) -> ClosedFormLMPosterior:
        if self.prior_id != "LM-C":
            raise UnsupportedOperationError("closed-form posterior exists only under LM-C")
        h = self.hyper
        quad = float(self._beta_hat @ (self.XtX + np.eye(self.p)) @ self._beta_hat)
        return ClosedFormLMPosterior(
            V_n=self._V.copy(),
            beta_hat=self._beta_hat.copy(),
            alpha_n=(h["eta0"] + self.n) / 2.0,
            beta_n=(h["eta0"] * h["sigma02"] + float(self.y @ self.y) - quad) / 2.0,
        )
