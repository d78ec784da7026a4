"""Chain-quality and model-fit diagnostics.

Everything here is a pure function over finished chains (or raw arrays),
so it is safe to call concurrently from the harness.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

ESS_DENOM_FLOOR = 1e-6


class DegenerateSeriesError(ValueError):
    """Raised when a diagnostic needs variation but the series is constant."""


# ----------------------------------------------------------------------------
# autocorrelation / ESS


def autocorrelation(series, max_lag):
    """Empirical autocorrelations rho_0..rho_max_lag.

    Biased estimator: autocovariances divide by N (not N-lag), mean taken
    over the whole series.  Computed with an FFT so long chains are cheap.
    """
    x = np.asarray(series, dtype=float)
    n = x.size
    if n < 2 * max_lag:
        raise ValueError(f"series length {n} < 2*max_lag = {2 * max_lag}")
    x = x - x.mean()
    var = np.mean(x * x)
    if var == 0.0 or not np.isfinite(var):
        raise DegenerateSeriesError("constant (or non-finite) series")
    nfft = int(2 ** np.ceil(np.log2(2 * n)))
    f = np.fft.rfft(x, nfft)
    acov = np.fft.irfft(f * np.conj(f), nfft)[: max_lag + 1] / n
    return acov / acov[0]


def ess(series):
    """Effective sample size, N / (1 + 2 sum rho_l).

    The sum over lags is truncated by Geyer's initial-positive-sequence
    rule: accumulate pairwise sums Gamma_k = rho_{2k} + rho_{2k+1} while
    they stay positive, stop at the first nonpositive one.  The resulting
    denominator is floored at a small positive value so strongly antithetic
    chains never produce a negative or absurd ESS.
    """
    x = np.asarray(series, dtype=float)
    n = x.size
    max_lag = n // 2 - 1
    if max_lag < 1:
        raise ValueError("series too short for ESS")
    rho = autocorrelation(x, max_lag)
    # Geyer: tau = -1 + 2 * sum_k Gamma_k, Gamma_k = rho_{2k} + rho_{2k+1}
    tau = -1.0
    for k in range(0, (max_lag + 1) // 2):
        gamma = rho[2 * k] + rho[2 * k + 1]
        if gamma <= 0.0:
            break
        tau += 2.0 * gamma
    tau = max(tau, ESS_DENOM_FLOOR)
    return n / tau


@dataclass
class EssReport:
    """Per-parameter sampling efficiency for one chain."""

    names: list
    per_param_E: np.ndarray
    mean_E: float
    n_samples: int
    raw_E: np.ndarray = field(default=None, repr=False)  # pre-clamp values

    def as_dict(self):
        return {name: float(e) for name, e in zip(self.names, self.per_param_E)}


def ess_report(chain, subset=None):
    """Efficiency E_j = ess_j / N_s for a selected parameter subset.

    ``subset`` is a list of column names, a name prefix (e.g. "beta"), or
    None for every column.  Values are clamped to 1.0 (estimator noise can
    exceed it slightly on thinned chains); the raw values are kept on the
    report for inspection.
    """
    if chain.n_thin != 2:
        warnings.warn(
            f"chain thinned by {chain.n_thin}, not 2; efficiencies may "
            "exceed 1 due to antithetic autocorrelation",
            stacklevel=2,
        )
    if subset is None:
        names = list(chain.names)
    elif isinstance(subset, str):
        names = [nm for nm in chain.names if nm == subset or nm.startswith(subset + "[")]
    else:
        names = list(subset)
    if not names:
        raise ValueError("empty parameter subset")
    raw = np.array([ess(chain.col(nm)) / chain.n_samples for nm in names])
    clamped = np.minimum(raw, 1.0)
    return EssReport(
        names=names,
        per_param_E=clamped,
        mean_E=float(clamped.mean()),
        n_samples=chain.n_samples,
        raw_E=raw,
    )


# ----------------------------------------------------------------------------
# predictive fit criteria


def lpml(loglik):
    """Log pseudo-marginal likelihood from an (N_s, n) pointwise log-lik matrix.

    CPO_i is the harmonic mean of the per-draw likelihoods over posterior
    draws; evaluated in log space (log-sum-exp of the negated log-liks).
    """
    ll = np.asarray(loglik, dtype=float)
    if ll.ndim != 2:
        raise ValueError("expected an (n_draws, n_obs) matrix")
    neg = -ll
    m = neg.max(axis=0)
    if not np.isfinite(m).all():
        warnings.warn(
            "some observation has zero likelihood under every draw; "
            "LPML is -inf",
            stacklevel=2,
        )
        return float("-inf")
    log_mean_inv = m + np.log(np.mean(np.exp(neg - m), axis=0))
    return float(-np.sum(log_mean_inv))


def waic(loglik):
    """Widely applicable information criterion (higher is better here).

    First term: sum_i log mean_j f_ij (log-sum-exp).  Penalty: sum of the
    sample variances (ddof=1) of the pointwise log-likelihoods over draws.
    """
    ll = np.asarray(loglik, dtype=float)
    if ll.ndim != 2:
        raise ValueError("expected an (n_draws, n_obs) matrix")
    ns = ll.shape[0]
    if ns < 2:
        raise ValueError("WAIC needs at least 2 draws for the variance term")
    m = ll.max(axis=0)
    lppd = np.sum(m + np.log(np.mean(np.exp(ll - m), axis=0)))
    penalty = np.sum(np.var(ll, axis=0, ddof=1))
    return float(lppd - penalty)


def kl_divergence(p_true, q_pred, grid):
    """KL(p || q) in bits by Simpson quadrature on a uniform grid.

    ``grid`` is a dict with keys lo, hi, points.  Points where p is
    (numerically) zero contribute nothing; if q vanishes where p carries
    mass the divergence is +inf.
    """
    lo, hi, points = grid["lo"], grid["hi"], grid["points"]
    y = np.linspace(lo, hi, points)
    p = np.asarray(p_true(y), dtype=float)
    q = np.asarray(q_pred(y), dtype=float)
    mass = simpson(p, x=y)
    if mass < 1.0 - 1e-4:
        warnings.warn(
            f"grid captures only {mass:.6f} of the true density's mass",
            stacklevel=2,
        )
    tol = 1e-300
    support = p > tol
    if np.any(support & (q <= 0.0)):
        warnings.warn("predictive density vanishes inside the true support", stacklevel=2)
        return float("inf")
    integrand = np.zeros_like(p)
    integrand[support] = p[support] * np.log2(p[support] / q[support])
    return float(simpson(integrand, x=y))


def beta_error(posterior_means, truth):
    """Sum of squared deviations of posterior means from the true coefficients."""
    est = np.asarray(posterior_means, dtype=float)
    tru = np.asarray(truth, dtype=float)
    if est.shape != tru.shape:
        raise ValueError(f"shape mismatch: {est.shape} vs {tru.shape}")
    return float(np.sum((est - tru) ** 2))


def credible_interval(series, level=0.95):
    """Equal-tailed interval from empirical quantiles.

    Linear interpolation between order statistics (numpy's default
    quantile convention).
    """
    x = np.asarray(series, dtype=float)
    if x.size == 0:
        raise ValueError("empty series")
    a = (1.0 - level) / 2.0
    lo, hi = np.quantile(x, [a, 1.0 - a])
    return float(lo), float(hi)


def hard_shrinkage_select(chain, block="beta", level=0.95):
    """Indices of coefficients whose credible interval excludes zero."""
    names = [nm for nm in chain.names if nm.startswith(block + "[")]
    if not names:
        raise ValueError(f"no columns for block {block!r}")
    kept = set()
    for j, nm in enumerate(names):
        lo, hi = credible_interval(chain.col(nm), level=level)
        if not (lo <= 0.0 <= hi):
            kept.add(j)
    return kept


@dataclass
class FitReport:
    """Predictive-fit summary for one fitted model."""

    lpml: float = None
    waic: float = None
    kl: float = None
    error: float = None
    ci: dict = None

    def as_dict(self):
        out = {}
        for key in ("lpml", "waic", "kl", "error"):
            val = getattr(self, key)
            if val is not None:
                out[key] = float(val)
        return out
