"""Experiment driver: configuration, chain execution, timing, reports.

A single experiment fixes one simulated dataset and runs every requested
backend on it, so the backends are compared on identical data.  Repeated
runs (``repeats > 1``) regenerate the dataset with derived seeds
(dataset r uses base_seed + r) and aggregate per-backend summaries.
"""

from __future__ import annotations

import csv
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import datagen, diagnostics
from .models import FAMILY_OF, get_model
from .models.mixture import predictive_density
from .samplers import SamplerConfig, chain_rng
from .samplers import run as run_backend_sampler

# (N_it, N_b) defaults per prior; N_thin is 2 throughout.
SCHEDULES = {
    "LM-C": (11000, 1000),
    "LM-WI": (15000, 5000),
    "LM-NI": (15000, 5000),
    "LM-L": (20000, 10000),
    "LR-N": (20000, 10000),
    "LR-L": (15000, 10000),
    "MM": (20000, 10000),
    "AFT-NH": (10000, 5000),
    "AFT-NI": (10000, 5000),
}

# Mixture parameterization per backend: the gradient-based sampler needs the
# marginal likelihood, the others use the latent-allocation form.
MIXTURE_PARAMETERIZATION = {"gibbs": "latent", "rwmh": "latent", "nuts": "marginal"}

REPORT_COLUMNS = [
    "model",
    "prior",
    "backend",
    "n",
    "p_or_H",
    "seed",
    "mean_E",
    "per_block_E",
    "N_it",
    "t_s",
    "N_it_per_s",
    "lpml",
    "waic",
    "kl",
    "error",
    "n_divergences",
]


@dataclass
class ExperimentConfig:
    prior: str
    n: int = 100
    p: int = 4  # covariate count (regressions) -- ignored for mixtures
    H: int = 2  # mixture components
    covariates: str = "continuous"
    zero_pattern: int = 0
    k: float = 0.5  # target censored fraction (AFT)
    backends: tuple = ("gibbs", "nuts", "rwmh")
    chains: int = 1
    seed: int = 0
    repeats: int = 1
    out: str | None = None
    n_iter: int | None = None  # override the per-prior schedule
    n_burn: int | None = None
    n_thin: int | None = None
    max_workers: int | None = None  # default: host cores - 1
    hyper: dict | None = None

    def __post_init__(self):
        if self.prior not in FAMILY_OF:
            raise ValueError(f"unknown prior tag {self.prior!r}")
        if self.chains < 1:
            raise ValueError("chains must be >= 1")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if isinstance(self.backends, str):
            self.backends = tuple(s for s in self.backends.split(",") if s)

    @property
    def family(self) -> str:
        return FAMILY_OF[self.prior]

    @property
    def p_or_H(self) -> int:
        return self.H if self.family == "MM" else self.p

    def sampler_config(self, backend: str) -> SamplerConfig:
        n_it, n_b = SCHEDULES[self.prior]
        return SamplerConfig(
            backend=backend,
            n_iter=self.n_iter if self.n_iter is not None else n_it,
            n_burn=self.n_burn if self.n_burn is not None else n_b,
            n_thin=self.n_thin if self.n_thin is not None else 2,
            seed=self.seed,
        )


def make_dataset(cfg: ExperimentConfig, dataset_index: int = 0) -> datagen.Dataset:
    """Generate the dataset for one experiment (or one repeat of it)."""
    seed = cfg.seed + dataset_index
    family = cfg.family
    if family == "LM":
        zero = cfg.zero_pattern if cfg.prior == "LM-L" else 0
        return datagen.gen_linear(
            cfg.n, cfg.p, covariates=cfg.covariates, zero_pattern=zero, seed=seed
        )
    if family == "LR":
        return datagen.gen_logistic(cfg.n, cfg.p, zero_pattern=cfg.zero_pattern, seed=seed)
    if family == "MM":
        return datagen.gen_mixture(cfg.n, cfg.H, seed=seed)
    return datagen.gen_aft(cfg.n, cfg.p, cfg.k, seed=seed)


def _build_model(cfg: ExperimentConfig, dataset, backend: str):
    parameterization = MIXTURE_PARAMETERIZATION.get(backend, "marginal")
    return get_model(
        cfg.prior,
        dataset,
        H=cfg.H,
        parameterization=parameterization,
        hyper=cfg.hyper,
    )


def _chain_worker(args):
    """Top-level worker so chains can run in separate processes."""
    cfg, dataset, backend, chain_index = args
    model = _build_model(cfg, dataset, backend)
    scfg = cfg.sampler_config(backend)
    rng = chain_rng(scfg.seed, chain_index)
    return run_backend_sampler(backend, model, scfg, rng=rng)


@dataclass
class RunReport:
    """Everything the report tables need for one (experiment, backend) pair."""

    cfg: ExperimentConfig
    backend: str
    chains: list = field(default_factory=list)
    ess: diagnostics.EssReport = None
    per_chain_ess: list = field(default_factory=list)
    fit: diagnostics.FitReport = None
    wall_clock: float = None  # batch wall time for parallel runs
    skipped: bool = False
    note: str = ""

    @property
    def chain(self):
        return self.chains[0] if self.chains else None

    @property
    def t_s(self) -> float:
        return sum(c.t_s for c in self.chains)

    def row(self) -> dict:
        """Flat report row; skipped backends carry "-" in every metric cell."""
        cfg = self.cfg
        out = {
            "model": cfg.family,
            "prior": cfg.prior,
            "backend": self.backend,
            "n": cfg.n,
            "p_or_H": cfg.p_or_H,
            "seed": cfg.seed,
        }
        metrics = [c for c in REPORT_COLUMNS if c not in out]
        if self.skipped:
            out.update({c: "-" for c in metrics})
            return out
        chain = self.chain
        out["mean_E"] = self.ess.mean_E
        out["per_block_E"] = ";".join(f"{e:.6f}" for e in self.ess.per_param_E)
        out["N_it"] = chain.n_iter
        out["t_s"] = self.t_s
        out["N_it_per_s"] = chain.n_iter / self.t_s
        for key in ("lpml", "waic", "kl", "error"):
            val = getattr(self.fit, key)
            out[key] = "" if val is None else val
        out["n_divergences"] = self.chains_stat("n_divergent")
        return out

    def chains_stat(self, key):
        vals = [c.stats.get(key) for c in self.chains]
        if any(v is None for v in vals):
            return ""
        return int(sum(vals))


def _pointwise_loglik(model, chain) -> np.ndarray:
    """(N_s, n) matrix of per-observation log-likelihoods over retained draws."""
    out = np.empty((chain.n_samples, model.n))
    space = model.space
    for j in range(chain.n_samples):
        params = space.unflatten_constrained(chain.samples[j])
        out[j] = model.log_likelihood_pointwise(params)
    return out


def _true_mixture_density(truth):
    mix = truth.mixture
    w = np.asarray(mix["weights"], dtype=float)
    mu = np.asarray(mix["means"], dtype=float)
    sd = np.asarray(mix["sds"], dtype=float)

    def density(y):
        y = np.atleast_1d(np.asarray(y, dtype=float))
        comps = np.exp(-0.5 * ((y[:, None] - mu) / sd) ** 2) / (
            sd * np.sqrt(2.0 * np.pi)
        )
        return comps @ w

    return density


def _diagnose(cfg: ExperimentConfig, dataset, report: RunReport) -> None:
    """Fill in efficiency and fit metrics for a completed backend run."""
    family = cfg.family
    subset = "v2" if family == "MM" else "beta"
    report.per_chain_ess = [diagnostics.ess_report(c, subset) for c in report.chains]
    report.ess = report.per_chain_ess[0]

    # Pointwise log-likelihood always comes from the marginal form so the
    # latent-allocation chains are scored on the same likelihood.
    diag_model = _build_model(cfg, dataset, "nuts")
    loglik = np.vstack([_pointwise_loglik(diag_model, c) for c in report.chains])

    fit = diagnostics.FitReport()
    fit.lpml = diagnostics.lpml(loglik)
    fit.waic = diagnostics.waic(loglik)
    if family == "MM":
        truth_density = _true_mixture_density(dataset.truth)
        mu = np.asarray(dataset.truth.mixture["means"], dtype=float)
        grid = {"lo": float(mu.min() - 6.0), "hi": float(mu.max() + 6.0), "points": 2001}
        pooled = report.chains[0]
        if len(report.chains) > 1:
            samples = np.vstack([c.samples for c in report.chains])
            pooled = replace(report.chains[0], samples=samples)
        y_grid = np.linspace(grid["lo"], grid["hi"], grid["points"])
        q_vals = predictive_density(pooled, y_grid, H=cfg.H)

        def q_pred(y, _vals=q_vals, _grid=y_grid):
            return np.interp(np.atleast_1d(y), _grid, _vals)

        fit.kl = diagnostics.kl_divergence(truth_density, q_pred, grid)
    if dataset.truth.beta is not None:
        beta_cols = report.chain.cols_with_prefix("beta")
        means = np.array(
            [
                np.mean(np.concatenate([c.col(nm) for c in report.chains]))
                for nm in beta_cols
            ]
        )
        fit.error = diagnostics.beta_error(means, dataset.truth.beta)
        fit.ci = {
            nm: diagnostics.credible_interval(
                np.concatenate([c.col(nm) for c in report.chains])
            )
            for nm in beta_cols
        }
    report.fit = fit


def _run_one_backend(cfg: ExperimentConfig, dataset, backend: str) -> RunReport:
    report = RunReport(cfg=cfg, backend=backend)
    model = _build_model(cfg, dataset, backend)
    if backend == "nuts" and not model.has_gradient:
        report.skipped = True
        report.note = "no gradient available for this parameterization"
        return report
    t0 = time.perf_counter()
    if cfg.chains == 1:
        report.chains = [_chain_worker((cfg, dataset, backend, 0))]
    else:
        workers = cfg.max_workers or max(1, (os.cpu_count() or 2) - 1)
        workers = min(workers, cfg.chains)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            jobs = [(cfg, dataset, backend, i) for i in range(cfg.chains)]
            report.chains = list(pool.map(_chain_worker, jobs))
    report.wall_clock = time.perf_counter() - t0
    _diagnose(cfg, dataset, report)
    return report


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Run every requested backend on one shared dataset.

    Returns {backend: RunReport}.  If cfg.out is set, reports are also
    written there (report.csv + report.json + one chain CSV per backend).
    """
    dataset = make_dataset(cfg)
    reports = {}
    for backend in cfg.backends:
        reports[backend] = _run_one_backend(cfg, dataset, backend)
    if cfg.out is not None:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        emit_report(list(reports.values()), out / "report.csv", fmt="csv")
        emit_report(list(reports.values()), out / "report.json", fmt="json")
        for backend, rep in reports.items():
            for i, chain in enumerate(rep.chains):
                chain.to_csv(out / f"chain_{backend}_{i}.csv")
    return reports


def run_parallel_chains(cfg: ExperimentConfig) -> dict:
    """Alias of run_experiment for K >= 1 chains; kept for clarity at call sites."""
    return run_experiment(cfg)


def repeated_datasets(cfg: ExperimentConfig) -> dict:
    """Run the experiment on R independently generated datasets.

    Returns {"rows": [report-row dicts], "summary": {backend: stats}} where
    stats hold mean/sd/min/max of mean_E and N_it/t_s across datasets.
    If cfg.out is set, writes a long-format sweep.csv (one row per
    dataset x backend, histogram-ready) plus summary.json.
    """
    rows = []
    per_backend = {b: {"mean_E": [], "N_it_per_s": []} for b in cfg.backends}
    for r in range(cfg.repeats):
        sub = replace(cfg, seed=cfg.seed + r, repeats=1, out=None)
        reports = run_experiment(sub)
        for backend, rep in reports.items():
            rows.append(rep.row())
            if not rep.skipped:
                per_backend[backend]["mean_E"].append(rep.ess.mean_E)
                per_backend[backend]["N_it_per_s"].append(
                    rep.chain.n_iter / rep.t_s
                )
    summary = {}
    for backend, cols in per_backend.items():
        summary[backend] = {}
        for key, vals in cols.items():
            arr = np.asarray(vals, dtype=float)
            if arr.size == 0:
                continue
            summary[backend][key] = {
                "mean": float(arr.mean()),
                "sd": float(arr.std(ddof=1)) if arr.size > 1 else 0.0,
                "min": float(arr.min()),
                "max": float(arr.max()),
            }
    if cfg.out is not None:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        _write_rows_csv(rows, out / "sweep.csv")
        (out / "summary.json").write_text(json.dumps(summary, indent=2))
    return {"rows": rows, "summary": summary}


def _format_cell(val):
    if isinstance(val, float):
        return repr(val)
    return str(val)


def _write_rows_csv(rows, path):
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(REPORT_COLUMNS)
        for row in rows:
            writer.writerow([_format_cell(row[c]) for c in REPORT_COLUMNS])


def emit_report(reports, path, fmt="csv"):
    """Serialize RunReports (or prebuilt row dicts) to CSV or JSON."""
    if not reports:
        raise ValueError("no reports to emit")
    rows = [r.row() if isinstance(r, RunReport) else r for r in reports]
    path = Path(path)
    if fmt == "csv":
        _write_rows_csv(rows, path)
    elif fmt == "json":
        path.write_text(json.dumps(rows, indent=2, default=float))
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    return path
