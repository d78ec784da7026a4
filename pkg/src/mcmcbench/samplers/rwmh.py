"""Random-walk Metropolis-Hastings with per-block Gaussian proposals.

Proposal scales are adapted on the log scale toward the optimal-scaling
acceptance targets (0.44 for scalar blocks, 0.234 for multivariate ones)
during burn-in only, then frozen.  Latent-allocation models interleave
an exact categorical update of the allocations with the random-walk
updates of the continuous blocks.
"""

from __future__ import annotations

import math
import time

import numpy as np

from .common import Chain, SamplerConfig, chain_rng

SCALE_FLOOR = 1e-8


def run_rwmh(model, cfg: SamplerConfig, rng: np.random.Generator | None = None) -> Chain:
    if rng is None:
        rng = chain_rng(cfg.seed)
    u = model.initial_u().copy()
    latent = model.is_latent
    z = model.initial_z(model.space.constrain(u)) if latent else None

    block_names = model.rw_block_names()
    slices = {nm: model.space.u_slice(nm) for nm in block_names}
    sizes = {nm: sl.stop - sl.start for nm, sl in slices.items()}
    log_scale = {nm: math.log(0.5) for nm in block_names}
    targets = {
        nm: (
            cfg.rwmh_target_accept_scalar
            if sizes[nm] == 1
            else cfg.rwmh_target_accept_block
        )
        for nm in block_names
    }
    accept_count = {nm: 0 for nm in block_names}
    post_burn_proposals = 0

    def logp(uu, zz):
        return model.log_posterior_u(uu, zz) if latent else model.log_posterior_u(uu)

    current = logp(u, z)
    rows = np.empty((cfg.n_samples, model.space.constrained_dim))
    row = 0
    t0 = time.perf_counter()
    for it in range(1, cfg.n_iter + 1):
        if latent:
            z = model.resample_latent(model.space.constrain(u), rng)
            current = logp(u, z)
        for nm in block_names:
            sl = slices[nm]
            prop = u.copy()
            prop[sl] = u[sl] + math.exp(log_scale[nm]) * rng.standard_normal(sizes[nm])
            prop_lp = logp(prop, z)
            log_alpha = prop_lp - current
            accepted = log_alpha >= 0 or rng.random() < math.exp(log_alpha)
            if accepted:
                u = prop
                current = prop_lp
            if it <= cfg.n_burn:
                alpha = min(1.0, math.exp(min(0.0, log_alpha)))
                step = it ** -0.6
                log_scale[nm] += step * (alpha - targets[nm])
                log_scale[nm] = max(log_scale[nm], math.log(SCALE_FLOOR))
            else:
                accept_count[nm] += int(accepted)
        if it > cfg.n_burn:
            post_burn_proposals += 1
        if cfg.keep(it):
            rows[row] = model.space.flatten_constrained(model.space.constrain(u))
            row += 1
    t_s = time.perf_counter() - t0

    denom = max(post_burn_proposals, 1)
    stats = {
        "acceptance": {nm: accept_count[nm] / denom for nm in block_names},
        "proposal_scales": {nm: math.exp(s) for nm, s in log_scale.items()},
    }
    return Chain(
        samples=rows,
        names=model.space.names(),
        backend="rwmh",
        seed=cfg.seed,
        n_iter=cfg.n_iter,
        n_burn=cfg.n_burn,
        n_thin=cfg.n_thin,
        t_s=t_s,
        stats=stats,
    )
