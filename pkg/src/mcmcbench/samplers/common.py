"""Sampler configuration and chain storage shared by all backends."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

BACKENDS = ("rwmh", "gibbs", "nuts")


@dataclass
class SamplerConfig:
    backend: str = "nuts"
    n_iter: int = 11000
    n_burn: int = 1000
    n_thin: int = 2
    seed: int = 0
    # adaptation knobs, frozen after burn-in
    rwmh_target_accept_scalar: float = 0.44
    rwmh_target_accept_block: float = 0.234
    nuts_target_accept: float = 0.8
    nuts_max_tree_depth: int = 10
    slice_width: float = 1.0
    slice_max_doublings: int = 30

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise ValueError(f"backend must be one of {BACKENDS}")
        if self.n_burn >= self.n_iter:
            raise ValueError("n_burn must be smaller than n_iter")
        if self.n_thin < 1 or (self.n_iter - self.n_burn) % self.n_thin != 0:
            raise ValueError("n_thin must divide (n_iter - n_burn)")

    @property
    def n_samples(self) -> int:
        return (self.n_iter - self.n_burn) // self.n_thin

    def keep(self, iteration: int) -> bool:
        """Retention rule for 1-based iteration numbers."""
        past = iteration - self.n_burn
        return past > 0 and past % self.n_thin == 0


@dataclass
class Chain:
    samples: np.ndarray  # (N_s, dim), constrained scale
    names: list[str]
    backend: str
    seed: int
    n_iter: int
    n_burn: int
    n_thin: int
    t_s: float
    constrained: bool = True
    stats: dict = field(default_factory=dict)

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    @property
    def n_it_per_s(self) -> float:
        return self.n_iter / self.t_s

    def col(self, name: str) -> np.ndarray:
        return self.samples[:, self.names.index(name)]

    def cols_with_prefix(self, prefix: str) -> list[str]:
        exact = [nm for nm in self.names if nm == prefix]
        return exact or [nm for nm in self.names if nm.startswith(prefix + "[")]

    def metadata(self) -> dict:
        return {
            "backend": self.backend,
            "seed": self.seed,
            "n_iter": self.n_iter,
            "n_burn": self.n_burn,
            "n_thin": self.n_thin,
            "n_samples": self.n_samples,
            "t_s": self.t_s,
            "constrained": self.constrained,
            "stats": self.stats,
        }

    def to_csv(self, path) -> None:
        """One retained draw per row, plus a metadata JSON sidecar."""
        path = Path(path)
        header = ",".join(self.names)
        np.savetxt(path, self.samples, delimiter=",", header=header, comments="")
        sidecar = path.with_suffix(path.suffix + ".meta.json")
        sidecar.write_text(json.dumps(self.metadata(), indent=2, default=float))


def chain_rng(seed: int, chain_index: int = 0) -> np.random.Generator:
    """Deterministic per-chain stream derived from the base seed."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chain_index,)))
