"""Seeded synthetic datasets with known temporal/structural properties.

These generators are the independent oracles for the test suite: AR(1)
columns have a known lag-1 autocorrelation, low-rank factor data has a
known eigenvalue profile, and two-cluster data has a known Bayes-optimal
separation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from paraflow.ingest import LabeledDataset

KIND_AR1 = "ar1"
KIND_LOWRANK = "lowrank"
KIND_TWO_CLUSTERS = "two-clusters"
KIND_WHITE = "white"
KINDS = (KIND_AR1, KIND_LOWRANK, KIND_TWO_CLUSTERS, KIND_WHITE)


@dataclass(frozen=True)
class SynthSpec:
    kind: str
    n: int
    p: int
    seed: int = 0
    phi: float = 0.0
    rank: int = 1
    noise_std: float = 0.0
    separation: float = 0.0
    attack_ratio: float = 0.5

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.n < 1 or self.p < 1:
            raise ValueError("n and p must be positive")


def _column_names(p: int) -> tuple[str, ...]:
    return tuple(f"x{j}" for j in range(p))


def gen_ar1(n: int, p: int, phi: float, seed: int = 0,
            name: str = "ar1") -> LabeledDataset:
    """Columns follow x_t = phi * x_{t-1} + e_t with N(0,1) innovations.

    Initialization is stationary (x_0 ~ N(0, 1/(1 - phi^2))) so the
    lag-1 autocorrelation of every column is phi without burn-in.
    """
    if not abs(phi) < 1.0:
        raise ValueError("phi must satisfy |phi| < 1")
    if n < 1 or p < 1:
        raise ValueError("n and p must be positive")
    rng = np.random.default_rng(seed)
    matrix = np.empty((n, p), dtype=np.float64)
    matrix[0] = rng.standard_normal(p) / np.sqrt(1.0 - phi * phi)
    innovations = rng.standard_normal((n - 1, p))
    for t in range(1, n):
        matrix[t] = phi * matrix[t - 1] + innovations[t - 1]
    return LabeledDataset(
        matrix=matrix,
        labels=np.zeros(n, dtype=np.int64),
        column_names=_column_names(p),
        name=name,
    )


def gen_lowrank(n: int, p: int, rank: int, noise_std: float, seed: int = 0,
                strengths: Optional[np.ndarray] = None,
                name: str = "lowrank") -> LabeledDataset:
    """Gaussian factor data X = F diag(s) L' + noise with orthonormal loadings.

    Default strengths descend rank..1 so the spectrum is well separated;
    pass equal strengths for an isotropic factor subspace.
    """
    if rank < 1 or rank > min(n, p):
        raise ValueError(f"rank must be in [1, {min(n, p)}]")
    if noise_std < 0.0:
        raise ValueError("noise_std must be >= 0")
    rng = np.random.default_rng(seed)
    loadings, _ = np.linalg.qr(rng.standard_normal((p, rank)))
    if strengths is None:
        strengths = np.arange(rank, 0, -1, dtype=np.float64)
    else:
        strengths = np.asarray(strengths, dtype=np.float64)
        if strengths.shape != (rank,):
            raise ValueError(f"strengths must have shape ({rank},)")
    factors = rng.standard_normal((n, rank))
    matrix = (factors * strengths) @ loadings.T
    if noise_std > 0.0:
        matrix = matrix + noise_std * rng.standard_normal((n, p))
    return LabeledDataset(
        matrix=matrix,
        labels=np.zeros(n, dtype=np.int64),
        column_names=_column_names(p),
        name=name,
    )


def gen_two_clusters(n: int, p: int, separation: float, attack_ratio: float,
                     seed: int = 0, name: str = "two-clusters",
                     return_permutation: bool = False):
    """Benign cluster at the origin, attack cluster `separation` away.

    Both clusters are isotropic unit-variance Gaussians; rows are
    shuffled (labels kept aligned). With return_permutation=True the
    applied permutation is returned alongside, so alignment through the
    shuffle is testable.
    """
    if separation < 0.0:
        raise ValueError("separation must be >= 0")
    if not 0.0 < attack_ratio < 1.0:
        raise ValueError("attack_ratio must be strictly inside (0, 1)")
    if n < 2 or p < 1:
        raise ValueError("need n >= 2 and p >= 1")
    rng = np.random.default_rng(seed)
    direction = rng.standard_normal(p)
    direction /= np.linalg.norm(direction)
    n_attack = min(max(int(round(n * attack_ratio)), 1), n - 1)
    matrix = rng.standard_normal((n, p))
    matrix[n - n_attack:] += separation * direction
    labels = np.zeros(n, dtype=np.int64)
    labels[n - n_attack:] = 1
    permutation = rng.permutation(n)
    dataset = LabeledDataset(
        matrix=matrix[permutation],
        labels=labels[permutation],
        column_names=_column_names(p),
        name=name,
    )
    if return_permutation:
        return dataset, permutation
    return dataset


def generate(spec: SynthSpec) -> LabeledDataset:
    """Build the dataset a SynthSpec describes."""
    if spec.kind == KIND_AR1:
        return gen_ar1(spec.n, spec.p, spec.phi, spec.seed, name=spec.kind)
    if spec.kind == KIND_WHITE:
        return gen_ar1(spec.n, spec.p, 0.0, spec.seed, name=spec.kind)
    if spec.kind == KIND_LOWRANK:
        return gen_lowrank(
            spec.n, spec.p, spec.rank, spec.noise_std, spec.seed, name=spec.kind
        )
    return gen_two_clusters(
        spec.n, spec.p, spec.separation, spec.attack_ratio, spec.seed,
        name=spec.kind,
    )
