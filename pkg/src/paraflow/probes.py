"""Pre-training diagnostics: lag-1 autocorrelation and PCA compressibility.

The two probes feed a three-way routing decision (temporal, structural,
or the unvalidated hybrid fallback). The variance probe is only
evaluated when the autocorrelation probe says no, so ``decide_paradigm``
takes it as a zero-argument callable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

TEMPORAL = "temporal"
STRUCTURAL = "structural"
HYBRID = "hybrid"

DEFAULT_ACF_THRESHOLD = 0.3
DEFAULT_MAX_LAG = 50
DEFAULT_COMPONENT_BUDGET = 5
DEFAULT_VARIANCE_TARGET = 0.95


@dataclass(frozen=True)
class AcfProbeResult:
    acf: np.ndarray
    lag1: float
    threshold: float
    verdict: bool


@dataclass(frozen=True)
class PcaModel:
    """Centered projection basis with per-component variance fractions.

    Basis columns are orthonormal, ordered by decreasing explained
    variance, and sign-fixed so each column's largest-magnitude entry is
    positive. ``explained_variance_ratio`` is relative to the total
    variance of all ``total_components_available`` directions, not just
    the retained ones.
    """

    mean: np.ndarray
    basis: np.ndarray
    explained_variance_ratio: np.ndarray
    total_components_available: int

    @property
    def n_components(self) -> int:
        return self.basis.shape[1]

    @property
    def n_features(self) -> int:
        return self.basis.shape[0]


@dataclass(frozen=True)
class VarianceProbeResult:
    k: int
    target: float
    cumulative_at_k: float
    verdict: bool


@dataclass(frozen=True)
class ParadigmDecision:
    branch: str
    acf_evidence: AcfProbeResult
    variance_evidence: Optional[VarianceProbeResult]
    hybrid_flag: bool


def aggregate_signal(std_matrix: np.ndarray, mode: str = "l2") -> np.ndarray:
    """Collapse each standardized row to one scalar (the flow signal).

    mode 'l2' is the per-row euclidean norm; 'sum' is the plain row sum.
    """
    std_matrix = np.asarray(std_matrix, dtype=np.float64)
    if std_matrix.ndim != 2 or std_matrix.shape[0] == 0:
        raise ValueError("need a non-empty 2-D matrix")
    if mode == "l2":
        return np.sqrt(np.einsum("ij,ij->i", std_matrix, std_matrix))
    if mode == "sum":
        return std_matrix.sum(axis=1)
    raise ValueError(f"unknown aggregation mode {mode!r}")


def acf(series: np.ndarray, max_lag: int) -> np.ndarray:
    """Biased sample autocorrelation for lags 0..max_lag.

    rho(k) = sum_i (x_i - xbar)(x_{i+k} - xbar) / sum_i (x_i - xbar)^2.
    """
    series = np.asarray(series, dtype=np.float64).ravel()
    n = series.shape[0]
    if max_lag < 0:
        raise ValueError("max_lag must be >= 0")
    if n <= max_lag:
        raise ValueError(f"series length {n} must exceed max_lag {max_lag}")
    if series.max() == series.min():
        raise ValueError("autocorrelation of a constant series is undefined")
    centered = series - series.mean()
    denom = float(centered @ centered)
    out = np.empty(max_lag + 1, dtype=np.float64)
    out[0] = denom / denom
    for k in range(1, max_lag + 1):
        out[k] = float(centered[:-k] @ centered[k:]) / denom
    return out


def acf_probe(series: np.ndarray, threshold: float = DEFAULT_ACF_THRESHOLD,
              max_lag: int = DEFAULT_MAX_LAG) -> AcfProbeResult:
    """Lag-1 autocorrelation test; the full curve is kept for reporting."""
    if max_lag < 1:
        raise ValueError("acf_probe needs max_lag >= 1")
    curve = acf(series, max_lag)
    lag1 = float(curve[1])
    return AcfProbeResult(
        acf=curve, lag1=lag1, threshold=float(threshold),
        verdict=bool(lag1 >= threshold),
    )


def fit_pca(std_matrix: np.ndarray, d: int) -> PcaModel:
    """Top-d principal directions of the sample covariance.

    Uses the p x p covariance eigendecomposition when p <= n, else the
    n x n gram matrix. Ratios are eigenvalue fractions of the total
    variance over all available directions.
    """
    x = np.asarray(std_matrix, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("matrix must be 2-D")
    n, p = x.shape
    if n < 2:
        raise ValueError("need at least 2 rows")
    available = min(n - 1, p)
    if not 1 <= d <= available:
        raise ValueError(f"d={d} out of range [1, {available}]")
    mean = x.mean(axis=0)
    centered = x - mean
    total_variance = float(np.einsum("ij,ij->", centered, centered)) / n
    if total_variance <= 0.0:
        raise ValueError("zero-variance matrix has no principal directions")
    if p <= n:
        cov = (centered.T @ centered) / n
        eigvals, eigvecs = np.linalg.eigh(cov)
        order = np.argsort(eigvals)[::-1][:d]
        variances = np.maximum(eigvals[order], 0.0)
        basis = eigvecs[:, order]
    else:
        gram = (centered @ centered.T) / n
        eigvals, eigvecs = np.linalg.eigh(gram)
        order = np.argsort(eigvals)[::-1][:d]
        variances = np.maximum(eigvals[order], 0.0)
        basis = centered.T @ eigvecs[:, order]
        norms = np.linalg.norm(basis, axis=0)
        norms[norms == 0.0] = 1.0
        basis = basis / norms
    for j in range(basis.shape[1]):
        lead = int(np.argmax(np.abs(basis[:, j])))
        if basis[lead, j] < 0:
            basis[:, j] = -basis[:, j]
    return PcaModel(
        mean=mean,
        basis=basis,
        explained_variance_ratio=variances / total_variance,
        total_components_available=available,
    )


def project(model: PcaModel, std_matrix: np.ndarray, k: int | None = None) -> np.ndarray:
    """Center rows on the model mean and project onto the first k components."""
    x = np.asarray(std_matrix, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != model.n_features:
        raise ValueError(
            f"matrix has {x.shape[1] if x.ndim == 2 else '?'} columns, "
            f"model expects {model.n_features}"
        )
    if k is None:
        k = model.n_components
    if not 1 <= k <= model.n_components:
        raise ValueError(f"k={k} out of range [1, {model.n_components}]")
    return (x - model.mean) @ model.basis[:, :k]


def reconstruct(model: PcaModel, projected: np.ndarray) -> np.ndarray:
    """Map projected coordinates back to the original feature space."""
    projected = np.asarray(projected, dtype=np.float64)
    k = projected.shape[1]
    return projected @ model.basis[:, :k].T + model.mean


def variance_probe(model: PcaModel, k: int = DEFAULT_COMPONENT_BUDGET,
                   target: float = DEFAULT_VARIANCE_TARGET) -> VarianceProbeResult:
    """Cumulative explained-variance test within a k-component budget.

    Models with fewer than k components count missing components as zero.
    """
    if k < 1:
        raise ValueError("component budget must be >= 1")
    take = min(k, model.n_components)
    cumulative = float(model.explained_variance_ratio[:take].sum())
    return VarianceProbeResult(
        k=k, target=float(target), cumulative_at_k=cumulative,
        verdict=bool(cumulative >= target),
    )


def decide_paradigm(
    acf_result: AcfProbeResult,
    variance_supplier: Callable[[], VarianceProbeResult],
) -> ParadigmDecision:
    """Route to temporal, structural or hybrid.

    The variance probe is only computed (the supplier only called) when
    the autocorrelation verdict is negative; the hybrid branch is an
    unvalidated fallback and is flagged as such.
    """
    if acf_result.verdict:
        return ParadigmDecision(
            branch=TEMPORAL, acf_evidence=acf_result,
            variance_evidence=None, hybrid_flag=False,
        )
    variance_result = variance_supplier()
    if variance_result.verdict:
        return ParadigmDecision(
            branch=STRUCTURAL, acf_evidence=acf_result,
            variance_evidence=variance_result, hybrid_flag=False,
        )
    return ParadigmDecision(
        branch=HYBRID, acf_evidence=acf_result,
        variance_evidence=variance_result, hybrid_flag=True,
    )
