"""Temporal (rolling-statistics) and structural (PCA) feature spaces.

Rolling windows are centered with half-width floor(w/2) on both sides
and truncated at the array bounds, so every output row stays aligned
with its input row and no label ever has to be dropped at an edge.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from paraflow._kernels import rolling_core
from paraflow.probes import STRUCTURAL, TEMPORAL, PcaModel, aggregate_signal, project

CV_EPSILON = 1e-8
DEFAULT_WINDOWS = (10, 30, 100)
STAT_NAMES = ("mean", "std", "max", "min", "diff", "cv")
N_BASE_SIGNALS = 6  # l2 norm + first five principal components


@dataclass(frozen=True)
class RollingStats:
    """Six per-sample series over one window size."""

    mean: np.ndarray
    std: np.ndarray
    max: np.ndarray
    min: np.ndarray
    diff: np.ndarray
    cv: np.ndarray

    def as_columns(self) -> tuple[np.ndarray, ...]:
        return (self.mean, self.std, self.max, self.min, self.diff, self.cv)


@dataclass(frozen=True)
class FeatureMatrix:
    matrix: np.ndarray
    feature_names: tuple[str, ...]
    paradigm: str
    provenance: dict

    @property
    def n_samples(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_features(self) -> int:
        return self.matrix.shape[1]


def rolling_stats(series: np.ndarray, window: int) -> RollingStats:
    """Rolling mean/std/max/min, mean difference, and coefficient of variation.

    The window centered at i covers indices [i - floor(w/2), i + floor(w/2)],
    truncated at the bounds. The difference series is the lag-1 difference
    of the rolling mean (0 at i=0). CV is std/|mean| where |mean| exceeds
    a small epsilon and 0 otherwise, so constant or zero-mean windows
    never divide by zero.
    """
    series = np.ascontiguousarray(series, dtype=np.float64).ravel()
    if window < 2:
        raise ValueError("window must be >= 2")
    if series.shape[0] == 0:
        raise ValueError("empty series")
    if not np.isfinite(series).all():
        raise ValueError("series must be finite")
    mean, std, mx, mn = rolling_core(series, window // 2)
    diff = np.empty_like(mean)
    diff[0] = 0.0
    diff[1:] = mean[1:] - mean[:-1]
    abs_mean = np.abs(mean)
    cv = np.divide(std, abs_mean, out=np.zeros_like(std), where=abs_mean > CV_EPSILON)
    return RollingStats(mean=mean, std=std, max=mx, min=mn, diff=diff, cv=cv)


def _base_signals(std_matrix: np.ndarray, pca5: PcaModel) -> tuple[list[str], list[np.ndarray]]:
    if pca5.n_components < 5:
        raise ValueError(
            f"temporal features need 5 principal components, model has {pca5.n_components}"
        )
    norms = aggregate_signal(std_matrix, mode="l2")
    pcs = project(pca5, std_matrix, 5)
    names = ["l2norm"] + [f"pc{j + 1}" for j in range(5)]
    signals = [norms] + [pcs[:, j] for j in range(5)]
    return names, signals


def temporal_features(std_matrix: np.ndarray, pca5: PcaModel,
                      windows: Sequence[int] = DEFAULT_WINDOWS) -> FeatureMatrix:
    """Rolling statistics of the 6 base signals over each window size.

    Base signals are the per-row l2 norm and the first five principal
    component series. Columns are ordered (window, signal, statistic),
    giving |windows| x 6 x 6 features (108 with the default windows).
    """
    std_matrix = np.asarray(std_matrix, dtype=np.float64)
    window_list = sorted(set(int(w) for w in windows))
    if not window_list:
        raise ValueError("need at least one window size")
    if min(window_list) < 2:
        raise ValueError("window sizes must be >= 2")
    n = std_matrix.shape[0]
    if n <= max(window_list):
        raise ValueError(
            f"n={n} too small for the largest window {max(window_list)}"
        )
    signal_names, signals = _base_signals(std_matrix, pca5)
    columns: list[np.ndarray] = []
    names: list[str] = []
    for w in window_list:
        for sig_name, sig in zip(signal_names, signals):
            stats = rolling_stats(sig, w)
            for stat_name, col in zip(STAT_NAMES, stats.as_columns()):
                names.append(f"w{w:03d}_{sig_name}_{stat_name}")
                columns.append(col)
    return FeatureMatrix(
        matrix=np.column_stack(columns),
        feature_names=tuple(names),
        paradigm=TEMPORAL,
        provenance={
            "windows": window_list,
            "base_signals": signal_names,
            "statistics": list(STAT_NAMES),
        },
    )


def structural_features(std_matrix: np.ndarray, pca10: PcaModel) -> FeatureMatrix:
    """Projection onto the model's principal components, one column each."""
    projected = project(pca10, std_matrix)
    d = pca10.n_components
    return FeatureMatrix(
        matrix=projected,
        feature_names=tuple(f"pc{j + 1}" for j in range(d)),
        paradigm=STRUCTURAL,
        provenance={"components": d},
    )
