"""Detection metrics, silhouette scoring, and the cross-paradigm gap."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from paraflow._kernels import cluster_dist_sums
from paraflow.detect.kmeans import kmeans_assignments, kmeans_fit

DEFAULT_SILHOUETTE_CAP = 5000
METRIC_NAMES = ("precision", "recall", "f1")


@dataclass(frozen=True)
class EvalMetrics:
    precision: float
    recall: float
    f1: float
    method: str = ""
    paradigm: str = ""
    silhouette: Optional[float] = None
    fit_time: float = 0.0
    predict_time: float = 0.0

    @property
    def total_time(self) -> float:
        return self.fit_time + self.predict_time


@dataclass(frozen=True)
class ParadigmGap:
    """Best-temporal minus best-structural, per metric; negative favors structural."""

    delta_precision: float
    delta_recall: float
    delta_f1: float
    best_temporal: dict[str, str]
    best_structural: dict[str, str]


def confusion_metrics(predictions: np.ndarray, labels: np.ndarray,
                      method: str = "", paradigm: str = "",
                      silhouette_value: Optional[float] = None,
                      fit_time: float = 0.0,
                      predict_time: float = 0.0) -> EvalMetrics:
    """Precision/recall/F1 with class 1 (attack) positive.

    Empty denominators yield 0 so reports stay total.
    """
    predictions = np.asarray(predictions)
    labels = np.asarray(labels)
    if predictions.shape != labels.shape:
        raise ValueError("predictions and labels must have equal length")
    for name, arr in (("predictions", predictions), ("labels", labels)):
        if arr.size and not np.isin(arr, (0, 1)).all():
            raise ValueError(f"{name} must contain only 0 or 1")
    tp = int(np.count_nonzero((predictions == 1) & (labels == 1)))
    fp = int(np.count_nonzero((predictions == 1) & (labels == 0)))
    fn = int(np.count_nonzero((predictions == 0) & (labels == 1)))
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return EvalMetrics(
        precision=precision, recall=recall, f1=f1,
        method=method, paradigm=paradigm, silhouette=silhouette_value,
        fit_time=fit_time, predict_time=predict_time,
    )


def silhouette(features: np.ndarray, assignments: np.ndarray,
               sample_cap: int = DEFAULT_SILHOUETTE_CAP, seed: int = 0) -> float:
    """Mean silhouette coefficient (b - a) / max(a, b) over euclidean distances.

    Above sample_cap points, a seeded uniform subset is scored against
    itself (documented approximation). Points in single-member clusters
    contribute 0.
    """
    x = np.ascontiguousarray(features, dtype=np.float64)
    assignments = np.ascontiguousarray(assignments, dtype=np.int64)
    if x.ndim != 2 or assignments.shape[0] != x.shape[0]:
        raise ValueError("assignments must have one entry per row")
    n = x.shape[0]
    if sample_cap < 2:
        raise ValueError("sample_cap must be >= 2")
    if n > sample_cap:
        rng = np.random.default_rng(seed)
        chosen = np.sort(rng.choice(n, size=sample_cap, replace=False))
        x = np.ascontiguousarray(x[chosen])
        assignments = assignments[chosen]
        n = sample_cap
    clusters = np.unique(assignments)
    if clusters.size < 2:
        raise ValueError("silhouette needs at least 2 clusters with members")
    compact = np.searchsorted(clusters, assignments)
    k = clusters.size
    dist_sums, counts = cluster_dist_sums(x, compact, k)
    values = np.zeros(n, dtype=np.float64)
    for i in range(n):
        own = compact[i]
        if counts[own] <= 1:
            continue  # single-member cluster: convention s = 0
        a = dist_sums[i, own] / (counts[own] - 1)
        b = np.inf
        for c in range(k):
            if c == own:
                continue
            mean_dist = dist_sums[i, c] / counts[c]
            if mean_dist < b:
                b = mean_dist
        denom = max(a, b)
        values[i] = (b - a) / denom if denom > 0.0 else 0.0
    return float(values.mean())


def silhouette_sweep(features: np.ndarray, k_range: Sequence[int] = range(2, 11),
                     sample_cap: int = DEFAULT_SILHOUETTE_CAP, seed: int = 0,
                     **kmeans_kwargs) -> list[tuple[int, float]]:
    """Silhouette score of a fresh KMeans fit for each cluster count."""
    x = np.ascontiguousarray(features, dtype=np.float64)
    ks = sorted(set(int(k) for k in k_range))
    if not ks or ks[0] < 2:
        raise ValueError("k_range must contain integers >= 2")
    if x.shape[0] < ks[-1]:
        raise ValueError(f"n={x.shape[0]} smaller than max K {ks[-1]}")
    if np.all(x == x[0]):
        raise ValueError("identical rows form a single effective cluster")
    streams = np.random.SeedSequence(seed).spawn(2 * len(ks))
    curve: list[tuple[int, float]] = []
    for pos, k in enumerate(ks):
        model = kmeans_fit(
            x, k=k, seed=int(streams[2 * pos].generate_state(1)[0]), **kmeans_kwargs
        )
        assignments = kmeans_assignments(model, x)
        score = silhouette(
            x, assignments, sample_cap=sample_cap,
            seed=int(streams[2 * pos + 1].generate_state(1)[0]),
        )
        curve.append((k, score))
    return curve


def _best(results: Sequence[EvalMetrics], metric: str) -> EvalMetrics:
    return max(results, key=lambda r: getattr(r, metric))


def paradigm_gap(temporal_results: Sequence[EvalMetrics],
                 structural_results: Sequence[EvalMetrics]) -> ParadigmGap:
    """Per-metric difference between the best temporal and best structural method."""
    if not temporal_results or not structural_results:
        raise ValueError("both result sets must be non-empty")
    deltas: dict[str, float] = {}
    best_t: dict[str, str] = {}
    best_s: dict[str, str] = {}
    for metric in METRIC_NAMES:
        top_t = _best(temporal_results, metric)
        top_s = _best(structural_results, metric)
        deltas[metric] = getattr(top_t, metric) - getattr(top_s, metric)
        best_t[metric] = top_t.method
        best_s[metric] = top_s.method
    return ParadigmGap(
        delta_precision=deltas["precision"],
        delta_recall=deltas["recall"],
        delta_f1=deltas["f1"],
        best_temporal=best_t,
        best_structural=best_s,
    )
