"""KMeans (k-means++ init, Lloyd iterations) with majority-label mapping.

The clustering itself is unsupervised; ``kmeans_detect`` may map each
cluster to the majority ground-truth label of its members, which is an
evaluation-time convenience only.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from paraflow._kernels import kmeans_assign, kmeans_update
from paraflow.detect.base import DetectionResult

DEFAULT_K = 2
DEFAULT_N_INIT = 10
DEFAULT_MAX_ITER = 300
DEFAULT_TOL = 1e-4


@dataclass
class KMeansModel:
    centroids: np.ndarray
    k: int
    inertia: float
    inertia_history: list[float] = field(default_factory=list)
    n_iter: int = 0
    fit_time: float = 0.0
    cluster_to_label: Optional[np.ndarray] = None  # evaluation-only bookkeeping


def _kmeans_plus_plus(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """D^2-weighted seeding."""
    n = x.shape[0]
    centroids = np.empty((k, x.shape[1]), dtype=np.float64)
    first = int(rng.integers(n))
    centroids[0] = x[first]
    diff = x - centroids[0]
    d2 = np.einsum("ij,ij->i", diff, diff)
    for c in range(1, k):
        total = float(d2.sum())
        if total <= 0.0:
            # all remaining mass coincides with chosen centroids
            for extra in range(c, k):
                centroids[extra] = x[int(rng.integers(n))]
            break
        cum = np.cumsum(d2)
        pick = int(np.searchsorted(cum, rng.random() * total, side="right"))
        if pick >= n:
            pick = n - 1
        centroids[c] = x[pick]
        diff = x - centroids[c]
        np.minimum(d2, np.einsum("ij,ij->i", diff, diff), out=d2)
    return centroids


def _lloyd(x: np.ndarray, centroids: np.ndarray, max_iter: int,
           tol: float) -> tuple[np.ndarray, np.ndarray, float, list[float], int]:
    k = centroids.shape[0]
    history: list[float] = []
    labels = np.zeros(x.shape[0], dtype=np.int64)
    inertia = np.inf
    iteration = 0
    for iteration in range(1, max_iter + 1):
        labels, sqdists = kmeans_assign(x, centroids)
        inertia = float(sqdists.sum())
        history.append(inertia)
        sums, counts = kmeans_update(x, labels, k)
        new_centroids = centroids.copy()
        filled = counts > 0
        new_centroids[filled] = sums[filled] / counts[filled, None]
        empties = np.nonzero(~filled)[0]
        if empties.size:
            # reseed each empty cluster to the point farthest from its centroid
            far_order = np.argsort(-sqdists, kind="stable")
            for slot, cluster in enumerate(empties):
                new_centroids[cluster] = x[far_order[slot]]
        shift = float(np.sqrt(((new_centroids - centroids) ** 2).sum()))
        centroids = new_centroids
        if shift < tol and not empties.size:
            break
    labels, sqdists = kmeans_assign(x, centroids)
    inertia = float(sqdists.sum())
    history.append(inertia)
    return centroids, labels, inertia, history, iteration


def kmeans_fit(features: np.ndarray, k: int = DEFAULT_K,
               n_init: int = DEFAULT_N_INIT, max_iter: int = DEFAULT_MAX_ITER,
               tol: float = DEFAULT_TOL, seed: int = 0) -> KMeansModel:
    """Best of n_init k-means++ restarts by final inertia."""
    x = np.ascontiguousarray(features, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("features must be 2-D")
    if not 1 <= k <= x.shape[0]:
        raise ValueError(f"k={k} out of range [1, {x.shape[0]}]")
    if n_init < 1 or max_iter < 1:
        raise ValueError("n_init and max_iter must be >= 1")
    start = time.perf_counter()
    best: tuple[float, np.ndarray, list[float], int] | None = None
    streams = np.random.SeedSequence(seed).spawn(n_init)
    for stream in streams:
        rng = np.random.default_rng(stream)
        centroids = _kmeans_plus_plus(x, k, rng)
        centroids, _, inertia, history, n_iter = _lloyd(x, centroids, max_iter, tol)
        if best is None or inertia < best[0]:
            best = (inertia, centroids, history, n_iter)
    inertia, centroids, history, n_iter = best
    return KMeansModel(
        centroids=centroids,
        k=k,
        inertia=inertia,
        inertia_history=history,
        n_iter=n_iter,
        fit_time=time.perf_counter() - start,
    )


def kmeans_assignments(model: KMeansModel, features: np.ndarray) -> np.ndarray:
    """Nearest-centroid cluster index for each row."""
    x = np.ascontiguousarray(features, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != model.centroids.shape[1]:
        raise ValueError("feature dimension does not match the fitted centroids")
    labels, _ = kmeans_assign(x, model.centroids)
    return labels


def kmeans_detect(model: KMeansModel, features: np.ndarray,
                  labels: np.ndarray | None = None) -> DetectionResult:
    """Map clusters to their members' majority label and emit predictions.

    Without ground-truth labels the raw cluster assignments are returned
    as predictions. A tied or empty cluster maps to benign (0). Scores
    are each sample's distance to its own centroid.
    """
    x = np.ascontiguousarray(features, dtype=np.float64)
    start = time.perf_counter()
    assignments, sqdists = kmeans_assign(x, model.centroids)
    scores = np.sqrt(sqdists)
    if labels is None:
        predictions = assignments.copy()
    else:
        labels = np.asarray(labels)
        if labels.shape[0] != x.shape[0]:
            raise ValueError("labels length must match the number of rows")
        mapping = np.zeros(model.k, dtype=np.int64)
        for cluster in range(model.k):
            members = labels[assignments == cluster]
            if members.size and np.count_nonzero(members == 1) * 2 > members.size:
                mapping[cluster] = 1
        model.cluster_to_label = mapping
        predictions = mapping[assignments]
    return DetectionResult(
        predictions=predictions,
        scores=scores,
        fit_time=model.fit_time,
        predict_time=time.perf_counter() - start,
    )
