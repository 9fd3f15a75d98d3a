"""Isolation forest built on random partition trees.

Trees are stored as flat node arrays (split feature, threshold, child
indices, node size) so scoring can run in either kernel backend. All
randomness is pre-drawn from a numpy Generator and consumed in a fixed
DFS order inside the build kernel, which makes the forest identical
across backends and bit-identical across runs for a fixed seed.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from paraflow._kernels import build_tree, forest_path_sums

DEFAULT_N_TREES = 100
DEFAULT_SUBSAMPLE = 256


@dataclass
class IsolationForestModel:
    split_features: np.ndarray   # (n_trees, max_nodes) int64, -1 marks a leaf
    split_thresholds: np.ndarray
    left_children: np.ndarray
    right_children: np.ndarray
    node_sizes: np.ndarray
    node_counts: np.ndarray
    n_trees: int
    subsample_size: int          # effective per-tree sample count
    height_limit: int
    n_features: int
    fit_time: float = 0.0
    score_threshold: Optional[float] = None


def average_path_adjustment(m: int) -> float:
    """Expected extra path length below an m-point leaf: 2H(m-1) - 2(m-1)/m."""
    if m <= 1:
        return 0.0
    harmonic = sum(1.0 / k for k in range(1, m))
    return 2.0 * harmonic - 2.0 * (m - 1) / m


def _adjustment_table(max_size: int) -> np.ndarray:
    table = np.zeros(max_size + 1, dtype=np.float64)
    harmonic = 0.0
    for m in range(2, max_size + 1):
        harmonic += 1.0 / (m - 1)
        table[m] = 2.0 * harmonic - 2.0 * (m - 1) / m
    return table


def if_fit(features: np.ndarray, n_trees: int = DEFAULT_N_TREES,
           subsample: int = DEFAULT_SUBSAMPLE, seed: int = 0) -> IsolationForestModel:
    """Grow an ensemble of isolation trees on random subsamples.

    Each tree sees min(subsample, n) rows drawn without replacement;
    splits pick a random feature that is non-constant within the node
    and a uniform threshold strictly inside its range; growth stops at
    the ceil(log2(subsample)) height limit, single points, or nodes
    whose rows are all identical.
    """
    x = np.ascontiguousarray(features, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1:
        raise ValueError("features must be a non-empty 2-D matrix")
    if n_trees < 1:
        raise ValueError("n_trees must be >= 1")
    if subsample < 1:
        raise ValueError("subsample must be >= 1")
    start = time.perf_counter()
    n = x.shape[0]
    effective = min(subsample, n)
    height_limit = int(math.ceil(math.log2(effective))) if effective > 1 else 0
    max_nodes = 2 ** (height_limit + 1) + 1
    rng = np.random.default_rng(seed)
    feats = np.full((n_trees, max_nodes), -1, dtype=np.int64)
    thrs = np.zeros((n_trees, max_nodes), dtype=np.float64)
    lefts = np.full((n_trees, max_nodes), -1, dtype=np.int64)
    rights = np.full((n_trees, max_nodes), -1, dtype=np.int64)
    sizes = np.zeros((n_trees, max_nodes), dtype=np.int64)
    counts = np.zeros(n_trees, dtype=np.int64)
    for t in range(n_trees):
        rows = rng.choice(n, size=effective, replace=False)
        uniforms = rng.random(2 * max_nodes)
        counts[t], _ = build_tree(
            x[rows], uniforms, height_limit,
            feats[t], thrs[t], lefts[t], rights[t], sizes[t],
        )
    return IsolationForestModel(
        split_features=feats,
        split_thresholds=thrs,
        left_children=lefts,
        right_children=rights,
        node_sizes=sizes,
        node_counts=counts,
        n_trees=n_trees,
        subsample_size=effective,
        height_limit=height_limit,
        n_features=x.shape[1],
        fit_time=time.perf_counter() - start,
    )


def if_score(model: IsolationForestModel, features: np.ndarray) -> np.ndarray:
    """Anomaly score 2^(-E[h(x)] / c(subsample)), always inside (0, 1).

    h includes the average-path adjustment at truncated leaves. In the
    fully degenerate single-point-subsample case every score is 0.5.
    """
    x = np.ascontiguousarray(features, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != model.n_features:
        raise ValueError(
            f"features have {x.shape[1] if x.ndim == 2 else '?'} columns, "
            f"model was fit on {model.n_features}"
        )
    table = _adjustment_table(model.subsample_size)
    path_sum = forest_path_sums(
        x, model.split_features, model.split_thresholds,
        model.left_children, model.right_children, model.node_sizes, table,
    )
    normalizer = average_path_adjustment(model.subsample_size)
    if normalizer <= 0.0:
        return np.full(x.shape[0], 0.5)
    mean_path = path_sum / model.n_trees
    return np.power(2.0, -mean_path / normalizer)


def if_predict(model: IsolationForestModel, scores: np.ndarray,
               contamination: float) -> np.ndarray:
    """Flag the ceil(c * n) highest-scoring samples; ties go to lower indices."""
    scores = np.asarray(scores, dtype=np.float64)
    if not 0.0 <= contamination <= 1.0:
        raise ValueError("contamination must be in [0, 1]")
    n = scores.shape[0]
    flagged = int(math.ceil(contamination * n))
    predictions = np.zeros(n, dtype=np.int64)
    if flagged > 0:
        order = np.argsort(-scores, kind="stable")
        predictions[order[:flagged]] = 1
    return predictions


def score_cutoff(scores: np.ndarray, contamination: float) -> float:
    """Smallest score among the samples if_predict would flag."""
    scores = np.asarray(scores, dtype=np.float64)
    flagged = int(math.ceil(contamination * scores.shape[0]))
    if flagged <= 0:
        return float("inf")
    order = np.argsort(-scores, kind="stable")
    return float(scores[order[flagged - 1]])
