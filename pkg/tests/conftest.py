"""Shared fixtures.

The session-scoped warmup triggers numba JIT compilation (a one-time
environment cost) before any timed assertion runs.
"""

from __future__ import annotations

import numpy as np
import pytest

import paraflow
from paraflow import detect, evaluate


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((40, 4))
    paraflow.rolling_stats(x[:, 0], 4)
    model = detect.if_fit(x, n_trees=2, subsample=16, seed=0)
    detect.if_score(model, x)
    svm = detect.ocsvm_fit(x, train_size=30, nu=0.2)
    detect.ocsvm_predict(svm, x)
    km = detect.kmeans_fit(x, k=2, n_init=2, seed=0)
    asg = detect.kmeans_assignments(km, x)
    evaluate.silhouette(x, asg)
    yield
