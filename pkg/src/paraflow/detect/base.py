"""Shared detection types and the contamination clamp."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

CONTAMINATION_FLOOR = 0.01
CONTAMINATION_CEIL = 0.35


@dataclass(frozen=True)
class ContaminationEstimate:
    """Attack-label fraction with the evaluation-time clamp applied."""

    raw_ratio: float
    clamped: float


@dataclass(frozen=True)
class DetectionResult:
    """Binary predictions plus raw anomaly scores (higher = more anomalous)."""

    predictions: np.ndarray
    scores: np.ndarray
    fit_time: float
    predict_time: float


def compute_contamination(labels: np.ndarray) -> ContaminationEstimate:
    """Clamp the observed attack ratio into [0.01, 0.35].

    Uses label information, so this is benchmark calibration, not a
    deployment setting.
    """
    labels = np.asarray(labels)
    if labels.size == 0:
        raise ValueError("labels must be non-empty")
    raw = float(np.count_nonzero(labels == 1)) / labels.size
    clamped = min(max(raw, CONTAMINATION_FLOOR), CONTAMINATION_CEIL)
    return ContaminationEstimate(raw_ratio=raw, clamped=clamped)
