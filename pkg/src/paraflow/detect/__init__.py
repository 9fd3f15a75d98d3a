"""Unsupervised detectors sharing one result shape."""

from paraflow.detect.base import (
    ContaminationEstimate,
    DetectionResult,
    compute_contamination,
)
from paraflow.detect.iforest import (
    IsolationForestModel,
    if_fit,
    if_predict,
    if_score,
    score_cutoff,
)
from paraflow.detect.kmeans import (
    KMeansModel,
    kmeans_assignments,
    kmeans_detect,
    kmeans_fit,
)
from paraflow.detect.ocsvm import (
    OcsvmModel,
    decision_function,
    ocsvm_fit,
    ocsvm_predict,
)

__all__ = [
    "ContaminationEstimate",
    "DetectionResult",
    "IsolationForestModel",
    "KMeansModel",
    "OcsvmModel",
    "compute_contamination",
    "decision_function",
    "if_fit",
    "if_predict",
    "if_score",
    "kmeans_assignments",
    "kmeans_detect",
    "kmeans_fit",
    "ocsvm_fit",
    "ocsvm_predict",
    "score_cutoff",
]
