"""Paradigm-aware unsupervised DDoS detection toolkit.

Decides whether temporal (rolling-statistics) or structural (PCA)
feature representations fit a traffic dataset before training, builds
both feature spaces, runs three unsupervised detectors, and reports the
cross-paradigm performance gap.
"""

from paraflow._kernels import ACTIVE_BACKEND
from paraflow.detect import (
    ContaminationEstimate,
    DetectionResult,
    IsolationForestModel,
    KMeansModel,
    OcsvmModel,
    compute_contamination,
    if_fit,
    if_predict,
    if_score,
    kmeans_detect,
    kmeans_fit,
    ocsvm_fit,
    ocsvm_predict,
)
from paraflow.evaluate import (
    EvalMetrics,
    ParadigmGap,
    confusion_metrics,
    paradigm_gap,
    silhouette,
    silhouette_sweep,
)
from paraflow.features import (
    FeatureMatrix,
    rolling_stats,
    structural_features,
    temporal_features,
)
from paraflow.ingest import (
    LabeledDataset,
    StandardizationParams,
    apply_standardizer,
    clean,
    fit_standardizer,
    load_binary,
    load_csv,
)
from paraflow.pipeline import RunConfig, run_pipeline
from paraflow.probes import (
    AcfProbeResult,
    ParadigmDecision,
    PcaModel,
    VarianceProbeResult,
    acf,
    acf_probe,
    aggregate_signal,
    decide_paradigm,
    fit_pca,
    project,
    variance_probe,
)
from paraflow.synth import SynthSpec, gen_ar1, gen_lowrank, gen_two_clusters, generate

__version__ = "0.1.0"

__all__ = [
    "ACTIVE_BACKEND",
    "AcfProbeResult",
    "ContaminationEstimate",
    "DetectionResult",
    "EvalMetrics",
    "FeatureMatrix",
    "IsolationForestModel",
    "KMeansModel",
    "LabeledDataset",
    "OcsvmModel",
    "ParadigmDecision",
    "ParadigmGap",
    "PcaModel",
    "RunConfig",
    "StandardizationParams",
    "SynthSpec",
    "VarianceProbeResult",
    "acf",
    "acf_probe",
    "aggregate_signal",
    "apply_standardizer",
    "clean",
    "compute_contamination",
    "confusion_metrics",
    "decide_paradigm",
    "fit_pca",
    "fit_standardizer",
    "gen_ar1",
    "gen_lowrank",
    "gen_two_clusters",
    "generate",
    "if_fit",
    "if_predict",
    "if_score",
    "kmeans_detect",
    "kmeans_fit",
    "load_binary",
    "load_csv",
    "ocsvm_fit",
    "ocsvm_predict",
    "paradigm_gap",
    "project",
    "rolling_stats",
    "run_pipeline",
    "silhouette",
    "silhouette_sweep",
    "structural_features",
    "temporal_features",
    "variance_probe",
]
