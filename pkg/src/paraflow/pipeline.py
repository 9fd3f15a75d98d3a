"""End-to-end orchestration: ingest -> probes -> features -> detect -> report.

``run_pipeline`` executes the full benchmark grid (isolation forest in
both feature spaces, one-class SVM in the temporal space, KMeans in the
structural space) regardless of which branch the probes recommend; the
recommendation itself is recorded in the decision document. Reports are
assembled in memory and written in one pass so a failed stage leaves no
partial bundle behind.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from paraflow import detect, evaluate, features, ingest, probes
from paraflow._kernels import ACTIVE_BACKEND
from paraflow.detect.kmeans import kmeans_assignments

METHOD_IF_TEMP = "IF-Temp"
METHOD_IF_STR = "IF-Str"
METHOD_OCSVM_TEMP = "OCSVM-Temp"
METHOD_KMEANS_STR = "KMeans-Str"

STAGE_INGEST = "ingest"
STAGE_CLEAN = "clean"
STAGE_STANDARDIZE = "standardize"
STAGE_PROBE = "probe"
STAGE_FEATURES = "features"
STAGE_DETECT = "detect"
STAGE_EVALUATE = "evaluate"
STAGE_REPORT = "report"


class StageError(RuntimeError):
    """A pipeline stage failed; carries the stage name for diagnostics."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class RunConfig:
    input_path: Optional[Path] = None
    input_format: str = "csv"              # csv | binary
    sidecar: Optional[Path] = None
    label_column: str = "label"
    positive_values: tuple[str, ...] = ("1",)
    dataset_name: Optional[str] = None
    # probes
    acf_threshold: float = probes.DEFAULT_ACF_THRESHOLD
    variance_target: float = probes.DEFAULT_VARIANCE_TARGET
    component_budget: int = probes.DEFAULT_COMPONENT_BUDGET
    max_lag: int = probes.DEFAULT_MAX_LAG
    aggregation: str = "l2"
    force_both_probes: bool = False
    force_paradigm: Optional[str] = None
    # features
    windows: tuple[int, ...] = features.DEFAULT_WINDOWS
    structural_dims: int = 10
    # detectors
    n_trees: int = detect.iforest.DEFAULT_N_TREES
    subsample_size: int = detect.iforest.DEFAULT_SUBSAMPLE
    train_size: int = detect.ocsvm.DEFAULT_TRAIN_SIZE
    chunk_size: int = detect.ocsvm.DEFAULT_CHUNK
    ocsvm_tol: float = detect.ocsvm.DEFAULT_TOL
    kmeans_k: int = detect.kmeans.DEFAULT_K
    kmeans_n_init: int = detect.kmeans.DEFAULT_N_INIT
    kmeans_max_iter: int = detect.kmeans.DEFAULT_MAX_ITER
    kmeans_tol: float = detect.kmeans.DEFAULT_TOL
    # evaluation
    silhouette_cap: int = evaluate.DEFAULT_SILHOUETTE_CAP
    sweep_kmax: int = 10
    sweep_sample_cap: int = 20000
    # run
    seed: int = 0
    out_dir: Path = field(default_factory=lambda: Path("paraflow-out"))
    stable_times: bool = False


@dataclass
class ProbeReport:
    dataset_name: str
    n: int
    p: int
    decision: probes.ParadigmDecision   # probe-derived, invariants intact
    forced_branch: Optional[str]        # an override recorded alongside it
    acf_result: probes.AcfProbeResult
    variance_result: Optional[probes.VarianceProbeResult]
    cumulative_curve: np.ndarray
    config: RunConfig

    @property
    def forced(self) -> bool:
        return self.forced_branch is not None

    @property
    def branch_in_effect(self) -> str:
        return self.forced_branch or self.decision.branch

    @property
    def hybrid_in_effect(self) -> bool:
        return self.branch_in_effect == probes.HYBRID


@dataclass
class RunArtifacts:
    probe: ProbeReport
    metrics: list[evaluate.EvalMetrics]
    gap: evaluate.ParadigmGap
    sweep: list[tuple[int, float]]
    scatter: np.ndarray           # (n, 2) leading projection
    labels: np.ndarray
    contamination: detect.ContaminationEstimate


def _stage(stage: str):
    class _Guard:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and not isinstance(exc, StageError):
                raise StageError(stage, exc) from exc
            return False

    return _Guard()


def load_dataset(config: RunConfig) -> ingest.LabeledDataset:
    with _stage(STAGE_INGEST):
        if config.input_path is None:
            raise ValueError("no input path configured")
        if config.input_format == "csv":
            return ingest.load_csv(
                config.input_path, config.label_column,
                set(config.positive_values), name=config.dataset_name,
            )
        if config.input_format == "binary":
            if config.sidecar is None:
                raise ValueError("binary input needs a sidecar path")
            return ingest.load_binary(
                config.input_path, config.sidecar, name=config.dataset_name
            )
        raise ValueError(f"unknown input format {config.input_format!r}")


def _fit_probe_pca(std_matrix: np.ndarray, config: RunConfig) -> probes.PcaModel:
    n, p = std_matrix.shape
    wanted = max(config.structural_dims, config.component_budget)
    d = min(wanted, p, n - 1)
    model = probes.fit_pca(std_matrix, d)
    if d < config.structural_dims:
        warnings.warn(
            f"structural dimensions clamped from {config.structural_dims} "
            f"to {d} (p={p}, n={n})",
            RuntimeWarning,
        )
    return model


def probe_dataset(dataset: ingest.LabeledDataset,
                  config: RunConfig) -> tuple[ProbeReport, np.ndarray, probes.PcaModel]:
    """Clean, standardize and run the two probes; returns the report plus
    the standardized matrix and PCA model for downstream reuse."""
    with _stage(STAGE_CLEAN):
        cleaned = ingest.clean(dataset)
    with _stage(STAGE_STANDARDIZE):
        params = ingest.fit_standardizer(cleaned.matrix)
        std_matrix = ingest.apply_standardizer(cleaned.matrix, params)
    with _stage(STAGE_PROBE):
        signal = probes.aggregate_signal(std_matrix, mode=config.aggregation)
        max_lag = min(config.max_lag, signal.shape[0] - 1)
        acf_result = probes.acf_probe(signal, config.acf_threshold, max_lag)
        pca_model = _fit_probe_pca(std_matrix, config)
        variance_state: dict[str, Optional[probes.VarianceProbeResult]] = {"value": None}

        def supplier() -> probes.VarianceProbeResult:
            if variance_state["value"] is None:
                variance_state["value"] = probes.variance_probe(
                    pca_model, config.component_budget, config.variance_target
                )
            return variance_state["value"]

        if config.force_both_probes:
            supplier()
        decision = probes.decide_paradigm(acf_result, supplier)
        forced_branch = None
        if config.force_paradigm:
            forced_branch = config.force_paradigm.lower()
            if forced_branch not in (probes.TEMPORAL, probes.STRUCTURAL,
                                     probes.HYBRID):
                raise ValueError(f"unknown paradigm {config.force_paradigm!r}")
        cumulative = np.cumsum(pca_model.explained_variance_ratio)
        report = ProbeReport(
            dataset_name=dataset.name,
            n=dataset.n_samples,
            p=dataset.n_features,
            decision=decision,
            forced_branch=forced_branch,
            acf_result=acf_result,
            variance_result=variance_state["value"],
            cumulative_curve=cumulative,
            config=config,
        )
    return report, std_matrix, pca_model


def _geometry_seed(stream: np.random.SeedSequence) -> int:
    return int(stream.generate_state(1)[0])


def build_feature_spaces(std_matrix: np.ndarray, pca_model: probes.PcaModel,
                         config: RunConfig):
    """Both engineered feature spaces; a clamped structural dimension count
    is recorded in the provenance."""
    temporal = features.temporal_features(std_matrix, pca_model, config.windows)
    structural = features.structural_features(std_matrix, pca_model)
    if pca_model.n_components < config.structural_dims:
        structural.provenance["clamped_from"] = config.structural_dims
    return temporal, structural


def run_pipeline(dataset: ingest.LabeledDataset, config: RunConfig) -> RunArtifacts:
    probe_report, std_matrix, pca_model = probe_dataset(dataset, config)
    labels = dataset.labels

    with _stage(STAGE_FEATURES):
        temporal, structural = build_feature_spaces(std_matrix, pca_model, config)

    seeds = np.random.SeedSequence(config.seed).spawn(6)
    (s_if_temp, s_if_str, s_kmeans, s_silhouette, s_sweep, s_sweep_rows) = seeds

    with _stage(STAGE_DETECT):
        contamination = detect.compute_contamination(labels)
        c = contamination.clamped

        results: dict[str, detect.DetectionResult] = {}
        extras: dict[str, Optional[float]] = {}

        for method, matrix, stream in (
            (METHOD_IF_TEMP, temporal.matrix, s_if_temp),
            (METHOD_IF_STR, structural.matrix, s_if_str),
        ):
            model = detect.if_fit(
                matrix, config.n_trees, config.subsample_size,
                _geometry_seed(stream),
            )
            start = time.perf_counter()
            scores = detect.if_score(model, matrix)
            predictions = detect.if_predict(model, scores, c)
            predict_time = time.perf_counter() - start
            model.score_threshold = detect.score_cutoff(scores, c)
            results[method] = detect.DetectionResult(
                predictions=predictions, scores=scores,
                fit_time=model.fit_time, predict_time=predict_time,
            )
            extras[method] = None

        nu = min(c, 0.3)
        ocsvm_model = detect.ocsvm_fit(
            temporal.matrix, train_size=config.train_size, nu=nu,
            gamma_mode="scale", tol=config.ocsvm_tol,
        )
        results[METHOD_OCSVM_TEMP] = detect.ocsvm_predict(
            ocsvm_model, temporal.matrix, chunk=config.chunk_size
        )
        extras[METHOD_OCSVM_TEMP] = None

        kmeans_model = detect.kmeans_fit(
            structural.matrix, k=config.kmeans_k, n_init=config.kmeans_n_init,
            max_iter=config.kmeans_max_iter, tol=config.kmeans_tol,
            seed=_geometry_seed(s_kmeans),
        )
        results[METHOD_KMEANS_STR] = detect.kmeans_detect(
            kmeans_model, structural.matrix, labels
        )
        assignments = kmeans_assignments(kmeans_model, structural.matrix)
        extras[METHOD_KMEANS_STR] = evaluate.silhouette(
            structural.matrix, assignments,
            sample_cap=config.silhouette_cap,
            seed=_geometry_seed(s_silhouette),
        )

    with _stage(STAGE_EVALUATE):
        paradigm_of = {
            METHOD_IF_TEMP: probes.TEMPORAL,
            METHOD_OCSVM_TEMP: probes.TEMPORAL,
            METHOD_IF_STR: probes.STRUCTURAL,
            METHOD_KMEANS_STR: probes.STRUCTURAL,
        }
        metrics = [
            evaluate.confusion_metrics(
                results[m].predictions, labels,
                method=m, paradigm=paradigm_of[m],
                silhouette_value=extras[m],
                fit_time=results[m].fit_time,
                predict_time=results[m].predict_time,
            )
            for m in (METHOD_KMEANS_STR, METHOD_OCSVM_TEMP,
                      METHOD_IF_TEMP, METHOD_IF_STR)
        ]
        by_method = {m.method: m for m in metrics}
        gap = evaluate.paradigm_gap(
            [by_method[METHOD_IF_TEMP], by_method[METHOD_OCSVM_TEMP]],
            [by_method[METHOD_IF_STR], by_method[METHOD_KMEANS_STR]],
        )

        n = structural.matrix.shape[0]
        sweep_rows = structural.matrix
        if n > config.sweep_sample_cap:
            rng = np.random.default_rng(_geometry_seed(s_sweep_rows))
            chosen = np.sort(rng.choice(n, config.sweep_sample_cap, replace=False))
            sweep_rows = structural.matrix[chosen]
        k_top = min(config.sweep_kmax, sweep_rows.shape[0])
        sweep = evaluate.silhouette_sweep(
            sweep_rows, range(2, k_top + 1),
            sample_cap=config.silhouette_cap,
            seed=_geometry_seed(s_sweep),
            n_init=config.kmeans_n_init,
            max_iter=config.kmeans_max_iter,
            tol=config.kmeans_tol,
        )

        if pca_model.n_components >= 2:
            scatter = probes.project(pca_model, std_matrix, 2)
        else:
            lead = probes.project(pca_model, std_matrix, 1)
            scatter = np.column_stack([lead, np.zeros_like(lead)])

    return RunArtifacts(
        probe=probe_report,
        metrics=metrics,
        gap=gap,
        sweep=sweep,
        scatter=scatter,
        labels=labels,
        contamination=contamination,
    )


def _fmt_bool(value: bool) -> str:
    return "true" if value else "false"


def _kv_lines(pairs: list[tuple[str, str]]) -> str:
    return "".join(f"{key} = {value}\n" for key, value in pairs)


def render_probe_report(report: ProbeReport) -> str:
    cfg = report.config
    acf_curve = ",".join(f"{v:.9g}" for v in report.acf_result.acf)
    var_curve = ",".join(f"{v:.9g}" for v in report.cumulative_curve)
    pairs = [
        ("dataset", report.dataset_name),
        ("n", str(report.n)),
        ("p", str(report.p)),
        ("backend", ACTIVE_BACKEND),
        ("aggregation", cfg.aggregation),
        ("acf_threshold", f"{report.acf_result.threshold:.6f}"),
        ("lag1_acf", f"{report.acf_result.lag1:.6f}"),
        ("acf_verdict", _fmt_bool(report.acf_result.verdict)),
        ("component_budget", str(cfg.component_budget)),
        ("variance_target", f"{cfg.variance_target:.6f}"),
    ]
    if report.variance_result is not None:
        pairs += [
            ("cumulative_at_budget", f"{report.variance_result.cumulative_at_k:.6f}"),
            ("variance_verdict", _fmt_bool(report.variance_result.verdict)),
        ]
    else:
        pairs += [
            ("cumulative_at_budget", "not evaluated"),
            ("variance_verdict", "not evaluated"),
        ]
    pairs += [
        ("decision", report.branch_in_effect),
        ("forced", _fmt_bool(report.forced)),
        ("hybrid_unvalidated", _fmt_bool(report.hybrid_in_effect)),
    ]
    if report.hybrid_in_effect:
        pairs.append(("note", "hybrid branch is an unvalidated fallback"))
    pairs += [
        ("acf_curve", acf_curve),
        ("cumulative_variance_curve", var_curve),
    ]
    return _kv_lines(pairs)


def render_bundle(artifacts: RunArtifacts, config: RunConfig) -> dict[str, str]:
    """Bundle contents as {relative path: text}, in a fixed order."""
    with _stage(STAGE_REPORT):
        files: dict[str, str] = {}

        rows = sorted(artifacts.metrics, key=lambda m: (-m.f1, m.method))
        lines = ["method,paradigm,precision,recall,f1,time"]
        for m in rows:
            seconds = 0.0 if config.stable_times else m.total_time
            lines.append(
                f"{m.method},{m.paradigm},{m.precision:.3f},{m.recall:.3f},"
                f"{m.f1:.3f},{seconds:.2f}"
            )
        files["report.csv"] = "\n".join(lines) + "\n"

        blocks = []
        for m in rows:
            seconds = 0.0 if config.stable_times else m.total_time
            pairs = [
                ("method", m.method),
                ("paradigm", m.paradigm),
                ("precision", f"{m.precision:.6f}"),
                ("recall", f"{m.recall:.6f}"),
                ("f1", f"{m.f1:.6f}"),
                ("time", f"{seconds:.2f}"),
            ]
            if m.silhouette is not None:
                pairs.insert(5, ("silhouette", f"{m.silhouette:.6f}"))
            blocks.append(_kv_lines(pairs))
        files["report.txt"] = "\n".join(blocks)

        gap = artifacts.gap
        lines = ["metric,delta,best_temporal,best_structural"]
        for metric, delta in (
            ("precision", gap.delta_precision),
            ("recall", gap.delta_recall),
            ("f1", gap.delta_f1),
        ):
            lines.append(
                f"{metric},{delta:.6f},{gap.best_temporal[metric]},"
                f"{gap.best_structural[metric]}"
            )
        files["gap.csv"] = "\n".join(lines) + "\n"

        decision_pairs = [
            ("dataset", artifacts.probe.dataset_name),
            ("n", str(artifacts.probe.n)),
            ("p", str(artifacts.probe.p)),
            ("backend", ACTIVE_BACKEND),
            ("decision", artifacts.probe.branch_in_effect),
            ("forced", _fmt_bool(artifacts.probe.forced)),
            ("hybrid_unvalidated", _fmt_bool(artifacts.probe.hybrid_in_effect)),
            ("aggregation", config.aggregation),
            ("lag1_acf", f"{artifacts.probe.acf_result.lag1:.6f}"),
            ("acf_threshold", f"{artifacts.probe.acf_result.threshold:.6f}"),
            ("acf_verdict", _fmt_bool(artifacts.probe.acf_result.verdict)),
            ("component_budget", str(config.component_budget)),
            ("variance_target", f"{config.variance_target:.6f}"),
        ]
        if artifacts.probe.variance_result is not None:
            decision_pairs += [
                ("cumulative_at_budget",
                 f"{artifacts.probe.variance_result.cumulative_at_k:.6f}"),
                ("variance_verdict",
                 _fmt_bool(artifacts.probe.variance_result.verdict)),
            ]
        else:
            decision_pairs += [
                ("cumulative_at_budget", "not evaluated"),
                ("variance_verdict", "not evaluated"),
            ]
        if artifacts.probe.hybrid_in_effect:
            decision_pairs.append(
                ("note", "hybrid branch is an unvalidated fallback; "
                         "both feature spaces were evaluated")
            )
        decision_pairs += [
            ("contamination_raw", f"{artifacts.contamination.raw_ratio:.6f}"),
            ("contamination", f"{artifacts.contamination.clamped:.6f}"),
            ("seed", str(config.seed)),
        ]
        files["decision.txt"] = _kv_lines(decision_pairs)

        acf_curve = artifacts.probe.acf_result.acf
        lines = ["lag,acf"]
        lines += [f"{lag},{value:.6f}" for lag, value in enumerate(acf_curve)]
        files["plots/acf_curve.csv"] = "\n".join(lines) + "\n"

        lines = ["component,cumulative_ratio"]
        lines += [
            f"{j + 1},{value:.6f}"
            for j, value in enumerate(artifacts.probe.cumulative_curve)
        ]
        files["plots/cumulative_variance.csv"] = "\n".join(lines) + "\n"

        lines = ["k,silhouette"]
        lines += [f"{k},{score:.6f}" for k, score in artifacts.sweep]
        files["plots/silhouette_sweep.csv"] = "\n".join(lines) + "\n"

        lines = ["method,paradigm,precision,recall,f1"]
        lines += [
            f"{m.method},{m.paradigm},{m.precision:.6f},{m.recall:.6f},{m.f1:.6f}"
            for m in rows
        ]
        files["plots/metric_bars.csv"] = "\n".join(lines) + "\n"

        lines = ["pc1,pc2,label"]
        lines += [
            f"{artifacts.scatter[i, 0]:.6f},{artifacts.scatter[i, 1]:.6f},"
            f"{artifacts.labels[i]}"
            for i in range(artifacts.scatter.shape[0])
        ]
        files["plots/pca_scatter.csv"] = "\n".join(lines) + "\n"

        return files


def write_bundle(files: dict[str, str], out_dir: Path) -> list[Path]:
    """Write all bundle files; on failure, remove whatever was written."""
    out_dir = Path(out_dir)
    written: list[Path] = []
    try:
        for rel, content in files.items():
            target = out_dir / rel
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(content, encoding="utf-8")
            written.append(target)
    except Exception:
        for path in written:
            path.unlink(missing_ok=True)
        raise
    return written


def run_and_write(dataset: ingest.LabeledDataset, config: RunConfig) -> RunArtifacts:
    artifacts = run_pipeline(dataset, config)
    files = render_bundle(artifacts, config)
    write_bundle(files, config.out_dir)
    return artifacts
