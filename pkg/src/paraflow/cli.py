"""Command-line interface.

Subcommands: probe (diagnostics + routing decision), run (full benchmark
bundle), synth (dataset generation), features (feature-matrix dump) and
eval (metrics from prediction files). Option precedence is defaults <
config file < explicit flags; PARAFLOW_OUTPUT_DIR sets the default
output directory.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import fields
from pathlib import Path

import numpy as np

from paraflow import evaluate, ingest, pipeline, synth
from paraflow.pipeline import RunConfig, StageError

OUTPUT_DIR_ENV = "PARAFLOW_OUTPUT_DIR"


def _default_out_dir() -> Path:
    return Path(os.environ.get(OUTPUT_DIR_ENV, "paraflow-out"))


def _parse_config_file(path: Path) -> dict[str, str]:
    if not path.is_file():
        raise FileNotFoundError(f"no such config file: {path}")
    entries: dict[str, str] = {}
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"{path}: malformed config line {raw!r}")
        entries[key.strip().lower().replace("-", "_")] = value.strip()
    return entries


_BOOL_FIELDS = {"force_both_probes", "stable_times"}
_TUPLE_INT_FIELDS = {"windows"}
_TUPLE_STR_FIELDS = {"positive_values"}
_PATH_FIELDS = {"input_path", "sidecar", "out_dir"}


def _coerce(name: str, value: str, target_type):
    if name in _BOOL_FIELDS:
        return value.strip().lower() in ("1", "true", "yes", "on")
    if name in _TUPLE_INT_FIELDS:
        return tuple(int(tok) for tok in value.split(",") if tok.strip())
    if name in _TUPLE_STR_FIELDS:
        return tuple(tok.strip() for tok in value.split(",") if tok.strip())
    if name in _PATH_FIELDS:
        return Path(value)
    return target_type(value)


def build_config(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, config-file entries and explicit CLI flags."""
    config = RunConfig(out_dir=_default_out_dir())
    valid = {f.name: f.type for f in fields(RunConfig)}
    if getattr(args, "config", None):
        for key, raw in _parse_config_file(Path(args.config)).items():
            if key not in valid:
                raise ValueError(f"unknown config key {key!r}")
            current = getattr(config, key)
            target_type = type(current) if current is not None else str
            setattr(config, key, _coerce(key, raw, target_type))
    for key in valid:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            setattr(config, key, flag_value)
    return config


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None,
                        help="flat key=value config file; flags win over it")
    parser.add_argument("--input", dest="input_path", type=Path, default=None)
    parser.add_argument("--format", dest="input_format",
                        choices=["csv", "binary"], default=None)
    parser.add_argument("--sidecar", type=Path, default=None,
                        help="sidecar file for binary input")
    parser.add_argument("--label-column", dest="label_column", default=None)
    parser.add_argument("--positive-values", dest="positive_values", default=None,
                        type=lambda s: tuple(tok.strip() for tok in s.split(",")),
                        help="comma-separated label strings marking attacks")
    parser.add_argument("--name", dest="dataset_name", default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", dest="out_dir", type=Path, default=None)
    parser.add_argument("--acf-threshold", dest="acf_threshold",
                        type=float, default=None)
    parser.add_argument("--variance-target", dest="variance_target",
                        type=float, default=None)
    parser.add_argument("--component-budget", dest="component_budget",
                        type=int, default=None)
    parser.add_argument("--max-lag", dest="max_lag", type=int, default=None)
    parser.add_argument("--aggregation", choices=["l2", "sum"], default=None)
    parser.add_argument("--windows", default=None,
                        type=lambda s: tuple(int(tok) for tok in s.split(",")),
                        help="comma-separated rolling window sizes")
    parser.add_argument("--structural-dims", dest="structural_dims",
                        type=int, default=None)
    parser.add_argument("--n-trees", dest="n_trees", type=int, default=None)
    parser.add_argument("--subsample-size", dest="subsample_size",
                        type=int, default=None)
    parser.add_argument("--train-size", dest="train_size", type=int, default=None)
    parser.add_argument("--chunk-size", dest="chunk_size", type=int, default=None)
    parser.add_argument("--k", dest="kmeans_k", type=int, default=None)
    parser.add_argument("--n-init", dest="kmeans_n_init", type=int, default=None)
    parser.add_argument("--silhouette-cap", dest="silhouette_cap",
                        type=int, default=None)
    parser.add_argument("--sweep-kmax", dest="sweep_kmax", type=int, default=None)
    parser.add_argument("--sweep-cap", dest="sweep_sample_cap",
                        type=int, default=None)
    parser.add_argument("--force-both-probes", dest="force_both_probes",
                        action=argparse.BooleanOptionalAction, default=None)
    parser.add_argument("--force-paradigm", dest="force_paradigm",
                        choices=["temporal", "structural", "hybrid"], default=None)
    parser.add_argument("--stable-times", dest="stable_times",
                        action=argparse.BooleanOptionalAction, default=None,
                        help="report 0.00 in the time column for "
                             "byte-reproducible bundles")


def cmd_probe(args: argparse.Namespace) -> int:
    config = build_config(args)
    dataset = pipeline.load_dataset(config)
    report, _, _ = pipeline.probe_dataset(dataset, config)
    text = pipeline.render_probe_report(report)
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "probe.txt").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    config = build_config(args)
    dataset = pipeline.load_dataset(config)
    artifacts = pipeline.run_and_write(dataset, config)
    label = artifacts.probe.branch_in_effect
    if artifacts.probe.hybrid_in_effect:
        label += " (unvalidated fallback)"
    if artifacts.probe.forced:
        label += " [forced]"
    sys.stdout.write(f"decision: {label}\n")
    for m in sorted(artifacts.metrics, key=lambda m: (-m.f1, m.method)):
        sys.stdout.write(
            f"{m.method}: precision={m.precision:.3f} recall={m.recall:.3f} "
            f"f1={m.f1:.3f}\n"
        )
    sys.stdout.write(f"gap_f1: {artifacts.gap.delta_f1:+.3f}\n")
    sys.stdout.write(f"bundle: {config.out_dir}\n")
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    spec = synth.SynthSpec(
        kind=args.kind, n=args.n, p=args.p, seed=args.seed,
        phi=args.phi, rank=args.rank, noise_std=args.noise_std,
        separation=args.separation, attack_ratio=args.attack_ratio,
    )
    dataset = synth.generate(spec)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    header = ",".join(dataset.column_names + ("label",))
    lines = [header]
    for i in range(dataset.n_samples):
        row = ",".join(f"{v:.9g}" for v in dataset.matrix[i])
        lines.append(f"{row},{dataset.labels[i]}")
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    meta_pairs = [
        ("kind", spec.kind), ("n", str(spec.n)), ("p", str(spec.p)),
        ("seed", str(spec.seed)), ("phi", f"{spec.phi:.9g}"),
        ("rank", str(spec.rank)), ("noise_std", f"{spec.noise_std:.9g}"),
        ("separation", f"{spec.separation:.9g}"),
        ("attack_ratio", f"{spec.attack_ratio:.9g}"),
        ("label_column", "label"), ("positive_values", "1"),
    ]
    sidecar = out.with_suffix(out.suffix + ".meta.txt")
    sidecar.write_text(
        "".join(f"{k} = {v}\n" for k, v in meta_pairs), encoding="utf-8"
    )
    sys.stdout.write(f"wrote {out} ({dataset.n_samples} rows) and {sidecar}\n")
    return 0


def cmd_features(args: argparse.Namespace) -> int:
    config = build_config(args)
    dataset = pipeline.load_dataset(config)
    _, std_matrix, pca_model = pipeline.probe_dataset(dataset, config)
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    wanted = args.paradigm
    from paraflow import features as feature_mod

    def dump(fm, path: Path) -> None:
        lines = [",".join(fm.feature_names + ("label",))]
        for i in range(fm.n_samples):
            row = ",".join(f"{v:.9g}" for v in fm.matrix[i])
            lines.append(f"{row},{dataset.labels[i]}")
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        sys.stdout.write(f"wrote {path}\n")

    if wanted in ("temporal", "both"):
        fm = feature_mod.temporal_features(std_matrix, pca_model, config.windows)
        dump(fm, out_dir / "features_temporal.csv")
    if wanted in ("structural", "both"):
        fm = feature_mod.structural_features(std_matrix, pca_model)
        dump(fm, out_dir / "features_structural.csv")
    return 0


def _read_binary_column(path: Path) -> np.ndarray:
    values: list[int] = []
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line:
            continue
        token = line.split(",")[0].strip()
        try:
            values.append(int(float(token)))
        except ValueError:
            continue  # header line
    if not values:
        raise ValueError(f"{path}: no 0/1 values found")
    return np.asarray(values, dtype=np.int64)


def cmd_eval(args: argparse.Namespace) -> int:
    predictions = _read_binary_column(Path(args.predictions))
    labels = _read_binary_column(Path(args.labels))
    metrics = evaluate.confusion_metrics(predictions, labels)
    text = (
        f"n = {predictions.shape[0]}\n"
        f"precision = {metrics.precision:.6f}\n"
        f"recall = {metrics.recall:.6f}\n"
        f"f1 = {metrics.f1:.6f}\n"
    )
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paraflow",
        description="Temporal-vs-structural paradigm selection and "
                    "unsupervised DDoS detection",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_probe = sub.add_parser("probe", help="run the two probes and report a decision")
    _add_run_options(p_probe)
    p_probe.set_defaults(handler=cmd_probe)

    p_run = sub.add_parser("run", help="run the full detection benchmark")
    _add_run_options(p_run)
    p_run.set_defaults(handler=cmd_run)

    p_synth = sub.add_parser("synth", help="generate a synthetic dataset CSV")
    p_synth.add_argument("--kind", choices=list(synth.KINDS), required=True)
    p_synth.add_argument("--n", type=int, required=True)
    p_synth.add_argument("--p", type=int, required=True)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--phi", type=float, default=0.0)
    p_synth.add_argument("--rank", type=int, default=1)
    p_synth.add_argument("--noise-std", dest="noise_std", type=float, default=0.0)
    p_synth.add_argument("--separation", type=float, default=0.0)
    p_synth.add_argument("--attack-ratio", dest="attack_ratio",
                         type=float, default=0.5)
    p_synth.add_argument("--out", type=Path, required=True)
    p_synth.set_defaults(handler=cmd_synth)

    p_feat = sub.add_parser("features", help="dump feature matrices as CSV")
    _add_run_options(p_feat)
    p_feat.add_argument("--paradigm", choices=["temporal", "structural", "both"],
                        default="both")
    p_feat.set_defaults(handler=cmd_features)

    p_eval = sub.add_parser("eval", help="metrics from prediction/label files")
    p_eval.add_argument("--predictions", required=True)
    p_eval.add_argument("--labels", required=True)
    p_eval.add_argument("--out", default=None)
    p_eval.set_defaults(handler=cmd_eval)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except StageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except (OSError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
