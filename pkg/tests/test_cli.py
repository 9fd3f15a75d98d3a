import numpy as np
import pytest

from paraflow import cli


def run_cli(*argv):
    return cli.main([str(a) for a in argv])


def synth_csv(tmp_path, kind="two-clusters", n=600, p=8, seed=3, **kw):
    out = tmp_path / "data.csv"
    argv = ["synth", "--kind", kind, "--n", n, "--p", p, "--seed", seed,
            "--out", out]
    for key, value in kw.items():
        argv += [f"--{key.replace('_', '-')}", value]
    assert run_cli(*argv) == 0
    return out


class TestSynthCommand:
    def test_writes_csv_and_sidecar(self, tmp_path):
        out = synth_csv(tmp_path, separation=8.0, attack_ratio=0.3)
        assert out.is_file()
        meta = out.parent / "data.csv.meta.txt"
        text = meta.read_text()
        assert "seed = 3" in text
        assert "kind = two-clusters" in text
        header = out.read_text().splitlines()[0]
        assert header.endswith(",label")

    def test_zero_rows_rejected(self, tmp_path, capsys):
        rc = run_cli("synth", "--kind", "ar1", "--n", 0, "--p", 2,
                     "--out", tmp_path / "x.csv")
        assert rc == 1
        assert "error" in capsys.readouterr().err

    def test_round_trips_through_run(self, tmp_path):
        out = synth_csv(tmp_path, separation=10.0, attack_ratio=0.35)
        rc = run_cli("run", "--input", out, "--train-size", 300,
                     "--seed", 5, "--out", tmp_path / "bundle")
        assert rc == 0
        report = (tmp_path / "bundle" / "report.csv").read_text().splitlines()
        assert report[0] == "method,paradigm,precision,recall,f1,time"
        assert len(report) == 5


class TestProbeCommand:
    def test_temporal_decision(self, tmp_path, capsys):
        data = synth_csv(tmp_path, kind="ar1", n=4000, p=6, phi=0.9)
        rc = run_cli("probe", "--input", data, "--out", tmp_path / "probe")
        assert rc == 0
        text = (tmp_path / "probe" / "probe.txt").read_text()
        assert "decision = temporal" in text
        assert "cumulative_at_budget = not evaluated" in text

    def test_structural_decision(self, tmp_path):
        data = synth_csv(tmp_path, kind="lowrank", n=2000, p=30,
                         rank=2, noise_std=0.05)
        rc = run_cli("probe", "--input", data, "--out", tmp_path / "probe")
        assert rc == 0
        text = (tmp_path / "probe" / "probe.txt").read_text()
        assert "decision = structural" in text
        assert "variance_verdict = true" in text

    def test_hybrid_decision_flagged(self, tmp_path):
        data = synth_csv(tmp_path, kind="white", n=2000, p=40)
        rc = run_cli("probe", "--input", data, "--out", tmp_path / "probe")
        assert rc == 0
        text = (tmp_path / "probe" / "probe.txt").read_text()
        assert "decision = hybrid" in text
        assert "hybrid_unvalidated = true" in text
        assert "unvalidated fallback" in text

    def test_force_both_probes(self, tmp_path):
        data = synth_csv(tmp_path, kind="ar1", n=3000, p=6, phi=0.9)
        rc = run_cli("probe", "--input", data, "--out", tmp_path / "probe",
                     "--force-both-probes")
        assert rc == 0
        text = (tmp_path / "probe" / "probe.txt").read_text()
        assert "decision = temporal" in text
        assert "cumulative_at_budget = not evaluated" not in text

    def test_missing_input_fails_cleanly(self, tmp_path, capsys):
        rc = run_cli("probe", "--input", tmp_path / "absent.csv")
        assert rc == 1
        err = capsys.readouterr().err
        assert "ingest" in err and "error" in err


class TestRunCommand:
    def test_bundle_layout_and_grid(self, tmp_path):
        data = synth_csv(tmp_path, separation=10.0, attack_ratio=0.35,
                         n=800, seed=7)
        out = tmp_path / "bundle"
        rc = run_cli("run", "--input", data, "--train-size", 400,
                     "--seed", 7, "--out", out)
        assert rc == 0
        for rel in ("report.csv", "report.txt", "gap.csv", "decision.txt",
                    "plots/acf_curve.csv", "plots/cumulative_variance.csv",
                    "plots/silhouette_sweep.csv", "plots/metric_bars.csv",
                    "plots/pca_scatter.csv"):
            assert (out / rel).is_file(), rel
        rows = (out / "report.csv").read_text().splitlines()[1:]
        methods = {r.split(",")[0] for r in rows}
        assert methods == {"KMeans-Str", "OCSVM-Temp", "IF-Temp", "IF-Str"}
        f1s = [float(r.split(",")[4]) for r in rows]
        assert f1s == sorted(f1s, reverse=True)

    def test_kmeans_tops_separated_clusters(self, tmp_path):
        data = synth_csv(tmp_path, separation=10.0, attack_ratio=0.35,
                         n=1000, seed=9)
        out = tmp_path / "bundle"
        rc = run_cli("run", "--input", data, "--train-size", 500,
                     "--seed", 9, "--out", out)
        assert rc == 0
        first = (out / "report.csv").read_text().splitlines()[1].split(",")
        assert first[0] == "KMeans-Str"
        assert float(first[4]) >= 0.99

    def test_deterministic_bundles(self, tmp_path):
        data = synth_csv(tmp_path, separation=6.0, attack_ratio=0.2,
                         n=700, seed=11)
        args = ["run", "--input", data, "--train-size", 350, "--seed", 11,
                "--stable-times"]
        assert run_cli(*args, "--out", tmp_path / "a") == 0
        assert run_cli(*args, "--out", tmp_path / "b") == 0
        for rel in ("report.csv", "report.txt", "gap.csv", "decision.txt",
                    "plots/acf_curve.csv", "plots/cumulative_variance.csv",
                    "plots/silhouette_sweep.csv", "plots/metric_bars.csv",
                    "plots/pca_scatter.csv"):
            assert (tmp_path / "a" / rel).read_bytes() == \
                (tmp_path / "b" / rel).read_bytes(), rel

    def test_force_paradigm_recorded(self, tmp_path):
        data = synth_csv(tmp_path, kind="lowrank", n=900, p=30, rank=2,
                         noise_std=0.05, seed=13)
        out = tmp_path / "bundle"
        rc = run_cli("run", "--input", data, "--train-size", 450,
                     "--seed", 13, "--out", out,
                     "--force-paradigm", "temporal")
        assert rc == 0
        text = (out / "decision.txt").read_text()
        assert "decision = temporal" in text
        assert "forced = true" in text

    def test_config_file_with_flag_override(self, tmp_path):
        data = synth_csv(tmp_path, separation=8.0, attack_ratio=0.3,
                         n=700, seed=15)
        config = tmp_path / "run.conf"
        config.write_text(
            f"input_path = {data}\n"
            "train_size = 350\n"
            "seed = 15\n"
            "acf-threshold = 0.25\n"
            f"out_dir = {tmp_path / 'from_config'}\n"
        )
        rc = run_cli("run", "--config", config, "--out", tmp_path / "flag_wins")
        assert rc == 0
        assert (tmp_path / "flag_wins" / "report.csv").is_file()
        assert not (tmp_path / "from_config").exists()
        text = (tmp_path / "flag_wins" / "decision.txt").read_text()
        assert "acf_threshold = 0.250000" in text

    def test_failed_stage_leaves_no_partial_bundle(self, tmp_path, capsys):
        # 40 rows < the largest default window: the features stage fails
        data = synth_csv(tmp_path, kind="ar1", n=40, p=6, seed=17)
        out = tmp_path / "bundle"
        rc = run_cli("run", "--input", data, "--out", out, "--train-size", 20)
        assert rc == 1
        err = capsys.readouterr().err
        assert "features" in err
        assert not (out / "report.csv").exists()


class TestFlagWiring:
    def test_custom_windows_change_feature_count(self, tmp_path):
        data = synth_csv(tmp_path, separation=5.0, attack_ratio=0.3,
                         n=400, seed=23)
        out = tmp_path / "feats"
        rc = run_cli("features", "--input", data, "--out", out,
                     "--paradigm", "temporal", "--windows", "4,8")
        assert rc == 0
        header = (out / "features_temporal.csv").read_text().splitlines()[0]
        assert len(header.split(",")) == 2 * 6 * 6 + 1

    def test_sum_aggregation_recorded(self, tmp_path):
        data = synth_csv(tmp_path, kind="ar1", n=2500, p=6, phi=0.9, seed=25)
        rc = run_cli("probe", "--input", data, "--out", tmp_path / "probe",
                     "--aggregation", "sum")
        assert rc == 0
        text = (tmp_path / "probe" / "probe.txt").read_text()
        assert "aggregation = sum" in text

    def test_probe_threshold_flag_changes_verdict(self, tmp_path):
        data = synth_csv(tmp_path, kind="ar1", n=2500, p=6, phi=0.5, seed=27)
        rc = run_cli("probe", "--input", data, "--out", tmp_path / "strict",
                     "--acf-threshold", "0.99")
        assert rc == 0
        text = (tmp_path / "strict" / "probe.txt").read_text()
        assert "acf_verdict = false" in text

    def test_chunk_size_flag_accepted(self, tmp_path):
        data = synth_csv(tmp_path, separation=8.0, attack_ratio=0.3,
                         n=500, seed=29)
        rc = run_cli("run", "--input", data, "--train-size", 250,
                     "--chunk-size", 64, "--seed", 29,
                     "--out", tmp_path / "bundle")
        assert rc == 0


class TestFeaturesCommand:
    def test_dumps_both_matrices(self, tmp_path):
        data = synth_csv(tmp_path, separation=5.0, attack_ratio=0.3,
                         n=400, seed=19)
        out = tmp_path / "feats"
        rc = run_cli("features", "--input", data, "--out", out,
                     "--paradigm", "both")
        assert rc == 0
        temporal = (out / "features_temporal.csv").read_text().splitlines()
        structural = (out / "features_structural.csv").read_text().splitlines()
        assert len(temporal[0].split(",")) == 109  # 108 features + label
        assert temporal[0].split(",")[0] == "w010_l2norm_mean"
        assert len(temporal) == 401
        assert structural[0].split(",")[-1] == "label"


class TestEvalCommand:
    def test_metrics_from_files(self, tmp_path, capsys):
        (tmp_path / "preds.txt").write_text("prediction\n1\n1\n0\n0\n")
        (tmp_path / "labels.txt").write_text("label\n1\n0\n1\n0\n")
        rc = run_cli("eval", "--predictions", tmp_path / "preds.txt",
                     "--labels", tmp_path / "labels.txt",
                     "--out", tmp_path / "metrics.txt")
        assert rc == 0
        text = (tmp_path / "metrics.txt").read_text()
        assert "precision = 0.500000" in text
        assert "recall = 0.500000" in text
        assert "f1 = 0.500000" in text

    def test_output_env_var_sets_default_dir(self, tmp_path, monkeypatch):
        data = synth_csv(tmp_path, kind="ar1", n=2500, p=6, phi=0.9, seed=21)
        monkeypatch.setenv(cli.OUTPUT_DIR_ENV, str(tmp_path / "env_out"))
        rc = run_cli("probe", "--input", data)
        assert rc == 0
        assert (tmp_path / "env_out" / "probe.txt").is_file()
