"""Pipeline: config handling, feature extractor, training, evaluation, reports."""

import json

import numpy as np
import pytest

from earfake.errors import ConfigError, DomainError
from earfake.jellyfish import SwarmConfig
from earfake.pipeline import (
    ABLATION_MODES,
    EvaluationReport,
    FeatureConfig,
    FeatureExtractor,
    ModelConfig,
    ModelDims,
    RunConfig,
    TrainedArtifact,
    benchmark_optimizer,
    evaluate,
    load_config,
    model_error_objective,
    run_report,
    stage_rng,
    stratified_split,
    train,
)
from earfake.metrics import METRIC_NAMES
from earfake.synthetic import GeneratorConfig, generate_synthetic


def tiny_config(seed=77, **overrides):
    defaults = dict(
        seed=seed,
        generator=GeneratorConfig(n_real=8, n_fake=8, sequence_length=2),
        features=FeatureConfig(grid=2, pca_k=2),
        model=ModelConfig(hidden_dim=3, dbn_hidden=(4, 2)),
        swarm=SwarmConfig(population=6, t_max=8, lower_bound=-1.0, upper_bound=1.0),
        repetitions=3,
        pretrain_epochs=4,
    )
    defaults.update(overrides)
    return RunConfig(**defaults)


@pytest.fixture(scope="module")
def tiny_setup():
    config = tiny_config()
    dataset = generate_synthetic(config.generator, stage_rng(config.seed, 0))
    artifact = train(config, dataset=dataset)
    return config, dataset, artifact


class TestConfig:
    def test_round_trip(self):
        config = tiny_config()
        again = RunConfig.from_dict(config.to_dict())
        assert again.to_dict() == config.to_dict()

    def test_load_json(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"seed": 5, "swarm": {"t_max": 3}}))
        config = load_config(path)
        assert config.seed == 5
        assert config.swarm.t_max == 3
        assert config.split_percent == 70.0  # defaults fill the rest

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_unknown_keys_rejected(self):
        with pytest.raises(ConfigError):
            RunConfig.from_dict({"swrm": {}})
        with pytest.raises(ConfigError):
            RunConfig.from_dict({"swarm": {"poplation": 3}})

    def test_invalid_values_rejected(self):
        with pytest.raises(ConfigError):
            RunConfig.from_dict({"split_percent": 100})
        with pytest.raises(ConfigError):
            RunConfig.from_dict({"repetitions": 0})
        with pytest.raises(ConfigError):
            RunConfig.from_dict({"test_case": "blizzard"})


class TestStratifiedSplit:
    def test_disjoint_exhaustive_both_classes(self):
        labels = np.array([0] * 10 + [1] * 6)
        train_idx, test_idx = stratified_split(labels, 70.0, np.random.default_rng(0))
        assert sorted(train_idx + test_idx) == list(range(16))
        assert set(train_idx).isdisjoint(test_idx)
        assert {labels[i] for i in train_idx} == {0, 1}
        assert {labels[i] for i in test_idx} == {0, 1}

    def test_deterministic(self):
        labels = np.array([0, 1] * 8)
        a = stratified_split(labels, 60.0, np.random.default_rng(3))
        b = stratified_split(labels, 60.0, np.random.default_rng(3))
        assert a == b

    def test_tiny_class_rejected(self):
        with pytest.raises(DomainError):
            stratified_split(np.array([0, 0, 0, 1]), 50.0, np.random.default_rng(0))


class TestFeatureExtractor:
    def test_fit_transform_shapes_and_range(self, tiny_setup):
        config, dataset, _ = tiny_setup
        train_idx, _ = stratified_split(dataset.labels, 70.0, stage_rng(config.seed, 1))
        extractor = FeatureExtractor(config.features, "full").fit(dataset, train_idx)
        seqs, labels = extractor.transform(dataset)
        assert seqs.shape == (16, 2, sum(extractor.dims))
        assert labels.shape == (16,)
        assert np.all(seqs >= 0.0) and np.all(seqs <= 1.0)
        d1, d2, d3 = extractor.dims
        assert d1 == config.features.grid**2
        assert d3 == config.features.pca_k

    def test_ear_only_mode_drops_pixel_groups(self, tiny_setup):
        config, dataset, _ = tiny_setup
        train_idx, _ = stratified_split(dataset.labels, 70.0, stage_rng(config.seed, 1))
        extractor = FeatureExtractor(config.features, "ear_only").fit(dataset, train_idx)
        d1, d2, d3 = extractor.dims
        assert d1 == 0 and d3 == 0 and d2 > 0

    def test_conventional_mode_changes_embedding(self, tiny_setup):
        config, dataset, _ = tiny_setup
        train_idx, _ = stratified_split(dataset.labels, 70.0, stage_rng(config.seed, 1))
        full = FeatureExtractor(config.features, "full").fit(dataset, train_idx)
        conv = FeatureExtractor(config.features, "conventional").fit(dataset, train_idx)
        video = dataset.videos[0]
        a = full._frame_parts(video.frames[0], video.regions[0])[0]
        b = conv._frame_parts(video.frames[0], video.regions[0])[0]
        assert not np.allclose(a, b)

    def test_state_round_trip(self, tiny_setup):
        config, dataset, _ = tiny_setup
        train_idx, _ = stratified_split(dataset.labels, 70.0, stage_rng(config.seed, 1))
        extractor = FeatureExtractor(config.features, "full").fit(dataset, train_idx)
        again = FeatureExtractor.from_state(extractor.state_dict())
        a, _ = extractor.transform(dataset)
        b, _ = again.transform(dataset)
        np.testing.assert_array_equal(a, b)

    def test_unknown_mode(self):
        with pytest.raises(ConfigError):
            FeatureExtractor(FeatureConfig(), "resnet")


class TestModelErrorObjective:
    def test_bounded_and_deterministic(self, tiny_setup):
        config, dataset, artifact = tiny_setup
        extractor = artifact.extractor()
        seqs, labels = extractor.transform(dataset)
        dims = artifact.dims
        rng = np.random.default_rng(5)
        for _ in range(10):
            flat = rng.uniform(-1, 1, dims.total)
            err = model_error_objective(flat, seqs, labels, dims)
            assert 0.0 <= err <= 1.0
            assert err == model_error_objective(flat, seqs, labels, dims)

    def test_dimension_mismatch(self, tiny_setup):
        _, dataset, artifact = tiny_setup
        seqs, labels = artifact.extractor().transform(dataset)
        with pytest.raises(DomainError):
            model_error_objective(np.zeros(artifact.dims.total + 1), seqs, labels, artifact.dims)


class TestTrain:
    def test_artifact_fields(self, tiny_setup):
        config, dataset, artifact = tiny_setup
        assert artifact.mode == "sujfo"
        assert artifact.flat_weights.size == artifact.dims.total
        assert set(artifact.train_indices).isdisjoint(artifact.test_indices)
        assert len(artifact.train_indices) + len(artifact.test_indices) == 16
        best = [row[1] for row in artifact.trace]
        assert all(later <= earlier for earlier, later in zip(best, best[1:]))

    def test_deterministic_artifact_bytes(self, tiny_setup):
        config, dataset, artifact = tiny_setup
        again = train(config, dataset=dataset)
        assert json.dumps(artifact.to_payload(), sort_keys=True) == json.dumps(
            again.to_payload(), sort_keys=True
        )

    def test_all_modes_produce_artifacts(self, tiny_setup):
        config, dataset, _ = tiny_setup
        for mode in ABLATION_MODES:
            artifact = train(config, dataset=dataset, mode=mode)
            assert artifact.mode == mode
            if mode == "ear_only":
                assert artifact.feature_state["dims"][0] == 0
        with pytest.raises(ConfigError):
            train(config, dataset=dataset, mode="turbo")

    def test_artifact_save_load(self, tiny_setup, tmp_path):
        _, dataset, artifact = tiny_setup
        path = tmp_path / "artifact.bin"
        artifact.save(path)
        again = TrainedArtifact.load(path)
        np.testing.assert_array_equal(again.flat_weights, artifact.flat_weights)
        assert again.fusion.c_v == artifact.fusion.c_v
        assert again.train_indices == artifact.train_indices

    def test_single_class_dataset_rejected(self):
        config = tiny_config()
        dataset = generate_synthetic(config.generator, stage_rng(config.seed, 0))
        for video in dataset.videos:
            video.label = 0
        with pytest.raises(DomainError):
            train(config, dataset=dataset)


class TestEvaluate:
    def test_report_shape(self, tiny_setup):
        config, dataset, artifact = tiny_setup
        report = evaluate(artifact, dataset, repetitions=3)
        assert isinstance(report, EvaluationReport)
        assert set(report.rep_stats) == set(METRIC_NAMES) | {"auc"}
        rows = report.metric_rows()
        assert len(rows) == len(METRIC_NAMES) + 1
        assert all(len(row) == 8 for row in rows)

    def test_single_repetition_collapses_stats(self, tiny_setup):
        config, dataset, artifact = tiny_setup
        report = evaluate(artifact, dataset, repetitions=1)
        stats = report.rep_stats["accuracy"]
        assert stats.mean == stats.median == stats.minimum == stats.maximum
        assert stats.std_deviation == 0.0

    def test_deterministic(self, tiny_setup):
        config, dataset, artifact = tiny_setup
        a = evaluate(artifact, dataset, repetitions=2)
        b = evaluate(artifact, dataset, repetitions=2)
        assert a.rep_stats == b.rep_stats
        np.testing.assert_array_equal(a.roc_points, b.roc_points)

    def test_single_class_rejected(self, tiny_setup):
        config, dataset, artifact = tiny_setup
        import copy

        broken = copy.deepcopy(dataset)
        for video in broken.videos:
            video.label = 1
        with pytest.raises(DomainError):
            evaluate(artifact, broken)


class TestRunReport:
    def test_files_and_shape(self, tmp_path):
        config = tiny_config()
        outdir = tmp_path / "report"
        reports = run_report(config, outdir, test_cases=("none", "compression"))
        assert set(reports) == set(ABLATION_MODES)
        for mode in ABLATION_MODES:
            assert (outdir / f"artifact_{mode}.bin").exists()
            assert (outdir / f"convergence_{mode}.csv").exists()
            assert (outdir / f"fusion_{mode}.csv").exists()
        assert (outdir / "run.log").exists()
        assert (outdir / "roc.csv").exists()

        lines = (outdir / "metrics.csv").read_text().splitlines()
        assert lines[0] == "mode,test_case,metric,mean,maximum,std,median,minimum"
        # 4 modes x 2 cases x (9 metrics + auc)
        assert len(lines) - 1 == 4 * 2 * 10

    def test_byte_identical_reruns(self, tmp_path):
        config = tiny_config()
        run_report(config, tmp_path / "a", test_cases=("none",))
        run_report(config, tmp_path / "b", test_cases=("none",))
        for name in ["metrics.csv", "roc.csv", "convergence_sujfo.csv", "artifact_sujfo.bin"]:
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes(), name


class TestBenchmarkOptimizer:
    def test_csv_and_medians(self, tmp_path):
        config = tiny_config()
        medians = benchmark_optimizer(config, tmp_path, dimension=3, t_max=10, n_seeds=2)
        assert set(medians) == {"sphere", "rastrigin", "rosenbrock"}
        for by_mode in medians.values():
            assert set(by_mode) == {"sujfo", "jfo"}
        lines = (tmp_path / "convergence.csv").read_text().splitlines()
        assert lines[0] == "objective,mode,seed,iteration,best_fitness,mean_fitness"
        # 3 objectives x 2 modes x 2 seeds x 11 trace rows
        assert len(lines) - 1 == 3 * 2 * 2 * 11

    def test_traces_monotone(self, tmp_path):
        config = tiny_config()
        benchmark_optimizer(config, tmp_path, dimension=3, t_max=12, n_seeds=1)
        rows = (tmp_path / "convergence.csv").read_text().splitlines()[1:]
        series = {}
        for row in rows:
            objective, mode, seed, iteration, best, _ = row.split(",")
            series.setdefault((objective, mode, seed), []).append(float(best))
        for values in series.values():
            assert all(later <= earlier for earlier, later in zip(values, values[1:]))
