"""End-to-end detection on a small synthetic dataset.

Generates labeled ear videos, trains the hybrid artifact (DBN
pretraining, then swarm search over every weight), evaluates the holdout
split, and stresses the artifact with the four perturbation test cases.
Uses a reduced configuration so the whole script runs in ~10 seconds;
the package defaults (RunConfig()) reproduce the numbers in the README.

Run:  python demos/05_end_to_end_detection.py
"""

import numpy as np

from earfake.jellyfish import SwarmConfig
from earfake.pipeline import (
    FeatureConfig,
    ModelConfig,
    RunConfig,
    evaluate,
    stage_rng,
    train,
)
from earfake.synthetic import TEST_CASES, GeneratorConfig, apply_test_case, generate_synthetic

config = RunConfig(
    seed=7,
    generator=GeneratorConfig(n_real=20, n_fake=20, sequence_length=3),
    features=FeatureConfig(grid=2, pca_k=2),
    model=ModelConfig(hidden_dim=4, dbn_hidden=(8, 4)),
    swarm=SwarmConfig(population=10, t_max=120, lower_bound=-1.0, upper_bound=1.0),
    repetitions=10,
)

dataset = generate_synthetic(config.generator, stage_rng(config.seed, 0))
print(f"dataset: {len(dataset.videos)} videos "
      f"({dataset.class_counts[0]} real / {dataset.class_counts[1]} fake), "
      f"{config.generator.sequence_length} frames each")

artifact = train(config, dataset=dataset)
print(f"trained: {artifact.dims.total} weights searched, "
      f"objective {artifact.trace[0][1]:.3f} -> {artifact.trace[-1][1]:.4f} "
      f"over {len(artifact.trace) - 1} iterations")

report = evaluate(artifact, dataset)
print(f"\nclean holdout ({len(artifact.test_indices)} videos):")
for name in ("accuracy", "precision", "sensitivity", "specificity", "mcc"):
    print(f"  {name:12s} {report.holdout_metrics[name]:.3f}")
print(f"  {'auc':12s} {report.holdout_auc:.3f}")
stats = report.rep_stats["accuracy"]
print(f"accuracy over {config.repetitions} re-splits: mean {stats.mean:.3f}, "
      f"min {stats.minimum:.3f}, max {stats.maximum:.3f}")

print("\nperturbation stress (default severities):")
for index, case in enumerate(TEST_CASES):
    perturbed = apply_test_case(dataset, case, rng=stage_rng(config.seed, 5, index))
    stressed = evaluate(artifact, perturbed, repetitions=3, test_case=case)
    print(f"  {case:18s} accuracy {stressed.holdout_metrics['accuracy']:.3f}")
