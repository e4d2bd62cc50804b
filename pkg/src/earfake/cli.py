"""Command-line entry points.

Subcommands: generate, train, evaluate, benchmark-optimizer, report.
All take --config (a JSON file; omitted means built-in defaults) and an
output directory. Exit code 0 on success; failures print one categorized
"error: <category>: <message>" line to stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import io as efio
from .errors import EarfakeError
from .pipeline import (
    ABLATION_MODES,
    RunConfig,
    TrainedArtifact,
    benchmark_optimizer,
    evaluate,
    load_config,
    run_report,
    stage_rng,
    train,
)
from .synthetic import TEST_CASES, generate_synthetic


def _config_from(args) -> RunConfig:
    if args.config:
        return load_config(args.config)
    return RunConfig()


def _dataset_from(args, config: RunConfig):
    if getattr(args, "dataset", None):
        return efio.load_dataset(args.dataset)
    return generate_synthetic(config.generator, stage_rng(config.seed, 0))


def _cmd_generate(args) -> int:
    config = _config_from(args)
    dataset = generate_synthetic(config.generator, stage_rng(config.seed, 0))
    efio.save_dataset(dataset, args.out)
    n_real, n_fake = dataset.class_counts
    print(f"wrote {len(dataset.videos)} videos ({n_real} real / {n_fake} fake) to {args.out}")
    return 0


def _cmd_train(args) -> int:
    config = _config_from(args)
    dataset = _dataset_from(args, config)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    artifact = train(config, dataset=dataset, mode=args.mode)
    artifact.save(outdir / "artifact.bin")
    efio.write_convergence_csv(outdir / "convergence.csv", artifact.trace)
    ids, fvs = artifact.extractor().feature_vectors(dataset)
    efio.write_features_csv(outdir / "features.csv", ids, fvs)
    print(
        f"trained mode={args.mode}: final objective {artifact.trace[-1][1]!r}, "
        f"artifact at {outdir / 'artifact.bin'}"
    )
    return 0


def _cmd_evaluate(args) -> int:
    artifact = TrainedArtifact.load(args.artifact)
    config = load_config(args.config) if args.config else RunConfig.from_dict(artifact.config)
    dataset = _dataset_from(args, config)
    case = args.test_case or config.test_case
    if case != "none":
        from .pipeline import _perturbed

        dataset = _perturbed(config, dataset, case, ("none", *TEST_CASES).index(case))
    report = evaluate(artifact, dataset, repetitions=args.repetitions, test_case=case)

    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    efio.write_csv(
        outdir / "metrics.csv",
        ["mode", "test_case", "metric", "mean", "maximum", "std", "median", "minimum"],
        report.metric_rows(),
    )
    efio.write_csv(outdir / "roc.csv", ["mode", "test_case", "fpr", "tpr"], report.roc_rows())
    efio.write_fusion_csv(
        outdir / "fusion.csv",
        report.fusion_sample_ids,
        report.fusion_bigru,
        report.fusion_dbn,
        report.fusion_result,
        report.fusion_labels,
    )
    print(
        f"evaluated case={case}: holdout accuracy {report.holdout_metrics['accuracy']:.3f}, "
        f"AUC {report.holdout_auc:.3f}"
    )
    return 0


def _cmd_benchmark(args) -> int:
    config = _config_from(args)
    medians = benchmark_optimizer(
        config,
        args.out,
        dimension=args.dimension,
        t_max=args.t_max,
        n_seeds=args.seeds,
        include_model_objective=args.include_model_objective,
    )
    for objective, by_mode in medians.items():
        line = ", ".join(f"{mode}: {value:.3e}" for mode, value in by_mode.items())
        print(f"{objective}: {line}")
    return 0


def _cmd_report(args) -> int:
    config = _config_from(args)
    dataset = _dataset_from(args, config)
    reports = run_report(config, args.out, dataset=dataset)
    for mode, cases in reports.items():
        acc = cases["none"].holdout_metrics["accuracy"]
        print(f"mode={mode}: clean holdout accuracy {acc:.3f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="earfake", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic dataset folder")
    p.add_argument("--config", help="JSON run config")
    p.add_argument("--out", required=True, help="dataset directory")
    p.set_defaults(fn=_cmd_generate)

    p = sub.add_parser("train", help="train one artifact")
    p.add_argument("--config", help="JSON run config")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--dataset", help="dataset directory (default: generate from config)")
    p.add_argument("--mode", default="sujfo", choices=ABLATION_MODES)
    p.set_defaults(fn=_cmd_train)

    p = sub.add_parser("evaluate", help="evaluate a trained artifact")
    p.add_argument("--artifact", required=True)
    p.add_argument("--config", help="JSON run config (default: the artifact's)")
    p.add_argument("--out", required=True)
    p.add_argument("--dataset", help="dataset directory (default: generate from config)")
    p.add_argument("--test-case", choices=("none", *TEST_CASES))
    p.add_argument("--repetitions", type=int, default=None)
    p.set_defaults(fn=_cmd_evaluate)

    p = sub.add_parser("benchmark-optimizer", help="swarm-mode convergence comparison")
    p.add_argument("--config", help="JSON run config")
    p.add_argument("--out", required=True)
    p.add_argument("--dimension", type=int, default=10)
    p.add_argument("--t-max", type=int, default=200)
    p.add_argument("--seeds", type=int, default=25)
    p.add_argument("--include-model-objective", action="store_true")
    p.set_defaults(fn=_cmd_benchmark)

    p = sub.add_parser("report", help="full ablation x test-case protocol")
    p.add_argument("--config", help="JSON run config")
    p.add_argument("--out", required=True)
    p.add_argument("--dataset", help="dataset directory (default: generate from config)")
    p.set_defaults(fn=_cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except EarfakeError as exc:
        print(f"error: {exc.category}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
