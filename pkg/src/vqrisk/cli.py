"""Command-line pipeline: generate data, train, classify, evaluate, analyze.

Machine-readable artifacts go to files or standard output; progress and
diagnostics go to standard error. Exit codes: 0 success, 1 usage error,
2 data error, 3 numeric failure. All randomness of a subcommand derives
from its single --seed flag.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import asdict

import numpy as np

from . import __version__
from .ansatz import VARIANTS, AnsatzSpec
from .classify import (
    DISTANCE_MODES,
    UNRECOGNIZED,
    TrainedModel,
    evaluate,
    load_model,
    save_model,
)
from .encoding import (
    encode_dataset,
    export_encoded,
    generate_synthetic,
    load_csv,
    minmax_normalize,
    pad_features,
    save_csv,
)
from .entanglement import analyze_dataset
from .training import (
    OPTIMIZER_METHODS,
    OptimizationError,
    OptimizerConfig,
    cluster_samples,
    train_cluster,
    tune_thresholds,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

N_QUBITS = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; this tool reserves 2 for
    # data errors and uses 1 for usage problems.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _nonnegative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be a non-negative integer")
    return value


def _child_seed(*keys: int) -> int:
    return int(np.random.SeedSequence(list(keys)).generate_state(1)[0])


def _load_encoded(path):
    data = load_csv(path)
    if data.n_observations == 0:
        raise ValueError(f"{path}: no observations to process")
    normalized = minmax_normalize(data)
    padded = pad_features(normalized, N_QUBITS)
    return data, encode_dataset(padded)


def cmd_generate_data(args) -> int:
    data = generate_synthetic(args.seed, args.count)
    save_csv(data, args.out)
    blocked = int(data.labels.sum())
    print(
        f"wrote {data.n_observations} observations to {args.out} "
        f"({data.n_observations - blocked} issue / {blocked} block)",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_train(args) -> int:
    _, samples = _load_encoded(args.data)
    spec = AnsatzSpec(args.variant, N_QUBITS, args.layers)
    config = OptimizerConfig(
        method=args.optimizer,
        max_iters=args.iters,
        a=args.spsa_a,
        c=args.spsa_c,
        A=args.spsa_big_a,
        alpha=args.spsa_alpha,
        gamma=args.spsa_gamma,
        seed=args.seed,
        restarts=args.restarts,
    )
    clusters = []
    for class_label in (0, 1):
        class_samples = [s for s in samples if s.label == class_label]
        if not class_samples:
            print(f"warning: no samples of class {class_label}", file=sys.stderr)
            continue
        lc = min(args.clusters, len(class_samples))
        targets = cluster_samples(
            class_samples, lc, seed=_child_seed(args.seed, 17, class_label)
        )
        for target in targets:
            trained = train_cluster(spec, target, config, shots=args.shots)
            print(
                f"class {class_label} cluster {target.cluster_index}: "
                f"cost {trained.final_cost:.4f} "
                f"({len(target.member_indices)} members)",
                file=sys.stderr,
            )
            clusters.append(trained)
    if not clusters:
        raise ValueError("training produced no clusters")
    if args.tune_epsilon:
        clusters = tune_thresholds(
            clusters,
            samples,
            spec,
            distance_mode=args.distance_mode,
            margin=args.margin,
        )
    metadata = {
        "seed": args.seed,
        "optimizer": asdict(config),
        "clusters_per_class": args.clusters,
        "shots": args.shots,
        "tuned_epsilon": bool(args.tune_epsilon),
        "margin": args.margin,
        # basename only: identical runs from different directories must
        # produce byte-identical model files
        "training_data": os.path.basename(str(args.data)),
        "tool": f"vqrisk {__version__}",
    }
    model = TrainedModel(spec, tuple(clusters), args.distance_mode, metadata)
    save_model(model, args.out)
    if args.encoded_out:
        export_encoded(samples, args.encoded_out)
    costs = sorted(c.final_cost for c in clusters)
    print(
        f"wrote model with {len(clusters)} clusters to {args.out} "
        f"(cost max {costs[-1]:.4f}, median {costs[len(costs) // 2]:.4f})",
        file=sys.stderr,
    )
    return EXIT_OK


def _final_class_json(outcome):
    return outcome.final_class if outcome.final_class is not None else UNRECOGNIZED


def _report_rows(report, samples):
    rows = []
    for sample, outcome in zip(samples, report.outcomes):
        rows.append(
            {
                "index": outcome.sample_index,
                "true_label": sample.label,
                "final_class": _final_class_json(outcome),
                "min_distance": min(outcome.distances.values()),
                "accepting_clusters": [list(key) for key in outcome.assigned],
            }
        )
    return rows


def _summary_doc(report) -> dict:
    return {
        "accuracy": report.accuracy,
        "false_rate": report.false_rate,
        "unrecognized": report.unrecognized_count,
        "ties": report.tie_count,
        "total": len(report.outcomes),
    }


def _write_json(doc, path) -> None:
    if path is None:
        json.dump(doc, sys.stdout, indent=2)
        sys.stdout.write("\n")
        return
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _write_report(report, samples, path, fmt: str) -> None:
    rows = _report_rows(report, samples)
    if fmt == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["index", "true_label", "final_class", "min_distance", "accepting_clusters"]
            )
            for row in rows:
                accepting = ";".join(f"{k}:{l}" for k, l in row["accepting_clusters"])
                writer.writerow(
                    [
                        row["index"],
                        row["true_label"],
                        row["final_class"],
                        repr(row["min_distance"]),
                        accepting,
                    ]
                )
        return
    _write_json({"summary": _summary_doc(report), "samples": rows}, path)


def cmd_classify(args) -> int:
    model = load_model(args.model)
    _, samples = _load_encoded(args.data)
    report = evaluate(model, samples, jobs=args.jobs)
    fmt = args.format or ("csv" if str(args.out).lower().endswith(".csv") else "json")
    _write_report(report, samples, args.out, fmt)
    print(
        f"classified {len(samples)} samples: accuracy {report.accuracy:.4f}, "
        f"false rate {report.false_rate:.4f}, "
        f"{report.unrecognized_count} unrecognized -> {args.out}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_evaluate(args) -> int:
    model = load_model(args.model)
    _, samples = _load_encoded(args.data)
    report = evaluate(model, samples, jobs=args.jobs)
    _write_json(_summary_doc(report), args.out)
    return EXIT_OK


def cmd_detect_entanglement(args) -> int:
    _, samples = _load_encoded(args.data)
    summary = analyze_dataset(samples)
    doc = {
        f"class{label}": {
            "(" + ",".join(str(q) for q in group) + ")": count
            for group, count in sorted(groups.items())
        }
        for label, groups in sorted(summary.items())
    }
    _write_json(doc, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vqrisk", description=__doc__)
    parser.add_argument("--version", action="version", version=f"vqrisk {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("generate-data", help="write a synthetic credit data CSV")
    gen.add_argument("--seed", type=int, default=42)
    gen.add_argument("--count", type=_positive_int, default=80)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=cmd_generate_data)

    train = sub.add_parser("train", help="train per-class pattern states from a CSV")
    train.add_argument("--data", required=True)
    train.add_argument("--out", required=True)
    train.add_argument("--variant", choices=VARIANTS, default="A")
    train.add_argument("--layers", type=_positive_int, default=2)
    train.add_argument("--iters", type=_positive_int, default=500)
    train.add_argument("--optimizer", choices=OPTIMIZER_METHODS, default="SPSA")
    train.add_argument("--seed", type=int, default=42)
    train.add_argument("--restarts", type=_positive_int, default=3)
    train.add_argument(
        "--clusters",
        type=_positive_int,
        default=7,
        help="clusters per class (clamped to the class size)",
    )
    train.add_argument("--distance-mode", choices=DISTANCE_MODES, default="COST_F")
    train.add_argument(
        "--shots",
        type=_nonnegative_int,
        default=0,
        help="sampled shots per objective evaluation; 0 = exact probabilities",
    )
    train.add_argument("--tune-epsilon", action="store_true")
    train.add_argument("--margin", type=float, default=0.05)
    train.add_argument("--spsa-a", type=float, default=0.2)
    train.add_argument("--spsa-c", type=float, default=0.1)
    train.add_argument("--spsa-A", dest="spsa_big_a", type=float, default=50.0)
    train.add_argument("--spsa-alpha", type=float, default=0.602)
    train.add_argument("--spsa-gamma", type=float, default=0.101)
    train.add_argument("--encoded-out", default=None,
                       help="also dump the encoded training samples as JSON")
    train.set_defaults(func=cmd_train)

    cls = sub.add_parser("classify", help="classify a CSV against a trained model")
    cls.add_argument("--model", required=True)
    cls.add_argument("--data", required=True)
    cls.add_argument("--out", required=True)
    cls.add_argument("--format", choices=("json", "csv"), default=None,
                     help="report format; default follows the --out extension")
    cls.add_argument("--jobs", type=_positive_int, default=1)
    cls.set_defaults(func=cmd_classify)

    ev = sub.add_parser("evaluate", help="print accuracy and false-rate summary")
    ev.add_argument("--model", required=True)
    ev.add_argument("--data", required=True)
    ev.add_argument("--out", default=None, help="summary JSON path; default stdout")
    ev.add_argument("--jobs", type=_positive_int, default=1)
    ev.set_defaults(func=cmd_evaluate)

    det = sub.add_parser(
        "detect-entanglement", help="report entangled qubit groups per class"
    )
    det.add_argument("--data", required=True)
    det.add_argument("--out", default=None, help="summary JSON path; default stdout")
    det.set_defaults(func=cmd_detect_entanglement)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OptimizationError as exc:
        print(f"vqrisk: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"vqrisk: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
