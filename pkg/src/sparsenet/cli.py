"""Command-line entry point.

Subcommands: generate, orient, features, train, dataset, fit, report.
Every run prints the resolved config digest to stderr, writes data to stdout
or --out, and exits 0 on success, 1 on usage errors, 2 on data/format
errors, 3 on numeric failures.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .dag import layered_dag, read_layered_dag, write_layered_dag
from .dataset import load_mnist, resolve_mnist_dir, synthetic_digits
from .errors import (
    EmbeddingError,
    FittingError,
    FormatError,
    GenerationError,
    SparsenetError,
    StructureError,
    TrainingDivergedError,
)
from .estimators import ESTIMATOR_TAGS, SplitProtocol, evaluate, report_grid_csv
from .experiment import build_dataset, read_records, records_to_csv, run_one, summarize
from .features import FEATURE_SETS, feature_vector
from .generators import GeneratorSpec, canonical_kind, generate, generate_connected
from .graph import read_edge_list, write_edge_list
from .network import TrainConfig, embed, save_net, train_and_eval
from .reports import (
    histogram,
    histogram_csv,
    jointplot,
    svg_histogram,
    svg_scatter,
    table2_csv,
    xy_csv,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

PROFILES = {
    "mini": {"n_range": (20, 60), "epochs": 3, "splits": (10000, 1000, 1000), "synthetic_n": 12000},
    "full": {"n_range": (50, 500), "epochs": 5, "splits": (55000, 5000, 10000), "synthetic_n": 70000},
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _print_digest(args: argparse.Namespace) -> None:
    resolved = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    digest = hashlib.sha256(json.dumps(resolved, sort_keys=True, default=str).encode()).hexdigest()
    print(f"# sparsenet {__version__} config={digest[:12]}", file=sys.stderr)


def _spec_from_args(args) -> GeneratorSpec:
    return GeneratorSpec(
        kind=canonical_kind(args.kind),
        n=args.n,
        seed=args.seed,
        ws_k=args.ws_k,
        ws_p=args.ws_p,
        ba_m=args.ba_m,
        er_p=args.er_p,
    )


def _load_data(args, splits: tuple[int, int, int] | None = None, synthetic_n: int = 12000):
    mnist_dir = resolve_mnist_dir(getattr(args, "mnist_dir", None))
    if mnist_dir and not getattr(args, "synthetic", None):
        return load_mnist(mnist_dir, seed=args.seed), splits
    n = getattr(args, "synthetic", None) or synthetic_n
    return synthetic_digits(n, seed=args.seed), splits


def _train_config(args, epochs: int, splits: tuple[int, int, int] | None) -> TrainConfig:
    train_n, val_n, test_n = splits if splits else (None, None, None)
    return TrainConfig(
        epochs=args.epochs if args.epochs is not None else epochs,
        batch_size=args.batch_size,
        learning_rate=args.learning_rate,
        momentum=args.momentum,
        seed=args.seed,
        train_n=args.train_n if args.train_n is not None else train_n,
        val_n=args.val_n if args.val_n is not None else val_n,
        test_n=args.test_n if args.test_n is not None else test_n,
    )


def cmd_generate(args) -> int:
    spec = _spec_from_args(args)
    g = generate_connected(spec, args.max_retries) if args.connected else generate(spec)
    _emit(write_edge_list(g), args.out)
    return EXIT_OK


def cmd_orient(args) -> int:
    g = read_edge_list(Path(args.graph).read_text())
    _emit(write_layered_dag(layered_dag(g)), args.out)
    return EXIT_OK


def cmd_features(args) -> int:
    g = read_edge_list(Path(args.graph).read_text())
    fv = feature_vector(g, layered_dag(g))
    row = fv.to_dict()
    if args.format == "csv":
        head = ",".join(row)
        vals = ",".join(repr(v) if isinstance(v, float) else str(v) for v in row.values())
        _emit(f"{head}\n{vals}\n", args.out)
    elif args.format == "text":
        _emit("".join(f"{k} {v!r}\n" for k, v in row.items()), args.out)
    else:
        _emit(json.dumps(row) + "\n", args.out)
    return EXIT_OK


def cmd_train(args) -> int:
    if args.dag:
        d = read_layered_dag(Path(args.dag).read_text())
    else:
        d = layered_dag(read_edge_list(Path(args.graph).read_text()))
    data, splits = _load_data(args, splits=(10000, 1000, 1000))
    cfg = _train_config(args, epochs=5, splits=splits)
    net = embed(d, data.images.shape[1], 10, args.sink_policy, seed=args.seed)
    result = train_and_eval(net, data, cfg)
    if args.save_net:
        save_net(net, args.save_net)
    _emit(
        json.dumps(
            {
                "val_accuracy": result.val_accuracy,
                "test_accuracy": result.test_accuracy,
                "losses": list(result.losses),
                "config_digest": cfg.digest(),
            }
        )
        + "\n",
        args.out,
    )
    return EXIT_OK


def _parse_mix(text: str) -> dict[str, float]:
    mix = {}
    try:
        for part in text.split(","):
            kind, weight = part.split("=")
            mix[canonical_kind(kind.strip())] = float(weight)
    except ValueError as exc:
        raise _UsageError(f"bad --mix {text!r}: {exc}") from None
    return mix


def cmd_dataset(args) -> int:
    profile = PROFILES[args.profile]
    n_range = (
        args.n_min if args.n_min is not None else profile["n_range"][0],
        args.n_max if args.n_max is not None else profile["n_range"][1],
    )
    data, splits = _load_data(args, splits=profile["splits"], synthetic_n=profile["synthetic_n"])
    cfg = _train_config(args, epochs=profile["epochs"], splits=splits)
    records = build_dataset(
        count=args.count,
        mix=_parse_mix(args.mix),
        data=data,
        cfg=cfg,
        out_path=args.out,
        workers=args.workers,
        n_range=n_range,
        sink_policy=args.sink_policy,
        base_seed=args.seed,
        keep_partial=args.keep_partial,
        record_timing=args.timings,
    )
    if args.csv:
        Path(args.csv).write_text(records_to_csv(records))
    diverged = sum(1 for r in records if r.test_accuracy is None)
    print(f"# records={len(records)} diverged={diverged}", file=sys.stderr)
    sys.stdout.write(table2_csv(records))
    return EXIT_OK


def cmd_fit(args) -> int:
    records = read_records(args.dataset)
    protocol = SplitProtocol(args.train_ratio, args.repetitions, args.seed)
    reports = []
    for tag in args.estimators.split(","):
        tag = tag.strip()
        if tag not in ESTIMATOR_TAGS:
            raise _UsageError(f"unknown estimator {tag!r}; valid: {', '.join(ESTIMATOR_TAGS)}")
        for fset in args.sets.split(","):
            reports.append(evaluate(records, tag, fset.strip(), protocol, target=args.target))
    grid = report_grid_csv(reports)
    payload = json.dumps([json.loads(r.to_json()) for r in reports], indent=2) + "\n"
    if args.out:
        Path(args.out + ".csv").write_text(grid)
        Path(args.out + ".json").write_text(payload)
    elif args.format == "json":
        sys.stdout.write(payload)
    else:
        sys.stdout.write(grid)
    return EXIT_OK


def cmd_report(args) -> int:
    records = read_records(args.dataset)
    prefix = args.out or "report"
    if args.kind == "table2":
        _emit(table2_csv(records), args.out)
        return EXIT_OK
    if args.kind == "histogram":
        edges, counts = histogram(records, args.feature, args.bins)
        _emit(histogram_csv(edges, counts), args.out)
        if args.svg:
            Path(prefix + ".svg").write_text(svg_histogram(edges, counts, args.feature))
        return EXIT_OK
    x, y, (xc, xe), (yc, ye) = jointplot(records, args.feature, args.target, args.bins)
    Path(prefix + ".csv").write_text(xy_csv(x, y, args.feature, args.target))
    Path(prefix + "_xhist.csv").write_text(histogram_csv(xe, xc))
    Path(prefix + "_yhist.csv").write_text(histogram_csv(ye, yc))
    if args.svg:
        Path(prefix + ".svg").write_text(svg_scatter(x, y, f"{args.feature} vs {args.target}"))
    return EXIT_OK


def build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="base RNG seed")
    common.add_argument("--workers", type=int, default=1, help="worker processes")
    common.add_argument("--format", choices=("json", "csv", "text"), default="json",
                        help="stdout format where applicable")
    common.add_argument("--out", default=None, help="output file (default stdout)")

    train_common = argparse.ArgumentParser(add_help=False)
    train_common.add_argument("--mnist-dir", default=None,
                              help="directory with MNIST IDX files (or set SPARSENET_MNIST_DIR)")
    train_common.add_argument("--synthetic", type=int, default=None, metavar="N",
                              help="use the synthetic dataset with N samples")
    train_common.add_argument("--epochs", type=int, default=None)
    train_common.add_argument("--batch-size", type=int, default=64)
    train_common.add_argument("--learning-rate", type=float, default=0.01)
    train_common.add_argument("--momentum", type=float, default=0.9)
    train_common.add_argument("--train-n", type=int, default=None)
    train_common.add_argument("--val-n", type=int, default=None)
    train_common.add_argument("--test-n", type=int, default=None)
    train_common.add_argument("--sink-policy", choices=("all_sinks", "last_layer_only"),
                              default="all_sinks")

    parser = _Parser(prog="sparsenet", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common], help="generate a random graph edge list")
    p.add_argument("--kind", required=True, help="ws | ba | er (or full names)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--ws-k", type=int, default=None)
    p.add_argument("--ws-p", type=float, default=None)
    p.add_argument("--ba-m", type=int, default=None)
    p.add_argument("--er-p", type=float, default=None)
    p.add_argument("--connected", action="store_true", help="retry until connected")
    p.add_argument("--max-retries", type=int, default=100)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("orient", parents=[common], help="orient + layer a graph into a DAG")
    p.add_argument("--graph", required=True, help="edge-list file")
    p.set_defaults(func=cmd_orient)

    p = sub.add_parser("features", parents=[common], help="25 structural properties of a graph")
    p.add_argument("--graph", required=True, help="edge-list file")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("train", parents=[common, train_common],
                       help="embed a graph and train the classifier")
    p.add_argument("--graph", default=None, help="edge-list file")
    p.add_argument("--dag", default=None, help="layered-dag file (alternative input)")
    p.add_argument("--save-net", default=None, help="write a net snapshot (.npz)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("dataset", parents=[common, train_common],
                       help="build a record file over many graphs")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--mix", default="ws=0.5,ba=0.5")
    p.add_argument("--profile", choices=tuple(PROFILES), default="mini")
    p.add_argument("--n-min", type=int, default=None)
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--csv", default=None, help="also export feature/accuracy CSV")
    p.add_argument("--keep-partial", action="store_true")
    p.add_argument("--timings", action="store_true",
                   help="record wall time per record (breaks byte-reproducibility)")
    p.set_defaults(func=cmd_dataset)

    p = sub.add_parser("fit", parents=[common], help="estimator study on a record file")
    p.add_argument("--dataset", required=True)
    p.add_argument("--estimators", default=",".join(ESTIMATOR_TAGS))
    p.add_argument("--sets", default=",".join(FEATURE_SETS))
    p.add_argument("--repetitions", type=int, default=20)
    p.add_argument("--train-ratio", type=float, default=0.7)
    p.add_argument("--target", choices=("test", "val"), default="test")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("report", parents=[common], help="plot-ready tables from a record file")
    p.add_argument("--dataset", required=True)
    p.add_argument("--kind", choices=("histogram", "jointplot", "table2"), required=True)
    p.add_argument("--feature", default="number_edges")
    p.add_argument("--target", default="test_accuracy")
    p.add_argument("--bins", type=int, default=30)
    p.add_argument("--svg", action="store_true")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "dataset" and not args.out:
            raise _UsageError("dataset requires --out FILE")
        if args.command == "train" and not (args.graph or args.dag):
            raise _UsageError("train requires --graph or --dag")
        _print_digest(args)
        return args.func(args)
    except _UsageError as exc:
        print(f"sparsenet: error kind=usage msg={exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except (ValueError, KeyError) as exc:
        print(f"sparsenet: error kind=usage msg={exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FormatError, StructureError, FileNotFoundError) as exc:
        print(f"sparsenet: error kind=data msg={exc}", file=sys.stderr)
        return EXIT_DATA
    except (GenerationError, EmbeddingError, TrainingDivergedError, FittingError) as exc:
        print(f"sparsenet: error kind=numeric msg={exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except SparsenetError as exc:
        print(f"sparsenet: error kind=data msg={exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
