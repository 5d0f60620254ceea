"""forge: the command-line driver.

Thin client over the package: every subcommand parses flags, calls the
library, and prints machine-parseable output (plain lines or JSON) on
stdout. Diagnostics go to stderr. Exit codes: 1 for validation errors,
2 for I/O errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from .arena import BattleConfig, run_battle
from .complexity import build_report
from .data import DataError, Dataset, IdxFormatError, load_idx_batch, split_80_20, synthetic_blobs
from .dsl import ParseFailure, parse
from .engine import GraphDataError, NumericOverflowError, TrainConfig
from .graph import ValidationFailure, node_count, validate
from .metrics import chip_rating, export_csv
from .training import TrainingSession

EXIT_VALIDATION = 1
EXIT_IO = 2


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _read_file(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return f.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_IO)


def _load_graph(path: str):
    text = _read_file(path)
    try:
        spec = parse(text)
        return validate(spec)
    except ParseFailure as exc:
        lines = [f"{path}:{e.line}:{e.column}: {e.category}: {e.message}" for e in exc.errors]
        raise CliError("\n".join(lines), EXIT_VALIDATION)
    except ValidationFailure as exc:
        lines = [f"{path}: {e.category}({e.name}): {e.message}" for e in exc.errors]
        raise CliError("\n".join(lines), EXIT_VALIDATION)


def _parse_synthetic(text: str) -> dict:
    """Parse "n=10,dim=64,m=100,spread=0.15[,seed=42]" into kwargs."""
    out = {}
    for part in text.split(","):
        if not part:
            continue
        try:
            key, value = part.split("=", 1)
        except ValueError:
            raise CliError(f"bad --synthetic entry '{part}', expected key=value", EXIT_VALIDATION)
        out[key.strip()] = value.strip()
    kwargs = {}
    try:
        if "n" in out:
            kwargs["n_classes"] = int(out.pop("n"))
        if "dim" in out:
            kwargs["dim"] = int(out.pop("dim"))
        if "m" in out:
            kwargs["m_per_class"] = int(out.pop("m"))
        if "spread" in out:
            kwargs["spread"] = float(out.pop("spread"))
        if "seed" in out:
            kwargs["seed"] = int(out.pop("seed"))
    except ValueError as exc:
        raise CliError(f"bad --synthetic value: {exc}", EXIT_VALIDATION)
    if out:
        raise CliError(f"unknown --synthetic keys: {', '.join(sorted(out))}", EXIT_VALIDATION)
    return kwargs


def _build_dataset(args, default_seed: int) -> Dataset:
    if args.synthetic is not None:
        kwargs = _parse_synthetic(args.synthetic)
        kwargs.setdefault("seed", default_seed)
        try:
            return synthetic_blobs(**kwargs)
        except DataError as exc:
            raise CliError(str(exc), EXIT_VALIDATION)
    if args.idx_images is None or args.idx_labels is None:
        raise CliError("pass either --synthetic or both --idx-images and --idx-labels", EXIT_VALIDATION)
    try:
        train = load_idx_batch(args.idx_images, args.idx_labels, args.classes)
        if args.idx_test_images and args.idx_test_labels:
            test = load_idx_batch(args.idx_test_images, args.idx_test_labels, args.classes)
        else:
            # no held-out files: carve a round-robin 80/20 split
            train, test = split_80_20(train.images, train.labels)
        return Dataset(train=train, test=test, n_classes=args.classes, dim=train.images.shape[1])
    except OSError as exc:
        raise CliError(str(exc), EXIT_IO)
    except (IdxFormatError, DataError) as exc:
        raise CliError(str(exc), EXIT_VALIDATION)


def _train_config(args) -> TrainConfig:
    try:
        return TrainConfig(
            batch_size=args.batch,
            learning_rate=args.lr,
            steps=args.steps,
            seed=args.seed,
            eval_interval=args.eval_every,
            eval_batch_size=args.eval_batch,
        )
    except ValueError as exc:
        raise CliError(str(exc), EXIT_VALIDATION)


def _add_dataset_flags(sub):
    sub.add_argument("--synthetic", metavar="K=V,...", help="blob dataset, e.g. n=10,dim=64,m=100,spread=0.15")
    sub.add_argument("--idx-images", help="IDX training image file")
    sub.add_argument("--idx-labels", help="IDX training label file")
    sub.add_argument("--idx-test-images", help="IDX test image file (else 80/20 split)")
    sub.add_argument("--idx-test-labels", help="IDX test label file")
    sub.add_argument("--classes", type=int, default=10, help="class count for IDX labels")


def _add_train_flags(sub):
    sub.add_argument("--batch", type=int, default=100)
    sub.add_argument("--lr", type=float, default=0.5)
    sub.add_argument("--steps", type=int, default=1000)
    sub.add_argument("--seed", type=int, default=42)
    sub.add_argument("--eval-every", type=int, default=20)
    sub.add_argument("--eval-batch", type=int, default=100)


def cmd_parse(args) -> int:
    graph = _load_graph(args.file)
    print(f"{node_count(graph.spec)} nodes")
    spec = graph.spec
    for name in [d.name for d in spec.inputs] + [p.name for p in spec.params] + [n.name for n in graph.topo_nodes]:
        print(f"{name} {graph.shapes[name]}")
    return 0


def cmd_train(args) -> int:
    graph = _load_graph(args.graph)
    config = _train_config(args)
    dataset = _build_dataset(args, default_seed=args.seed)
    try:
        session = TrainingSession(graph, config, dataset)
        session.run_all()
        final = session.final_eval()
    except GraphDataError as exc:
        raise CliError(str(exc), EXIT_VALIDATION)
    except NumericOverflowError as exc:
        raise CliError(f"numeric overflow: {exc}", EXIT_VALIDATION)
    try:
        with open(args.out, "w", encoding="utf-8", newline="") as f:
            f.write(export_csv(session.snapshot()))
    except OSError as exc:
        raise CliError(f"cannot write {args.out}: {exc}", EXIT_IO)
    print(f"accuracy {final.accuracy:.6f}")
    print(f"infoacc {chip_rating(final.infoacc)}")
    return 0


def cmd_battle(args) -> int:
    graph_a = _load_graph(args.graph_a)
    graph_b = _load_graph(args.graph_b)
    config = BattleConfig(
        train_config=_train_config(args),
        dataset_id=args.synthetic if args.synthetic else f"idx:{args.idx_images}",
    )
    dataset = _build_dataset(args, default_seed=args.seed)
    try:
        result = run_battle(graph_a, graph_b, dataset, config)
    except (GraphDataError, DataError) as exc:
        raise CliError(str(exc), EXIT_VALIDATION)
    except NumericOverflowError as exc:
        raise CliError(f"numeric overflow: {exc}", EXIT_VALIDATION)
    print(json.dumps(result.to_dict(), sort_keys=True))
    return 0


def cmd_complexity(args) -> int:
    graph = _load_graph(args.graph)
    reference = _load_graph(args.ncd).spec if args.ncd else None
    print(json.dumps(build_report(graph, reference=reference).to_dict(), sort_keys=True))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="forge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="validate a .graph file and print its shape table")
    p.add_argument("file")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("train", help="train a graph and export the metric curve as CSV")
    p.add_argument("--graph", required=True)
    _add_dataset_flags(p)
    _add_train_flags(p)
    p.add_argument("--out", required=True, help="CSV output path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("battle", help="train two graphs under one budget and print the result")
    p.add_argument("graph_a")
    p.add_argument("graph_b")
    _add_dataset_flags(p)
    _add_train_flags(p)
    p.set_defaults(func=cmd_battle)

    p = sub.add_parser("complexity", help="print the complexity report for a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--ncd", help="second graph for the similarity distance")
    p.set_defaults(func=cmd_complexity)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(str(exc), file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
