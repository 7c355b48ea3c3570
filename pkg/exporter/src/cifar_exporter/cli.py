"""CLI: train the CIFAR-10 model and export probset-csv probabilities."""

import argparse
import sys


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cifar-export", description=__doc__)
    parser.add_argument("--epochs", required=True, type=int,
                        help="training epochs (the reference run used 50)")
    parser.add_argument("--seed", required=True, type=int,
                        help="framework random seed")
    parser.add_argument("--limit", type=int, default=None,
                        help="cap on exported test rows (default: all 10000)")
    parser.add_argument("--out", required=True, help="output probset-csv path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    from cifar_exporter.export import DatasetUnavailableError, ExportConfig, train_and_export

    try:
        config = ExportConfig(epochs=args.epochs, seed=args.seed,
                              output_path=args.out, limit=args.limit)
    except ValueError as exc:
        print(f"cifar-export: error: {exc}", file=sys.stderr)
        return 1
    try:
        train_and_export(config)
    except DatasetUnavailableError as exc:
        print(f"cifar-export: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"cifar-export: i/o error: {exc}", file=sys.stderr)
        return 3
    return 0


def run() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    run()
