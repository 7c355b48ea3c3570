"""Command-line entry point.

Subcommands: split, calibrate, predict, evaluate, hoeffding, simulate.
Every run involving randomness takes an explicit --seed (no wall-clock
defaults), so rerunning any subcommand with identical flags reproduces its
output byte for byte. Numeric output is printed with 9 significant digits.

Exit codes: 0 success, 1 usage, 2 data validation, 3 I/O.
"""

from __future__ import annotations

import argparse
import sys

from econformal import hoeffding
from econformal.data_model import (
    DatasetFormatError,
    SplitSpec,
    load_dataset,
    save_dataset,
    split_dataset,
)
from econformal.evaluation import evaluate, render_report
from econformal.formatting import sig9
from econformal.nonconformity import score_dataset
from econformal.prediction import (
    SummaryFormatError,
    calibrate,
    load_summary,
    predict_set,
    save_summary,
    threshold,
)
from econformal.simulation import (
    SimulationConfig,
    parse_distribution,
    render_result,
    run_simulation,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_IO = 3


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1 instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fraction(text: str) -> float:
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError("must lie in (0, 1)")
    return value


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("must be an unsigned 64-bit integer")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _nonnegative_float(text: str) -> float:
    value = float(text)
    if value < 0.0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if value <= 0.0:
        raise argparse.ArgumentTypeError("must be > 0")
    return value


def _distribution(text: str):
    try:
        return parse_distribution(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _write_text(path, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def cmd_split(args) -> int:
    data = load_dataset(args.input)
    calib, test = split_dataset(
        data, SplitSpec(calibration_fraction=args.fraction, seed=args.seed)
    )
    save_dataset(calib, args.out_calib)
    save_dataset(test, args.out_test)
    print(f"calibration: {len(calib)} records -> {args.out_calib}")
    print(f"test: {len(test)} records -> {args.out_test}")
    return EXIT_OK


def cmd_calibrate(args) -> int:
    data = load_dataset(args.calib)
    if len(data) == 0:
        raise DatasetFormatError("calibration file contains no records")
    scores = score_dataset(data)
    if args.t is not None:
        t = args.t
    else:
        t = hoeffding.correction_for_confidence(len(scores), args.confidence)
    summary = calibrate(scores, t)
    save_summary(summary, args.out_summary)
    print(f"n = {summary.n}")
    print(f"empirical_mean = {sig9(summary.empirical_mean)}")
    print(f"t = {sig9(summary.t)}")
    print(f"reuse_confidence = {sig9(summary.reuse_confidence)}")
    return EXIT_OK


def cmd_predict(args) -> int:
    data = load_dataset(args.input)
    summary = load_summary(args.summary)
    cutoff = threshold(summary, args.alpha_tilde)
    lines = [
        f"# alpha_tilde = {sig9(args.alpha_tilde)}",
        f"# threshold = {sig9(cutoff)}",
        "index,threshold,set_size,labels",
    ]
    for index, record in enumerate(data.records):
        pset = predict_set(record.probs, summary, args.alpha_tilde)
        labels = ";".join(str(k) for k in pset.labels)
        lines.append(f"{index},{sig9(cutoff)},{len(pset)},{labels}")
    _write_text(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    data = load_dataset(args.input)
    summary = load_summary(args.summary)
    report = evaluate(data, summary, args.alpha_tilde)
    _write_text(args.out, render_report(report))
    return EXIT_OK


def cmd_hoeffding(args) -> int:
    if args.t is not None:
        t = args.t
    else:
        t = hoeffding.correction_for_confidence(args.n, args.confidence, args.range)
    print(f"n = {args.n}")
    print(f"range = {sig9(args.range)}")
    print(f"t = {sig9(t)}")
    print(f"failure_probability = {sig9(hoeffding.failure_probability(args.n, t, args.range))}")
    print(f"confidence = {sig9(hoeffding.reuse_confidence(args.n, t, args.range))}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    config = SimulationConfig(
        n=args.n,
        t=args.t,
        alpha_tilde=args.alpha_tilde,
        num_trials=args.trials,
        distribution=args.dist,
        seed=args.seed,
    )
    result = run_simulation(config)
    print(f"# n = {config.n}")
    print(f"# t = {sig9(config.t)}")
    print(f"# dist = {config.distribution.spec_string()}")
    print(f"# seed = {config.seed}")
    sys.stdout.write(render_result(result))
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="econformal", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("split", parents=[], help="randomly split a probset-csv file",
                       description="Split one probset-csv file into calibration and test files.")
    p.add_argument("--input", required=True)
    p.add_argument("--fraction", required=True, type=_fraction,
                   help="calibration share of the records, in (0, 1)")
    p.add_argument("--seed", required=True, type=_seed)
    p.add_argument("--out-calib", required=True)
    p.add_argument("--out-test", required=True)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("calibrate", help="summarize calibration scores",
                       description="Score a calibration file and persist the reusable summary.")
    p.add_argument("--calib", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--t", type=_nonnegative_float)
    group.add_argument("--confidence", type=_fraction)
    p.add_argument("--out-summary", required=True)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("predict", help="prediction sets for each input row",
                       description="One output line per instance: index,threshold,set_size,labels.")
    p.add_argument("--input", required=True)
    p.add_argument("--summary", required=True)
    p.add_argument("--alpha-tilde", required=True, type=_fraction)
    p.add_argument("--out")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="coverage and set-size report",
                       description="Evaluate prediction sets against the true labels of a test file.")
    p.add_argument("--input", required=True)
    p.add_argument("--summary", required=True)
    p.add_argument("--alpha-tilde", required=True, type=_fraction)
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("hoeffding", help="tail bound arithmetic",
                       description="Convert between the correction t and the reuse confidence.")
    p.add_argument("--n", required=True, type=_positive_int)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--t", type=_nonnegative_float)
    group.add_argument("--confidence", type=_fraction)
    p.add_argument("--range", type=_positive_float, default=1.0,
                   help="score range b - a (default 1)")
    p.set_defaults(func=cmd_hoeffding)

    p = sub.add_parser("simulate", help="Monte Carlo bound verification",
                       description="Measure reuse failure and miscoverage rates over seeded trials.")
    p.add_argument("--n", required=True, type=_positive_int)
    p.add_argument("--t", required=True, type=_nonnegative_float)
    p.add_argument("--alpha-tilde", required=True, type=_fraction)
    p.add_argument("--trials", required=True, type=_positive_int)
    p.add_argument("--dist", required=True, type=_distribution,
                   help="uniform01 | beta(a,b) | two-point(p,v1,v2)")
    p.add_argument("--seed", required=True, type=_seed)
    p.set_defaults(func=cmd_simulate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DatasetFormatError, SummaryFormatError, ValueError) as exc:
        print(f"econformal: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"econformal: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


def run() -> None:
    """Console-script shim."""
    raise SystemExit(main())


if __name__ == "__main__":
    run()
