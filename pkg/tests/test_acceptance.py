"""Acceptance gate: one test per release criterion, each at its stated
tolerance, printing one pass/fail line. Run with `pytest tests/test_acceptance.py -v -s`.
"""

import math
import re
import time

import numpy as np
import pytest
from scipy.stats import binom

from econformal.cli import main
from econformal.data_model import save_dataset
from econformal.evaluation import evaluate
from econformal.hoeffding import correction_for_confidence, failure_probability
from econformal.prediction import calibrate, predict_set, threshold
from econformal.simulation import Beta, SimulationConfig, TwoPoint, run_simulation

from conftest import make_dataset, make_summary

EXP_NEG_4 = 0.01831563888873418


def check(name: str, condition: bool, detail: str = ""):
    status = "PASS" if condition else "FAIL"
    suffix = f"  [{detail}]" if detail else ""
    print(f"[acceptance] {name}: {status}{suffix}")
    assert condition, f"{name}: {detail}"


@pytest.fixture(scope="module")
def beta_simulation():
    """Shared 10,000-trial Beta(2,8) run used by two criteria."""
    config = SimulationConfig(n=5000, t=0.02, alpha_tilde=0.2, num_trials=10_000,
                              distribution=Beta(2.0, 8.0), seed=20250809)
    start = time.perf_counter()
    result = run_simulation(config)
    elapsed = time.perf_counter() - start
    return config, result, elapsed


def test_hoeffding_arithmetic(capsys):
    code = main(["hoeffding", "--n", "5000", "--t", "0.02", "--range", "1"])
    out = capsys.readouterr().out
    with capsys.disabled():
        match = re.search(r"^confidence = (\S+)$", out, re.MULTILINE)
        printed = float(match.group(1)) if match else math.nan
        ok = code == 0 and abs(printed - 0.981684361) <= 1e-6
        check("hoeffding-arithmetic", ok, f"printed confidence {printed}")


def test_threshold_reproduction():
    summary = make_summary(5000, 0.15795493, 0.02)
    cutoff = threshold(summary, 0.2)
    check("threshold-reproduction", abs(cutoff - 0.88977465) <= 1e-6,
          f"threshold {cutoff!r}")


def test_hoeffding_reuse_simulation(beta_simulation):
    config, result, elapsed = beta_simulation
    bound = EXP_NEG_4
    limit = bound + 3.0 * math.sqrt(bound * (1 - bound) / config.num_trials)
    ok = result.reuse_failure_rate <= limit and elapsed < 60.0
    check("hoeffding-reuse-simulation", ok,
          f"rate {result.reuse_failure_rate}, limit {limit:.6f} (<= 0.0224), "
          f"{elapsed:.1f}s")


def test_coverage_bound_simulation(beta_simulation):
    config, result, elapsed_beta = beta_simulation
    level = config.alpha_tilde + EXP_NEG_4
    limit = level + 3.0 * math.sqrt(level * (1 - level) / config.num_trials)
    beta_ok = result.joint_miscoverage_rate <= limit

    two_point = SimulationConfig(n=5000, t=0.02, alpha_tilde=0.2, num_trials=10_000,
                                 distribution=TwoPoint(0.9, 0.0, 1.0), seed=31337)
    start = time.perf_counter()
    tp_result = run_simulation(two_point)
    elapsed = time.perf_counter() - start
    boundary = math.ceil(two_point.n * (two_point.alpha_tilde - two_point.t)) - 1
    oracle = 0.1 * float(binom.cdf(boundary, two_point.n, 0.1))
    se = math.sqrt(oracle * (1 - oracle) / two_point.num_trials)
    tp_ok = abs(tp_result.joint_miscoverage_rate - oracle) <= 3 * se

    ok = beta_ok and tp_ok and elapsed < 60.0 and elapsed_beta < 60.0
    check("coverage-bound-simulation", ok,
          f"beta joint {result.joint_miscoverage_rate} <= {limit:.4f} (~0.231); "
          f"two-point joint {tp_result.joint_miscoverage_rate} vs oracle "
          f"{oracle:.6f} +/- {3 * se:.6f}; {elapsed:.1f}s")


def test_inverse_round_trip():
    rng = np.random.default_rng(918273)
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(10, 10**6 + 1))
        confidence = float(rng.uniform(1e-6, 1 - 1e-6))
        score_range = float(rng.uniform(0.1, 10.0))
        t = correction_for_confidence(n, confidence, score_range)
        back = failure_probability(n, t, score_range)
        worst = max(worst, abs(back - (1 - confidence)) / (1 - confidence))
    check("inverse-round-trip", worst <= 1e-12, f"worst relative error {worst:.3e}")


def test_oracle_equivalence():
    summary = make_summary(5000, 0.15795493, 0.02)
    rng = np.random.default_rng(5150)
    alphas = (0.1, 0.2, 0.35, 0.5)
    sets_ok = True
    for i in range(1000):
        probs = rng.dirichlet(np.ones(10))
        alpha = alphas[i % len(alphas)]
        cutoff = threshold(summary, alpha)
        brute = tuple(k for k in range(10) if 1.0 - probs[k] <= cutoff)
        if predict_set(probs, summary, alpha).labels != brute:
            sets_ok = False
            break

    test_set = make_dataset(seed=5151, n=1000, k=10)
    report = evaluate(test_set, summary, 0.2)
    cutoff = threshold(summary, 0.2)
    hits = 0
    for record in test_set.records:
        members = [k for k in range(10) if 1.0 - record.probs[k] <= cutoff]
        hits += record.label in members
    coverage_ok = report.coverage == hits / 1000

    check("oracle-equivalence", sets_ok and coverage_ok,
          f"1000 instances; evaluate coverage {report.coverage} vs loop {hits / 1000}")


def _spread_out_test_set(seed: int, n: int, k: int):
    """True-class probabilities uniform on [0, 1], so the three alpha levels
    land their thresholds at genuinely different coverages."""
    from econformal.data_model import LabeledProbabilityDataset, ProbabilityRecord

    rng = np.random.default_rng(seed)
    records = []
    for _ in range(n):
        label = int(rng.integers(0, k))
        p_true = float(rng.random())
        probs = np.full(k, (1.0 - p_true) / (k - 1))
        probs[label] = p_true
        records.append(ProbabilityRecord(probs=probs, label=label))
    return LabeledProbabilityDataset(records=tuple(records), num_classes=k)


def test_monotonicity_suite():
    # mean + t = 0.15 puts the cutoffs at 0.3, 0.75, 1.5 across the alphas
    summary = make_summary(2000, 0.13, 0.02)
    test_set = _spread_out_test_set(seed=641, n=500, k=10)
    alphas = (0.5, 0.2, 0.1)

    nested = True
    for record in test_set.records:
        sets = [set(predict_set(record.probs, summary, a).labels) for a in alphas]
        if not (sets[0] <= sets[1] <= sets[2]):
            nested = False
            break

    reports = [evaluate(test_set, summary, a) for a in alphas]
    coverage_ok = all(b.coverage >= a.coverage for a, b in zip(reports, reports[1:]))
    size_ok = all(b.mean_set_size >= a.mean_set_size
                  for a, b in zip(reports, reports[1:]))
    distinct = len({r.coverage for r in reports}) >= 2  # guard against a vacuous pass
    check("monotonicity-suite", nested and coverage_ok and size_ok and distinct,
          f"coverages {[r.coverage for r in reports]}")


def test_cli_determinism(tmp_path, capsys):
    data_path = tmp_path / "data.csv"
    save_dataset(make_dataset(seed=99, n=300, k=10), data_path)
    summary_path = tmp_path / "s.txt"

    # each subcommand reruns with byte-for-byte identical argv
    commands = {
        "split": (["split", "--input", str(data_path), "--fraction", "0.5",
                   "--seed", "11", "--out-calib", str(tmp_path / "c.csv"),
                   "--out-test", str(tmp_path / "t.csv")],
                  [tmp_path / "c.csv", tmp_path / "t.csv"]),
        "calibrate": (["calibrate", "--calib", str(data_path), "--t", "0.02",
                       "--out-summary", str(summary_path)], [summary_path]),
        "predict": (["predict", "--input", str(data_path),
                     "--summary", str(summary_path), "--alpha-tilde", "0.2",
                     "--out", str(tmp_path / "p.csv")], [tmp_path / "p.csv"]),
        "evaluate": (["evaluate", "--input", str(data_path),
                      "--summary", str(summary_path), "--alpha-tilde", "0.2",
                      "--out", str(tmp_path / "r.txt")], [tmp_path / "r.txt"]),
        "hoeffding": (["hoeffding", "--n", "5000", "--t", "0.02"], []),
        "simulate": (["simulate", "--n", "200", "--t", "0.05",
                      "--alpha-tilde", "0.2", "--trials", "300",
                      "--dist", "beta(2,8)", "--seed", "5"], []),
    }
    order = ["split", "calibrate", "predict", "evaluate", "hoeffding", "simulate"]
    mismatched = []
    for name in order:
        argv, files = commands[name]
        observed = []
        for _ in range(2):
            code = main(argv)
            stdout = capsys.readouterr().out
            assert code == 0, f"{name} failed"
            observed.append((stdout, [f.read_bytes() for f in files]))
        if observed[0] != observed[1]:
            mismatched.append(name)

    with capsys.disabled():
        check("cli-determinism", not mismatched,
              f"byte-identical reruns for {', '.join(order)}"
              + (f"; mismatches: {mismatched}" if mismatched else ""))
