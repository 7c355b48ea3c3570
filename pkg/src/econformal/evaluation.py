"""Score prediction sets over a labeled test split.

Coverage counts true-label membership through the same predict_set used in
production; empty sets exist (size-0 bucket) and count as miscoverage.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from econformal.data_model import LabeledProbabilityDataset
from econformal.formatting import kv_line, lossless, sig9
from econformal.prediction import CalibrationSummary, predict_set, threshold

_KV_RE = re.compile(r"^#kv\s+(\w+)\s*=\s*(.*)$")


@dataclass(frozen=True)
class EvaluationReport:
    """Coverage, set-size histogram, and summary statistics for one split."""

    num_instances: int
    coverage: float
    size_histogram: dict[int, int]
    mean_set_size: float
    alpha_tilde: float
    threshold: float

    def __post_init__(self):
        if self.num_instances < 1:
            raise ValueError("report needs at least one instance")
        sizes = sorted(self.size_histogram)
        if sizes != list(range(len(sizes))) or sizes[0] != 0:
            raise ValueError("histogram must cover contiguous sizes 0..K")
        total = sum(self.size_histogram.values())
        if total != self.num_instances:
            raise ValueError(
                f"histogram total {total} != num_instances {self.num_instances}"
            )
        weighted = sum(s * c for s, c in self.size_histogram.items())
        if self.mean_set_size != weighted / self.num_instances:
            raise ValueError("mean_set_size inconsistent with histogram")
        hits = self.coverage * self.num_instances
        if abs(hits - round(hits)) > 1e-6:
            raise ValueError("coverage * num_instances must be an integer")


def evaluate(
    test: LabeledProbabilityDataset,
    summary: CalibrationSummary,
    alpha_tilde: float,
) -> EvaluationReport:
    """Deterministic coverage report for one test split at one alpha_tilde."""
    if len(test) == 0:
        raise ValueError("cannot evaluate an empty test set")
    histogram = {size: 0 for size in range(test.num_classes + 1)}
    hits = 0
    for record in test.records:
        pset = predict_set(record.probs, summary, alpha_tilde)
        histogram[len(pset)] += 1
        if record.label in pset:
            hits += 1
    n = len(test)
    weighted = sum(s * c for s, c in histogram.items())
    return EvaluationReport(
        num_instances=n,
        coverage=hits / n,
        size_histogram=histogram,
        mean_set_size=weighted / n,
        alpha_tilde=alpha_tilde,
        threshold=threshold(summary, alpha_tilde),
    )


def render_report(report: EvaluationReport) -> str:
    """Fixed-layout text table plus machine-readable `#kv` lines.

    The table stops at the largest observed set size; the `#kv` histogram
    carries every bucket 0..K so parse_report restores the report exactly.
    """
    max_observed = max(
        (s for s, c in report.size_histogram.items() if c > 0), default=0
    )
    width = len(str(max(report.size_histogram.values(), default=0)))
    lines = ["set size  count"]
    for size in range(max_observed + 1):
        lines.append(f"{size:>8}  {report.size_histogram[size]:>{width}}")
    lines.append(f"coverage = {sig9(report.coverage)}")
    lines.append(f"mean set size = {sig9(report.mean_set_size)}")
    lines.append(f"alpha_tilde = {sig9(report.alpha_tilde)}")
    lines.append(f"threshold = {sig9(report.threshold)}")
    lines.append(kv_line("num_instances", report.num_instances, machine=True))
    lines.append(kv_line("coverage", report.coverage, machine=True))
    lines.append(kv_line("mean_set_size", report.mean_set_size, machine=True))
    lines.append(kv_line("alpha_tilde", report.alpha_tilde, machine=True))
    lines.append(kv_line("threshold", report.threshold, machine=True))
    histogram = ",".join(
        f"{size}:{count}" for size, count in sorted(report.size_histogram.items())
    )
    lines.append(f"#kv size_histogram = {histogram}")
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> EvaluationReport:
    """Rebuild a report from the `#kv` lines render_report emitted."""
    values: dict[str, str] = {}
    for line in text.splitlines():
        match = _KV_RE.match(line)
        if match:
            values[match.group(1)] = match.group(2).strip()
    required = ("num_instances", "coverage", "mean_set_size", "alpha_tilde",
                "threshold", "size_histogram")
    missing = [k for k in required if k not in values]
    if missing:
        raise ValueError(f"report text missing #kv keys: {', '.join(missing)}")
    histogram = {}
    for pair in values["size_histogram"].split(","):
        size_text, _, count_text = pair.partition(":")
        histogram[int(size_text)] = int(count_text)
    return EvaluationReport(
        num_instances=int(values["num_instances"]),
        coverage=float(values["coverage"]),
        size_histogram=histogram,
        mean_set_size=float(values["mean_set_size"]),
        alpha_tilde=float(values["alpha_tilde"]),
        threshold=float(values["threshold"]),
    )
