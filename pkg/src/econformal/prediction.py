"""Calibrate once, predict many times.

A calibration run reduces the score sample to a small summary (n, mean, t,
bounds, reuse confidence). Prediction sets for any later instance come from a
Markov-style cutoff on that summary: include class k whenever its score is at
most (mean + t) / alpha_tilde. With probability reuse_confidence the summary
over-estimates the true score mean, and then every future set misses its true
label with probability at most alpha_tilde.

The guarantee is marginal, never per-instance; alpha_tilde is supplied per
prediction call so one persisted summary can serve many queries at different
levels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from econformal import hoeffding
from econformal.data_model import validate_probability_vector
from econformal.formatting import sig9
from econformal.nonconformity import (
    DEFAULT_BOUNDS,
    ScoreBounds,
    empirical_mean,
    score_all_labels,
)

SUMMARY_FORMAT_VERSION = 1
_SUMMARY_KEYS = ("n", "empirical_mean", "t", "a", "b", "reuse_confidence",
                 "format_version")


class SummaryFormatError(ValueError):
    """A persisted calibration summary is malformed or inconsistent."""


@dataclass(frozen=True)
class CalibrationSummary:
    """Everything prediction needs after the raw calibration scores are gone."""

    n: int
    empirical_mean: float
    t: float
    score_bounds: ScoreBounds
    reuse_confidence: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        if not (math.isfinite(self.t) and self.t >= 0.0):
            raise ValueError(f"correction t must be finite and >= 0, got {self.t}")
        if not self.score_bounds.a <= self.empirical_mean <= self.score_bounds.b:
            raise ValueError(
                f"empirical mean {sig9(self.empirical_mean)} outside score bounds"
            )
        expected = hoeffding.reuse_confidence(self.n, self.t, self.score_bounds.spread)
        if not math.isclose(self.reuse_confidence, expected, rel_tol=1e-12, abs_tol=1e-12):
            raise ValueError(
                f"reuse confidence {self.reuse_confidence!r} inconsistent with "
                f"(n={self.n}, t={self.t}); expected {expected!r}"
            )


@dataclass(frozen=True)
class PredictionSet:
    """Class indices whose score passed the cutoff for one instance."""

    labels: tuple[int, ...]
    threshold_used: float
    alpha_tilde: float

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(sorted(int(k) for k in self.labels)))

    def __contains__(self, k: int) -> bool:
        return int(k) in self.labels

    def __len__(self) -> int:
        return len(self.labels)


def calibrate(
    scores: Sequence[float] | np.ndarray,
    t: float,
    bounds: ScoreBounds = DEFAULT_BOUNDS,
) -> CalibrationSummary:
    """Summarize one calibration sample for indefinite reuse.

    Every score must lie inside ``bounds``; the correction t is taken as
    given (use hoeffding.correction_for_confidence to derive it from a target
    confidence).
    """
    scores = np.asarray(scores, dtype=np.float64)
    if scores.size == 0:
        raise ValueError("cannot calibrate on an empty score vector")
    bounds.check(scores)
    return CalibrationSummary(
        n=int(scores.size),
        empirical_mean=empirical_mean(scores),
        t=float(t),
        score_bounds=bounds,
        reuse_confidence=hoeffding.reuse_confidence(int(scores.size), float(t), bounds.spread),
    )


def threshold(summary: CalibrationSummary, alpha_tilde: float) -> float:
    """Score cutoff (mean + t) / alpha_tilde for set inclusion.

    Not clamped: a value at or above the score upper bound simply means every
    class gets included, the honest output when the bound is vacuous.
    """
    if not (math.isfinite(alpha_tilde) and 0.0 < alpha_tilde < 1.0):
        raise ValueError(f"alpha_tilde must lie in (0, 1), got {alpha_tilde}")
    return hoeffding.mean_upper_bound(summary.empirical_mean, summary.t) / alpha_tilde


def predict_set(
    probs, summary: CalibrationSummary, alpha_tilde: float
) -> PredictionSet:
    """Labels whose non-conformity is at or below the cutoff (ties included).

    The summary carries no class count, so a K mismatch between calibration
    and query data is undetectable here; callers must keep K consistent.
    """
    probs = np.asarray(probs, dtype=np.float64)
    validate_probability_vector(probs)
    cutoff = threshold(summary, alpha_tilde)
    scores = score_all_labels(probs)
    labels = tuple(int(k) for k in np.nonzero(scores <= cutoff)[0])
    return PredictionSet(labels=labels, threshold_used=cutoff, alpha_tilde=alpha_tilde)


def render_summary(summary: CalibrationSummary) -> str:
    """Persist as `key = value` lines; this file is the reusable artifact."""
    lines = [
        f"n = {summary.n}",
        f"empirical_mean = {sig9(summary.empirical_mean)}",
        f"t = {sig9(summary.t)}",
        f"a = {sig9(summary.score_bounds.a)}",
        f"b = {sig9(summary.score_bounds.b)}",
        f"reuse_confidence = {sig9(summary.reuse_confidence)}",
        f"format_version = {SUMMARY_FORMAT_VERSION}",
    ]
    return "\n".join(lines) + "\n"


def parse_summary(text: str) -> CalibrationSummary:
    """Read a persisted summary back, re-deriving the exact reuse confidence.

    Values are stored at 9 significant digits, so the confidence is recomputed
    from (n, t, a, b) and the stored copy only cross-checked against it; a
    disagreement beyond rounding means the file was edited or corrupted.
    """
    values: dict[str, str] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise SummaryFormatError(f"expected `key = value` at line {line_no}")
        values[key.strip()] = value.strip()
    missing = [k for k in _SUMMARY_KEYS if k not in values]
    if missing:
        raise SummaryFormatError(f"missing keys: {', '.join(missing)}")
    try:
        version = int(values["format_version"])
        n = int(values["n"])
        mean = float(values["empirical_mean"])
        t = float(values["t"])
        a = float(values["a"])
        b = float(values["b"])
        stored_confidence = float(values["reuse_confidence"])
    except ValueError as exc:
        raise SummaryFormatError(f"bad numeric value: {exc}") from exc
    if version != SUMMARY_FORMAT_VERSION:
        raise SummaryFormatError(f"unsupported format_version {version}")
    try:
        bounds = ScoreBounds(a, b)
        exact_confidence = hoeffding.reuse_confidence(n, t, bounds.spread)
        if not math.isclose(stored_confidence, exact_confidence, rel_tol=1e-6, abs_tol=1e-6):
            raise SummaryFormatError(
                f"stored reuse confidence {stored_confidence!r} inconsistent "
                f"with n={n}, t={t}, bounds [{a}, {b}]"
            )
        return CalibrationSummary(
            n=n, empirical_mean=mean, t=t, score_bounds=bounds,
            reuse_confidence=exact_confidence,
        )
    except SummaryFormatError:
        raise
    except ValueError as exc:
        raise SummaryFormatError(str(exc)) from exc


def save_summary(summary: CalibrationSummary, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_summary(summary))


def load_summary(path) -> CalibrationSummary:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_summary(fh.read())
