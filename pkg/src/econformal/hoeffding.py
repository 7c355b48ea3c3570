"""Hoeffding tail bounds for the calibration-score mean.

For n independent scores bounded in an interval of width ``score_range``,
each one-sided deviation of the sample mean from the true mean by t or more
has probability at most exp(-2 n t^2 / score_range^2). The lower tail is the
one that matters here: it bounds the chance that the sample mean plus t fails
to dominate the true mean, which is exactly the event that breaks calibration
reuse. The bound assumes independent draws, which is slightly stronger than
the exchangeability needed by the conformal guarantee itself; we use it as
stated and note the gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


def _validate(n: int, t: float, score_range: float) -> None:
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    if not (math.isfinite(t) and t >= 0.0):
        raise ValueError(f"correction t must be finite and >= 0, got {t}")
    if not (math.isfinite(score_range) and score_range > 0.0):
        raise ValueError(f"score range must be finite and positive, got {score_range}")


def _exponent(n: int, t: float, score_range: float) -> float:
    return 2.0 * n * t * t / (score_range * score_range)


def failure_probability(n: int, t: float, score_range: float = 1.0) -> float:
    """Bound on P(sample mean + t < true mean): exp(-2 n t^2 / range^2).

    This is the lower-tail inequality, the probability that one calibration
    draw is too optimistic to be reused. Always in (0, 1]; equals 1 at t = 0.
    """
    _validate(n, t, score_range)
    return math.exp(-_exponent(n, t, score_range))


def upper_tail_bound(n: int, t: float, score_range: float = 1.0) -> float:
    """Bound on P(sample mean - true mean >= t); same value as the lower tail.

    Not used by the threshold rule; exposed for symmetry and testing.
    """
    return failure_probability(n, t, score_range)


def reuse_confidence(n: int, t: float, score_range: float = 1.0) -> float:
    """1 - failure_probability, computed via expm1 to survive tiny exponents."""
    _validate(n, t, score_range)
    return -math.expm1(-_exponent(n, t, score_range))


def correction_for_confidence(n: int, confidence: float, score_range: float = 1.0) -> float:
    """Invert the tail bound: smallest t giving the requested reuse confidence.

    t = range * sqrt(ln(1/(1-confidence)) / (2n)). Round-trips through
    failure_probability to within 1e-12 relative error.
    """
    if not (math.isfinite(confidence) and 0.0 < confidence < 1.0):
        raise ValueError(f"confidence must lie in (0, 1), got {confidence}")
    _validate(n, 0.0, score_range)
    log_inv = -math.log1p(-confidence)
    return score_range * math.sqrt(log_inv / (2.0 * n))


def mean_upper_bound(empirical_mean: float, t: float) -> float:
    """High-probability upper bound on the true mean: empirical mean + t.

    Deliberately not clamped to the score bounds; a vacuous bound above b
    simply saturates the downstream threshold.
    """
    if not (math.isfinite(t) and t >= 0.0):
        raise ValueError(f"correction t must be finite and >= 0, got {t}")
    return empirical_mean + t


@dataclass(frozen=True)
class HoeffdingParams:
    """The (n, t, range) triple that fixes both tail bounds."""

    n: int
    t: float
    score_range: float = 1.0

    def __post_init__(self):
        _validate(self.n, self.t, self.score_range)

    @property
    def failure_probability(self) -> float:
        return failure_probability(self.n, self.t, self.score_range)

    @property
    def reuse_confidence(self) -> float:
        return reuse_confidence(self.n, self.t, self.score_range)

    @classmethod
    def from_confidence(
        cls, n: int, confidence: float, score_range: float = 1.0
    ) -> "HoeffdingParams":
        return cls(n=n, t=correction_for_confidence(n, confidence, score_range),
                   score_range=score_range)
