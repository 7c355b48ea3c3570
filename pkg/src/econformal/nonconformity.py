"""Non-conformity scores: how strange a labeled instance looks to the model.

The shipped measure is 1 minus the predicted probability of the candidate
class, bounded in [0, 1]. The measure interface keeps its score bounds
explicit because the concentration bound downstream needs the width b - a.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol, Sequence, runtime_checkable

import numpy as np

from econformal.data_model import LabeledProbabilityDataset, ProbabilityRecord
from econformal.formatting import sig9


@dataclass(frozen=True)
class ScoreBounds:
    """Closed interval [a, b] that every emitted score must fall in."""

    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError("score bounds must be finite")
        if not self.a < self.b:
            raise ValueError(f"need a < b, got [{self.a}, {self.b}]")

    @property
    def spread(self) -> float:
        return self.b - self.a

    def check(self, scores: np.ndarray) -> None:
        """Raise if any score falls outside [a, b]; run on every batch."""
        scores = np.asarray(scores, dtype=np.float64)
        if not np.all(np.isfinite(scores)):
            raise ValueError("scores contain non-finite values")
        if np.any(scores < self.a) or np.any(scores > self.b):
            bad = scores[(scores < self.a) | (scores > self.b)][0]
            raise ValueError(
                f"score {sig9(float(bad))} outside bounds [{sig9(self.a)}, {sig9(self.b)}]"
            )


DEFAULT_BOUNDS = ScoreBounds(0.0, 1.0)


@runtime_checkable
class NonconformityMeasure(Protocol):
    """Record-to-score interface; implementations declare their bounds."""

    bounds: ScoreBounds

    def score_true(self, record: ProbabilityRecord) -> float: ...

    def score_all_labels(self, probs) -> np.ndarray: ...


class NegativeTrueClassProbability:
    """The default measure: score(x, y) = 1 - p(y | x)."""

    bounds = DEFAULT_BOUNDS

    def score_true(self, record: ProbabilityRecord) -> float:
        return float(1.0 - record.probs[record.label])

    def score_all_labels(self, probs) -> np.ndarray:
        probs = np.asarray(probs, dtype=np.float64)
        return 1.0 - probs


DEFAULT_MEASURE = NegativeTrueClassProbability()


def score_true(record: ProbabilityRecord) -> float:
    """1 minus the predicted probability of the record's true class."""
    return DEFAULT_MEASURE.score_true(record)


def score_all_labels(probs) -> np.ndarray:
    """Score every candidate class of one probability vector at once."""
    return DEFAULT_MEASURE.score_all_labels(probs)


def score_dataset(
    dataset: LabeledProbabilityDataset,
    measure: NonconformityMeasure = DEFAULT_MEASURE,
) -> np.ndarray:
    """True-class scores for every record, bounds-checked as a batch."""
    scores = np.array([measure.score_true(r) for r in dataset.records])
    measure.bounds.check(scores)
    return scores


def empirical_mean(scores: Sequence[float] | np.ndarray) -> float:
    """Arithmetic mean via exact compensated summation (math.fsum).

    Order-independent by construction; naive accumulation loses digits that
    matter in the threshold's fourth decimal once n reaches a few thousand.
    """
    scores = np.asarray(scores, dtype=np.float64)
    if scores.size == 0:
        raise ValueError("empirical mean of an empty score vector")
    return math.fsum(scores.tolist()) / scores.size
