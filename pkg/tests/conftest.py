import numpy as np
import pytest

from econformal.data_model import LabeledProbabilityDataset, ProbabilityRecord
from econformal.nonconformity import ScoreBounds
from econformal.prediction import CalibrationSummary
from econformal.hoeffding import reuse_confidence


def make_dataset(seed: int, n: int, k: int, class_names=None) -> LabeledProbabilityDataset:
    """Synthetic dataset: dirichlet probability rows, random labels."""
    rng = np.random.default_rng(seed)
    probs = rng.dirichlet(np.ones(k), size=n)
    labels = rng.integers(0, k, size=n)
    records = tuple(
        ProbabilityRecord(probs=probs[i], label=int(labels[i])) for i in range(n)
    )
    return LabeledProbabilityDataset(records=records, num_classes=k,
                                     class_names=class_names)


def make_summary(n: int, mean: float, t: float) -> CalibrationSummary:
    return CalibrationSummary(
        n=n,
        empirical_mean=mean,
        t=t,
        score_bounds=ScoreBounds(0.0, 1.0),
        reuse_confidence=reuse_confidence(n, t, 1.0),
    )


@pytest.fixture
def reference_summary() -> CalibrationSummary:
    """A worked CIFAR-10-style calibration: n=5000, mean 0.15795493, t=1/50."""
    return make_summary(5000, 0.15795493, 0.02)
