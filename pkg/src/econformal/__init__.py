"""E-test-statistic conformal prediction with a Hoeffding correction.

Calibrate once on a held-out score sample, persist the summary, and reuse it
for any number of future prediction sets with a quantified confidence that
the coverage guarantee survives the reuse.
"""

from econformal.data_model import (
    DatasetFormatError,
    LabeledProbabilityDataset,
    ProbabilityRecord,
    ROW_SUM_TOLERANCE,
    SplitSpec,
    load_dataset,
    parse_dataset,
    save_dataset,
    serialize_dataset,
    split_dataset,
)
from econformal.evaluation import EvaluationReport, evaluate, parse_report, render_report
from econformal.hoeffding import (
    HoeffdingParams,
    correction_for_confidence,
    failure_probability,
    mean_upper_bound,
    reuse_confidence,
    upper_tail_bound,
)
from econformal.nonconformity import (
    DEFAULT_BOUNDS,
    DEFAULT_MEASURE,
    NegativeTrueClassProbability,
    NonconformityMeasure,
    ScoreBounds,
    empirical_mean,
    score_all_labels,
    score_dataset,
    score_true,
)
from econformal.prediction import (
    CalibrationSummary,
    PredictionSet,
    SummaryFormatError,
    calibrate,
    load_summary,
    parse_summary,
    predict_set,
    render_summary,
    save_summary,
    threshold,
)
from econformal.simulation import (
    Beta,
    SimulationConfig,
    SimulationResult,
    TwoPoint,
    Uniform01,
    parse_distribution,
    run_simulation,
    true_mean,
)

__version__ = "0.1.0"
