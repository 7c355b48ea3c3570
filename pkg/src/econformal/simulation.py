"""Monte Carlo harness for the two probabilistic claims behind the method.

Each trial draws a fresh calibration sample of n scores from a known bounded
distribution, calibrates, thresholds at alpha_tilde, then draws one more
score as the "new instance". Three events are counted exactly:

  reuse failure         sample mean + t < true mean
  joint miscoverage     fresh score > threshold
  conditional miscoverage  same, restricted to trials where reuse held

The harness verifies bounds, not tightness: the Hoeffding bound is valid for
every bounded distribution, so the three shipped families (each with a
closed-form mean, making the reuse event exactly decidable) are enough to
catch a broken inequality. Conditional miscoverage is reported but never
asserted against alpha_tilde; only the joint reading has an unambiguous
guarantee.

Trial i uses its own Philox stream seeded by SeedSequence(seed, spawn_key=(i,)),
so trials are order-independent and could run on a worker pool.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from econformal import hoeffding
from econformal.formatting import kv_line
from econformal.nonconformity import DEFAULT_BOUNDS
from econformal.prediction import calibrate, threshold


@dataclass(frozen=True)
class Uniform01:
    """Uniform scores on [0, 1]; true mean 1/2."""

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.random(size)

    @property
    def mean(self) -> float:
        return 0.5

    def spec_string(self) -> str:
        return "uniform01"


@dataclass(frozen=True)
class Beta:
    """Beta(alpha, beta) scores, support [0, 1]; true mean alpha/(alpha+beta)."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0.0 and self.beta > 0.0):
            raise ValueError("beta shape parameters must be positive")

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.beta(self.alpha, self.beta, size)

    @property
    def mean(self) -> float:
        return self.alpha / (self.alpha + self.beta)

    def spec_string(self) -> str:
        return f"beta({self.alpha:g},{self.beta:g})"


@dataclass(frozen=True)
class TwoPoint:
    """Score v1 with probability p, v2 otherwise; mean p*v1 + (1-p)*v2."""

    p: float
    v1: float
    v2: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        for v in (self.v1, self.v2):
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"support value {v} outside [0, 1]")

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.where(rng.random(size) < self.p, self.v1, self.v2)

    @property
    def mean(self) -> float:
        return self.p * self.v1 + (1.0 - self.p) * self.v2

    def spec_string(self) -> str:
        return f"two-point({self.p:g},{self.v1:g},{self.v2:g})"


ScoreDistribution = Union[Uniform01, Beta, TwoPoint]

_BETA_RE = re.compile(r"^beta\(\s*([^,()\s]+)\s*,\s*([^,()\s]+)\s*\)$")
_TWO_POINT_RE = re.compile(
    r"^two-point\(\s*([^,()\s]+)\s*,\s*([^,()\s]+)\s*,\s*([^,()\s]+)\s*\)$"
)


def parse_distribution(tag: str) -> ScoreDistribution:
    """Parse `uniform01`, `beta(a,b)`, or `two-point(p,v1,v2)`."""
    tag = tag.strip()
    if tag == "uniform01":
        return Uniform01()
    match = _BETA_RE.match(tag)
    if match:
        return Beta(alpha=float(match.group(1)), beta=float(match.group(2)))
    match = _TWO_POINT_RE.match(tag)
    if match:
        return TwoPoint(p=float(match.group(1)), v1=float(match.group(2)),
                        v2=float(match.group(3)))
    raise ValueError(f"unknown distribution {tag!r}")


def true_mean(distribution: ScoreDistribution) -> float:
    """Closed-form mean of a score distribution."""
    return distribution.mean


@dataclass(frozen=True)
class SimulationConfig:
    n: int
    t: float
    alpha_tilde: float
    num_trials: int
    distribution: ScoreDistribution
    seed: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        if not (math.isfinite(self.t) and self.t >= 0.0):
            raise ValueError(f"correction t must be finite and >= 0, got {self.t}")
        if not 0.0 < self.alpha_tilde < 1.0:
            raise ValueError(f"alpha_tilde must lie in (0, 1), got {self.alpha_tilde}")
        if self.num_trials < 1:
            raise ValueError(f"num_trials must be positive, got {self.num_trials}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class SimulationResult:
    """Exact event counts over num_trials, expressed as rates."""

    reuse_failure_rate: float
    joint_miscoverage_rate: float
    conditional_miscoverage_rate: float
    hoeffding_bound: float
    alpha_tilde: float
    num_trials: int


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(seed, spawn_key=(trial,)))
    )


def run_simulation(config: SimulationConfig) -> SimulationResult:
    """Count reuse failures and miscoverage over independent seeded trials.

    Deterministic given (config, seed): rerunning yields a bit-identical
    result. When no trial satisfies the reuse event (possible only at tiny
    trial counts), the conditional rate is reported as 0.0.
    """
    dist = config.distribution
    mu = true_mean(dist)
    reuse_failures = 0
    joint_misses = 0
    held_trials = 0
    held_misses = 0
    for trial in range(config.num_trials):
        rng = _trial_rng(config.seed, trial)
        scores = dist.sample(rng, config.n)
        summary = calibrate(scores, config.t, DEFAULT_BOUNDS)
        cutoff = threshold(summary, config.alpha_tilde)
        fresh = float(dist.sample(rng, 1)[0])
        reuse_held = summary.empirical_mean + config.t >= mu
        missed = fresh > cutoff
        if not reuse_held:
            reuse_failures += 1
        if missed:
            joint_misses += 1
        if reuse_held:
            held_trials += 1
            if missed:
                held_misses += 1
    return SimulationResult(
        reuse_failure_rate=reuse_failures / config.num_trials,
        joint_miscoverage_rate=joint_misses / config.num_trials,
        conditional_miscoverage_rate=(held_misses / held_trials) if held_trials else 0.0,
        hoeffding_bound=hoeffding.failure_probability(config.n, config.t, 1.0),
        alpha_tilde=config.alpha_tilde,
        num_trials=config.num_trials,
    )


def render_result(result: SimulationResult) -> str:
    """SimulationResult as `#kv` lines (lossless float text)."""
    lines = [
        kv_line("reuse_failure_rate", result.reuse_failure_rate, machine=True),
        kv_line("joint_miscoverage_rate", result.joint_miscoverage_rate, machine=True),
        kv_line("conditional_miscoverage_rate", result.conditional_miscoverage_rate,
                machine=True),
        kv_line("hoeffding_bound", result.hoeffding_bound, machine=True),
        kv_line("alpha_tilde", result.alpha_tilde, machine=True),
        kv_line("num_trials", result.num_trials, machine=True),
    ]
    return "\n".join(lines) + "\n"
