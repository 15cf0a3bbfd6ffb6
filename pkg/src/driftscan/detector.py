"""Sudden control-flow drift detection over a sliding window of traces.

A reference net is discovered from the first window of each epoch. The window
then slides one trace at a time; replay fitness and precision-change values are
collected per window, and each new value is classified as a drift candidate
when the regression over the last ``n // 2`` values has a significant slope
(or is flat and the previous window was already a candidate). A drift is
confirmed once the last ``n`` windows are candidates for either metric; the
current window index is reported and a new epoch starts there.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from collections.abc import Sequence
from dataclasses import asdict, dataclass, field

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import INTEGRAL, REAL, check_log, check_scalar
from .conformance import precision_from_sets
from .discovery import discover
from .event_log import EventLog, trace_dfr
from .exceptions import InputTooSmallError
from .petri_net import DEFAULT_REPLAY_BUDGET, extract_olp, is_replayable
from .stats import slope_test

__all__ = [
    "DetectorConfig",
    "WindowMeasurement",
    "DriftReport",
    "identify_drift",
    "confirm_drift",
    "detect",
    "ConformanceDriftDetector",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DetectorConfig:
    window_size: int
    p_threshold: float = 0.05
    replay_budget: int = DEFAULT_REPLAY_BUDGET

    def __post_init__(self):
        check_scalar(self.window_size, "window_size", INTEGRAL, min_val=4)
        check_scalar(self.p_threshold, "p_threshold", REAL, min_val=0, max_val=1, include_min=False)
        check_scalar(self.replay_budget, "replay_budget", INTEGRAL, min_val=1)


@dataclass(frozen=True)
class WindowMeasurement:
    window_start: int
    fitness: float
    precision: float
    cand_fitness: bool
    cand_precision: bool
    epoch: int = 0


@dataclass
class DriftReport:
    config: DetectorConfig
    drift_indices: list[int]
    series: list[WindowMeasurement] = field(default_factory=list)
    log_size: int | None = None

    def to_dict(self) -> dict:
        return {
            "config": asdict(self.config),
            "log_size": self.log_size,
            "drift_indices": list(self.drift_indices),
            "series": [asdict(m) for m in self.series],
        }

    def to_json(self, **kwargs) -> str:
        kwargs.setdefault("indent", 2)
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> DriftReport:
        return cls(
            config=DetectorConfig(**data["config"]),
            drift_indices=[int(d) for d in data["drift_indices"]],
            series=[WindowMeasurement(**m) for m in data.get("series", [])],
            log_size=data.get("log_size"),
        )

    @classmethod
    def from_json(cls, text: str) -> DriftReport:
        return cls.from_dict(json.loads(text))

    def series_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["window_start", "fitness", "precision"])
        for m in self.series:
            w.writerow([m.window_start, repr(m.fitness), repr(m.precision)])
        return buf.getvalue()


def identify_drift(
    n: int, data: Sequence[float], prior_flags: Sequence[bool], p_threshold: float = 0.05
) -> bool:
    """Candidate test for the newest value of ``data``."""
    if not len(data) > n / 2:
        return False
    fit = slope_test(data[-max(2, n // 2):])
    falling = fit.slope < 0 and fit.p_value < p_threshold
    rising = fit.slope > 0 and fit.p_value < p_threshold
    flat = not falling and not rising
    previous = bool(prior_flags[-1]) if len(prior_flags) else False
    return falling or rising or (flat and previous)


def confirm_drift(n: int, flags_fitness: Sequence[bool], flags_precision: Sequence[bool]) -> bool:
    def streak(flags):
        return len(flags) >= n and all(flags[len(flags) - n:])

    return streak(flags_fitness) or streak(flags_precision)


def detect(log, config: DetectorConfig) -> DriftReport:
    log = check_log(log)
    n, size = config.window_size, len(log)
    if size <= n:
        raise InputTooSmallError(f"log has {size} traces; need more than the window size {n}")
    acts = [t.activities for t in log]
    dfrs = [trace_dfr(a) for a in acts]
    budget, p_thr = config.replay_budget, config.p_threshold

    drifts: list[int] = []
    series: list[WindowMeasurement] = []
    i, epoch = 0, 0
    while i <= size - n:
        fitness, precision, cand_f, cand_p = [], [], [], []
        net = discover(acts[i:i + n])
        olp = extract_olp(net)
        logger.debug("epoch %d: reference window at %d, %d OLP pairs", epoch, i, len(olp))
        while i <= size - n and not confirm_drift(n, cand_f, cand_p):
            window = acts[i:i + n]
            f = sum(is_replayable(net, t, budget) for t in window) / n
            p = precision_from_sets(olp, frozenset().union(*dfrs[i:i + n]))
            fitness.append(f)
            precision.append(p)
            cand_f.append(identify_drift(n, fitness, cand_f, p_thr))
            cand_p.append(identify_drift(n, precision, cand_p, p_thr))
            series.append(WindowMeasurement(i, f, p, cand_f[-1], cand_p[-1], epoch))
            i += 1
        if confirm_drift(n, cand_f, cand_p):
            logger.info("drift confirmed at trace %d", i)
            drifts.append(i)
        epoch += 1
    return DriftReport(config, drifts, series, size)


class ConformanceDriftDetector(BaseEstimator):
    """Estimator front-end to :func:`detect`.

    Parameters
    ----------
    window_size : int, default=100
        Traces per window; also the reference-window size and the length of the
        candidate streak needed for confirmation.
    p_threshold : float, default=0.05
        Significance level of the slope test.
    replay_budget : int, default=10000
        Maximum distinct markings explored when replaying one trace.

    Attributes
    ----------
    drift_indices_ : list of int
    report_ : DriftReport
    """

    def __init__(self, window_size=100, p_threshold=0.05, replay_budget=DEFAULT_REPLAY_BUDGET):
        self.window_size = window_size
        self.p_threshold = p_threshold
        self.replay_budget = replay_budget

    def fit(self, X, y=None):
        config = DetectorConfig(self.window_size, self.p_threshold, self.replay_budget)
        self.report_ = detect(check_log(X), config)
        self.drift_indices_ = list(self.report_.drift_indices)
        return self

    def fit_predict(self, X, y=None):
        return self.fit(X).drift_indices_

    def transform(self, X=None):
        """Per-window (fitness, precision) pairs of the last fit."""
        check_is_fitted(self, "report_")
        return [(m.fitness, m.precision) for m in self.report_.series]

    def score(self, X, y, epsilon=None):
        """F-score of the detections on ``X`` against true change indices ``y``.

        ``epsilon`` defaults to 5% of the log size.
        """
        from .evaluation import GroundTruth, classify

        log = X if isinstance(X, EventLog) else check_log(X)
        if epsilon is None:
            epsilon = round(0.05 * len(log))
        detections = self.fit_predict(log)
        return classify(detections, GroundTruth(list(y), epsilon)).f_score
