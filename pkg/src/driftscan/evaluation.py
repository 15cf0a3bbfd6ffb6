"""Scoring detections against known change points.

A detection ``d`` is a true positive for change ``c`` when ``|d - c| <= epsilon``
and no earlier detection already matched ``c``. Everything else is a false
positive; changes left unmatched are false negatives.
"""

from __future__ import annotations

import csv
import io
import json
from collections.abc import Sequence
from dataclasses import dataclass, field

from .exceptions import ConfigurationError

__all__ = ["GroundTruth", "EvalResult", "classify", "fscore", "default_epsilon", "CSV_COLUMNS"]

CSV_COLUMNS = ("log", "pattern", "n", "tp", "fp", "fn", "precision", "recall", "fscore", "mean_delay")


def default_epsilon(log_size: int, pct: float = 5.0) -> int:
    return int(round(log_size * pct / 100.0))


@dataclass(frozen=True)
class GroundTruth:
    changes: tuple[int, ...]
    epsilon: int

    def __post_init__(self):
        changes = tuple(int(c) for c in self.changes)
        object.__setattr__(self, "changes", changes)
        if self.epsilon < 0:
            raise ConfigurationError("epsilon must be >= 0")
        for a, b in zip(changes, changes[1:]):
            if b <= a:
                raise ConfigurationError("true change indices must be strictly increasing")
            # neighbourhoods may touch at one boundary index, not overlap further
            if 2 * self.epsilon > b - a:
                raise ConfigurationError(
                    f"neighbourhoods of changes {a} and {b} overlap with epsilon={self.epsilon}"
                )

    def neighbourhood(self, change: int) -> tuple[int, int]:
        return change - self.epsilon, change + self.epsilon

    def to_json(self) -> str:
        return json.dumps({"changes": list(self.changes), "epsilon": self.epsilon}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str, epsilon: int | None = None) -> GroundTruth:
        data = json.loads(text)
        eps = data.get("epsilon", 0) if epsilon is None else epsilon
        return cls(tuple(data["changes"]), int(eps))


@dataclass(frozen=True)
class EvalResult:
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f_score: float
    delays: tuple[int, ...] = field(default_factory=tuple)

    @property
    def mean_delay(self) -> float | None:
        return sum(self.delays) / len(self.delays) if self.delays else None

    def to_dict(self) -> dict:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "precision": self.precision,
            "recall": self.recall,
            "fscore": self.f_score,
            "delays": list(self.delays),
            "mean_delay": self.mean_delay,
        }

    def csv_row(self, log="", pattern="", n="") -> str:
        buf = io.StringIO()
        delay = "" if self.mean_delay is None else repr(self.mean_delay)
        csv.writer(buf, lineterminator="\n").writerow(
            [log, pattern, n, self.tp, self.fp, self.fn,
             repr(self.precision), repr(self.recall), repr(self.f_score), delay]
        )
        return buf.getvalue()


def fscore(tp: int, fp: int, fn: int) -> float:
    if min(tp, fp, fn) < 0:
        raise ValueError("counts must be nonnegative")
    if tp == 0:
        return 0.0
    precision = tp / (tp + fp)
    recall = tp / (tp + fn)
    return 2 * precision * recall / (precision + recall)


def classify(detections: Sequence[int], truth: GroundTruth) -> EvalResult:
    matched: dict[int, int] = {}
    tp = fp = 0
    for d in sorted(int(x) for x in detections):
        hit = next(
            (c for c in truth.changes if abs(d - c) <= truth.epsilon and c not in matched),
            None,
        )
        if hit is None:
            fp += 1
        else:
            matched[hit] = d
            tp += 1
    fn = len(truth.changes) - tp
    delays = tuple(abs(matched[c] - c) for c in truth.changes if c in matched)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    return EvalResult(tp, fp, fn, precision, recall, fscore(tp, fp, fn), delays)
