"""Input validation helpers shared by the estimators and module functions."""

from __future__ import annotations

import numbers
from collections.abc import Iterable

from .event_log import EventLog, SlidingWindow, Trace


def as_activity_sequences(X: Iterable) -> list[tuple[str, ...]]:
    """Normalise a log, window, or iterable of traces / label sequences to a
    list of label tuples."""
    if isinstance(X, (str, bytes)):
        raise TypeError("expected a collection of traces, got a string")
    out = []
    for t in X:
        if isinstance(t, Trace):
            out.append(t.activities)
        elif isinstance(t, str):
            raise TypeError(
                "expected traces or sequences of activity labels, got a bare string"
            )
        else:
            seq = tuple(t)
            for a in seq:
                if not isinstance(a, str) or not a:
                    raise TypeError(f"activity labels must be nonempty strings, got {a!r}")
            out.append(seq)
    return out


def check_log(X) -> EventLog:
    """Coerce to :class:`EventLog`; plain label sequences get ids ``case_<k>``."""
    if isinstance(X, EventLog):
        return X
    if isinstance(X, SlidingWindow):
        return EventLog(X.traces)
    items = list(X)
    if all(isinstance(t, Trace) for t in items):
        return EventLog(items)
    return EventLog.from_activities(as_activity_sequences(items))


def check_scalar(x, name, target_type, min_val=None, max_val=None, include_min=True):
    if isinstance(x, bool) or not isinstance(x, target_type):
        raise TypeError(f"{name} must be {target_type}, got {type(x).__name__}")
    if min_val is not None:
        if x < min_val or (x == min_val and not include_min):
            raise ValueError(f"{name} == {x}, must be {'>=' if include_min else '>'} {min_val}")
    if max_val is not None and x > max_val:
        raise ValueError(f"{name} == {x}, must be <= {max_val}")
    return x


INTEGRAL = numbers.Integral
REAL = numbers.Real
