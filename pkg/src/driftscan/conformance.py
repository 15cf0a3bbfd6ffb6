"""Lightweight conformance metrics tracked by the detector.

``rt_fitness`` is the fraction of window traces that replay completely on the
net. ``pc_precision`` is ``1 - |OLP - DFR| / |OLP|``: the share of the model's
one-length paths that still show up as directly-follows pairs in the window.
It tracks *changes* in precision rather than precision itself.
"""

from __future__ import annotations

from collections.abc import Iterable

from ._validation import as_activity_sequences
from .event_log import extract_dfr
from .exceptions import DegenerateModelError
from .petri_net import DEFAULT_REPLAY_BUDGET, PetriNet, extract_olp, is_replayable

__all__ = ["rt_fitness", "pc_precision", "precision_from_sets"]


def rt_fitness(window: Iterable, net: PetriNet, budget: int = DEFAULT_REPLAY_BUDGET) -> float:
    traces = as_activity_sequences(window)
    if not traces:
        raise ValueError("fitness of an empty window is undefined")
    ok = sum(is_replayable(net, t, budget) for t in traces)
    return ok / len(traces)


def precision_from_sets(olp, dfr) -> float:
    if not olp:
        raise DegenerateModelError("model has no one-length paths")
    return 1.0 - len(olp - dfr) / len(olp)


def pc_precision(window: Iterable, net: PetriNet) -> float:
    traces = as_activity_sequences(window)
    if not traces:
        raise ValueError("precision of an empty window is undefined")
    return precision_from_sets(extract_olp(net), extract_dfr(traces))
