"""Inductive Miner (basic variant) over the directly-follows graph.

The miner only looks at which directly-follows edges exist, never at their
frequencies, so traces are deduplicated before recursion. Cut precedence is
exclusive choice, sequence, parallel, loop. When no cut applies the log is
first tried as a silent-redo loop (split at end->start boundaries) and then
falls back to a flower model.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import as_activity_sequences
from .petri_net import PetriNet, is_replayable
from .process_tree import Operator, ProcessTree, leaf, loop, tau, to_petri_net

__all__ = ["Dfg", "build_dfg", "mine_tree", "discover", "InductiveMiner"]


@dataclass(frozen=True)
class Dfg:
    activities: frozenset[str]
    edges: Mapping[tuple[str, str], int] = field(default_factory=dict)
    start_activities: Mapping[str, int] = field(default_factory=dict)
    end_activities: Mapping[str, int] = field(default_factory=dict)

    def successors(self) -> dict[str, set[str]]:
        out = {a: set() for a in self.activities}
        for a, b in self.edges:
            out[a].add(b)
        return out


def build_dfg(traces: Iterable) -> Dfg:
    """Directly-follows graph of a window, a log, or plain activity sequences."""
    edges, starts, ends = Counter(), Counter(), Counter()
    acts = set()
    for t in as_activity_sequences(traces):
        if not t:
            continue
        acts.update(t)
        starts[t[0]] += 1
        ends[t[-1]] += 1
        edges.update(zip(t, t[1:]))
    return Dfg(frozenset(acts), dict(edges), dict(starts), dict(ends))


# ---------------------------------------------------------------------------
# graph helpers

def _components(nodes, adjacent) -> list[frozenset[str]]:
    """Connected components; ``adjacent(a, b)`` is a symmetric predicate."""
    nodes = sorted(nodes)
    seen, comps = set(), []
    for n in nodes:
        if n in seen:
            continue
        comp, todo = {n}, [n]
        seen.add(n)
        while todo:
            x = todo.pop()
            for y in nodes:
                if y not in seen and adjacent(x, y):
                    seen.add(y)
                    comp.add(y)
                    todo.append(y)
        comps.append(frozenset(comp))
    return comps


def _reachability(dfg: Dfg) -> dict[str, set[str]]:
    succ = dfg.successors()
    reach = {}
    for a in dfg.activities:
        seen, todo = set(), list(succ[a])
        while todo:
            x = todo.pop()
            if x not in seen:
                seen.add(x)
                todo.extend(succ[x])
        reach[a] = seen
    return reach


def _by_min(groups):
    return sorted(groups, key=min)


# ---------------------------------------------------------------------------
# cut detection

def _xor_cut(dfg: Dfg):
    edges = dfg.edges
    comps = _components(dfg.activities, lambda a, b: (a, b) in edges or (b, a) in edges)
    return _by_min(comps) if len(comps) > 1 else None


def _sequence_cut(dfg: Dfg):
    reach = _reachability(dfg)
    groups = [set(c) for c in _components(
        dfg.activities, lambda a, b: b in reach[a] and a in reach[b]
    )]

    def before(g, h):
        return all(b in reach[a] and a not in reach[b] for a in g for b in h)

    merged = True
    while merged and len(groups) > 1:
        merged = False
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                g, h = groups[i], groups[j]
                if not before(g, h) and not before(h, g):
                    groups[i] = g | h
                    del groups[j]
                    merged = True
                    break
            if merged:
                break
    if len(groups) < 2:
        return None
    # pairwise ordered now; count predecessors to sort
    rank = {
        id(g): sum(before(h, g) for h in groups if h is not g) for g in groups
    }
    return [frozenset(g) for g in sorted(groups, key=lambda g: rank[id(g)])]


def _parallel_cut(dfg: Dfg):
    edges = dfg.edges
    comps = _components(
        dfg.activities, lambda a, b: not ((a, b) in edges and (b, a) in edges)
    )
    if len(comps) < 2:
        return None
    for c in comps:
        if not (c & dfg.start_activities.keys()) or not (c & dfg.end_activities.keys()):
            return None
    return _by_min(comps)


def _loop_cut(dfg: Dfg):
    start = set(dfg.start_activities)
    end = set(dfg.end_activities)
    body = start | end
    rest = dfg.activities - body
    if not rest:
        return None
    edges = dfg.edges
    comps = _components(rest, lambda a, b: (a, b) in edges or (b, a) in edges)
    redo = []
    for c in comps:
        into_body = {(x, y) for (x, y) in edges if x in c and y in body}
        from_body = {(x, y) for (x, y) in edges if y in c and x in body}
        ok = all(y in start for _, y in into_body) and all(x in end for x, _ in from_body)
        if ok:
            exits = {x for x, _ in from_body}
            entries = {y for _, y in into_body}
            # every end activity must be able to enter the redo part, and the redo
            # part must be able to return to every start activity
            ok = exits == end and entries == start
        if ok:
            redo.append(c)
        else:
            body |= c
    if not redo:
        return None
    return [frozenset(body), *_by_min(redo)]


# ---------------------------------------------------------------------------
# log splitting

def _split_xor(log, groups):
    subs = [[] for _ in groups]
    for t in log:
        for k, g in enumerate(groups):
            if t[0] in g:
                subs[k].append(t)
                break
    return subs


def _split_project(log, groups):
    return [[tuple(a for a in t if a in g) for t in log] for g in groups]


def _split_loop(log, groups):
    owner = {a: k for k, g in enumerate(groups) for a in g}
    subs = [[] for _ in groups]
    for t in log:
        cur, seg = owner[t[0]], []
        for a in t:
            k = owner[a]
            if k != cur:
                subs[cur].append(tuple(seg))
                cur, seg = k, []
            seg.append(a)
        subs[cur].append(tuple(seg))
    return subs


def _split_tau_loop(log, start, end):
    out, changed = [], False
    for t in log:
        seg = [t[0]]
        for prev, a in zip(t, t[1:]):
            if prev in end and a in start:
                out.append(tuple(seg))
                seg = []
                changed = True
            seg.append(a)
        out.append(tuple(seg))
    return out if changed else None


# ---------------------------------------------------------------------------
# recursion

_CUTS = (
    (Operator.XOR, _xor_cut, _split_xor),
    (Operator.SEQUENCE, _sequence_cut, _split_project),
    (Operator.PARALLEL, _parallel_cut, _split_project),
    (Operator.LOOP, _loop_cut, _split_loop),
)


def _node(op: Operator, children) -> ProcessTree:
    flat = []
    for c in children:
        if op is not Operator.LOOP and c.operator is op:
            flat.extend(c.children)
        else:
            flat.append(c)
    if op in (Operator.XOR, Operator.PARALLEL):
        flat.sort(key=lambda c: (c.min_label(), str(c)))
    elif op is Operator.LOOP:
        flat[1:] = sorted(flat[1:], key=lambda c: (c.min_label(), str(c)))
    return ProcessTree(op, tuple(flat))


def _flower(acts) -> ProcessTree:
    acts = sorted(acts)
    if len(acts) == 1:
        return loop(leaf(acts[0]), tau())
    return loop(ProcessTree(Operator.XOR, tuple(leaf(a) for a in acts)), tau())


def _mine(log: list[tuple[str, ...]]) -> ProcessTree:
    log = sorted(set(log))
    nonempty = [t for t in log if t]
    if not nonempty:
        return tau()
    if len(nonempty) < len(log):
        return _node(Operator.XOR, [tau(), _mine(nonempty)])
    acts = set().union(*nonempty)
    if len(acts) == 1:
        a = next(iter(acts))
        if all(len(t) == 1 for t in nonempty):
            return leaf(a)
        return loop(leaf(a), tau())
    dfg = build_dfg(nonempty)
    for op, find, split in _CUTS:
        groups = find(dfg)
        if groups:
            return _node(op, [_mine(s) for s in split(nonempty, groups)])
    parts = _split_tau_loop(nonempty, set(dfg.start_activities), set(dfg.end_activities))
    if parts is not None:
        return loop(_mine(parts), tau())
    return _flower(acts)


def mine_tree(traces: Iterable) -> ProcessTree:
    """Process tree discovered from a window, log or list of activity sequences."""
    log = as_activity_sequences(traces)
    if not log:
        raise ValueError("cannot discover a model from an empty window")
    return _mine(log)


def discover(window: Iterable) -> PetriNet:
    return to_petri_net(mine_tree(window))


class InductiveMiner(BaseEstimator):
    """Estimator wrapper: ``fit`` stores ``tree_`` and ``net_``."""

    def fit(self, X, y=None):
        self.tree_ = mine_tree(X)
        self.net_ = to_petri_net(self.tree_)
        return self

    def transform(self, X):
        """Per-trace replayability on the fitted net, as a boolean list."""
        check_is_fitted(self, "net_")
        return [is_replayable(self.net_, t) for t in as_activity_sequences(X)]
